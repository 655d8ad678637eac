#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <thread>

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/parallel_invoke.h>
#include <tbb/task_arena.h>

namespace fizi {

// Runs per-row kernels over [0, height). Kernels must only write the rows
// they are handed, so any partition gives the same bytes as a serial pass.
class RowExecutor {
public:
    // Inline, single-threaded execution.
    RowExecutor() = default;

    explicit RowExecutor(int workers) : workers_(std::max(1, workers)) {
        if (workers_ > 1) {
            // Allow more workers than cores when asked for explicitly.
            if (static_cast<unsigned>(workers_) > std::thread::hardware_concurrency())
                limit_ = std::make_shared<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                               static_cast<std::size_t>(workers_));
            arena_ = std::make_shared<tbb::task_arena>(workers_);
        }
    }

    static RowExecutor hardware() {
        return RowExecutor(static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
    }

    int workers() const { return workers_; }

    // fn(row_begin, row_end)
    template <typename Fn>
    void for_rows(int height, Fn&& fn) const {
        if (height <= 0) return;
        if (!arena_) {
            fn(0, height);
            return;
        }
        const int grain = std::max(1, height / (workers_ * 4));
        arena_->execute([&] {
            tbb::parallel_for(tbb::blocked_range<int>(0, height, grain),
                              [&](const tbb::blocked_range<int>& r) { fn(r.begin(), r.end()); });
        });
    }

    template <typename... Fns>
    void invoke(Fns&&... fns) const {
        if (!arena_) {
            (fns(), ...);
            return;
        }
        arena_->execute([&] { tbb::parallel_invoke(fns...); });
    }

private:
    int workers_ = 1;
    std::shared_ptr<tbb::global_control> limit_;
    std::shared_ptr<tbb::task_arena> arena_;
};

}  // namespace fizi
