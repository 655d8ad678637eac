#pragma once

// Top-level entry points behind the CLI: the frame loop driver, background
// learning and single-frame masking.

#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fizi/background.hpp"
#include "fizi/error.hpp"
#include "fizi/executor.hpp"
#include "fizi/interface.hpp"
#include "fizi/pnm.hpp"
#include "fizi/runtime/frame_loop.hpp"
#include "fizi/runtime/params.hpp"
#include "fizi/runtime/protocol.hpp"
#include "fizi/runtime/service.hpp"
#include "fizi/runtime/sink.hpp"
#include "fizi/runtime/source.hpp"
#include "fizi/segmentation.hpp"

namespace fizi::runtime {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,     // bad arguments, config or layout
    kExitSource = 2,    // frame source could not be opened or read
    kExitSink = 3,      // command sink failed after one retry
    kExitPipeline = 4,  // frame/model mismatch and similar
};

struct RuntimeConfig {
    SourceSpec source;
    std::filesystem::path layout_path;
    std::optional<std::filesystem::path> background_path;  // learn at start when absent
    PipelineParams params;
    std::string sink = "stdout";
    std::optional<std::string> serve;  // HOST:PORT
    std::filesystem::path ui_assets = "ui/dist";
    bool debug_dump = false;
    std::filesystem::path debug_dir = "fizi_debug";
    int workers = 0;  // 0 = hardware concurrency
    bool loop = false;  // rewind the source at its end (demo use with --serve)
    const std::atomic<bool>* stop = nullptr;  // checked between frames
};

inline std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

/// Bridges the frame loop and the UI service: inbound messages become queued
/// controls, applied only between frames.
class UiBridge {
public:
    UiBridge(const std::string& host, const std::string& port, const std::filesystem::path& assets,
             PipelineParams initial)
        : latest_(std::move(initial)),
          service_(host, port, assets, [this](const std::string& text) { return on_message(text); }) {}

    unsigned short port() const { return service_.port(); }

    std::vector<protocol::Control> take_controls() {
        std::lock_guard lock(mutex_);
        std::vector<protocol::Control> out(std::make_move_iterator(pending_.begin()),
                                           std::make_move_iterator(pending_.end()));
        pending_.clear();
        return out;
    }

    void publish(const protocol::StateSnapshot& state, const std::vector<InterfaceEvent>& events,
                 const FrameRGB* frame, const BinaryMask* mask) {
        {
            std::lock_guard lock(mutex_);
            if (pending_.empty()) latest_ = state.params;
        }
        service_.publish_text(protocol::state_message(state));
        for (const auto& e : events) service_.publish_text(protocol::event_message(e));
        if (frame) service_.publish_binary(protocol::frame_message(*frame));
        if (mask) service_.publish_binary(protocol::mask_message(*mask));
    }

    void publish_error(const std::string& what) { service_.publish_text(protocol::error_message(what)); }

private:
    std::vector<std::string> on_message(const std::string& text) {
        std::lock_guard lock(mutex_);
        try {
            auto control = protocol::parse_inbound(text, latest_);
            // Later patches build on earlier, not yet applied ones.
            if (auto* sp = std::get_if<protocol::SetParams>(&control)) latest_ = sp->params;
            pending_.push_back(std::move(control));
            return {};
        } catch (const Error& e) {
            return {protocol::error_message(e.what())};
        }
    }

    std::mutex mutex_;
    PipelineParams latest_;
    std::vector<protocol::Control> pending_;
    UiService service_;
};

inline void apply_control(FrameLoop& loop, protocol::Control control) {
    std::visit(
        [&](auto&& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, protocol::SetParams>)
                loop.set_params(std::move(c.params));
            else if constexpr (std::is_same_v<T, protocol::RelearnBackground>)
                loop.request_relearn();
            else
                loop.set_layout(std::move(c.layout));
        },
        std::move(control));
}

inline void dump_stages(const std::filesystem::path& dir, std::size_t index, const SegmentationStages& s) {
    std::filesystem::create_directories(dir);
    char prefix[32];
    std::snprintf(prefix, sizeof prefix, "%05zu_", index);
    pnm::write_pgm(s.background, dir / (std::string(prefix) + "r1.pgm"));
    pnm::write_pgm(s.gray, dir / (std::string(prefix) + "r2.pgm"));
    pnm::write_pgm(s.skin, dir / (std::string(prefix) + "r3.pgm"));
    pnm::write_pgm(s.merged, dir / (std::string(prefix) + "merged.pgm"));
    pnm::write_pgm(s.final_mask, dir / (std::string(prefix) + "final.pgm"));
}

/// Runs the frame loop until the source ends or a quit action fires.
/// `on_ready` receives the bound UI port when serving.
inline int run(const RuntimeConfig& cfg, std::ostream& out, std::ostream& err,
               const std::function<void(unsigned short)>& on_ready = {}) {
    std::optional<FrameLoop> loop;
    std::unique_ptr<CommandSink> sink;
    std::unique_ptr<UiBridge> bridge;
    try {
        Layout layout = load_layout(read_text_file(cfg.layout_path));
        std::optional<BackgroundModel> bg;
        if (cfg.background_path) {
            try {
                bg = load(*cfg.background_path);
            } catch (const FormatError& e) {
                throw ConfigError(e.what());
            }
        }
        RowExecutor exec = cfg.workers > 0 ? RowExecutor(cfg.workers) : RowExecutor::hardware();
        loop.emplace(cfg.params, std::move(layout), std::move(bg), std::move(exec));
        if (cfg.serve) {
            const auto hp = parse_host_port(*cfg.serve);
            bridge = std::make_unique<UiBridge>(hp.host, hp.port, cfg.ui_assets, cfg.params);
            if (on_ready) on_ready(bridge->port());
        }
    } catch (const Error& e) {
        err << "fizi: " << e.what() << '\n';
        return kExitUsage;
    }

    std::unique_ptr<FrameSource> source;
    try {
        source = open_source(cfg.source);
    } catch (const Error& e) {
        err << "fizi: " << e.what() << '\n';
        return kExitSource;
    }
    try {
        sink = open_sink(cfg.sink, out);
    } catch (const SinkError& e) {
        err << "fizi: " << e.what() << '\n';
        return kExitSink;
    } catch (const Error& e) {
        err << "fizi: " << e.what() << '\n';
        return kExitUsage;
    }

    FramePacer pacer(cfg.source.fps);
    using clock = std::chrono::steady_clock;
    std::optional<clock::time_point> last_tick;
    double fps = 0.0;

    for (std::size_t index = 0;; ++index) {
        if (cfg.stop && cfg.stop->load()) break;
        if (bridge) {
            for (auto& c : bridge->take_controls()) {
                try {
                    apply_control(*loop, std::move(c));
                } catch (const Error& e) {
                    bridge->publish_error(e.what());
                }
            }
        }

        pacer.wait(index);
        std::optional<FrameRGB> frame;
        try {
            frame = source->read();
            if (!frame && cfg.loop && index > 0 && source->rewind()) frame = source->read();
        } catch (const Error& e) {
            err << "fizi: source: " << e.what() << '\n';
            return kExitSource;
        }
        if (!frame) break;

        const Millis now = frame_timestamp(index, cfg.source.fps);
        FrameOutput result;
        try {
            result = loop->step(*frame, now);
        } catch (const Error& e) {
            err << "fizi: frame " << index << ": " << e.what() << '\n';
            return kExitPipeline;
        }

        try {
            if (result.command) sink->write_line(format_command(*result.command));
            for (const auto& a : result.actions) {
                if (a.action == Action::emit_command)
                    sink->write_line(format_event(a.event));
                else if (a.action == Action::log)
                    err << "fizi: t=" << a.event.timestamp << " zone " << a.event.zone_id << ' '
                        << to_string(a.event.kind) << ' ' << fixed4(a.event.value) << '\n';
            }
        } catch (const SinkError& e) {
            err << "fizi: sink: " << e.what() << '\n';
            return kExitSink;
        }

        if (cfg.debug_dump && result.stages) dump_stages(cfg.debug_dir, index, *result.stages);

        if (bridge) {
            const auto tick = clock::now();
            if (last_tick) {
                const double dt = std::chrono::duration<double>(tick - *last_tick).count();
                if (dt > 0) fps = fps == 0.0 ? 1.0 / dt : 0.9 * fps + 0.1 / dt;
            }
            last_tick = tick;
            protocol::StateSnapshot state;
            state.mode = loop->mode();
            state.frame = index;
            state.timestamp = now;
            state.fps = fps;
            state.params = loop->params();
            state.cursor = result.cursor;
            state.command = result.command;
            if (loop->background()) state.background_checksum = checksum(*loop->background());
            state.notice = result.notice;
            bridge->publish(state, result.events, &*frame, result.stages ? &result.stages->final_mask : nullptr);
        }

        if (result.quit) break;
    }
    return kExitOk;
}

/// Mean of (max - min) per channel over all pixels.
inline std::array<double, 3> mean_envelope_width(const BackgroundModel& m) {
    std::array<double, 3> sum{0, 0, 0};
    for (std::size_t i = 0; i < m.min_rgb.size(); ++i) sum[i % 3] += m.max_rgb[i] - m.min_rgb[i];
    const double n = static_cast<double>(m.min_rgb.size() / 3);
    return {sum[0] / n, sum[1] / n, sum[2] / n};
}

inline int learn_background_cli(const SourceSpec& spec, int n_frames, int margin, const std::filesystem::path& out_path,
                                std::ostream& out, std::ostream& err) {
    if (n_frames < 1 || margin < 0 || margin > 255) {
        err << "fizi: need --frames >= 1 and --margin in [0,255]\n";
        return kExitUsage;
    }
    BackgroundLearner learner;
    try {
        auto source = open_source(spec);
        FramePacer pacer(spec.fps);
        for (int i = 0; i < n_frames; ++i) {
            pacer.wait(static_cast<std::size_t>(i));
            auto f = source->read();
            if (!f) break;
            learner.add(*f);
        }
    } catch (const Error& e) {
        err << "fizi: " << e.what() << '\n';
        return kExitSource;
    }
    if (learner.frames() < static_cast<std::uint32_t>(n_frames)) {
        err << "fizi: not enough frames to learn the background: expected " << n_frames << ", got "
            << learner.frames() << '\n';
        return kExitSource;
    }
    const BackgroundModel model = learner.finish(static_cast<std::uint8_t>(margin));
    try {
        save(model, out_path);
    } catch (const Error& e) {
        err << "fizi: " << e.what() << '\n';
        return kExitUsage;
    }
    const auto w = mean_envelope_width(model);
    out << "learned " << model.frames_learned << " frames " << model.width << "x" << model.height
        << ", mean envelope width r=" << fixed4(w[0]) << " g=" << fixed4(w[1]) << " b=" << fixed4(w[2]) << '\n';
    return kExitOk;
}

inline int mask_cli(const std::filesystem::path& in_ppm, const std::filesystem::path& bg_path,
                    const std::filesystem::path& out_pgm, const PipelineParams& params, std::ostream& err) {
    try {
        const FrameRGB frame = pnm::read_ppm(in_ppm);
        const BackgroundModel bg = load(bg_path);
        const BinaryMask mask = segment(frame, bg, params.segmentation, RowExecutor::hardware());
        pnm::write_pgm(mask, out_pgm);
    } catch (const PipelineError& e) {
        err << "fizi: " << e.what() << '\n';
        return kExitPipeline;
    } catch (const Error& e) {
        err << "fizi: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace fizi::runtime
