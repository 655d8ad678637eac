#pragma once

// Per-frame wiring of every stage: luminosity check and (re)learning,
// segmentation, cursor tracking, hit testing, drive command, actions.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fizi/background.hpp"
#include "fizi/drive.hpp"
#include "fizi/error.hpp"
#include "fizi/executor.hpp"
#include "fizi/interface.hpp"
#include "fizi/runtime/params.hpp"
#include "fizi/segmentation.hpp"
#include "fizi/tracker.hpp"

namespace fizi::runtime {

// Engine actions. Bindings name them either bare ("quit") or with an
// "action:" prefix. Nothing outside this registry is ever executed.
enum class Action { quit, emit_command, log };

inline std::optional<Action> parse_action(std::string_view name) {
    if (name.rfind("action:", 0) == 0) name.remove_prefix(7);
    if (name == "quit") return Action::quit;
    if (name == "emit_command") return Action::emit_command;
    if (name == "log") return Action::log;
    return std::nullopt;
}

/// Throws ConfigError naming the first binding outside the registry.
inline void validate_actions(const Layout& layout) {
    for (const auto& z : layout.zones)
        for (const auto& [kind, name] : z.bindings)
            if (!parse_action(name))
                throw ConfigError("layout line " + std::to_string(z.line) + ": zone \"" + z.id + "\" binds " +
                                  to_string(kind) + " to unknown action \"" + name + "\"");
}

struct TriggeredAction {
    Action action;
    InterfaceEvent event;
};

enum class Mode { learning, running };

inline const char* to_string(Mode m) { return m == Mode::learning ? "learning" : "running"; }

struct FrameOutput {
    Millis timestamp = 0;
    Mode mode = Mode::running;
    std::optional<DriveCommand> command;  // absent while learning
    std::vector<InterfaceEvent> events;
    std::vector<TriggeredAction> actions;
    bool quit = false;
    CursorState cursor;
    std::optional<SegmentationStages> stages;
    double mean_luma = 0.0;
    std::string notice;  // mode transitions
};

class FrameLoop {
public:
    FrameLoop(PipelineParams params, Layout layout, std::optional<BackgroundModel> background, RowExecutor exec = {})
        : params_(std::move(params)), layout_(std::move(layout)), background_(std::move(background)),
          exec_(std::move(exec)) {
        params_.validate();
        validate_actions(layout_);
        if (!background_) begin_learning();
    }

    FrameOutput step(const FrameRGB& frame, Millis now) {
        FrameOutput out;
        out.timestamp = now;
        out.mean_luma = mean_luma(frame);

        if (mode_ == Mode::running && prev_luma_ &&
            relearn_trigger(*prev_luma_, out.mean_luma, params_.relearn_threshold)) {
            begin_learning();
            out.notice = "luminosity jump, relearning background";
        }
        prev_luma_ = out.mean_luma;

        if (mode_ == Mode::learning) {
            learner_.add(frame);
            if (learner_.frames() >= static_cast<std::uint32_t>(params_.learn_frames)) {
                background_ = learner_.finish(static_cast<std::uint8_t>(params_.margin));
                mode_ = Mode::running;
                out.notice = "background learned";
            }
            out.mode = Mode::learning;
            out.cursor = cursor_;
            return out;
        }

        out.mode = Mode::running;
        out.stages = segment_stages(frame, *background_, params_.segmentation, exec_);
        cursor_ = update(cursor_, out.stages->final_mask, now, params_.tracker);
        HitResult hit = hit_test(layout_, cursor_, hits_, now, params_.wheel);
        hits_ = std::move(hit.state);
        drive_ = make_command(hit.steering, hit.throttle, drive_, now, params_.hold_ms);

        out.command = drive_.command;
        out.cursor = cursor_;
        out.events = std::move(hit.events);
        for (const auto& e : out.events) {
            const Zone* z = find_zone(e.zone_id);
            const std::string* name = z ? z->action_for(e.kind) : nullptr;
            if (!name) continue;
            const auto action = parse_action(*name);
            out.actions.push_back({*action, e});
            if (*action == Action::quit) out.quit = true;
        }
        return out;
    }

    // Control surface, applied by the owner between frames.
    void set_params(PipelineParams p) {
        p.validate();
        params_ = std::move(p);
    }
    void set_layout(Layout layout) {
        validate_actions(layout);
        layout_ = std::move(layout);
        hits_ = {};
    }
    void request_relearn() { begin_learning(); }

    const PipelineParams& params() const { return params_; }
    const Layout& layout() const { return layout_; }
    Mode mode() const { return mode_; }
    const std::optional<BackgroundModel>& background() const { return background_; }
    const CursorState& cursor() const { return cursor_; }
    const DriveState& drive() const { return drive_; }
    const RowExecutor& executor() const { return exec_; }

private:
    void begin_learning() {
        mode_ = Mode::learning;
        learner_ = BackgroundLearner{};
        cursor_ = CursorState{};
        hits_ = HitState{};
    }

    const Zone* find_zone(const std::string& id) const {
        for (const auto& z : layout_.zones)
            if (z.id == id) return &z;
        return nullptr;
    }

    PipelineParams params_;
    Layout layout_;
    std::optional<BackgroundModel> background_;
    RowExecutor exec_;

    Mode mode_ = Mode::running;
    BackgroundLearner learner_;
    std::optional<double> prev_luma_;
    CursorState cursor_;
    HitState hits_;
    DriveState drive_;
};

}  // namespace fizi::runtime
