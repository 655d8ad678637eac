#pragma once

// UI protocol over the /ws WebSocket.
//
// Outbound text (JSON):
//   {"type":"state", "mode", "frame", "t", "fps", "params":{...},
//    "cursor":{"x","y","visible","clicked"},
//    "command":{"t","steering","throttle"} | null,
//    "background_checksum":"xxxxxxxx" | null, "notice"?}
//   {"type":"event", "zone", "kind", "value", "t"}
//   {"type":"error", "message"}
// Outbound binary: 0x01 + FIZIRAW1 frame, or 0x02 + P5 mask.
// Inbound text:
//   {"type":"set_params", "params":{"S":40, ...}}   (keys may also sit at top level)
//   {"type":"relearn_background"}
//   {"type":"set_layout", "xml":"<interface>...</interface>"}

#include <cstdio>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "fizi/background.hpp"
#include "fizi/error.hpp"
#include "fizi/interface.hpp"
#include "fizi/pnm.hpp"
#include "fizi/runtime/frame_loop.hpp"
#include "fizi/runtime/params.hpp"
#include "fizi/runtime/source.hpp"

namespace fizi::runtime::protocol {

inline constexpr char kFrameTag = 0x01;
inline constexpr char kMaskTag = 0x02;

inline std::string checksum_hex(std::uint32_t c) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", c);
    return buf;
}

struct StateSnapshot {
    Mode mode = Mode::running;
    std::size_t frame = 0;
    Millis timestamp = 0;
    double fps = 0.0;
    PipelineParams params;
    CursorState cursor;
    std::optional<DriveCommand> command;
    std::optional<std::uint32_t> background_checksum;
    std::string notice;
};

inline std::string state_message(const StateSnapshot& s) {
    nlohmann::json j;
    j["type"] = "state";
    j["mode"] = to_string(s.mode);
    j["frame"] = s.frame;
    j["t"] = s.timestamp;
    j["fps"] = s.fps;
    j["params"] = params_to_json(s.params);
    j["cursor"] = {{"x", s.cursor.position.x},
                   {"y", s.cursor.position.y},
                   {"visible", s.cursor.visible},
                   {"clicked", s.cursor.clicked}};
    if (s.command)
        j["command"] = {{"t", s.command->timestamp}, {"steering", s.command->steering}, {"throttle", s.command->throttle}};
    else
        j["command"] = nullptr;
    if (s.background_checksum)
        j["background_checksum"] = checksum_hex(*s.background_checksum);
    else
        j["background_checksum"] = nullptr;
    if (!s.notice.empty()) j["notice"] = s.notice;
    return j.dump();
}

inline std::string event_message(const InterfaceEvent& e) {
    nlohmann::json j = {{"type", "event"},
                        {"zone", e.zone_id},
                        {"kind", to_string(e.kind)},
                        {"value", e.value},
                        {"t", e.timestamp}};
    return j.dump();
}

inline std::string error_message(const std::string& what) {
    return nlohmann::json{{"type", "error"}, {"message", what}}.dump();
}

inline std::string frame_message(const FrameRGB& f) { return std::string(1, kFrameTag) + raw_frame_bytes(f); }

inline std::string mask_message(const BinaryMask& m) { return std::string(1, kMaskTag) + pnm::pgm_bytes(m); }

struct SetParams {
    PipelineParams params;  // full, validated set
};
struct RelearnBackground {};
struct SetLayout {
    Layout layout;
};
using Control = std::variant<SetParams, RelearnBackground, SetLayout>;

/// Parses and validates an inbound message against the current parameters.
/// Throws ConfigError or LayoutError with a message suitable for an error reply.
inline Control parse_inbound(const std::string& text, const PipelineParams& current) {
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("message is not a JSON object");
    const auto type = j.find("type");
    if (type == j.end() || !type->is_string()) throw ConfigError("message has no string \"type\"");
    const std::string t = type->get<std::string>();
    if (t == "set_params") {
        nlohmann::json patch;
        if (auto p = j.find("params"); p != j.end()) {
            patch = *p;
        } else {
            patch = j;
            patch.erase("type");
        }
        return SetParams{apply_params_patch(current, patch)};
    }
    if (t == "relearn_background") return RelearnBackground{};
    if (t == "set_layout") {
        const auto x = j.find("xml");
        if (x == j.end() || !x->is_string()) throw ConfigError("set_layout needs a string \"xml\"");
        Layout layout = load_layout(x->get<std::string>());
        validate_actions(layout);
        return SetLayout{std::move(layout)};
    }
    throw ConfigError("unknown message type \"" + t + "\"");
}

}  // namespace fizi::runtime::protocol
