#pragma once

// XML-described interface zones, cursor hit testing and interface events.
//
// Layout schema:
//   <interface>
//     <background image="PATH"/>                                  (optional)
//     <zone id="ID" type="button|slider" x=".." y=".." w=".." h=".."
//           on_enter=".." on_leave=".." on_click=".." on_change=".."/>
//     <zone id="ID" type="wheel" cx=".." cy=".." r=".." theta_max=".."/>
//   </interface>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fizi/drive.hpp"
#include "fizi/error.hpp"
#include "fizi/tracker.hpp"
#include "fizi/xml.hpp"

namespace fizi {

enum class ZoneKind { button, slider, wheel };
enum class EventKind { enter, leave, click, value_changed };

inline const char* to_string(ZoneKind k) {
    switch (k) {
        case ZoneKind::button: return "button";
        case ZoneKind::slider: return "slider";
        case ZoneKind::wheel: return "wheel";
    }
    return "?";
}

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::enter: return "enter";
        case EventKind::leave: return "leave";
        case EventKind::click: return "click";
        case EventKind::value_changed: return "value_changed";
    }
    return "?";
}

struct Rect {
    double x = 0, y = 0, w = 0, h = 0;
    friend bool operator==(const Rect&, const Rect&) = default;
};

struct Circle {
    double cx = 0, cy = 0, r = 0;
    friend bool operator==(const Circle&, const Circle&) = default;
};

struct Zone {
    std::string id;
    ZoneKind kind = ZoneKind::button;
    Rect rect;           // button, slider
    Circle circle;       // wheel
    double theta_max = 90.0;  // wheel
    std::map<EventKind, std::string> bindings;  // event -> action name
    long line = 0;

    bool contains(Point p) const {
        if (kind == ZoneKind::wheel) {
            const double dx = p.x - circle.cx, dy = p.y - circle.cy;
            return dx * dx + dy * dy <= circle.r * circle.r;
        }
        return p.x >= rect.x && p.x <= rect.x + rect.w && p.y >= rect.y && p.y <= rect.y + rect.h;
    }

    /// Slider position: 1 at the top edge, 0 at the bottom, clamped.
    double slider_value(Point p) const { return std::clamp(1.0 - (p.y - rect.y) / rect.h, 0.0, 1.0); }

    /// Wheel geometry from this zone; annulus and dead zone from `tuning`.
    WheelModel wheel(const WheelModel& tuning = {}) const {
        WheelModel w = tuning;
        w.center = {circle.cx, circle.cy};
        w.radius = circle.r;
        w.theta_max = theta_max;
        return w;
    }

    const std::string* action_for(EventKind k) const {
        auto it = bindings.find(k);
        return it == bindings.end() ? nullptr : &it->second;
    }

    friend bool operator==(const Zone& a, const Zone& b) {
        return a.id == b.id && a.kind == b.kind && a.bindings == b.bindings &&
               (a.kind == ZoneKind::wheel ? (a.circle == b.circle && a.theta_max == b.theta_max) : a.rect == b.rect);
    }
};

struct Layout {
    std::optional<std::string> background_image;
    std::vector<Zone> zones;

    const Zone* first(ZoneKind k) const {
        for (const auto& z : zones)
            if (z.kind == k) return &z;
        return nullptr;
    }
};

struct InterfaceEvent {
    std::string zone_id;
    EventKind kind = EventKind::enter;
    double value = 0.0;  // slider [0,1], wheel [-1,1], otherwise 0
    Millis timestamp = 0;
    friend bool operator==(const InterfaceEvent&, const InterfaceEvent&) = default;
};

namespace detail {

[[noreturn]] inline void layout_fail(const xml::Element& e, const std::string& what) {
    std::string tag = "<" + e.name;
    if (const auto* id = e.find("id")) tag += " id=\"" + *id + "\"";
    tag += ">";
    throw LayoutError("layout line " + std::to_string(e.line) + ": " + tag + ": " + what);
}

inline double required_number(const xml::Element& e, std::string_view key) {
    const auto* v = e.find(key);
    if (!v) layout_fail(e, "missing required attribute '" + std::string(key) + "'");
    const auto num = xml::to_number(*v);
    if (!num || !std::isfinite(*num))
        layout_fail(e, "attribute '" + std::string(key) + "' is not a number: \"" + *v + "\"");
    return *num;
}

inline const std::map<std::string_view, EventKind>& binding_attributes() {
    static const std::map<std::string_view, EventKind> m = {{"on_enter", EventKind::enter},
                                                            {"on_leave", EventKind::leave},
                                                            {"on_click", EventKind::click},
                                                            {"on_change", EventKind::value_changed}};
    return m;
}

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline Layout load_layout(std::string_view xml_text) {
    xml::Element root;
    try {
        root = xml::parse(xml_text);
    } catch (const xml::ParseError& e) {
        throw LayoutError(std::string("layout: malformed XML: ") + e.what());
    }
    if (root.name != "interface") detail::layout_fail(root, "root element must be <interface>");

    Layout layout;
    std::set<std::string> ids;
    for (const auto& e : root.children) {
        if (!e.children.empty()) detail::layout_fail(e, "nested elements are not supported");
        if (e.name == "background") {
            const auto* img = e.find("image");
            if (!img) detail::layout_fail(e, "missing required attribute 'image'");
            if (layout.background_image) detail::layout_fail(e, "duplicate <background>");
            layout.background_image = *img;
            continue;
        }
        if (e.name != "zone") detail::layout_fail(e, "unknown element");

        Zone z;
        z.line = e.line;
        const auto* id = e.find("id");
        if (!id || id->empty()) detail::layout_fail(e, "missing required attribute 'id'");
        z.id = *id;
        if (!ids.insert(z.id).second) detail::layout_fail(e, "duplicate zone id \"" + z.id + "\"");

        const auto* type = e.find("type");
        if (!type) detail::layout_fail(e, "missing required attribute 'type'");
        if (*type == "button")
            z.kind = ZoneKind::button;
        else if (*type == "slider")
            z.kind = ZoneKind::slider;
        else if (*type == "wheel")
            z.kind = ZoneKind::wheel;
        else
            detail::layout_fail(e, "unknown zone type \"" + *type + "\"");

        if (z.kind == ZoneKind::wheel) {
            z.circle = {detail::required_number(e, "cx"), detail::required_number(e, "cy"),
                        detail::required_number(e, "r")};
            z.theta_max = detail::required_number(e, "theta_max");
            if (!(z.circle.r > 0)) detail::layout_fail(e, "r must be positive");
            if (!(z.theta_max > 0 && z.theta_max <= 180)) detail::layout_fail(e, "theta_max must be in (0,180]");
        } else {
            z.rect = {detail::required_number(e, "x"), detail::required_number(e, "y"),
                      detail::required_number(e, "w"), detail::required_number(e, "h")};
            if (!(z.rect.w > 0 && z.rect.h > 0)) detail::layout_fail(e, "w and h must be positive");
        }

        for (const auto& [key, value] : e.attributes) {
            auto it = detail::binding_attributes().find(key);
            if (it != detail::binding_attributes().end()) {
                if (value.empty()) detail::layout_fail(e, "empty action for '" + key + "'");
                z.bindings[it->second] = value;
            }
        }
        layout.zones.push_back(std::move(z));
    }
    return layout;
}

inline std::string serialize_layout(const Layout& layout) {
    std::string out = "<interface>\n";
    if (layout.background_image) out += "  <background image=\"" + xml::escape(*layout.background_image) + "\"/>\n";
    for (const auto& z : layout.zones) {
        out += "  <zone id=\"" + xml::escape(z.id) + "\" type=\"" + to_string(z.kind) + "\"";
        auto attr = [&](const char* k, double v) { out += std::string(" ") + k + "=\"" + detail::format_number(v) + "\""; };
        if (z.kind == ZoneKind::wheel) {
            attr("cx", z.circle.cx);
            attr("cy", z.circle.cy);
            attr("r", z.circle.r);
            attr("theta_max", z.theta_max);
        } else {
            attr("x", z.rect.x);
            attr("y", z.rect.y);
            attr("w", z.rect.w);
            attr("h", z.rect.h);
        }
        for (const auto& [key, kind] : detail::binding_attributes())
            if (const auto* a = z.action_for(kind)) out += " " + std::string(key) + "=\"" + xml::escape(*a) + "\"";
        out += "/>\n";
    }
    out += "</interface>\n";
    return out;
}

// ---------------------------------------------------------------------------
// Hit testing

inline constexpr double kValueEpsilon = 0.01;

/// Per-zone memory between frames, indexed like Layout::zones.
struct HitState {
    std::vector<std::uint8_t> inside;
    std::vector<std::optional<double>> last_value;
};

struct HitResult {
    std::vector<InterfaceEvent> events;
    HitState state;
    std::optional<double> throttle;  // first slider containing the cursor
    std::optional<double> steering;  // first wheel with a steering reading
};

/// Events for one frame, grouped per zone in document order: enter/leave,
/// then click, then value_changed.
inline HitResult hit_test(const Layout& layout, const CursorState& cursor, const HitState& prev, Millis now,
                          const WheelModel& wheel_tuning = {}) {
    const std::size_t n = layout.zones.size();
    HitResult res;
    res.state.inside = prev.inside;
    res.state.last_value = prev.last_value;
    res.state.inside.resize(n, 0);
    res.state.last_value.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const Zone& z = layout.zones[i];
        const bool was_inside = res.state.inside[i] != 0;
        const bool is_inside = cursor.visible && z.contains(cursor.position);
        if (is_inside != was_inside)
            res.events.push_back({z.id, is_inside ? EventKind::enter : EventKind::leave, 0.0, now});
        res.state.inside[i] = is_inside ? 1 : 0;

        if (is_inside && cursor.clicked) res.events.push_back({z.id, EventKind::click, 0.0, now});

        std::optional<double> value;
        if (z.kind == ZoneKind::slider && is_inside) {
            value = z.slider_value(cursor.position);
            if (!res.throttle) res.throttle = value;
        } else if (z.kind == ZoneKind::wheel) {
            value = steering_from_cursor(cursor, z.wheel(wheel_tuning));
            if (value && !res.steering) res.steering = value;
        }
        if (value) {
            auto& last = res.state.last_value[i];
            if (!last || std::abs(*value - *last) >= kValueEpsilon) {
                res.events.push_back({z.id, EventKind::value_changed, *value, now});
                last = value;
            }
        }
    }
    return res;
}

}  // namespace fizi
