#pragma once

// Hand mask -> smoothed cursor with visibility and dwell-click state.

#include <cmath>
#include <cstdint>

#include "fizi/error.hpp"
#include "fizi/imaging.hpp"

namespace fizi {

using Millis = std::int64_t;

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct TrackerParams {
    double smoothing = 0.5;  // weight of the new centroid
    double dwell_radius = 15.0;
    Millis dwell_time = 800;
    Millis lost_timeout = 500;

    void validate() const {
        if (!(smoothing >= 0.0 && smoothing <= 1.0)) throw ConfigError("tracker: smoothing must be in [0,1]");
        if (!(dwell_radius >= 0.0)) throw ConfigError("tracker: dwell_radius must be >= 0");
        if (dwell_time < 0 || lost_timeout < 0) throw ConfigError("tracker: durations must be >= 0");
    }

    friend bool operator==(const TrackerParams&, const TrackerParams&) = default;
};

struct CursorState {
    Point position;
    bool visible = false;
    bool clicked = false;  // true on exactly one frame per dwell episode
    Millis dwell_ms = 0;
    Millis last_seen_ms = 0;

    Point dwell_anchor;
    bool click_fired = false;  // current episode already clicked
    Millis updated_ms = 0;
    bool started = false;  // at least one update applied

    friend bool operator==(const CursorState&, const CursorState&) = default;
};

/// Advances the cursor by one frame. The largest component of `mask` is the
/// hand (ties go to the earlier component in raster order).
inline CursorState update(const CursorState& prev, const BinaryMask& mask, Millis now, const TrackerParams& p = {}) {
    CursorState next = prev;
    next.clicked = false;
    next.updated_ms = now;
    next.started = true;
    const Millis elapsed = prev.started ? std::max<Millis>(0, now - prev.updated_ms) : 0;

    const auto comps = connected_components(mask);
    if (comps.empty()) {
        if (prev.visible && now - prev.last_seen_ms > p.lost_timeout) {
            next.visible = false;
            next.dwell_ms = 0;
            next.click_fired = false;
        }
        return next;
    }

    const Point target{comps.front().cx, comps.front().cy};
    next.last_seen_ms = now;
    if (!prev.visible) {
        next.visible = true;
        next.position = target;
        next.dwell_anchor = target;
        next.dwell_ms = 0;
        next.click_fired = false;
        return next;
    }

    next.position = {p.smoothing * target.x + (1.0 - p.smoothing) * prev.position.x,
                     p.smoothing * target.y + (1.0 - p.smoothing) * prev.position.y};
    const double drift = std::hypot(next.position.x - prev.dwell_anchor.x, next.position.y - prev.dwell_anchor.y);
    if (drift <= p.dwell_radius) {
        next.dwell_ms = prev.dwell_ms + elapsed;
        if (!prev.click_fired && prev.dwell_ms < p.dwell_time && next.dwell_ms >= p.dwell_time) {
            next.clicked = true;
            next.click_fired = true;
        }
    } else {
        next.dwell_anchor = next.position;
        next.dwell_ms = 0;
        next.click_fired = false;
    }
    return next;
}

}  // namespace fizi
