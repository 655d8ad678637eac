#pragma once

// Virtual steering wheel: cursor angle around the wheel center becomes a
// signed steering value; a throttle reading completes the drive command.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "fizi/error.hpp"
#include "fizi/tracker.hpp"

namespace fizi {

struct WheelModel {
    Point center;
    double radius = 1.0;
    double theta_max = 90.0;  // degrees of rotation for full lock
    double annulus_inner = 0.6;
    double annulus_outer = 1.4;
    double dead_zone = 3.0;  // degrees

    void validate() const {
        if (!(radius > 0.0)) throw ConfigError("wheel: radius must be > 0");
        if (!(theta_max > 0.0 && theta_max <= 180.0)) throw ConfigError("wheel: theta_max must be in (0,180]");
        if (!(annulus_inner < 1.0 && 1.0 < annulus_outer)) throw ConfigError("wheel: need inner < 1 < outer");
        if (!(dead_zone >= 0.0)) throw ConfigError("wheel: dead_zone must be >= 0");
    }
};

struct DriveCommand {
    double steering = 0.0;  // [-1, 1], negative is left
    double throttle = 0.0;  // [0, 1]
    Millis timestamp = 0;
    friend bool operator==(const DriveCommand&, const DriveCommand&) = default;
};

/// Angle of `p` around `center` in degrees, zero at 12 o'clock, clockwise
/// positive in image coordinates (y down), range (-180, 180].
inline double wheel_angle(Point p, Point center) {
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    double deg = std::atan2(dx, -dy) * (180.0 / std::numbers::pi);
    if (deg <= -180.0) deg = 180.0;
    return deg;
}

inline std::optional<double> steering_from_cursor(const CursorState& cursor, const WheelModel& wheel) {
    if (!cursor.visible) return std::nullopt;
    const double dx = cursor.position.x - wheel.center.x;
    const double dy = cursor.position.y - wheel.center.y;
    const double dist2 = dx * dx + dy * dy;
    const double inner = wheel.annulus_inner * wheel.radius;
    const double outer = wheel.annulus_outer * wheel.radius;
    if (dist2 < inner * inner || dist2 > outer * outer) return std::nullopt;
    const double theta = wheel_angle(cursor.position, wheel.center);
    if (std::abs(theta) <= wheel.dead_zone) return 0.0;
    return std::clamp(theta / wheel.theta_max, -1.0, 1.0);
}

inline constexpr double kSteeringDecay = 0.8;
inline constexpr Millis kDefaultHoldMs = 250;

/// Drive command plus the time of the last steering reading, carried from
/// frame to frame.
struct DriveState {
    DriveCommand command;
    std::optional<Millis> last_steering_ms;
};

/// Steering takes a fresh reading when present; otherwise it holds for
/// `hold_ms` and then decays toward 0 by kSteeringDecay per frame. Throttle
/// keeps its previous value until a new reading arrives.
inline DriveState make_command(std::optional<double> steering, std::optional<double> throttle, const DriveState& prev,
                               Millis now, Millis hold_ms = kDefaultHoldMs) {
    DriveState next = prev;
    next.command.timestamp = now;
    if (steering) {
        next.command.steering = *steering;
        next.last_steering_ms = now;
    } else {
        const Millis since = prev.last_steering_ms ? now - *prev.last_steering_ms : hold_ms + 1;
        if (since > hold_ms) next.command.steering = prev.command.steering * kSteeringDecay;
    }
    if (throttle) next.command.throttle = *throttle;
    next.command.steering = std::clamp(next.command.steering, -1.0, 1.0);
    next.command.throttle = std::clamp(next.command.throttle, 0.0, 1.0);
    return next;
}

}  // namespace fizi
