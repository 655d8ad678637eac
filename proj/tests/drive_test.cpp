#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fizi/drive.hpp"

using namespace fizi;

namespace {

CursorState at(double x, double y) {
    CursorState c;
    c.visible = true;
    c.position = {x, y};
    return c;
}

WheelModel wheel() {
    WheelModel w;
    w.center = {320, 260};
    w.radius = 140;
    w.theta_max = 90;
    return w;
}

// Rim point at clock-face angle `deg` (0 = 12 o'clock, clockwise positive),
// built from sin/cos rather than atan2.
CursorState rim(double deg) {
    const double t = deg * std::numbers::pi / 180.0;
    return at(320 + 140 * std::sin(t), 260 - 140 * std::cos(t));
}

}  // namespace

TEST(Steering, TwelveOClockIsZero) { EXPECT_EQ(*steering_from_cursor(rim(0), wheel()), 0.0); }

TEST(Steering, ThreeOClockIsFullRight) {
    EXPECT_NEAR(*steering_from_cursor(at(460, 260), wheel()), 1.0, 1e-9);
    EXPECT_NEAR(*steering_from_cursor(at(180, 260), wheel()), -1.0, 1e-9);
}

TEST(Steering, TenOClock) { EXPECT_NEAR(*steering_from_cursor(rim(-60), wheel()), -2.0 / 3.0, 1e-9); }

TEST(Steering, MatchesTrigOracleAroundRim) {
    for (int d = -179; d <= 180; ++d) {
        if (std::abs(d) == 3) continue;  // dead-zone edge, decided by rounding
        const auto s = steering_from_cursor(rim(d), wheel());
        ASSERT_TRUE(s);
        const double expected = std::abs(d) <= 3 ? 0.0 : std::clamp(d / 90.0, -1.0, 1.0);
        ASSERT_NEAR(*s, expected, 1e-9) << d;
    }
}

TEST(Steering, DeadZoneAndClamp) {
    EXPECT_EQ(*steering_from_cursor(rim(2.9), wheel()), 0.0);
    EXPECT_GT(*steering_from_cursor(rim(3.5), wheel()), 0.0);
    EXPECT_EQ(*steering_from_cursor(rim(135), wheel()), 1.0);
    EXPECT_EQ(*steering_from_cursor(rim(180), wheel()), 1.0);
}

TEST(Steering, NoneOutsideAnnulusOrInvisible) {
    EXPECT_FALSE(steering_from_cursor(at(320, 260), wheel()));
    EXPECT_FALSE(steering_from_cursor(at(320, 260 - 80), wheel()));   // 0.57 r
    EXPECT_TRUE(steering_from_cursor(at(320, 260 - 85), wheel()));
    EXPECT_TRUE(steering_from_cursor(at(320, 260 - 195), wheel()));
    EXPECT_FALSE(steering_from_cursor(at(320, 260 - 197), wheel()));  // beyond 1.4 r
    CursorState hidden = rim(45);
    hidden.visible = false;
    EXPECT_FALSE(steering_from_cursor(hidden, wheel()));
}

TEST(Steering, OddUnderMirror) {
    std::mt19937 rng(1);
    // Offsets on a 1/64 grid keep the mirror image exact in floating point.
    std::uniform_int_distribution<int> off(-200 * 64, 200 * 64);
    for (int i = 0; i < 10000; ++i) {
        const double dx = off(rng) / 64.0, dy = off(rng) / 64.0;
        const auto a = steering_from_cursor(at(320 + dx, 260 + dy), wheel());
        const auto b = steering_from_cursor(at(320 - dx, 260 + dy), wheel());
        ASSERT_EQ(a.has_value(), b.has_value());
        if (!a) continue;
        ASSERT_GE(*a, -1.0);
        ASSERT_LE(*a, 1.0);
        if (dx == 0 && dy > 0) continue;  // 6 o'clock maps to +180 on both sides
        ASSERT_EQ(*a, -*b) << dx << "," << dy;
    }
}

TEST(Steering, Pure) {
    const auto c = rim(37);
    EXPECT_EQ(steering_from_cursor(c, wheel()), steering_from_cursor(c, wheel()));
}

TEST(Angle, Convention) {
    EXPECT_DOUBLE_EQ(wheel_angle({0, -1}, {0, 0}), 0.0);
    EXPECT_DOUBLE_EQ(wheel_angle({1, 0}, {0, 0}), 90.0);
    EXPECT_DOUBLE_EQ(wheel_angle({-1, 0}, {0, 0}), -90.0);
    EXPECT_DOUBLE_EQ(wheel_angle({0, 1}, {0, 0}), 180.0);
}

TEST(Command, FreshReadings) {
    const DriveState s = make_command(0.5, 0.8, {}, 100);
    EXPECT_EQ(s.command.steering, 0.5);
    EXPECT_EQ(s.command.throttle, 0.8);
    EXPECT_EQ(s.command.timestamp, 100);
}

TEST(Command, NeutralStart) {
    const DriveState s = make_command(std::nullopt, std::nullopt, {}, 0);
    EXPECT_EQ(s.command.steering, 0.0);
    EXPECT_EQ(s.command.throttle, 0.0);
}

TEST(Command, HoldThenDecay) {
    DriveState s = make_command(1.0, 0.3, {}, 0);
    s = make_command(std::nullopt, std::nullopt, s, 200);
    EXPECT_EQ(s.command.steering, 1.0);
    s = make_command(std::nullopt, std::nullopt, s, 250);
    EXPECT_EQ(s.command.steering, 1.0);
    s = make_command(std::nullopt, std::nullopt, s, 283);
    EXPECT_DOUBLE_EQ(s.command.steering, 0.8);
    s = make_command(std::nullopt, std::nullopt, s, 316);
    EXPECT_DOUBLE_EQ(s.command.steering, 0.64);
    EXPECT_EQ(s.command.throttle, 0.3);
}

TEST(Command, DecayAfterLongGap) {
    DriveState prev;
    prev.command.steering = 1.0;
    prev.last_steering_ms = 0;
    EXPECT_DOUBLE_EQ(make_command(std::nullopt, std::nullopt, prev, 400).command.steering, 0.8);
}

TEST(Command, Clamped) {
    const DriveState s = make_command(3.0, -2.0, {}, 0);
    EXPECT_EQ(s.command.steering, 1.0);
    EXPECT_EQ(s.command.throttle, 0.0);
}

TEST(WheelModel, Validation) {
    WheelModel w = wheel();
    EXPECT_NO_THROW(w.validate());
    w.annulus_outer = 0.9;
    EXPECT_THROW(w.validate(), ConfigError);
    w = wheel();
    w.theta_max = 181;
    EXPECT_THROW(w.validate(), ConfigError);
}
