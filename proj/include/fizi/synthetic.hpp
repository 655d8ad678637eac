#pragma once

// Deterministic synthetic scenes: a two-tone backdrop (bluish wall over a
// reddish desk) with bounded per-pixel noise, and skin-colored hand discs.
// Used to produce the bundled sample sequence and throughout the tests.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include "fizi/imaging.hpp"
#include "fizi/tracker.hpp"

namespace fizi::synthetic {

inline constexpr Rgb kSkin{205, 140, 115};

struct Scene {
    int width = 128;
    int height = 96;
    int noise = 4;  // per-channel amplitude, uniform in [-noise, noise]
    std::uint32_t seed = 1;
};

/// Noise-free backdrop color at (x, y).
inline Rgb backdrop_color(const Scene& s, int x, int y) {
    const int desk_top = s.height * 2 / 3;
    if (y < desk_top)
        return {static_cast<std::uint8_t>(70 + 40 * x / s.width), static_cast<std::uint8_t>(95 + 30 * y / s.height),
                static_cast<std::uint8_t>(140 + 20 * x / s.width)};
    return {static_cast<std::uint8_t>(150 + 20 * x / s.width), static_cast<std::uint8_t>(92 + 10 * y / s.height),
            static_cast<std::uint8_t>(78 + 10 * x / s.width)};
}

/// Backdrop for frame `index`; noise is a pure function of (seed, index).
inline FrameRGB backdrop(const Scene& s, std::uint32_t index) {
    FrameRGB f(s.width, s.height);
    std::mt19937 rng(s.seed * 2654435761u + index * 40503u + 17u);
    const std::uint32_t span = static_cast<std::uint32_t>(2 * s.noise + 1);
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            const Rgb c = backdrop_color(s, x, y);
            auto jitter = [&](int v) {
                const int n = s.noise > 0 ? static_cast<int>(rng() % span) - s.noise : 0;
                return static_cast<std::uint8_t>(std::clamp(v + n, 0, 255));
            };
            f.set(x, y, {jitter(c.r), jitter(c.g), jitter(c.b)});
        }
    }
    return f;
}

/// Pixels whose centers lie within `radius` of `center`.
inline BinaryMask disc_mask(int width, int height, Point center, double radius) {
    BinaryMask m(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double dx = x - center.x, dy = y - center.y;
            if (dx * dx + dy * dy <= radius * radius) m.set(x, y, true);
        }
    return m;
}

inline void paint(FrameRGB& f, const BinaryMask& where, Rgb color) {
    for (int y = 0; y < f.height(); ++y)
        for (int x = 0; x < f.width(); ++x)
            if (where.at(x, y)) f.set(x, y, color);
}

// The bundled driving sequence: 128x96 frames, a throttle slider on the left,
// a wheel of radius 30 centered at (76, 50). The hand rests on the slider
// for 12 frames, then swings around the wheel rim.
namespace drive_sequence {

inline constexpr int kFrames = 90;
inline constexpr int kSliderFrames = 12;
inline constexpr double kHandRadius = 7.0;
inline constexpr Point kWheelCenter{76.0, 50.0};
inline constexpr double kWheelRadius = 30.0;

inline Scene scene() { return Scene{128, 96, 4, 7}; }

inline std::string layout_xml() {
    return "<interface>\n"
           "  <zone id=\"throttle\" type=\"slider\" x=\"2\" y=\"8\" w=\"22\" h=\"80\"/>\n"
           "  <zone id=\"wheel\" type=\"wheel\" cx=\"76\" cy=\"50\" r=\"30\" theta_max=\"90\"/>\n"
           "</interface>\n";
}

inline Point hand_position(int frame) {
    if (frame < kSliderFrames) return {12.0, 28.0};
    const double phase = 2.0 * std::numbers::pi * (frame - kSliderFrames) / 39.0;
    const double theta = (110.0 * std::sin(phase)) * std::numbers::pi / 180.0;
    return {kWheelCenter.x + kWheelRadius * std::sin(theta), kWheelCenter.y - kWheelRadius * std::cos(theta)};
}

/// Frames used to learn the background (no hand), distinct noise from the sequence.
inline FrameRGB background_frame(int index) { return backdrop(scene(), 1000u + static_cast<std::uint32_t>(index)); }

inline FrameRGB frame(int index) {
    const Scene s = scene();
    FrameRGB f = backdrop(s, static_cast<std::uint32_t>(index));
    paint(f, disc_mask(s.width, s.height, hand_position(index), kHandRadius), kSkin);
    return f;
}

}  // namespace drive_sequence

}  // namespace fizi::synthetic
