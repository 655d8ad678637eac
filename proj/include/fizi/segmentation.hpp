#pragma once

// Hand segmentation: luminosity normalization, three independent threshold
// branches (background envelope, gray rejection, hue band), AND merge,
// opening/closing and small-blob removal.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "fizi/background.hpp"
#include "fizi/error.hpp"
#include "fizi/executor.hpp"
#include "fizi/imaging.hpp"

namespace fizi {

struct SegmentationParams {
    int gray_tolerance = 30;  // S
    double hue_lo = 340.0;    // degrees; hue_lo > hue_hi wraps through 0
    double hue_hi = 25.0;
    int se_radius = 1;
    double min_blob_fraction = 0.005;
    int luma_target = 128;
    int luma_lo = 60;
    int luma_hi = 190;
    double gamma_min = 0.4;
    double gamma_max = 2.5;

    void validate() const {
        auto fail = [](const std::string& what) { throw ConfigError("segmentation params: " + what); };
        if (gray_tolerance < 0 || gray_tolerance > 255) fail("S must be in [0,255]");
        if (!(hue_lo >= 0.0 && hue_lo < 360.0) || !(hue_hi >= 0.0 && hue_hi < 360.0))
            fail("hue thresholds must be in [0,360)");
        if (se_radius < 1) fail("se_radius must be >= 1");
        if (!(min_blob_fraction >= 0.0 && min_blob_fraction <= 1.0)) fail("min_blob_fraction must be in [0,1]");
        for (int v : {luma_target, luma_lo, luma_hi})
            if (v < 0 || v > 255) fail("luma bounds must be in [0,255]");
        if (!(luma_lo < luma_target && luma_target < luma_hi)) fail("need luma_lo < luma_target < luma_hi");
        if (!(gamma_min > 0.0 && gamma_min <= gamma_max)) fail("need 0 < gamma_min <= gamma_max");
    }

    friend bool operator==(const SegmentationParams&, const SegmentationParams&) = default;
};

// ---------------------------------------------------------------------------
// Luminosity

/// Rec.601 luma averaged over the frame. Accumulated in integers
/// (weights x1000) so the result does not depend on partitioning.
inline double mean_luma(const FrameRGB& frame) {
    std::uint64_t sum = 0;
    const auto px = frame.bytes();
    for (std::size_t i = 0; i < px.size(); i += 3) sum += 299u * px[i] + 587u * px[i + 1] + 114u * px[i + 2];
    return static_cast<double>(sum) / (1000.0 * static_cast<double>(frame.size()));
}

/// Exponent mapping `mean` onto the target luma, clamped to [gamma_min, gamma_max].
inline double correction_gamma(double mean, const SegmentationParams& p) {
    double gamma;
    if (mean <= 0.0)
        gamma = p.gamma_min;  // limit as mean -> 0
    else if (mean >= 255.0)
        gamma = p.gamma_max;  // limit as mean -> 255
    else
        gamma = std::log(p.luma_target / 255.0) / std::log(mean / 255.0);
    return std::clamp(gamma, p.gamma_min, p.gamma_max);
}

struct LumaResult {
    FrameRGB frame;
    double mean_luma = 0.0;  // of the input frame
    double gamma = 1.0;      // 1 when passed through
    bool corrected = false;
};

inline LumaResult normalize_luminosity(const FrameRGB& frame, const SegmentationParams& p,
                                       const RowExecutor& exec = {}) {
    const double mean = mean_luma(frame);
    if (mean >= p.luma_lo && mean <= p.luma_hi) return {frame, mean, 1.0, false};
    const double gamma = correction_gamma(mean, p);
    std::array<std::uint8_t, 256> lut{};
    for (int v = 0; v < 256; ++v)
        lut[v] = static_cast<std::uint8_t>(std::clamp(std::lround(255.0 * std::pow(v / 255.0, gamma)), 0L, 255L));
    FrameRGB out(frame.width(), frame.height());
    exec.for_rows(frame.height(), [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const auto src = frame.row(y);
            auto dst = out.row(y);
            for (std::size_t i = 0; i < src.size(); ++i) dst[i] = lut[src[i]];
        }
    });
    return {std::move(out), mean, gamma, true};
}

// ---------------------------------------------------------------------------
// Branches

/// I_R1: 0 where all three channels sit inside the learned envelope, else 1.
inline BinaryMask branch_background(const FrameRGB& frame, const BackgroundModel& bg, const RowExecutor& exec = {}) {
    if (frame.width() != bg.width || frame.height() != bg.height)
        throw PipelineError("frame is " + std::to_string(frame.width()) + "x" + std::to_string(frame.height()) +
                            " but background model is " + std::to_string(bg.width) + "x" + std::to_string(bg.height));
    BinaryMask out(frame.width(), frame.height());
    const int w = frame.width();
    exec.for_rows(frame.height(), [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const auto src = frame.row(y);
            const std::uint8_t* lo = &bg.min_rgb[static_cast<std::size_t>(y) * w * 3];
            const std::uint8_t* hi = &bg.max_rgb[static_cast<std::size_t>(y) * w * 3];
            auto dst = out.row(y);
            for (int x = 0; x < w; ++x) {
                bool inside = true;
                for (int c = 0; c < 3; ++c) {
                    const int i = 3 * x + c;
                    inside &= (src[i] >= lo[i]) & (src[i] <= hi[i]);
                }
                dst[x] = inside ? 0 : 1;
            }
        }
    });
    return out;
}

/// I_R2: 1 iff the channel spread max - min strictly exceeds `tolerance`.
inline BinaryMask branch_gray(const FrameRGB& frame, int tolerance, const RowExecutor& exec = {}) {
    BinaryMask out(frame.width(), frame.height());
    exec.for_rows(frame.height(), [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const auto src = frame.row(y);
            auto dst = out.row(y);
            for (int x = 0; x < frame.width(); ++x) {
                const int r = src[3 * x], g = src[3 * x + 1], b = src[3 * x + 2];
                dst[x] = (std::max({r, g, b}) - std::min({r, g, b})) > tolerance ? 1 : 0;
            }
        }
    });
    return out;
}

/// Inclusive membership of `h` in the band [lo, hi] on the hue circle.
inline bool hue_in_band(double h, double lo, double hi) {
    if (lo <= hi) return h >= lo && h <= hi;
    return h >= lo || h <= hi;
}

/// I_R3: hue inside the band; achromatic pixels never pass.
inline BinaryMask branch_skin(const HueField& hue, double lo, double hi, const RowExecutor& exec = {}) {
    BinaryMask out(hue.width, hue.height);
    exec.for_rows(hue.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const std::size_t base = static_cast<std::size_t>(y) * hue.width;
            auto dst = out.row(y);
            for (int x = 0; x < hue.width; ++x)
                dst[x] = (!hue.achromatic[base + x] && hue_in_band(hue.hue[base + x], lo, hi)) ? 1 : 0;
        }
    });
    return out;
}

inline BinaryMask merge(const BinaryMask& a, const BinaryMask& b, const BinaryMask& c, const RowExecutor& exec = {}) {
    if (!a.same_shape(b) || !a.same_shape(c)) throw PipelineError("merge: branch masks differ in size");
    BinaryMask out(a.width(), a.height());
    exec.for_rows(a.height(), [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const auto ra = a.row(y), rb = b.row(y), rc = c.row(y);
            auto dst = out.row(y);
            for (int x = 0; x < a.width(); ++x) dst[x] = ra[x] & rb[x] & rc[x];
        }
    });
    return out;
}

/// Clears every component smaller than `min_area` pixels.
inline BinaryMask remove_small_blobs(const BinaryMask& mask, double min_area) {
    const Labeling lab = label_components(mask);
    std::vector<std::uint8_t> keep(lab.components.size() + 1, 0);
    for (const auto& c : lab.components) keep[c.label] = static_cast<double>(c.area) >= min_area;
    BinaryMask out(mask.width(), mask.height());
    auto bits = out.bits();
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = keep[lab.labels[i]];
    return out;
}

// ---------------------------------------------------------------------------
// Full pipeline

struct SegmentationStages {
    BinaryMask background;  // I_R1
    BinaryMask gray;        // I_R2
    BinaryMask skin;        // I_R3
    BinaryMask merged;
    BinaryMask final_mask;  // I_FIZI
    double mean_luma = 0.0;
    double gamma = 1.0;
};

// The background branch compares the raw frame against the envelope, which
// is learned from raw frames. The gray and hue branches see the
// luminosity-corrected frame.
inline SegmentationStages segment_stages(const FrameRGB& frame, const BackgroundModel& bg,
                                         const SegmentationParams& p, const RowExecutor& exec = {}) {
    if (frame.width() != bg.width || frame.height() != bg.height)
        throw PipelineError("frame is " + std::to_string(frame.width()) + "x" + std::to_string(frame.height()) +
                            " but background model is " + std::to_string(bg.width) + "x" + std::to_string(bg.height));
    const LumaResult luma = normalize_luminosity(frame, p, exec);
    BinaryMask r1(1, 1), r2(1, 1), r3(1, 1);
    exec.invoke([&] { r1 = branch_background(frame, bg, exec); },
                [&] { r2 = branch_gray(luma.frame, p.gray_tolerance, exec); },
                [&] { r3 = branch_skin(rgb_to_hue(luma.frame, exec), p.hue_lo, p.hue_hi, exec); });
    BinaryMask merged = merge(r1, r2, r3, exec);
    BinaryMask cleaned = open_close(merged, StructuringElement{p.se_radius}, exec);
    const double min_area = p.min_blob_fraction * static_cast<double>(frame.width()) * frame.height();
    BinaryMask final_mask = remove_small_blobs(cleaned, min_area);
    return {std::move(r1), std::move(r2), std::move(r3), std::move(merged), std::move(final_mask), luma.mean_luma,
            luma.gamma};
}

inline BinaryMask segment(const FrameRGB& frame, const BackgroundModel& bg, const SegmentationParams& p,
                          const RowExecutor& exec = {}) {
    return segment_stages(frame, bg, p, exec).final_mask;
}

}  // namespace fizi
