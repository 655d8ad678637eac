#pragma once

// Raster primitives shared by every pipeline stage: RGB frames, binary
// masks, hue conversion, square-element morphology and 8-connected labeling.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fizi/error.hpp"
#include "fizi/executor.hpp"

namespace fizi {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

namespace detail {
inline void check_dims(int width, int height) {
    if (width < 1 || height < 1)
        throw ImageError("raster dimensions must be positive, got " + std::to_string(width) + "x" +
                         std::to_string(height));
}
}  // namespace detail

/// 8-bit interleaved RGB raster, row-major.
class FrameRGB {
public:
    FrameRGB(int width, int height)
        : width_(width), height_(height),
          data_((detail::check_dims(width, height), pixel_count(width, height) * 3), 0) {}

    FrameRGB(int width, int height, std::vector<std::uint8_t> data)
        : width_(width), height_(height), data_(std::move(data)) {
        detail::check_dims(width, height);
        if (data_.size() != pixel_count(width, height) * 3)
            throw ImageError("frame data holds " + std::to_string(data_.size()) + " bytes, expected " +
                             std::to_string(pixel_count(width, height) * 3));
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return pixel_count(width_, height_); }

    Rgb at(int x, int y) const {
        const std::uint8_t* p = &data_[index(x, y) * 3];
        return {p[0], p[1], p[2]};
    }
    void set(int x, int y, Rgb c) {
        std::uint8_t* p = &data_[index(x, y) * 3];
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
    }

    std::span<const std::uint8_t> bytes() const { return data_; }
    std::span<std::uint8_t> bytes() { return data_; }
    std::span<const std::uint8_t> row(int y) const {
        return std::span<const std::uint8_t>(data_).subspan(static_cast<std::size_t>(y) * width_ * 3, width_ * 3);
    }
    std::span<std::uint8_t> row(int y) {
        return std::span<std::uint8_t>(data_).subspan(static_cast<std::size_t>(y) * width_ * 3, width_ * 3);
    }

    friend bool operator==(const FrameRGB&, const FrameRGB&) = default;

private:
    static std::size_t pixel_count(int w, int h) { return static_cast<std::size_t>(w) * static_cast<std::size_t>(h); }
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
};

/// One byte per pixel, 0 (removed) or 1 (kept).
class BinaryMask {
public:
    BinaryMask(int width, int height, bool fill = false)
        : width_(width), height_(height),
          bits_((detail::check_dims(width, height), static_cast<std::size_t>(width) * height), fill ? 1 : 0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return bits_.size(); }

    bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool v) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }

    std::span<const std::uint8_t> bits() const { return bits_; }
    std::span<std::uint8_t> bits() { return bits_; }
    std::span<const std::uint8_t> row(int y) const {
        return std::span<const std::uint8_t>(bits_).subspan(static_cast<std::size_t>(y) * width_, width_);
    }
    std::span<std::uint8_t> row(int y) {
        return std::span<std::uint8_t>(bits_).subspan(static_cast<std::size_t>(y) * width_, width_);
    }

    std::size_t count() const {
        return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
    }
    bool same_shape(const BinaryMask& o) const { return width_ == o.width_ && height_ == o.height_; }

    BinaryMask operator~() const {
        BinaryMask out(width_, height_);
        for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] ^ 1;
        return out;
    }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

/// Per-pixel hue in degrees [0, 360). Achromatic pixels (max == min) carry 0.
struct HueField {
    int width = 0;
    int height = 0;
    std::vector<double> hue;
    std::vector<std::uint8_t> achromatic;
};

/// Square element of side 2 * radius + 1, origin at the center.
struct StructuringElement {
    int radius = 1;
    int side() const { return 2 * radius + 1; }
};

struct ConnectedComponent {
    int label = 0;
    std::size_t area = 0;
    int x_min = 0, y_min = 0, x_max = 0, y_max = 0;
    double cx = 0.0;
    double cy = 0.0;
};

/// Hexagonal hue of one pixel.
inline double hue_of(Rgb p, bool* achromatic = nullptr) {
    const int r = p.r, g = p.g, b = p.b;
    const int mx = std::max({r, g, b});
    const int mn = std::min({r, g, b});
    const int c = mx - mn;
    if (achromatic) *achromatic = (c == 0);
    if (c == 0) return 0.0;
    double h;
    if (mx == r) {
        h = 60.0 * (static_cast<double>(g - b) / c);
        if (h < 0.0) h += 360.0;
    } else if (mx == g) {
        h = 60.0 * (static_cast<double>(b - r) / c + 2.0);
    } else {
        h = 60.0 * (static_cast<double>(r - g) / c + 4.0);
    }
    return h >= 360.0 ? h - 360.0 : h;
}

inline HueField rgb_to_hue(const FrameRGB& frame, const RowExecutor& exec = {}) {
    HueField out;
    out.width = frame.width();
    out.height = frame.height();
    out.hue.assign(frame.size(), 0.0);
    out.achromatic.assign(frame.size(), 0);
    exec.for_rows(frame.height(), [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const auto src = frame.row(y);
            const std::size_t base = static_cast<std::size_t>(y) * frame.width();
            for (int x = 0; x < frame.width(); ++x) {
                bool achro = false;
                out.hue[base + x] = hue_of({src[3 * x], src[3 * x + 1], src[3 * x + 2]}, &achro);
                out.achromatic[base + x] = achro ? 1 : 0;
            }
        }
    });
    return out;
}

namespace detail {

// Square-window morphology, separable. `pad` is the value assumed outside
// the raster; `want_all` selects erosion (every covered bit set) versus
// dilation (any covered bit set).
inline BinaryMask square_morph(const BinaryMask& in, StructuringElement se, bool pad, bool want_all,
                               const RowExecutor& exec) {
    const int w = in.width(), h = in.height(), r = std::max(0, se.radius);
    const int side = 2 * r + 1;
    // Horizontal pass: count of set bits in the window, padding included.
    std::vector<std::uint8_t> horiz(in.size());
    exec.for_rows(h, [&](int y0, int y1) {
        std::vector<int> prefix(w + 1);
        for (int y = y0; y < y1; ++y) {
            const auto src = in.row(y);
            prefix[0] = 0;
            for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + src[x];
            std::uint8_t* dst = &horiz[static_cast<std::size_t>(y) * w];
            for (int x = 0; x < w; ++x) {
                const int lo = x - r, hi = x + r;
                const int clo = std::max(lo, 0), chi = std::min(hi, w - 1);
                int ones = prefix[chi + 1] - prefix[clo];
                if (pad) ones += (clo - lo) + (hi - chi);
                dst[x] = want_all ? (ones == side) : (ones > 0);
            }
        }
    });
    BinaryMask out(w, h);
    exec.for_rows(h, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            auto dst = out.row(y);
            for (int x = 0; x < w; ++x) {
                int ones = 0;
                for (int yy = y - r; yy <= y + r; ++yy) {
                    if (yy < 0 || yy >= h)
                        ones += pad ? 1 : 0;
                    else
                        ones += horiz[static_cast<std::size_t>(yy) * w + x];
                }
                dst[x] = want_all ? (ones == side) : (ones > 0);
            }
        }
    });
    return out;
}

}  // namespace detail

/// Output bit is set iff every in-bounds covered bit is set; out of bounds counts as 0.
inline BinaryMask erode(const BinaryMask& mask, StructuringElement se = {}, const RowExecutor& exec = {}) {
    return detail::square_morph(mask, se, false, true, exec);
}

/// Output bit is set iff any in-bounds covered bit is set.
inline BinaryMask dilate(const BinaryMask& mask, StructuringElement se = {}, const RowExecutor& exec = {}) {
    return detail::square_morph(mask, se, false, false, exec);
}

/// Opening (erode then dilate) followed by closing (dilate then erode).
inline BinaryMask open_close(const BinaryMask& mask, StructuringElement se = {}, const RowExecutor& exec = {}) {
    BinaryMask opened = dilate(erode(mask, se, exec), se, exec);
    return erode(dilate(opened, se, exec), se, exec);
}

/// Label raster (0 = background, labels start at 1 in raster order of each
/// component's first pixel) plus components sorted by area descending,
/// ties by label.
struct Labeling {
    int width = 0;
    int height = 0;
    std::vector<int> labels;
    std::vector<ConnectedComponent> components;
};

inline Labeling label_components(const BinaryMask& mask) {
    const int w = mask.width(), h = mask.height();
    Labeling out;
    out.width = w;
    out.height = h;
    out.labels.assign(mask.size(), 0);
    const auto bits = mask.bits();

    // Two-pass union-find over provisional labels.
    std::vector<int> parent{0};
    auto find = [&](int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b)
            parent[b] = a;
        else
            parent[a] = b;
    };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (!bits[i]) continue;
            int first = 0;
            auto consider = [&](int nx, int ny) {
                if (nx < 0 || nx >= w || ny < 0) return;
                const int l = out.labels[static_cast<std::size_t>(ny) * w + nx];
                if (!l) return;
                if (!first)
                    first = l;
                else
                    unite(first, l);
            };
            consider(x - 1, y);
            consider(x - 1, y - 1);
            consider(x, y - 1);
            consider(x + 1, y - 1);
            if (!first) {
                first = static_cast<int>(parent.size());
                parent.push_back(first);
            }
            out.labels[i] = first;
        }
    }

    // Final labels numbered by first appearance in raster order.
    std::vector<int> final_label(parent.size(), 0);
    int next = 0;
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
        int& l = out.labels[i];
        if (!l) continue;
        const int root = find(l);
        if (!final_label[root]) final_label[root] = ++next;
        l = final_label[root];
    }

    struct Acc {
        std::size_t area = 0;
        long long sx = 0, sy = 0;
        int x_min, y_min, x_max, y_max;
    };
    std::vector<Acc> acc(next + 1, Acc{0, 0, 0, w, h, -1, -1});
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int l = out.labels[static_cast<std::size_t>(y) * w + x];
            if (!l) continue;
            Acc& a = acc[l];
            ++a.area;
            a.sx += x;
            a.sy += y;
            a.x_min = std::min(a.x_min, x);
            a.y_min = std::min(a.y_min, y);
            a.x_max = std::max(a.x_max, x);
            a.y_max = std::max(a.y_max, y);
        }
    }
    out.components.reserve(next);
    for (int l = 1; l <= next; ++l) {
        const Acc& a = acc[l];
        ConnectedComponent c;
        c.label = l;
        c.area = a.area;
        c.x_min = a.x_min;
        c.y_min = a.y_min;
        c.x_max = a.x_max;
        c.y_max = a.y_max;
        c.cx = static_cast<double>(a.sx) / static_cast<double>(a.area);
        c.cy = static_cast<double>(a.sy) / static_cast<double>(a.area);
        out.components.push_back(c);
    }
    std::stable_sort(out.components.begin(), out.components.end(),
                     [](const ConnectedComponent& a, const ConnectedComponent& b) { return a.area > b.area; });
    return out;
}

/// 8-connected components, largest first.
inline std::vector<ConnectedComponent> connected_components(const BinaryMask& mask) {
    return label_components(mask).components;
}

}  // namespace fizi
