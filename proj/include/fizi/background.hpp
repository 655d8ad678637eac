#pragma once

// Per-pixel RGB min/max envelope learned from frames without the user.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <boost/crc.hpp>

#include "fizi/error.hpp"
#include "fizi/imaging.hpp"

namespace fizi {

struct BackgroundModel {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> min_rgb;  // interleaved, width * height * 3
    std::vector<std::uint8_t> max_rgb;
    std::uint32_t frames_learned = 0;
    std::uint8_t margin = 0;

    friend bool operator==(const BackgroundModel&, const BackgroundModel&) = default;
};

inline constexpr std::uint8_t kDefaultMargin = 10;
inline constexpr int kDefaultLearnFrames = 30;
inline constexpr double kDefaultRelearnThreshold = 40.0;

/// Incremental form of learn(), used by the frame loop to relearn one frame
/// at a time.
class BackgroundLearner {
public:
    void add(const FrameRGB& frame) {
        const auto px = frame.bytes();
        if (frames_ == 0) {
            width_ = frame.width();
            height_ = frame.height();
            lo_.assign(px.begin(), px.end());
            hi_.assign(px.begin(), px.end());
        } else {
            if (frame.width() != width_ || frame.height() != height_)
                throw LearningError("background frame " + std::to_string(frames_) + " is " +
                                    std::to_string(frame.width()) + "x" + std::to_string(frame.height()) +
                                    ", expected " + std::to_string(width_) + "x" + std::to_string(height_));
            for (std::size_t i = 0; i < px.size(); ++i) {
                lo_[i] = std::min(lo_[i], px[i]);
                hi_[i] = std::max(hi_[i], px[i]);
            }
        }
        ++frames_;
    }

    std::uint32_t frames() const { return frames_; }

    BackgroundModel finish(std::uint8_t margin) const {
        if (frames_ == 0) throw LearningError("background learning needs at least one frame");
        BackgroundModel m;
        m.width = width_;
        m.height = height_;
        m.frames_learned = frames_;
        m.margin = margin;
        m.min_rgb.resize(lo_.size());
        m.max_rgb.resize(hi_.size());
        for (std::size_t i = 0; i < lo_.size(); ++i) {
            m.min_rgb[i] = static_cast<std::uint8_t>(std::max(0, lo_[i] - margin));
            m.max_rgb[i] = static_cast<std::uint8_t>(std::min(255, hi_[i] + margin));
        }
        return m;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::uint32_t frames_ = 0;
    std::vector<std::uint8_t> lo_;
    std::vector<std::uint8_t> hi_;
};

inline BackgroundModel learn(std::span<const FrameRGB> frames, std::uint8_t margin = kDefaultMargin) {
    if (frames.empty()) throw LearningError("background learning needs at least one frame");
    BackgroundLearner learner;
    for (const auto& f : frames) learner.add(f);
    return learner.finish(margin);
}

/// True iff the mean luma jumped by strictly more than `threshold`.
inline bool relearn_trigger(double prev_mean_luma, double cur_mean_luma, double threshold = kDefaultRelearnThreshold) {
    return std::abs(cur_mean_luma - prev_mean_luma) > threshold;
}

/// CRC-32 over dimensions and both planes; identifies a model in state messages.
inline std::uint32_t checksum(const BackgroundModel& m) {
    boost::crc_32_type crc;
    const std::uint32_t dims[3] = {static_cast<std::uint32_t>(m.width), static_cast<std::uint32_t>(m.height),
                                   m.frames_learned};
    crc.process_bytes(dims, sizeof dims);
    crc.process_byte(m.margin);
    crc.process_bytes(m.min_rgb.data(), m.min_rgb.size());
    crc.process_bytes(m.max_rgb.data(), m.max_rgb.size());
    return crc.checksum();
}

// File layout: "FIZIBG1\0", u32 width, u32 height, u32 frames_learned,
// u8 margin, 3 zero bytes, min plane, max plane. Integers little-endian.
inline constexpr std::array<char, 8> kBackgroundMagic = {'F', 'I', 'Z', 'I', 'B', 'G', '1', '\0'};
inline constexpr std::size_t kBackgroundHeaderSize = 24;

namespace detail {
inline void put_u32(std::ostream& out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}
inline std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
}  // namespace detail

inline void save(const BackgroundModel& m, std::ostream& out) {
    out.write(kBackgroundMagic.data(), kBackgroundMagic.size());
    detail::put_u32(out, static_cast<std::uint32_t>(m.width));
    detail::put_u32(out, static_cast<std::uint32_t>(m.height));
    detail::put_u32(out, m.frames_learned);
    const char tail[4] = {static_cast<char>(m.margin), 0, 0, 0};
    out.write(tail, 4);
    out.write(reinterpret_cast<const char*>(m.min_rgb.data()), static_cast<std::streamsize>(m.min_rgb.size()));
    out.write(reinterpret_cast<const char*>(m.max_rgb.data()), static_cast<std::streamsize>(m.max_rgb.size()));
    if (!out) throw FormatError("background model: write failed");
}

inline void save(const BackgroundModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    save(m, out);
}

inline BackgroundModel load(std::istream& in) {
    unsigned char header[kBackgroundHeaderSize];
    in.read(reinterpret_cast<char*>(header), sizeof header);
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got < kBackgroundMagic.size() || std::memcmp(header, kBackgroundMagic.data(), kBackgroundMagic.size()) != 0) {
        std::size_t bad = 0;
        while (bad < got && bad < kBackgroundMagic.size() &&
               header[bad] == static_cast<unsigned char>(kBackgroundMagic[bad]))
            ++bad;
        throw FormatError("background model: bad magic at byte offset " + std::to_string(bad));
    }
    if (got < kBackgroundHeaderSize)
        throw FormatError("background model: truncated header at byte offset " + std::to_string(got) + ", expected " +
                          std::to_string(kBackgroundHeaderSize) + " header bytes");
    BackgroundModel m;
    m.width = static_cast<int>(detail::get_u32(header + 8));
    m.height = static_cast<int>(detail::get_u32(header + 12));
    m.frames_learned = detail::get_u32(header + 16);
    m.margin = header[20];
    if (m.width < 1 || m.height < 1)
        throw FormatError("background model: invalid dimensions at byte offset 8");
    const std::size_t plane = static_cast<std::size_t>(m.width) * static_cast<std::size_t>(m.height) * 3;
    auto read_plane = [&](std::vector<std::uint8_t>& dst, std::size_t offset, const char* name) {
        dst.resize(plane);
        in.read(reinterpret_cast<char*>(dst.data()), static_cast<std::streamsize>(plane));
        const auto n = static_cast<std::size_t>(in.gcount());
        if (n != plane)
            throw FormatError(std::string("background model: truncated ") + name + " plane at byte offset " +
                              std::to_string(offset + n) + ", expected " + std::to_string(plane) + " bytes, got " +
                              std::to_string(n));
    };
    read_plane(m.min_rgb, kBackgroundHeaderSize, "min");
    read_plane(m.max_rgb, kBackgroundHeaderSize + plane, "max");
    return m;
}

inline BackgroundModel load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return load(in);
}

}  // namespace fizi
