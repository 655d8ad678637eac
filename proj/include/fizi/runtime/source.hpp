#pragma once

// Replayable frame sources: a directory of .ppm files (lexicographic order)
// or a raw stream ("FIZIRAW1", u32 width, u32 height, then w*h*3 bytes per
// frame).

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fizi/error.hpp"
#include "fizi/imaging.hpp"
#include "fizi/pnm.hpp"
#include "fizi/tracker.hpp"

namespace fizi::runtime {

enum class SourceKind { dir, rawstream };

struct SourceSpec {
    SourceKind kind = SourceKind::dir;
    std::filesystem::path path;  // "-" reads a raw stream from stdin
    double fps = 30.0;
};

/// "dir:PATH" or "raw:PATH".
inline SourceSpec parse_source_spec(const std::string& text, double fps = 30.0) {
    SourceSpec s;
    s.fps = fps;
    if (text.rfind("dir:", 0) == 0) {
        s.kind = SourceKind::dir;
        s.path = text.substr(4);
    } else if (text.rfind("raw:", 0) == 0) {
        s.kind = SourceKind::rawstream;
        s.path = text.substr(4);
    } else {
        throw ConfigError("source must be dir:PATH or raw:PATH, got \"" + text + "\"");
    }
    if (s.path.empty()) throw ConfigError("source path is empty");
    if (!(fps > 0.0)) throw ConfigError("fps must be > 0");
    return s;
}

class FrameSource {
public:
    virtual ~FrameSource() = default;
    /// Next frame, or nullopt at a clean end of stream. Throws SourceError.
    virtual std::optional<FrameRGB> read() = 0;
    /// Restart from the first frame where the source supports it.
    virtual bool rewind() { return false; }
};

class DirSource : public FrameSource {
public:
    explicit DirSource(const std::filesystem::path& dir) : dir_(dir) { scan(); }

    std::optional<FrameRGB> read() override {
        if (next_ >= files_.size()) return std::nullopt;
        try {
            return pnm::read_ppm(files_[next_++]);
        } catch (const FormatError& e) {
            throw SourceError(e.what());
        }
    }

    bool rewind() override {
        next_ = 0;
        return true;
    }

    std::size_t size() const { return files_.size(); }

private:
    void scan() {
        std::error_code ec;
        if (!std::filesystem::is_directory(dir_, ec)) throw SourceError("source directory not found: " + dir_.string());
        for (const auto& entry : std::filesystem::directory_iterator(dir_, ec))
            if (entry.is_regular_file() && entry.path().extension() == ".ppm") files_.push_back(entry.path());
        if (ec) throw SourceError("cannot list " + dir_.string() + ": " + ec.message());
        std::sort(files_.begin(), files_.end(),
                  [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
    }

    std::filesystem::path dir_;
    std::vector<std::filesystem::path> files_;
    std::size_t next_ = 0;
};

inline constexpr std::array<char, 8> kRawMagic = {'F', 'I', 'Z', 'I', 'R', 'A', 'W', '1'};
inline constexpr std::size_t kRawHeaderSize = 16;

inline std::string raw_header(int width, int height) {
    std::string h(kRawMagic.begin(), kRawMagic.end());
    for (std::uint32_t v : {static_cast<std::uint32_t>(width), static_cast<std::uint32_t>(height)})
        for (int i = 0; i < 4; ++i) h.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    return h;
}

/// Header followed by one frame; also the payload of binary video messages.
inline std::string raw_frame_bytes(const FrameRGB& f) {
    std::string out = raw_header(f.width(), f.height());
    out.append(reinterpret_cast<const char*>(f.bytes().data()), f.bytes().size());
    return out;
}

class RawStreamSource : public FrameSource {
public:
    explicit RawStreamSource(std::istream& in) : in_(&in) { read_header(); }

    explicit RawStreamSource(const std::filesystem::path& path)
        : owned_(std::make_unique<std::ifstream>(path, std::ios::binary)), in_(owned_.get()) {
        if (!*owned_) throw SourceError("cannot open raw stream " + path.string());
        read_header();
    }

    std::optional<FrameRGB> read() override {
        if (width_ == 0) return std::nullopt;  // empty stream
        std::vector<std::uint8_t> buf(static_cast<std::size_t>(width_) * height_ * 3);
        in_->read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        const auto got = static_cast<std::size_t>(in_->gcount());
        if (got == 0) return std::nullopt;
        if (got != buf.size())
            throw SourceError("raw stream: truncated frame " + std::to_string(frames_) + ", expected " +
                              std::to_string(buf.size()) + " bytes, got " + std::to_string(got));
        ++frames_;
        return FrameRGB(width_, height_, std::move(buf));
    }

    int width() const { return width_; }
    int height() const { return height_; }

private:
    void read_header() {
        char h[kRawHeaderSize];
        in_->read(h, kRawHeaderSize);
        const auto got = static_cast<std::size_t>(in_->gcount());
        if (got == 0) return;  // an empty stream is a clean end
        if (got != kRawHeaderSize || std::memcmp(h, kRawMagic.data(), kRawMagic.size()) != 0)
            throw SourceError("raw stream: bad FIZIRAW1 header");
        auto u32 = [&](int off) {
            std::uint32_t v = 0;
            for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(h[off + i])) << (8 * i);
            return v;
        };
        width_ = static_cast<int>(u32(8));
        height_ = static_cast<int>(u32(12));
        if (width_ < 1 || height_ < 1) throw SourceError("raw stream: invalid dimensions");
    }

    std::unique_ptr<std::ifstream> owned_;
    std::istream* in_;
    int width_ = 0;
    int height_ = 0;
    std::size_t frames_ = 0;
};

inline std::unique_ptr<FrameSource> open_source(const SourceSpec& spec) {
    if (spec.kind == SourceKind::dir) return std::make_unique<DirSource>(spec.path);
    if (spec.path == "-") return std::make_unique<RawStreamSource>(std::cin);
    return std::make_unique<RawStreamSource>(spec.path);
}

/// Holds delivery to at most `fps` frames per second of wall time.
class FramePacer {
public:
    explicit FramePacer(double fps) : period_(std::chrono::duration<double>(1.0 / fps)) {}

    void wait(std::size_t index) {
        using clock = std::chrono::steady_clock;
        if (!start_) start_ = clock::now();
        const auto due = *start_ + std::chrono::duration_cast<clock::duration>(period_ * static_cast<double>(index));
        std::this_thread::sleep_until(due);
    }

private:
    std::chrono::duration<double> period_;
    std::optional<std::chrono::steady_clock::time_point> start_;
};

/// Stream time of a frame: index * 1000 / fps, independent of wall clock.
inline Millis frame_timestamp(std::size_t index, double fps) {
    return static_cast<Millis>(static_cast<double>(index) * 1000.0 / fps);
}

}  // namespace fizi::runtime
