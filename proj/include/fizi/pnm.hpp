#pragma once

// Binary PPM (P6) frames and PGM (P5) mask dumps.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fizi/error.hpp"
#include "fizi/imaging.hpp"

namespace fizi::pnm {

namespace detail {

inline void skip_space_and_comments(std::istream& in) {
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string ignored;
            std::getline(in, ignored);
        } else if (c != EOF && std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

inline int read_header_int(std::istream& in, const char* what) {
    skip_space_and_comments(in);
    int v = -1;
    if (!(in >> v) || v < 0) throw FormatError(std::string("pnm: bad ") + what + " in header");
    return v;
}

struct Header {
    char kind = 0;  // '5' or '6'
    int width = 0;
    int height = 0;
};

inline Header read_header(std::istream& in) {
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
        throw FormatError("pnm: expected P5 or P6 magic at byte offset 0");
    Header h;
    h.kind = magic[1];
    h.width = read_header_int(in, "width");
    h.height = read_header_int(in, "height");
    const int maxval = read_header_int(in, "maxval");
    if (maxval != 255) throw FormatError("pnm: only maxval 255 is supported, got " + std::to_string(maxval));
    // Exactly one whitespace byte separates the header from the raster.
    if (!std::isspace(in.get())) throw FormatError("pnm: missing separator after header");
    if (h.width < 1 || h.height < 1) throw FormatError("pnm: empty raster");
    return h;
}

inline std::vector<std::uint8_t> read_payload(std::istream& in, std::size_t n) {
    std::vector<std::uint8_t> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw FormatError("pnm: truncated raster, expected " + std::to_string(n) + " bytes, got " +
                          std::to_string(in.gcount()));
    return buf;
}

inline std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw FormatError("cannot open " + p.string());
    return in;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw FormatError("cannot write " + p.string());
    return out;
}

}  // namespace detail

inline FrameRGB read_ppm(std::istream& in) {
    const auto h = detail::read_header(in);
    if (h.kind != '6') throw FormatError("pnm: expected P6 frame, got P5");
    return FrameRGB(h.width, h.height,
                    detail::read_payload(in, static_cast<std::size_t>(h.width) * h.height * 3));
}

inline FrameRGB read_ppm(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    try {
        return read_ppm(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

inline void write_ppm(const FrameRGB& frame, std::ostream& out) {
    out << "P6\n" << frame.width() << ' ' << frame.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.bytes().data()), static_cast<std::streamsize>(frame.bytes().size()));
}

inline void write_ppm(const FrameRGB& frame, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    write_ppm(frame, out);
}

/// Mask as P5 with 0 -> 0 and 1 -> 255.
inline void write_pgm(const BinaryMask& mask, std::ostream& out) {
    out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
    std::vector<char> buf(mask.size());
    const auto bits = mask.bits();
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = bits[i] ? static_cast<char>(255) : 0;
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

inline void write_pgm(const BinaryMask& mask, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    write_pgm(mask, out);
}

inline std::string pgm_bytes(const BinaryMask& mask) {
    std::ostringstream os(std::ios::binary);
    write_pgm(mask, os);
    return std::move(os).str();
}

/// Any nonzero gray level reads back as 1.
inline BinaryMask read_pgm(std::istream& in) {
    const auto h = detail::read_header(in);
    if (h.kind != '5') throw FormatError("pnm: expected P5 mask, got P6");
    const auto buf = detail::read_payload(in, static_cast<std::size_t>(h.width) * h.height);
    BinaryMask mask(h.width, h.height);
    auto bits = mask.bits();
    for (std::size_t i = 0; i < buf.size(); ++i) bits[i] = buf[i] ? 1 : 0;
    return mask;
}

inline BinaryMask read_pgm(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    return read_pgm(in);
}

}  // namespace fizi::pnm
