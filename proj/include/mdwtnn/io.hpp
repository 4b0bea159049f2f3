#ifndef MDWTNN_IO_HPP
#define MDWTNN_IO_HPP

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mdwtnn/cube.hpp"

namespace mdwtnn {

// Cube container: a short text header terminated by an "end" line, then the
// raw little-endian payload in the fixed element order (frontal-slice-major,
// column-major within a slice).
//
//   MDWCUBE 1
//   dims <n1> <n2> <n3>
//   scalar f64            (or f32)
//   order slice-major
//   byteorder little
//   bands <comma-separated labels>     -- optional
//   end
//
// The header fields map one to one onto ENVI's samples/lines/bands with
// interleave bsq; a converter only has to rewrite the header text.

enum class ScalarType { f32, f64 };

struct CubeFileError : IoError {
    enum class Reason { malformed_header, truncated_payload, dim_overflow };
    CubeFileError(Reason r, const std::string& msg) : IoError(msg), reason(r) {}
    Reason reason;
};

struct LoadedCube {
    Cube cube;
    ScalarType scalar = ScalarType::f64;
    std::vector<std::string> band_labels;
};

namespace detail {

inline void put_u64_le(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

inline void put_u32_le(std::string& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

inline std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
    return v;
}

inline std::uint32_t get_u32_le(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int b = 3; b >= 0; --b) v = (v << 8) | p[b];
    return v;
}

// write-then-rename so partially written files never appear under the target
inline void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed: " + path.string() + " (" + ec.message() + ")");
}

inline std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

} // namespace detail

inline void save_cube(const Cube& x, const std::filesystem::path& path,
                      ScalarType scalar = ScalarType::f64,
                      const std::vector<std::string>& band_labels = {}) {
    std::string out;
    out.reserve(128 + x.size() * (scalar == ScalarType::f64 ? 8 : 4));
    out += "MDWCUBE 1\n";
    out += "dims " + std::to_string(x.dims.n1) + " " + std::to_string(x.dims.n2) + " " +
           std::to_string(x.dims.n3) + "\n";
    out += scalar == ScalarType::f64 ? "scalar f64\n" : "scalar f32\n";
    out += "order slice-major\n";
    out += "byteorder little\n";
    if (!band_labels.empty()) {
        out += "bands ";
        for (std::size_t i = 0; i < band_labels.size(); ++i) {
            if (i) out += ",";
            out += band_labels[i];
        }
        out += "\n";
    }
    out += "end\n";
    if (scalar == ScalarType::f64) {
        for (double v : x.values) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, 8);
            detail::put_u64_le(out, bits);
        }
    } else {
        for (double v : x.values) {
            const float f = static_cast<float>(v);
            std::uint32_t bits;
            std::memcpy(&bits, &f, 4);
            detail::put_u32_le(out, bits);
        }
    }
    detail::atomic_write(path, out);
}

inline LoadedCube load_cube_file(const std::filesystem::path& path) {
    const std::string bytes = detail::read_all(path);
    auto fail = [&](CubeFileError::Reason r, const std::string& msg) -> void {
        throw CubeFileError(r, path.string() + ": " + msg);
    };

    std::size_t pos = 0;
    auto next_line = [&]() -> std::string {
        const std::size_t eol = bytes.find('\n', pos);
        if (eol == std::string::npos)
            fail(CubeFileError::Reason::malformed_header, "header not terminated by 'end'");
        std::string line = bytes.substr(pos, eol - pos);
        pos = eol + 1;
        return line;
    };

    if (next_line() != "MDWCUBE 1")
        fail(CubeFileError::Reason::malformed_header, "missing MDWCUBE 1 magic");

    LoadedCube loaded;
    std::uint64_t n1 = 0, n2 = 0, n3 = 0;
    bool have_dims = false, have_scalar = false;
    for (;;) {
        const std::string line = next_line();
        if (line == "end") break;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "dims") {
            if (!(ls >> n1 >> n2 >> n3) || n1 == 0 || n2 == 0 || n3 == 0)
                fail(CubeFileError::Reason::malformed_header, "bad dims line");
            have_dims = true;
        } else if (key == "scalar") {
            std::string s;
            ls >> s;
            if (s == "f64") loaded.scalar = ScalarType::f64;
            else if (s == "f32") loaded.scalar = ScalarType::f32;
            else fail(CubeFileError::Reason::malformed_header, "unknown scalar type " + s);
            have_scalar = true;
        } else if (key == "order") {
            std::string s;
            ls >> s;
            if (s != "slice-major")
                fail(CubeFileError::Reason::malformed_header, "unsupported element order " + s);
        } else if (key == "byteorder") {
            std::string s;
            ls >> s;
            if (s != "little")
                fail(CubeFileError::Reason::malformed_header, "unsupported byte order " + s);
        } else if (key == "bands") {
            std::string rest;
            std::getline(ls, rest);
            if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
            std::istringstream bs(rest);
            std::string label;
            while (std::getline(bs, label, ',')) loaded.band_labels.push_back(label);
        } else if (key.empty()) {
            continue;
        } else {
            fail(CubeFileError::Reason::malformed_header, "unknown header field " + key);
        }
    }
    if (!have_dims || !have_scalar)
        fail(CubeFileError::Reason::malformed_header, "header lacks dims or scalar");

    std::size_t count = 0;
    try {
        count = checked_count(n1, n2, n3);
    } catch (const IoError& e) {
        fail(CubeFileError::Reason::dim_overflow, e.what());
    }
    const std::size_t width = loaded.scalar == ScalarType::f64 ? 8 : 4;
    const std::size_t expected = count * width;
    const std::size_t actual = bytes.size() - pos;
    if (actual != expected)
        fail(CubeFileError::Reason::truncated_payload,
             "payload has " + std::to_string(actual) + " bytes, expected " +
                 std::to_string(expected));

    loaded.cube = Cube(n1, n2, n3);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + pos;
    if (loaded.scalar == ScalarType::f64) {
        for (std::size_t t = 0; t < count; ++t) {
            const std::uint64_t bits = detail::get_u64_le(p + 8 * t);
            double v;
            std::memcpy(&v, &bits, 8);
            loaded.cube.values[t] = v;
        }
    } else {
        for (std::size_t t = 0; t < count; ++t) {
            const std::uint32_t bits = detail::get_u32_le(p + 4 * t);
            float f;
            std::memcpy(&f, &bits, 4);
            loaded.cube.values[t] = static_cast<double>(f); // exact widening
        }
    }
    return loaded;
}

inline Cube load_cube(const std::filesystem::path& path) { return load_cube_file(path).cube; }

// 16-bit binary PGM of band k, min-max scaled. The sidecar <path>.scale.txt
// records the affine map so the band can be reconstructed to within one
// quantization step.
inline void export_band(const Cube& x, std::size_t k, const std::filesystem::path& path) {
    if (k >= x.dims.n3) throw UsageError("export_band: band index out of range");
    const std::size_t n1 = x.dims.n1, n2 = x.dims.n2;
    const double* band = x.slice(k);
    double lo = band[0], hi = band[0];
    for (std::size_t t = 0; t < n1 * n2; ++t) {
        lo = std::min(lo, band[t]);
        hi = std::max(hi, band[t]);
    }
    const bool degenerate = !(hi > lo);
    const double scale = degenerate ? 0.0 : 65535.0 / (hi - lo);

    std::string out = "P5\n" + std::to_string(n2) + " " + std::to_string(n1) + "\n65535\n";
    // PGM raster is row-major; our slices are column-major
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const double v = band[i + n1 * j];
            const auto q = static_cast<std::uint16_t>(
                degenerate ? 0 : std::llround((v - lo) * scale));
            out.push_back(static_cast<char>(q >> 8)); // big-endian per PGM
            out.push_back(static_cast<char>(q & 0xff));
        }
    }
    detail::atomic_write(path, out);

    char buf[160];
    std::snprintf(buf, sizeof buf, "min %.17g\nmax %.17g\ndegenerate %d\n", lo, hi,
                  degenerate ? 1 : 0);
    detail::atomic_write(path.string() + ".scale.txt", buf);
}

} // namespace mdwtnn

#endif
