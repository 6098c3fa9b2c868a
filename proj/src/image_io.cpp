#include "landsite/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace landsite {
namespace {

std::uint32_t byteswap32(std::uint32_t v) {
    return ((v & 0x000000FFu) << 24) | ((v & 0x0000FF00u) << 8) | ((v & 0x00FF0000u) >> 8) |
           ((v & 0xFF000000u) >> 24);
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
    std::string tok;
    char c = 0;
    while (in.get(c)) {
        if (c == '#') {
            std::string ignored;
            std::getline(in, ignored);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(c);
    }
    return tok;
}

int parse_dim(const std::string& tok, const std::filesystem::path& path) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError(path.string() + ": bad image dimension '" + tok + "'");
    }
}

}  // namespace

void write_pfm(const std::filesystem::path& path, const Grid<float>& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "Pf\n" << image.width() << ' ' << image.height() << "\n-1.0\n";
    const bool little = std::endian::native == std::endian::little;
    for (int y = image.height() - 1; y >= 0; --y) {
        for (int x = 0; x < image.width(); ++x) {
            std::uint32_t bits = std::bit_cast<std::uint32_t>(image(x, y));
            if (!little) bits = byteswap32(bits);
            out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

Grid<float> read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::string magic = header_token(in);
    if (magic != "Pf") throw IoError(path.string() + ": not a single-channel PFM (magic '" + magic + "')");
    const int w = parse_dim(header_token(in), path);
    const int h = parse_dim(header_token(in), path);
    const std::string scale_tok = header_token(in);
    double scale = 0.0;
    try {
        scale = std::stod(scale_tok);
    } catch (const std::exception&) {
        throw IoError(path.string() + ": bad PFM scale '" + scale_tok + "'");
    }
    if (scale == 0.0) throw IoError(path.string() + ": PFM scale must be non-zero");
    const bool file_little = scale < 0.0;
    const bool swap = file_little != (std::endian::native == std::endian::little);

    Grid<float> image(w, h);
    for (int y = h - 1; y >= 0; --y) {
        for (int x = 0; x < w; ++x) {
            std::uint32_t bits = 0;
            if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
                throw IoError(path.string() + ": truncated PFM data");
            }
            if (swap) bits = byteswap32(bits);
            image(x, y) = std::bit_cast<float>(bits);
        }
    }
    return image;
}

void write_pgm(const std::filesystem::path& path, const Grid<std::uint8_t>& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.data().data()), static_cast<std::streamsize>(image.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

Grid<std::uint8_t> read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    if (header_token(in) != "P5") throw IoError(path.string() + ": not a binary PGM");
    const int w = parse_dim(header_token(in), path);
    const int h = parse_dim(header_token(in), path);
    if (parse_dim(header_token(in), path) != 255) throw IoError(path.string() + ": only 8-bit PGM is supported");
    Grid<std::uint8_t> image(w, h);
    if (!in.read(reinterpret_cast<char*>(image.data().data()), static_cast<std::streamsize>(image.size()))) {
        throw IoError(path.string() + ": truncated PGM data");
    }
    return image;
}

Grid<std::uint8_t> preview_8bit(const Grid<double>& values, const Mask& valid) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!valid[i]) continue;
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
    }
    Grid<std::uint8_t> out(values.width(), values.height(), 0);
    const double range = hi - lo;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!valid[i]) continue;
        const double t = range > 0.0 ? (values[i] - lo) / range : 0.5;
        out[i] = static_cast<std::uint8_t>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
    }
    return out;
}

}  // namespace landsite
