#pragma once

// PFM (single channel, little-endian) and 8-bit PGM readers/writers.

#include <cstdint>
#include <filesystem>
#include <string>

#include "landsite/errors.hpp"
#include "landsite/grid.hpp"

namespace landsite {

/// Writes a "Pf" file with scale −1 (little-endian). Rows are stored bottom-up as
/// the format requires; NaN marks missing values.
void write_pfm(const std::filesystem::path& path, const Grid<float>& image);

/// Reads a single-channel PFM of either endianness. Throws IoError.
Grid<float> read_pfm(const std::filesystem::path& path);

/// Binary "P5" with maxval 255.
void write_pgm(const std::filesystem::path& path, const Grid<std::uint8_t>& image);
Grid<std::uint8_t> read_pgm(const std::filesystem::path& path);

/// 8-bit preview scaled linearly over [min, max] of the masked pixels; masked-out
/// pixels are written as 0.
Grid<std::uint8_t> preview_8bit(const Grid<double>& values, const Mask& valid);

}  // namespace landsite
