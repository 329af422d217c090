#pragma once

#include <filesystem>

#include "fpm/field.hpp"

namespace fpm {

struct LoadedImage {
  RealImage image;     // raw sample values
  double white_level;  // PGM maxval, or 255 / 65535 for PNG
};

/// Reads binary/ASCII PGM (P5/P2, 8 or 16 bit) or PNG (8/16 bit; color is
/// converted to luma). Throws IoError on missing or undecodable files.
LoadedImage read_image(const std::filesystem::path& path);

/// Writes a 16-bit binary PGM; values are clamped to [0,1] and scaled.
void write_pgm16(const RealImage& image, const std::filesystem::path& path);

/// Writes an 8-bit binary PGM; values are clamped to [0,1] and scaled.
void write_pgm8(const RealImage& image, const std::filesystem::path& path);

}  // namespace fpm
