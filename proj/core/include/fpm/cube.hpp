#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fpm/field.hpp"
#include "fpm/geometry.hpp"

namespace fpm {

/// Provenance carried alongside every cube.
struct CubeMeta {
  double spacing = 0.0;
  double pupil_radius = 0.0;
  double overlap_target = 0.0;
  double overlap_achieved = 0.0;
  double noise_std = 0.0;
  std::uint64_t noise_seed = 0;
  std::uint64_t shuffle_seed = 0;
  /// permutation[slot] = canonical LED index stored in that channel slot.
  std::vector<std::size_t> permutation;
  /// norm[slot] = pre-normalization maximum of that channel (0 for an
  /// all-zero channel). Multiplying a slot by norm[slot] undoes rescaling.
  std::vector<double> norm;
  std::string source_id;
  std::string ground_truth;
  std::size_t n_side = 0;
  std::size_t hires_side = 0;
  PupilEdge pupil_edge = PupilEdge::Ramp;

  friend bool operator==(const CubeMeta&, const CubeMeta&) = default;
};

/// side x side x channels float32 stack, channel-major then row-major.
class IntensityCube {
 public:
  IntensityCube() = default;
  IntensityCube(std::size_t side, std::size_t channels, bool upsampled, std::vector<float> data,
                CubeMeta meta);

  std::size_t side() const noexcept { return side_; }
  std::size_t channels() const noexcept { return channels_; }
  bool upsampled() const noexcept { return upsampled_; }
  const CubeMeta& meta() const noexcept { return meta_; }
  CubeMeta& meta() noexcept { return meta_; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<const float> channel_data(std::size_t slot) const;
  float at(std::size_t slot, std::size_t x, std::size_t y) const {
    return data_[(slot * side_ + y) * side_ + x];
  }

  RealImage channel(std::size_t slot) const;

  friend bool operator==(const IntensityCube&, const IntensityCube&) = default;

 private:
  std::size_t side_ = 0;
  std::size_t channels_ = 0;
  bool upsampled_ = false;
  std::vector<float> data_;
  CubeMeta meta_;
};

/// Single-channel cube holding one image (ground truth, reconstruction,
/// prediction). Values are stored as given.
IntensityCube make_image_cube(const RealImage& image, const std::string& source_id = {});

/// CRC-64/XZ of a byte buffer.
std::uint64_t crc64(std::span<const unsigned char> bytes) noexcept;

/// Serialized .fpc bytes.
std::vector<unsigned char> encode_cube(const IntensityCube& cube);
IntensityCube decode_cube(std::span<const unsigned char> bytes);

/// Writes/reads a `.fpc` file. Read failures throw FormatError with a
/// distinct FormatErrorCode per failure.
void write_cube(const IntensityCube& cube, const std::filesystem::path& path);
IntensityCube read_cube(const std::filesystem::path& path);

/// Payload checksum recorded in the file trailer.
std::uint64_t payload_checksum(const IntensityCube& cube);

inline constexpr std::uint32_t kCubeFormatVersion = 1;
inline constexpr std::size_t kCubeFixedHeaderBytes = 8 + 4 + 4 + 4 + 4 + 8;

}  // namespace fpm
