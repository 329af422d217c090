#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fpm/field.hpp"
#include "fpm/geometry.hpp"

namespace fpm {

using WarningSink = std::function<void(const std::string&)>;

/// Writes "warning: <msg>" to stderr.
void warn_to_stderr(const std::string& message);

struct CorpusSetting {
  double overlap = 0.65;
  double noise_std = 0.0;
};

struct CorpusConfig {
  GeometrySpec geometry;
  std::vector<CorpusSetting> settings;
  /// Per-tile seeds are mixed from these and the tile's source id. A zero
  /// shuffle seed keeps every cube in canonical order.
  std::uint64_t noise_seed = 1;
  std::uint64_t shuffle_seed = 1;
  /// Stride between 128x128 tiles; 128 gives non-overlapping tiles.
  std::size_t crop_stride = 128;
  /// 0 = every tile.
  std::size_t max_tiles_per_image = 0;
  /// Also write a bicubic-upsampled sibling `<cube>.up.fpc` per cube.
  bool write_upsampled = false;
  std::size_t jobs = 1;
};

struct ManifestRow {
  std::string cube_path;  // relative to the manifest's directory
  std::string source;
  double overlap = 0.0;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t checksum = 0;

  friend bool operator==(const ManifestRow&, const ManifestRow&) = default;
};

struct Manifest {
  std::vector<ManifestRow> rows;
  /// Inputs that could not be used, as "path: reason".
  std::vector<std::string> skipped;
};

inline constexpr const char* kManifestHeader = "cube_path,source,overlap,noise_std,seed,checksum";
inline constexpr const char* kManifestFileName = "manifest.csv";

/// Named in-memory source image.
struct SourceImage {
  std::string id;
  RealImage image;
  double white_level = 1.0;
};

/// One cube per (tile, setting) under out_dir/cubes, ground truths under
/// out_dir/gt, plus out_dir/manifest.csv and out_dir/corpus.json.
/// Deterministic given the config seeds.
Manifest build_corpus(std::span<const SourceImage> images, const CorpusConfig& cfg,
                      const std::filesystem::path& out_dir,
                      const WarningSink& warn = warn_to_stderr);

/// Loads each path (PGM/PNG) first; unreadable files are skipped with a
/// warning and listed as '# skipped' comment lines in the manifest.
Manifest build_corpus(std::span<const std::filesystem::path> image_paths, const CorpusConfig& cfg,
                      const std::filesystem::path& out_dir,
                      const WarningSink& warn = warn_to_stderr);

void write_manifest(const Manifest& manifest, std::ostream& out);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(std::istream& in);
Manifest read_manifest(const std::filesystem::path& path);

/// 16 lowercase hex digits.
std::string checksum_hex(std::uint64_t checksum);

/// FNV-1a 64-bit hash of a string (stable across platforms).
std::uint64_t fnv1a64(const std::string& text) noexcept;

/// Deterministic per-tile seed; 0 is reserved for "disabled".
std::uint64_t tile_seed(std::uint64_t base, const std::string& source_id) noexcept;

}  // namespace fpm
