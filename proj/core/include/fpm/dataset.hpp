#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fpm/cube.hpp"
#include "fpm/field.hpp"
#include "fpm/forward_model.hpp"
#include "fpm/geometry.hpp"

namespace fpm {

inline constexpr std::size_t kGroundTruthSide = 128;

/// Center-crops to 128x128 and divides by `white_level` (clamped to [0,1]),
/// giving a zero-phase amplitude object. When white_level is absent it is
/// inferred: 1 if max <= 1, 255 if max <= 255, else 65535.
ComplexField prepare_ground_truth(const RealImage& image,
                                  std::optional<double> white_level = std::nullopt);

/// Amplitude of a prepared ground truth as a real image.
RealImage ground_truth_amplitude(const ComplexField& object);

struct CubeProvenance {
  std::string source_id;
  std::string ground_truth;
  double overlap_target = 0.0;
};

/// simulate_stack -> channel-wise max normalization -> seeded channel
/// shuffle (seed 0 keeps canonical order) -> cube with full metadata.
IntensityCube build_cube(const ComplexField& object, const IlluminationGrid& grid,
                         const Pupil& pupil, const NoiseSpec& noise, std::uint64_t shuffle_seed,
                         const CubeProvenance& provenance = {});

/// Bicubic-resamples every channel to target_side and clamps to [0,1].
/// Rejects cubes that are already upsampled.
IntensityCube upsample_cube(const IntensityCube& cube, std::size_t target_side = 128);

/// Reorders channels to canonical LED order (identity permutation,
/// shuffle_seed 0). Data and norm constants move with their channels.
IntensityCube unshuffle_cube(const IntensityCube& cube);

/// Denormalized intensities in canonical LED order, ready for AP.
std::vector<RealImage> canonical_stack(const IntensityCube& cube);

/// Denormalized intensities in stored slot order (no unshuffling).
std::vector<RealImage> slot_stack(const IntensityCube& cube);

/// Illumination grid recorded in a raw cube's metadata.
IlluminationGrid grid_from_meta(const IntensityCube& cube);

}  // namespace fpm
