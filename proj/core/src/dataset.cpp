#include "fpm/dataset.hpp"

#include <algorithm>
#include <sstream>

#include "fpm/random.hpp"
#include "fpm/resample.hpp"

namespace fpm {

ComplexField prepare_ground_truth(const RealImage& image, std::optional<double> white_level) {
  constexpr std::size_t side = kGroundTruthSide;
  if (image.width() < side || image.height() < side) {
    std::ostringstream msg;
    msg << "image is " << image.width() << "x" << image.height() << ", need at least " << side
        << "x" << side;
    throw ValidationError(msg.str());
  }
  double level = 1.0;
  if (white_level) {
    if (!(*white_level > 0.0)) {
      throw ValidationError("white level must be positive");
    }
    level = *white_level;
  } else {
    const double peak = std::ranges::max(image.values());
    level = peak <= 1.0 ? 1.0 : (peak <= 255.0 ? 255.0 : 65535.0);
  }
  const std::size_t x0 = (image.width() - side) / 2;
  const std::size_t y0 = (image.height() - side) / 2;
  ComplexField out(side, side);
  for (std::size_t y = 0; y < side; ++y) {
    for (std::size_t x = 0; x < side; ++x) {
      out(x, y) = Complex(std::clamp(image(x0 + x, y0 + y) / level, 0.0, 1.0), 0.0);
    }
  }
  return out;
}

RealImage ground_truth_amplitude(const ComplexField& object) { return modulus(object); }

IntensityCube build_cube(const ComplexField& object, const IlluminationGrid& grid,
                         const Pupil& pupil, const NoiseSpec& noise, std::uint64_t shuffle_seed,
                         const CubeProvenance& provenance) {
  const auto stack = simulate_stack(object, grid, pupil, noise);
  const std::size_t channels = stack.size();
  if (channels == 0) {
    throw ValidationError("cannot build a cube from an empty illumination grid");
  }
  const std::size_t side = grid.lowres_side();
  const auto permutation = seeded_permutation(channels, shuffle_seed);

  CubeMeta meta;
  meta.spacing = grid.spacing();
  meta.pupil_radius = grid.pupil_radius();
  meta.overlap_target = provenance.overlap_target;
  meta.overlap_achieved = grid.achieved_overlap();
  meta.noise_std = noise.std;
  meta.noise_seed = noise.seed;
  meta.shuffle_seed = shuffle_seed;
  meta.permutation = permutation;
  meta.source_id = provenance.source_id;
  meta.ground_truth = provenance.ground_truth;
  meta.n_side = grid.n_side();
  meta.hires_side = grid.hires_side();
  meta.pupil_edge = pupil.edge();

  std::vector<float> data(side * side * channels);
  meta.norm.resize(channels);
  for (std::size_t slot = 0; slot < channels; ++slot) {
    const RealImage& image = stack[permutation[slot]];
    const double peak = std::ranges::max(image.values());
    meta.norm[slot] = peak;
    float* dst = data.data() + slot * side * side;
    for (std::size_t i = 0; i < side * side; ++i) {
      dst[i] = peak > 0.0 ? static_cast<float>(image.values()[i] / peak) : 0.0f;
    }
  }
  return IntensityCube(side, channels, false, std::move(data), std::move(meta));
}

IntensityCube upsample_cube(const IntensityCube& cube, std::size_t target_side) {
  if (cube.upsampled()) {
    throw ValidationError("cube is already upsampled");
  }
  std::vector<float> data;
  data.reserve(target_side * target_side * cube.channels());
  for (std::size_t slot = 0; slot < cube.channels(); ++slot) {
    const RealImage up = resize_bicubic(cube.channel(slot), target_side, target_side);
    for (double v : up.values()) {
      data.push_back(static_cast<float>(std::clamp(v, 0.0, 1.0)));
    }
  }
  return IntensityCube(target_side, cube.channels(), true, std::move(data), cube.meta());
}

IntensityCube unshuffle_cube(const IntensityCube& cube) {
  const std::size_t channels = cube.channels();
  const std::size_t plane = cube.side() * cube.side();
  const auto& perm = cube.meta().permutation;
  std::vector<float> data(cube.data().size());
  CubeMeta meta = cube.meta();
  for (std::size_t slot = 0; slot < channels; ++slot) {
    const std::size_t led = perm[slot];
    const auto src = cube.channel_data(slot);
    std::ranges::copy(src, data.begin() + static_cast<std::ptrdiff_t>(led * plane));
    meta.norm[led] = cube.meta().norm[slot];
    meta.permutation[led] = led;
  }
  meta.shuffle_seed = 0;
  return IntensityCube(cube.side(), channels, cube.upsampled(), std::move(data), std::move(meta));
}

std::vector<RealImage> slot_stack(const IntensityCube& cube) {
  std::vector<RealImage> out;
  out.reserve(cube.channels());
  for (std::size_t slot = 0; slot < cube.channels(); ++slot) {
    RealImage image = cube.channel(slot);
    const double scale = cube.meta().norm[slot];
    for (double& v : image.values()) {
      v *= scale;
    }
    out.push_back(std::move(image));
  }
  return out;
}

std::vector<RealImage> canonical_stack(const IntensityCube& cube) {
  return slot_stack(unshuffle_cube(cube));
}

IlluminationGrid grid_from_meta(const IntensityCube& cube) {
  if (cube.upsampled()) {
    throw ValidationError("AP needs the raw (non-upsampled) cube");
  }
  const CubeMeta& m = cube.meta();
  if (m.n_side * m.n_side != cube.channels() || m.hires_side == 0) {
    throw ValidationError("cube metadata does not describe an illumination grid");
  }
  return IlluminationGrid(m.n_side, m.spacing, m.pupil_radius, m.hires_side, cube.side());
}

}  // namespace fpm
