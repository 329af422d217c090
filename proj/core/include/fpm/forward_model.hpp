#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fpm/field.hpp"
#include "fpm/geometry.hpp"

namespace fpm {

/// Additive Gaussian sensor noise. `std` is relative to a stack whose clean
/// maximum is normalized to 1.
struct NoiseSpec {
  double std = 0.0;
  std::uint64_t seed = 0;
};

/// Low-resolution intensity |F^-1{P . crop(O, k_led)}|^2 for one LED.
RealImage simulate_intensity(const ComplexField& object, const IlluminationGrid& grid,
                             std::size_t led, const Pupil& pupil);

/// Same as simulate_intensity, starting from the object's spectrum.
RealImage simulate_intensity(const Spectrum& object_spectrum, const IlluminationGrid& grid,
                             std::size_t led, const Pupil& pupil);

/// All LEDs in canonical order, with optional noise.
///
/// Noise draws are counter-based on (seed, led, pixel). With the clean
/// stack maximum m, each pixel becomes max(I + std * m * z, 0), i.e. noise
/// of the given std on the max-normalized stack, returned at object scale.
/// std = 0 returns the clean images untouched.
std::vector<RealImage> simulate_stack(const ComplexField& object, const IlluminationGrid& grid,
                                      const Pupil& pupil, const NoiseSpec& noise);

/// Validates that an object matches the grid's hires geometry.
void check_object_shape(const ComplexField& object, const IlluminationGrid& grid);

}  // namespace fpm
