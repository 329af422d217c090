#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fpm/field.hpp"
#include "fpm/geometry.hpp"

namespace fpm {

/// LED visitation order within one sweep.
enum class Ordering { Spiral, Raster, Random };

/// Whether stack image n is paired with LED n (Correct) or with a seeded
/// random LED (Misassociated, the "random image sequence" failure mode).
enum class Association { Correct, Misassociated };

enum class InitMode { UpsampledCenter, Random };

struct ApConfig {
  std::size_t max_iterations = 50;
  Ordering ordering = Ordering::Spiral;
  InitMode init = InitMode::UpsampledCenter;
  Association association = Association::Correct;
  std::uint64_t order_seed = 1;
  std::uint64_t init_seed = 1;
  std::uint64_t association_seed = 1;
  /// Stop once ||O_k - O_{k-1}|| / ||O_{k-1}|| drops below this.
  double tolerance = 1e-6;
  /// Moduli below epsilon are treated as zero during modulus replacement.
  double epsilon = 1e-12;
};

struct ApResult {
  ComplexField field;
  Spectrum spectrum;
  std::size_t iterations_run = 0;
  std::vector<double> residual_history;
};

/// Canonical LED indices in the order one sweep visits them.
std::vector<std::size_t> visit_order(const IlluminationGrid& grid, const ApConfig& cfg);

/// slot[n] = index of the stack image paired with LED n.
std::vector<std::size_t> image_association(std::size_t led_count, const ApConfig& cfg);

/// Starting spectrum estimate. `stack` must already be in association order.
Spectrum initial_spectrum(std::span<const RealImage> stack, const IlluminationGrid& grid,
                          const ApConfig& cfg);

/// Sum_n Sum_px (sqrt(I_n) - |g_n|)^2 / Sum_n Sum_px I_n, with g_n the
/// pupil-filtered field predicted by `estimate`. 0 for an empty stack.
double data_residual(std::span<const RealImage> stack, const IlluminationGrid& grid,
                     const Pupil& pupil, const Spectrum& estimate);

/// Alternating-projection reconstruction of the hires complex field.
///
/// Per visited LED n: g = F^-1{P . crop(O, k_n)}; g' = sqrt(I_n) g / |g|
/// (g' = sqrt(I_n) where |g| < epsilon); O <- embed(F{g'}). Runs full
/// sweeps until max_iterations or the relative spectrum change falls below
/// tolerance. Throws NumericalError naming the sweep if the estimate goes
/// non-finite.
ApResult ap_reconstruct(std::span<const RealImage> stack, const IlluminationGrid& grid,
                        const Pupil& pupil, const ApConfig& cfg);

const char* to_string(Ordering ordering);
const char* to_string(InitMode init);
Ordering ordering_from_string(const std::string& s);
InitMode init_mode_from_string(const std::string& s);

}  // namespace fpm
