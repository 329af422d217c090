#include "fpm/ap_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fpm/dft.hpp"
#include "fpm/random.hpp"
#include "fpm/resample.hpp"

namespace fpm {
namespace {

void check_stack(std::span<const RealImage> stack, const IlluminationGrid& grid,
                 const Pupil& pupil) {
  if (stack.size() != grid.led_count()) {
    std::ostringstream msg;
    msg << "stack has " << stack.size() << " images but the grid has " << grid.led_count()
        << " LEDs";
    throw ValidationError(msg.str());
  }
  if (pupil.size() != grid.lowres_side()) {
    throw ValidationError("pupil size does not match grid lowres side");
  }
  for (std::size_t i = 0; i < stack.size(); ++i) {
    if (stack[i].width() != grid.lowres_side() || stack[i].height() != grid.lowres_side()) {
      std::ostringstream msg;
      msg << "stack image " << i << " is " << stack[i].width() << "x" << stack[i].height()
          << ", expected " << grid.lowres_side() << "x" << grid.lowres_side();
      throw ValidationError(msg.str());
    }
    for (double v : stack[i].values()) {
      if (!std::isfinite(v) || v < 0.0) {
        std::ostringstream msg;
        msg << "stack image " << i << " has a negative or non-finite intensity";
        throw ValidationError(msg.str());
      }
    }
  }
}

ComplexField predicted_field(const Spectrum& estimate, const IlluminationGrid& grid,
                             std::size_t led, const Pupil& pupil) {
  Spectrum window = crop_spectrum(estimate, grid.center(led), grid.lowres_side());
  apply_pupil(window, pupil);
  return inverse_dft(window);
}

double squared_norm(std::span<const Complex> values) {
  double acc = 0.0;
  for (const Complex& v : values) {
    acc += std::norm(v);
  }
  return acc;
}

bool all_finite(std::span<const Complex> values) {
  return std::ranges::all_of(values, [](const Complex& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

}  // namespace

std::vector<std::size_t> visit_order(const IlluminationGrid& grid, const ApConfig& cfg) {
  switch (cfg.ordering) {
    case Ordering::Raster:
      return grid.raster_order();
    case Ordering::Random:
      return seeded_permutation(grid.led_count(), cfg.order_seed);
    case Ordering::Spiral:
      break;
  }
  std::vector<std::size_t> order(grid.led_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

std::vector<std::size_t> image_association(std::size_t led_count, const ApConfig& cfg) {
  if (cfg.association == Association::Misassociated) {
    return seeded_permutation(led_count, cfg.association_seed);
  }
  std::vector<std::size_t> slots(led_count);
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  return slots;
}

Spectrum initial_spectrum(std::span<const RealImage> stack, const IlluminationGrid& grid,
                          const ApConfig& cfg) {
  const std::size_t side = grid.hires_side();
  ComplexField field(side, side);
  if (cfg.init == InitMode::Random) {
    SplitMix64 rng(cfg.init_seed);
    for (Complex& v : field.values()) {
      const double amplitude = rng.uniform();
      const double phase = (2.0 * rng.uniform() - 1.0) * std::numbers::pi;
      v = std::polar(amplitude, phase);
    }
  } else if (!stack.empty()) {
    RealImage amplitude(stack[0].width(), stack[0].height());
    std::ranges::transform(stack[0].values(), amplitude.values().begin(),
                           [](double i) { return std::sqrt(i); });
    const RealImage up = resize_bicubic(amplitude, side, side);
    std::ranges::transform(up.values(), field.values().begin(),
                           [](double a) { return Complex(std::max(a, 0.0), 0.0); });
  }
  return forward_dft(field);
}

double data_residual(std::span<const RealImage> stack, const IlluminationGrid& grid,
                     const Pupil& pupil, const Spectrum& estimate) {
  if (stack.empty()) {
    return 0.0;
  }
  check_stack(stack, grid, pupil);
  double mismatch = 0.0;
  double total = 0.0;
  for (std::size_t led = 0; led < stack.size(); ++led) {
    const ComplexField g = predicted_field(estimate, grid, led, pupil);
    const auto measured = stack[led].values();
    const auto predicted = g.values();
    for (std::size_t i = 0; i < measured.size(); ++i) {
      const double diff = std::sqrt(measured[i]) - std::abs(predicted[i]);
      mismatch += diff * diff;
      total += measured[i];
    }
  }
  return total > 0.0 ? mismatch / total : 0.0;
}

ApResult ap_reconstruct(std::span<const RealImage> stack, const IlluminationGrid& grid,
                        const Pupil& pupil, const ApConfig& cfg) {
  if (cfg.max_iterations < 1) {
    throw ValidationError("max_iterations must be at least 1");
  }
  if (!(cfg.tolerance >= 0.0)) {
    throw ValidationError("tolerance must be non-negative");
  }
  if (!(cfg.epsilon > 0.0)) {
    throw ValidationError("epsilon must be positive");
  }
  check_stack(stack, grid, pupil);

  const auto slots = image_association(stack.size(), cfg);
  std::vector<RealImage> paired;
  paired.reserve(stack.size());
  for (std::size_t led = 0; led < stack.size(); ++led) {
    paired.push_back(stack[slots[led]]);
  }
  std::vector<RealImage> amplitudes = paired;
  for (auto& image : amplitudes) {
    for (double& v : image.values()) {
      v = std::sqrt(v);
    }
  }

  const auto order = visit_order(grid, cfg);

  ApResult result;
  Spectrum estimate = initial_spectrum(paired, grid, cfg);
  // No LEDs means nothing to project onto; the initial guess is the answer.
  const std::size_t sweeps = grid.led_count() == 0 ? 0 : cfg.max_iterations;
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    const Spectrum previous = estimate;
    for (std::size_t led : order) {
      ComplexField g = predicted_field(estimate, grid, led, pupil);
      const auto measured = amplitudes[led].values();
      auto values = g.values();
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double modulus = std::abs(values[i]);
        values[i] = modulus < cfg.epsilon ? Complex(measured[i], 0.0)
                                          : values[i] * (measured[i] / modulus);
      }
      if (!all_finite(values)) {
        throw NumericalError(sweep, "non-finite field during sweep " + std::to_string(sweep));
      }
      embed_spectrum_into(estimate, forward_dft(g), grid.center(led), pupil);
    }
    if (!all_finite(estimate.values())) {
      throw NumericalError(sweep, "spectrum estimate became non-finite in sweep " +
                                      std::to_string(sweep));
    }
    result.residual_history.push_back(data_residual(paired, grid, pupil, estimate));
    ++result.iterations_run;

    double diff = 0.0;
    const auto now = estimate.values();
    const auto before = previous.values();
    for (std::size_t i = 0; i < now.size(); ++i) {
      diff += std::norm(now[i] - before[i]);
    }
    const double base = squared_norm(before);
    const double change = base > 0.0 ? std::sqrt(diff / base) : (diff > 0.0 ? INFINITY : 0.0);
    if (change < cfg.tolerance) {
      break;
    }
  }

  result.field = inverse_dft(estimate);
  result.spectrum = std::move(estimate);
  return result;
}

const char* to_string(Ordering ordering) {
  switch (ordering) {
    case Ordering::Raster:
      return "raster";
    case Ordering::Random:
      return "random";
    case Ordering::Spiral:
      break;
  }
  return "spiral";
}

const char* to_string(InitMode init) {
  return init == InitMode::Random ? "random" : "upsampled-center";
}

Ordering ordering_from_string(const std::string& s) {
  if (s == "spiral") return Ordering::Spiral;
  if (s == "raster") return Ordering::Raster;
  if (s == "random") return Ordering::Random;
  throw ValidationError("unknown ordering '" + s + "' (expected spiral, raster or random)");
}

InitMode init_mode_from_string(const std::string& s) {
  if (s == "upsampled-center" || s == "upsampled") return InitMode::UpsampledCenter;
  if (s == "random") return InitMode::Random;
  throw ValidationError("unknown init '" + s + "' (expected upsampled-center or random)");
}

}  // namespace fpm
