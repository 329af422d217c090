#include "fpm/forward_model.hpp"

#include <algorithm>
#include <sstream>

#include "fpm/dft.hpp"
#include "fpm/random.hpp"

namespace fpm {

void check_object_shape(const ComplexField& object, const IlluminationGrid& grid) {
  if (object.width() != object.height()) {
    throw ValidationError("object must be square");
  }
  if (object.width() != grid.hires_side()) {
    std::ostringstream msg;
    msg << "object side " << object.width() << " does not match grid hires side "
        << grid.hires_side();
    throw ValidationError(msg.str());
  }
}

namespace {

void check_pupil(const IlluminationGrid& grid, const Pupil& pupil) {
  if (pupil.size() != grid.lowres_side()) {
    std::ostringstream msg;
    msg << "pupil size " << pupil.size() << " does not match grid lowres side "
        << grid.lowres_side();
    throw ValidationError(msg.str());
  }
}

}  // namespace

RealImage simulate_intensity(const Spectrum& object_spectrum, const IlluminationGrid& grid,
                             std::size_t led, const Pupil& pupil) {
  check_pupil(grid, pupil);
  if (led >= grid.led_count()) {
    throw ValidationError("LED index out of range");
  }
  Spectrum window = crop_spectrum(object_spectrum, grid.center(led), grid.lowres_side());
  apply_pupil(window, pupil);
  return squared_modulus(inverse_dft(window));
}

RealImage simulate_intensity(const ComplexField& object, const IlluminationGrid& grid,
                             std::size_t led, const Pupil& pupil) {
  check_object_shape(object, grid);
  return simulate_intensity(forward_dft(object), grid, led, pupil);
}

std::vector<RealImage> simulate_stack(const ComplexField& object, const IlluminationGrid& grid,
                                      const Pupil& pupil, const NoiseSpec& noise) {
  if (!(noise.std >= 0.0)) {
    throw ValidationError("noise std must be non-negative");
  }
  check_object_shape(object, grid);
  const Spectrum spectrum = forward_dft(object);
  std::vector<RealImage> stack;
  stack.reserve(grid.led_count());
  for (std::size_t led = 0; led < grid.led_count(); ++led) {
    stack.push_back(simulate_intensity(spectrum, grid, led, pupil));
  }
  if (noise.std == 0.0 || stack.empty()) {
    return stack;
  }

  double peak = 0.0;
  for (const auto& image : stack) {
    peak = std::max(peak, std::ranges::max(image.values()));
  }
  const double sigma = noise.std * peak;
  for (std::size_t led = 0; led < stack.size(); ++led) {
    const CounterRng rng(noise.seed, led);
    auto values = stack[led].values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = std::max(values[i] + sigma * rng.normal(i), 0.0);
    }
  }
  return stack;
}

}  // namespace fpm
