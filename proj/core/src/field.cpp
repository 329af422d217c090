#include "fpm/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fpm {

Pupil::Pupil(std::size_t size, double radius, PupilEdge edge) : radius_(radius), edge_(edge) {
  if (size == 0) {
    throw ValidationError("pupil size must be positive");
  }
  if (!(radius > 0.0) || radius > static_cast<double>(size) / 2.0) {
    std::ostringstream msg;
    msg << "pupil radius " << radius << " outside (0, " << static_cast<double>(size) / 2.0 << "]";
    throw ValidationError(msg.str());
  }
  mask_ = RealImage(size, size);
  const double c = static_cast<double>(size / 2);
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      const double d = std::hypot(static_cast<double>(x) - c, static_cast<double>(y) - c);
      mask_(x, y) = profile(d, radius, edge);
    }
  }
}

double Pupil::profile(double distance, double radius, PupilEdge edge) {
  if (edge == PupilEdge::Hard) {
    return distance <= radius ? 1.0 : 0.0;
  }
  return std::clamp(radius + 0.5 - distance, 0.0, 1.0);
}

ComplexField to_field(const RealImage& amplitude) {
  ComplexField out(amplitude.width(), amplitude.height());
  std::ranges::transform(amplitude.values(), out.values().begin(),
                         [](double a) { return Complex(a, 0.0); });
  return out;
}

RealImage modulus(const ComplexField& field) {
  RealImage out(field.width(), field.height());
  std::ranges::transform(field.values(), out.values().begin(),
                         [](const Complex& z) { return std::abs(z); });
  return out;
}

RealImage squared_modulus(const ComplexField& field) {
  RealImage out(field.width(), field.height());
  std::ranges::transform(field.values(), out.values().begin(),
                         [](const Complex& z) { return std::norm(z); });
  return out;
}

}  // namespace fpm
