#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "fpm/error.hpp"

namespace fpm {

using Complex = std::complex<double>;

/// Dense row-major 2D array. Element (x, y) lives at data[y * width + x].
template <typename T>
class Plane {
 public:
  using value_type = T;

  Plane() = default;

  Plane(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), data_(checked_area(width, height), fill) {}

  Plane(std::size_t width, std::size_t height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_area(width, height)) {
      throw ValidationError("plane data length does not match width x height");
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  const T& operator()(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  bool same_shape(const Plane& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  static std::size_t checked_area(std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) {
      throw ValidationError("plane dimensions must be at least 1x1");
    }
    return width * height;
  }

  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> data_;
};

/// Complex amplitude in the spatial domain (object, sensor field).
class ComplexField : public Plane<Complex> {
 public:
  using Plane::Plane;
};

/// Complex amplitude in the frequency domain, zero frequency at
/// (width / 2, height / 2).
class Spectrum : public Plane<Complex> {
 public:
  using Plane::Plane;
};

/// Real-valued image (intensities, amplitudes, ground truth).
class RealImage : public Plane<double> {
 public:
  using Plane::Plane;
};

/// Frequency offset in bins, relative to the zero-frequency bin.
struct BinOffset {
  int kx = 0;
  int ky = 0;
  friend bool operator==(const BinOffset&, const BinOffset&) = default;
};

enum class PupilEdge { Ramp, Hard };

/// Circular low-pass transmission on a size x size frequency support.
///
/// Ramp edges are antialiased: 1 inside radius - 0.5, 0 outside radius + 0.5,
/// linear in between. Hard edges are 1 for distance <= radius, else 0.
class Pupil {
 public:
  Pupil(std::size_t size, double radius, PupilEdge edge = PupilEdge::Ramp);

  std::size_t size() const noexcept { return mask_.width(); }
  double radius() const noexcept { return radius_; }
  PupilEdge edge() const noexcept { return edge_; }

  double operator()(std::size_t x, std::size_t y) const { return mask_(x, y); }
  std::span<const double> values() const noexcept { return mask_.values(); }
  const RealImage& mask() const noexcept { return mask_; }

  /// Mask value at a given distance from the center bin.
  static double profile(double distance, double radius, PupilEdge edge);

 private:
  double radius_;
  PupilEdge edge_;
  RealImage mask_;
};

ComplexField to_field(const RealImage& amplitude);
RealImage modulus(const ComplexField& field);
RealImage squared_modulus(const ComplexField& field);

}  // namespace fpm
