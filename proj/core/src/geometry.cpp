#include "fpm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

namespace fpm {

WaveVector angle_to_wavevector(const PhysicalConfig& cfg, std::size_t led_index) {
  if (!(cfg.wavelength > 0.0)) {
    throw ValidationError("wavelength must be positive");
  }
  if (led_index >= cfg.angles.size()) {
    std::ostringstream msg;
    msg << "LED index " << led_index << " out of range (" << cfg.angles.size() << " angles)";
    throw ValidationError(msg.str());
  }
  const auto [tx, ty] = cfg.angles[led_index];
  const double sx = std::sin(tx);
  const double sy = std::sin(ty);
  if (!std::isfinite(sx) || !std::isfinite(sy) || std::abs(sx) > 1.0 || std::abs(sy) > 1.0) {
    throw ValidationError("illumination angle has |sin theta| > 1 or is not finite");
  }
  return {sx / cfg.wavelength, sy / cfg.wavelength};
}

BinOffset wavevector_to_bins(WaveVector k, double field_of_view) {
  if (!(field_of_view > 0.0)) {
    throw ValidationError("field of view must be positive");
  }
  return {static_cast<int>(std::lround(k.kx * field_of_view)),
          static_cast<int>(std::lround(k.ky * field_of_view))};
}

double overlap_ratio(double spacing, double pupil_radius) {
  if (!(pupil_radius > 0.0)) {
    throw ValidationError("pupil radius must be positive");
  }
  if (!(spacing >= 0.0)) {
    throw ValidationError("spacing must be non-negative");
  }
  const double u = spacing / (2.0 * pupil_radius);
  if (u >= 1.0) {
    return 0.0;
  }
  return (2.0 / std::numbers::pi) * (std::acos(u) - u * std::sqrt(1.0 - u * u));
}

double spacing_for_overlap(double target, double pupil_radius) {
  if (!(pupil_radius > 0.0)) {
    throw ValidationError("pupil radius must be positive");
  }
  if (!(target >= 0.0) || !(target < 1.0)) {
    throw ValidationError("overlap target must lie in [0, 1)");
  }
  if (target == 0.0) {
    return 2.0 * pupil_radius;
  }
  // overlap_ratio is strictly decreasing on [0, 2r].
  double lo = 0.0;
  double hi = 2.0 * pupil_radius;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) {
      break;
    }
    if (overlap_ratio(mid, pupil_radius) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double a = overlap_ratio(lo, pupil_radius) - target;
  const double b = target - overlap_ratio(hi, pupil_radius);
  return a <= b ? lo : hi;
}

double radius_for_overlap(double target, double spacing) {
  if (!(spacing > 0.0)) {
    throw ValidationError("spacing must be positive to solve for a radius");
  }
  // overlap depends only on spacing / radius.
  return spacing / spacing_for_overlap(target, 1.0);
}

IlluminationGrid::IlluminationGrid(std::size_t n_side, double spacing, double pupil_radius,
                                   std::size_t hires_side, std::size_t lowres_side)
    : n_side_(n_side),
      spacing_(spacing),
      pupil_radius_(pupil_radius),
      hires_side_(hires_side),
      lowres_side_(lowres_side) {
  if (!std::isfinite(spacing) || spacing < 0.0) {
    throw ValidationError("grid spacing must be finite and non-negative");
  }
  if (lowres_side == 0 || hires_side == 0 || hires_side % lowres_side != 0) {
    throw ValidationError("hires side must be a positive multiple of the lowres side");
  }
  if (!(pupil_radius > 0.0) || pupil_radius > static_cast<double>(lowres_side) / 2.0) {
    std::ostringstream msg;
    msg << "pupil radius " << pupil_radius << " outside (0, " << lowres_side / 2.0 << "]";
    throw GeometryError(msg.str());
  }

  const double mid = (static_cast<double>(n_side) - 1.0) / 2.0;
  struct Led {
    BinOffset offset;
    std::pair<int, int> index;
    double dist2;
    double angle;
  };
  std::vector<Led> leds;
  leds.reserve(n_side * n_side);
  for (std::size_t row = 0; row < n_side; ++row) {
    for (std::size_t col = 0; col < n_side; ++col) {
      const double gx = static_cast<double>(col) - mid;
      const double gy = static_cast<double>(row) - mid;
      double angle = std::atan2(gy, gx);
      if (angle < 0.0) {
        angle += 2.0 * std::numbers::pi;
      }
      leds.push_back({{static_cast<int>(std::lround(gx * spacing)),
                       static_cast<int>(std::lround(gy * spacing))},
                      {static_cast<int>(col), static_cast<int>(row)},
                      gx * gx + gy * gy,
                      angle});
    }
  }
  std::stable_sort(leds.begin(), leds.end(), [](const Led& a, const Led& b) {
    if (a.dist2 != b.dist2) {
      return a.dist2 < b.dist2;
    }
    return a.angle < b.angle;
  });

  const double half = static_cast<double>(hires_side) / 2.0;
  const int window_limit = static_cast<int>((hires_side - lowres_side) / 2);
  for (const Led& led : leds) {
    const int reach = std::max(std::abs(led.offset.kx), std::abs(led.offset.ky));
    const double extent = reach + pupil_radius;
    if (extent > half) {
      std::ostringstream msg;
      msg << "pupil extent " << extent << " bins (center offset " << reach << " + radius "
          << pupil_radius << ") exceeds spectrum half-width " << half;
      throw GeometryError(msg.str());
    }
    if (reach > window_limit) {
      std::ostringstream msg;
      msg << "crop window at offset " << reach << " exceeds the limit " << window_limit
          << " for a " << lowres_side << "-bin window in a " << hires_side << "-bin spectrum";
      throw GeometryError(msg.str());
    }
    centers_.push_back(led.offset);
    indices_.push_back(led.index);
  }
}

std::vector<std::size_t> IlluminationGrid::raster_order() const {
  std::vector<std::size_t> order(led_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::sort(order, [this](std::size_t a, std::size_t b) {
    const auto [ca, ra] = indices_[a];
    const auto [cb, rb] = indices_[b];
    return ra != rb ? ra < rb : ca < cb;
  });
  return order;
}

double IlluminationGrid::achieved_overlap() const {
  if (n_side_ < 2) {
    return 0.0;
  }
  std::vector<BinOffset> by_index(n_side_ * n_side_);
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    const auto [col, row] = indices_[i];
    by_index[static_cast<std::size_t>(row) * n_side_ + static_cast<std::size_t>(col)] = centers_[i];
  }
  double sum = 0.0;
  std::size_t pairs = 0;
  auto accumulate = [&](const BinOffset& a, const BinOffset& b) {
    sum += overlap_ratio(std::hypot(a.kx - b.kx, a.ky - b.ky), pupil_radius_);
    ++pairs;
  };
  for (std::size_t row = 0; row < n_side_; ++row) {
    for (std::size_t col = 0; col < n_side_; ++col) {
      const BinOffset& here = by_index[row * n_side_ + col];
      if (col + 1 < n_side_) {
        accumulate(here, by_index[row * n_side_ + col + 1]);
      }
      if (row + 1 < n_side_) {
        accumulate(here, by_index[(row + 1) * n_side_ + col]);
      }
    }
  }
  return sum / static_cast<double>(pairs);
}

Pupil IlluminationGrid::make_pupil(PupilEdge edge) const {
  return Pupil(lowres_side_, pupil_radius_, edge);
}

IlluminationGrid make_grid(const GeometrySpec& spec, double overlap) {
  double spacing = 0.0;
  double radius = spec.pupil_radius;
  if (spec.mode == GeometryMode::FixedRadius) {
    spacing = spacing_for_overlap(overlap, spec.pupil_radius);
  } else {
    spacing = spacing_for_overlap(spec.anchor_overlap, spec.pupil_radius);
    radius = radius_for_overlap(overlap, spacing);
  }
  return IlluminationGrid(spec.n_side, spacing, radius, spec.hires_side, spec.lowres_side);
}

const char* to_string(GeometryMode mode) {
  return mode == GeometryMode::FixedRadius ? "fixed-radius" : "fixed-spacing";
}

GeometryMode geometry_mode_from_string(const std::string& s) {
  if (s == "fixed-radius") {
    return GeometryMode::FixedRadius;
  }
  if (s == "fixed-spacing") {
    return GeometryMode::FixedSpacing;
  }
  throw ValidationError("unknown geometry mode '" + s + "' (expected fixed-spacing or fixed-radius)");
}

}  // namespace fpm
