#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpm/field.hpp"

namespace fpm {

/// Illumination angles for a physical LED array.
struct PhysicalConfig {
  double wavelength = 0.5;                         // same length unit as field_of_view
  std::vector<std::pair<double, double>> angles;   // (theta_x, theta_y) radians per LED
  double field_of_view = 16.0;                     // side of the imaged region
};

/// Continuous spatial frequency in cycles per length unit.
struct WaveVector {
  double kx = 0.0;
  double ky = 0.0;
};

/// (sin theta_x / lambda, sin theta_y / lambda) for one LED.
WaveVector angle_to_wavevector(const PhysicalConfig& cfg, std::size_t led_index);

/// Frequency to centered-bin offset: value * field_of_view, rounded.
BinOffset wavevector_to_bins(WaveVector k, double field_of_view);

/// Fractional intersection area of two disks of radius r whose centers are
/// `spacing` apart: (2/pi)[acos(u) - u sqrt(1 - u^2)], u = d / 2r.
double overlap_ratio(double spacing, double pupil_radius);

/// Spacing whose overlap_ratio equals `target` (bisection, 1e-9 in ratio).
double spacing_for_overlap(double target, double pupil_radius);

/// Pupil radius whose overlap with neighbors `spacing` apart equals `target`.
double radius_for_overlap(double target, double spacing);

/// Regular n_side x n_side grid of LED spectrum offsets on a hires spectrum.
///
/// Centers are i * spacing rounded to integer bins and stored in canonical
/// spiral order: center LED first, then non-decreasing distance, ties broken
/// counter-clockwise from +x. Construction rejects any grid whose pupil disks
/// or crop windows leave the spectrum.
class IlluminationGrid {
 public:
  IlluminationGrid(std::size_t n_side, double spacing, double pupil_radius,
                   std::size_t hires_side = 128, std::size_t lowres_side = 32);

  std::size_t n_side() const noexcept { return n_side_; }
  std::size_t led_count() const noexcept { return centers_.size(); }
  double spacing() const noexcept { return spacing_; }
  double pupil_radius() const noexcept { return pupil_radius_; }
  std::size_t hires_side() const noexcept { return hires_side_; }
  std::size_t lowres_side() const noexcept { return lowres_side_; }

  std::span<const BinOffset> centers() const noexcept { return centers_; }
  BinOffset center(std::size_t led) const { return centers_.at(led); }

  /// (column, row) grid index of each canonical LED, each in [0, n_side).
  std::span<const std::pair<int, int>> grid_indices() const noexcept { return indices_; }

  /// Canonical indices visited in row-major (raster) grid order.
  std::vector<std::size_t> raster_order() const;

  /// Mean overlap_ratio over horizontally and vertically adjacent LED pairs
  /// after integer rounding of the centers. 0 for a single LED.
  double achieved_overlap() const;

  Pupil make_pupil(PupilEdge edge = PupilEdge::Ramp) const;

 private:
  std::size_t n_side_;
  double spacing_;
  double pupil_radius_;
  std::size_t hires_side_;
  std::size_t lowres_side_;
  std::vector<BinOffset> centers_;
  std::vector<std::pair<int, int>> indices_;
};

/// How an overlap target maps to (spacing, pupil radius).
enum class GeometryMode {
  FixedSpacing,  // LED spacing pinned at the anchor; pupil radius varies
  FixedRadius,   // pupil radius pinned; LED spacing varies
};

struct GeometrySpec {
  GeometryMode mode = GeometryMode::FixedSpacing;
  std::size_t n_side = 5;
  double pupil_radius = 12.0;   // FixedRadius radius, or FixedSpacing anchor radius
  double anchor_overlap = 0.65; // FixedSpacing: spacing = spacing_for_overlap(anchor, radius)
  std::size_t hires_side = 128;
  std::size_t lowres_side = 32;
  PupilEdge edge = PupilEdge::Ramp;
};

IlluminationGrid make_grid(const GeometrySpec& spec, double overlap);

const char* to_string(GeometryMode mode);
GeometryMode geometry_mode_from_string(const std::string& s);

}  // namespace fpm
