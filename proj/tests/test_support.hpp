#pragma once

// Independent reference implementations used as test oracles. None of these
// call into the library code paths they are used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fpm/field.hpp"

namespace fpm::testing {

inline std::filesystem::path data_dir() { return FPM_TEST_DATA_DIR; }

inline std::vector<std::filesystem::path> heldout_images() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(data_dir() / "heldout")) {
    if (e.path().extension() == ".pgm") {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fpm_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Direct O(N^4) orthonormal DFT with the zero frequency moved to
/// (w/2, h/2).
inline std::vector<std::complex<double>> naive_centered_dft(const ComplexField& f) {
  const std::size_t w = f.width();
  const std::size_t h = f.height();
  std::vector<std::complex<double>> out(w * h);
  const double norm = 1.0 / std::sqrt(static_cast<double>(w * h));
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      std::complex<double> acc = 0.0;
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          const double phase = -2.0 * std::numbers::pi *
                               (static_cast<double>(u * x) / static_cast<double>(w) +
                                static_cast<double>(v * y) / static_cast<double>(h));
          acc += f(x, y) * std::polar(1.0, phase);
        }
      }
      out[((v + h / 2) % h) * w + (u + w / 2) % w] = acc * norm;
    }
  }
  return out;
}

inline double energy(std::span<const std::complex<double>> v) {
  double acc = 0.0;
  for (const auto& z : v) {
    acc += std::norm(z);
  }
  return acc;
}

inline ComplexField random_field(std::size_t w, std::size_t h, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexField f(w, h);
  for (auto& z : f.values()) {
    z = {n(rng), n(rng)};
  }
  return f;
}

inline RealImage random_image(std::size_t w, std::size_t h, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealImage img(w, h);
  for (auto& v : img.values()) {
    v = u(rng);
  }
  return img;
}

/// Disk-intersection fraction by midpoint sampling on an n x n grid over
/// the bounding box of the first disk.
inline double integrated_overlap(double d, double r, int n) {
  const double step = 2.0 * r / n;
  long inside_both = 0;
  long inside_first = 0;
  for (int j = 0; j < n; ++j) {
    const double y = -r + (j + 0.5) * step;
    for (int i = 0; i < n; ++i) {
      const double x = -r + (i + 0.5) * step;
      if (x * x + y * y <= r * r) {
        ++inside_first;
        if ((x - d) * (x - d) + y * y <= r * r) {
          ++inside_both;
        }
      }
    }
  }
  return static_cast<double>(inside_both) / static_cast<double>(inside_first);
}

/// Straight-line PSNR (no cap), data range 1.
inline double reference_psnr(const RealImage& a, const RealImage& b) {
  long double sum = 0.0L;
  for (std::size_t y = 0; y < a.height(); ++y) {
    for (std::size_t x = 0; x < a.width(); ++x) {
      const long double d = static_cast<long double>(a(x, y)) - b(x, y);
      sum += d * d;
    }
  }
  const long double mse = sum / (a.width() * a.height());
  return static_cast<double>(10.0L * std::log10(1.0L / mse));
}

/// Brute-force windowed SSIM: each 11x11 window is summed directly.
inline double reference_ssim(const RealImage& a, const RealImage& b) {
  constexpr int k = 11;
  double g[k][k];
  double gsum = 0.0;
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) {
      const double dx = i - 5, dy = j - 5;
      g[j][i] = std::exp(-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5));
      gsum += g[j][i];
    }
  }
  const double c1 = 1e-4, c2 = 9e-4;
  double total = 0.0;
  int count = 0;
  for (std::size_t y = 0; y + k <= a.height(); ++y) {
    for (std::size_t x = 0; x + k <= a.width(); ++x) {
      double ma = 0, mb = 0;
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) {
          const double w = g[j][i] / gsum;
          ma += w * a(x + i, y + j);
          mb += w * b(x + i, y + j);
        }
      double va = 0, vb = 0, cov = 0;
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) {
          const double w = g[j][i] / gsum;
          const double da = a(x + i, y + j) - ma, db = b(x + i, y + j) - mb;
          va += w * da * da;
          vb += w * db * db;
          cov += w * da * db;
        }
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  }
  return total / count;
}

}  // namespace fpm::testing
