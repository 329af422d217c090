#include "fpm/metrics.hpp"

#include <array>
#include <algorithm>
#include <cmath>

namespace fpm {
namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 1.0) * (0.01 * 1.0);
constexpr double kC2 = (0.03 * 1.0) * (0.03 * 1.0);

void require_same_shape(const RealImage& a, const RealImage& b) {
  if (!a.same_shape(b)) {
    throw ValidationError("metric inputs must have the same shape");
  }
}

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    taps[i] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
    sum += taps[i];
  }
  for (double& t : taps) {
    t /= sum;
  }
  return taps;
}

// Separable 'valid' Gaussian filter: output is (w - 10) x (h - 10).
RealImage filter_valid(const RealImage& in, const std::array<double, kWindow>& taps) {
  const std::size_t ow = in.width() - kWindow + 1;
  const std::size_t oh = in.height() - kWindow + 1;
  RealImage rows(ow, in.height());
  for (std::size_t y = 0; y < in.height(); ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) {
        acc += taps[k] * in(x + k, y);
      }
      rows(x, y) = acc;
    }
  }
  RealImage out(ow, oh);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) {
        acc += taps[k] * rows(x, y + k);
      }
      out(x, y) = acc;
    }
  }
  return out;
}

RealImage product(const RealImage& a, const RealImage& b) {
  RealImage out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.values()[i] = a.values()[i] * b.values()[i];
  }
  return out;
}

}  // namespace

double psnr(const RealImage& reference, const RealImage& test) {
  require_same_shape(reference, test);
  double sum = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference.values()[i] - test.values()[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(reference.size());
  if (mse == 0.0) {
    return kPsnrCapDb;
  }
  return std::min(10.0 * std::log10(1.0 / mse), kPsnrCapDb);
}

double ssim(const RealImage& reference, const RealImage& test) {
  require_same_shape(reference, test);
  if (reference.width() < kWindow || reference.height() < kWindow) {
    throw ValidationError("ssim needs images of at least 11x11");
  }
  const auto taps = gaussian_taps();
  const RealImage mu_x = filter_valid(reference, taps);
  const RealImage mu_y = filter_valid(test, taps);
  const RealImage xx = filter_valid(product(reference, reference), taps);
  const RealImage yy = filter_valid(product(test, test), taps);
  const RealImage xy = filter_valid(product(reference, test), taps);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x.values()[i];
    const double my = mu_y.values()[i];
    const double vx = xx.values()[i] - mx * mx;
    const double vy = yy.values()[i] - my * my;
    const double cov = xy.values()[i] - mx * my;
    total += ((2.0 * mx * my + kC1) * (2.0 * cov + kC2)) /
             ((mx * mx + my * my + kC1) * (vx + vy + kC2));
  }
  return total / static_cast<double>(mu_x.size());
}

}  // namespace fpm
