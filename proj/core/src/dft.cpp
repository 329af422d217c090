#include "fpm/dft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace fpm {
namespace {

// fftw_execute_dft is thread-safe; planning is not, so plans are created
// once per (width, height, direction) under a lock and reused.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t width, std::size_t height, int sign) {
    const auto key = std::make_tuple(width, height, sign);
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) {
      return it->second;
    }
    const std::size_t n = width * height;
    fftw_complex* in = fftw_alloc_complex(n);
    fftw_complex* out = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width), in, out,
                                      sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) {
      fftw_destroy_plan(plan);
    }
  }

  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

void require_finite(std::span<const Complex> values, std::size_t width, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
      std::ostringstream msg;
      msg << what << ": non-finite value at pixel (" << i % width << ", " << i / width << ")";
      throw ValidationError(msg.str());
    }
  }
}

void execute(std::span<const Complex> in, std::span<Complex> out, std::size_t width,
             std::size_t height, int sign) {
  fftw_plan plan = PlanCache::instance().get(width, height, sign);
  // FFTW does not write the input of an out-of-place complex transform.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

struct Window {
  std::size_t x0;
  std::size_t y0;
};

Window window_origin(std::size_t width, std::size_t height, BinOffset center, std::size_t size) {
  const long cx = static_cast<long>(width / 2) + center.kx;
  const long cy = static_cast<long>(height / 2) + center.ky;
  const long half = static_cast<long>(size / 2);
  const long x0 = cx - half;
  const long y0 = cy - half;
  const long extent = static_cast<long>(size);
  if (x0 < 0 || y0 < 0 || x0 + extent > static_cast<long>(width) ||
      y0 + extent > static_cast<long>(height)) {
    std::ostringstream msg;
    msg << "spectrum window of size " << size << " at offset (" << center.kx << ", " << center.ky
        << ") leaves the " << width << "x" << height << " spectrum";
    throw GeometryError(msg.str());
  }
  return {static_cast<std::size_t>(x0), static_cast<std::size_t>(y0)};
}

}  // namespace

Spectrum forward_dft(const ComplexField& field) {
  const std::size_t w = field.width();
  const std::size_t h = field.height();
  require_finite(field.values(), w, "forward_dft");
  std::vector<Complex> raw(w * h);
  execute(field.values(), raw, w, h, FFTW_FORWARD);
  const double norm = 1.0 / std::sqrt(static_cast<double>(w * h));
  Spectrum out(w, h);
  // fftshift: bin (x, y) moves to ((x + w/2) mod w, (y + h/2) mod h).
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t sy = (y + h / 2) % h;
    for (std::size_t x = 0; x < w; ++x) {
      out((x + w / 2) % w, sy) = raw[y * w + x] * norm;
    }
  }
  return out;
}

ComplexField inverse_dft(const Spectrum& spectrum) {
  const std::size_t w = spectrum.width();
  const std::size_t h = spectrum.height();
  require_finite(spectrum.values(), w, "inverse_dft");
  std::vector<Complex> unshifted(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t sy = (y + h / 2) % h;
    for (std::size_t x = 0; x < w; ++x) {
      unshifted[y * w + x] = spectrum((x + w / 2) % w, sy);
    }
  }
  ComplexField out(w, h);
  execute(unshifted, out.values(), w, h, FFTW_BACKWARD);
  const double norm = 1.0 / std::sqrt(static_cast<double>(w * h));
  for (auto& v : out.values()) {
    v *= norm;
  }
  return out;
}

double crop_scale(const Spectrum& source, std::size_t size) {
  return std::sqrt(static_cast<double>(size * size) /
                   static_cast<double>(source.width() * source.height()));
}

Spectrum crop_spectrum(const Spectrum& spectrum, BinOffset center, std::size_t size) {
  if (size == 0) {
    throw ValidationError("crop size must be positive");
  }
  const Window win = window_origin(spectrum.width(), spectrum.height(), center, size);
  const double scale = crop_scale(spectrum, size);
  Spectrum out(size, size);
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      out(x, y) = spectrum(win.x0 + x, win.y0 + y) * scale;
    }
  }
  return out;
}

void embed_spectrum_into(Spectrum& target, const Spectrum& patch, BinOffset center,
                         const Pupil& mask) {
  const std::size_t size = mask.size();
  if (patch.width() != size || patch.height() != size) {
    throw ValidationError("embed_spectrum: patch shape does not match mask size");
  }
  const Window win = window_origin(target.width(), target.height(), center, size);
  const double scale = crop_scale(target, size);
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      const double m = mask(x, y);
      if (m == 0.0) {
        continue;
      }
      Complex& t = target(win.x0 + x, win.y0 + y);
      if (m == 1.0) {
        t = patch(x, y) / scale;
      } else {
        t += m * (patch(x, y) / scale - m * t);
      }
    }
  }
}

Spectrum embed_spectrum(const Spectrum& patch, const Spectrum& target, BinOffset center,
                        const Pupil& mask) {
  Spectrum out = target;
  embed_spectrum_into(out, patch, center, mask);
  return out;
}

void apply_pupil(Spectrum& spectrum, const Pupil& pupil) {
  if (spectrum.width() != pupil.size() || spectrum.height() != pupil.size()) {
    throw ValidationError("apply_pupil: spectrum shape does not match pupil size");
  }
  auto values = spectrum.values();
  auto mask = pupil.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] *= mask[i];
  }
}

}  // namespace fpm
