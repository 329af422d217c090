// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "fpm/ap_engine.hpp"
#include "fpm/corpus.hpp"
#include "fpm/cube.hpp"
#include "fpm/dataset.hpp"
#include "fpm/dft.hpp"
#include "fpm/evaluation.hpp"
#include "fpm/forward_model.hpp"
#include "fpm/image_io.hpp"
#include "fpm/metrics.hpp"
#include "fpm/random.hpp"
#include "../test_support.hpp"

namespace fs = std::filesystem;
using namespace fpm;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<SourceImage> heldout() {
  std::vector<SourceImage> out;
  for (const auto& p : testing::heldout_images()) {
    const LoadedImage img = read_image(p);
    out.push_back({p.stem().string(), img.image, img.white_level});
  }
  return out;
}

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// Mean PSNR per key, keyed by the given record field.
std::map<double, double> mean_psnr(const std::vector<EvalRecord>& recs, const std::string& m,
                                   double EvalRecord::*key) {
  std::map<double, std::pair<double, int>> acc;
  for (const auto& r : recs) {
    if (r.method != m) continue;
    acc[r.*key].first += r.psnr_db;
    acc[r.*key].second += 1;
  }
  std::map<double, double> out;
  for (const auto& [k, v] : acc) out[k] = v.first / v.second;
  return out;
}

std::string list(const std::map<double, double>& means) {
  std::string s;
  for (const auto& [k, v] : means) s += fmt("%s%g:%.2f", s.empty() ? "" : " ", k, v);
  return s;
}

void ap_fidelity(const std::vector<SourceImage>& images) {
  const auto t0 = std::chrono::steady_clock::now();
  const IlluminationGrid grid(5, spacing_for_overlap(0.65, 12.0), 12.0);
  const Pupil pupil = grid.make_pupil();
  ApConfig cfg;  // spiral, 50 sweeps, upsampled-center init
  cfg.max_iterations = 50;
  int good = 0;
  std::string values;
  for (const auto& img : images) {
    const ComplexField object = prepare_ground_truth(img.image, img.white_level);
    const auto stack = simulate_stack(object, grid, pupil, {0.0, 0});
    const ApResult r = ap_reconstruct(stack, grid, pupil, cfg);
    const double p = psnr(ground_truth_amplitude(object), modulus(r.field));
    good += p >= 25.0;
    values += fmt("%s%.2f", values.empty() ? "" : " ", p);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(good >= 8 && images.size() == 10 && secs < 60.0, "ap_round_trip_fidelity",
         fmt("%d/%zu images >= 25 dB in %.1f s [%s]", good, images.size(), secs, values.c_str()));
}

void sweeps(const std::vector<SourceImage>& images, const fs::path& work) {
  CorpusConfig cc;
  for (double ov : default_overlaps()) cc.settings.push_back({ov, 0.0});
  for (double ns : default_noise_stds()) {
    if (ns > 0.0) cc.settings.push_back({0.65, ns});
  }
  cc.jobs = jobs();
  (void)build_corpus(std::span<const SourceImage>(images), cc, work);
  const fs::path manifest = work / kManifestFileName;

  SweepConfig sc;
  sc.jobs = jobs();
  sc.methods = {method::kAp, method::kApRandom};
  const auto over = run_overlap_sweep(manifest, default_overlaps(), sc);
  write_records_csv(over, work / "overlap_sweep.csv");
  sc.methods = {method::kAp};
  const auto noise = run_noise_sweep(manifest, default_noise_stds(), sc);
  write_records_csv(noise, work / "noise_sweep.csv");

  const auto ap = mean_psnr(over, method::kAp, &EvalRecord::overlap);
  bool increasing = ap.size() == 4;
  for (auto it = ap.begin(); increasing && std::next(it) != ap.end(); ++it) {
    increasing = std::next(it)->second > it->second;
  }
  report(increasing && over.size() == 80, "overlap_monotonicity",
         "mean AP PSNR by overlap " + list(ap));

  const auto ns = mean_psnr(noise, method::kAp, &EvalRecord::noise_std);
  bool nonincreasing = ns.size() == 4;
  for (auto it = ns.begin(); nonincreasing && std::next(it) != ns.end(); ++it) {
    nonincreasing = std::next(it)->second <= it->second;
  }
  const double drop = ns.size() == 4 ? ns.begin()->second - ns.rbegin()->second : 0.0;
  report(nonincreasing && drop >= 1.0, "noise_degradation",
         "mean AP PSNR by noise std " + list(ns) + fmt(", drop %.2f dB", drop));

  const auto apr = mean_psnr(over, method::kApRandom, &EvalRecord::overlap);
  bool penalty = apr.size() == ap.size() && !ap.empty();
  std::string detail;
  for (const auto& [ov, v] : ap) {
    const double w = apr.count(ov) ? apr.at(ov) : NAN;
    penalty = penalty && w < v;
    detail += fmt("%s%g: %.2f vs %.2f", detail.empty() ? "" : "; ", ov, w, v);
  }
  report(penalty, "misassociation_penalty", "AP-R vs AP mean PSNR " + detail);
}

void geometry_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ur(2.0, 40.0), uf(0.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double r = ur(rng);
    const double d = uf(rng) * r;
    worst = std::max(worst, std::abs(overlap_ratio(d, r) - testing::integrated_overlap(d, r, 2000)));
  }
  double worst_rt = 0.0;
  for (double r : {1.0, 7.5, 12.0, 16.0, 64.0}) {
    for (int k = 0; k <= 99; ++k) {
      const double t = k / 100.0;
      worst_rt = std::max(worst_rt, std::abs(overlap_ratio(spacing_for_overlap(t, r), r) - t));
    }
  }
  report(worst <= 1e-3 && worst_rt <= 1e-9, "geometry_oracle",
         fmt("max |closed form - integral| %.2e over 20 pairs; max round-trip error %.2e", worst,
             worst_rt));
}

void numerics(const std::vector<SourceImage>& images, const fs::path& work) {
  double parseval = 0.0, round_trip = 0.0;
  for (std::uint32_t s = 0; s < 6; ++s) {
    const std::size_t w = s < 3 ? 128 : 32 + s, h = s < 3 ? 128 : 17 + 2 * s;
    const ComplexField f = testing::random_field(w, h, s);
    const Spectrum F = forward_dft(f);
    const double ef = testing::energy(f.values());
    parseval = std::max(parseval, std::abs(testing::energy(F.values()) - ef) / ef);
    const ComplexField back = inverse_dft(F);
    for (std::size_t i = 0; i < f.size(); ++i) {
      round_trip = std::max(round_trip, std::abs(back.values()[i] - f.values()[i]));
    }
  }

  // Crop then embed under a binary mask leaves the spectrum unchanged, and
  // embed then crop returns the patch on the mask support.
  const IlluminationGrid grid(5, spacing_for_overlap(0.65, 12.0), 12.0);
  const Pupil full(32, 16.0, PupilEdge::Hard);
  const Spectrum S = forward_dft(testing::random_field(128, 128, 99));
  bool restore = true;
  double pair = 0.0;
  for (const auto& k : grid.centers()) {
    Spectrum t = S;
    embed_spectrum_into(t, crop_spectrum(S, k, 32), k, full);
    restore = restore && t == S;
    Spectrum z(128, 128);
    const Spectrum patch = forward_dft(testing::random_field(32, 32, 7));
    embed_spectrum_into(z, patch, k, full);
    const Spectrum again = crop_spectrum(z, k, 32);
    for (std::size_t i = 0; i < patch.size(); ++i) {
      if (full.values()[i] == 1.0) {
        pair = std::max(pair, std::abs(again.values()[i] - patch.values()[i]));
      }
    }
  }

  // Cube codec is bitwise stable.
  const auto cube = build_cube(prepare_ground_truth(images[0].image, images[0].white_level), grid,
                               grid.make_pupil(), {2e-4, 5}, 11, {"x", "gt/x.fpc", 0.65});
  const auto bytes = encode_cube(cube);
  write_cube(cube, work / "rt.fpc");
  const IntensityCube back = read_cube(work / "rt.fpc");
  const bool cube_rt = back == cube && encode_cube(back) == bytes;

  // Two full corpus builds plus reconstructions with identical seeds.
  CorpusConfig cc;
  cc.settings = {{0.40, 0.0}, {0.65, 3e-4}};
  cc.jobs = jobs();
  const auto a = build_corpus(std::span<const SourceImage>(images), cc, work / "det_a");
  const auto b = build_corpus(std::span<const SourceImage>(images), cc, work / "det_b");
  ApConfig ap;
  ap.max_iterations = 5;
  ap.ordering = Ordering::Random;
  ap.init = InitMode::Random;
  auto recon_hash = [&](const fs::path& dir) {
    const IntensityCube c = read_cube(dir / a.rows[1].cube_path);
    const IlluminationGrid g = grid_from_meta(c);
    const ApResult r = ap_reconstruct(canonical_stack(c), g, g.make_pupil(), ap);
    const auto* p = reinterpret_cast<const unsigned char*>(r.spectrum.values().data());
    return crc64({p, r.spectrum.size() * sizeof(Complex)});
  };
  const bool deterministic = a.rows == b.rows && recon_hash(work / "det_a") == recon_hash(work / "det_b");

  report(parseval <= 1e-10 && round_trip <= 1e-12 && restore && pair <= 1e-12 && cube_rt &&
             deterministic,
         "numerics_suite",
         fmt("parseval rel %.1e, round-trip %.1e, crop/embed restore %s, embed/crop %.1e, "
             "cube round-trip %s, determinism %s (%zu cubes)",
             parseval, round_trip, restore ? "exact" : "broken", pair,
             cube_rt ? "bitwise" : "broken", deterministic ? "identical" : "differs",
             a.rows.size()));
}

}  // namespace

int main() {
  try {
    const auto images = heldout();
    const fs::path work = testing::scratch_dir("acceptance");
    ap_fidelity(images);
    sweeps(images, work / "corpus");
    geometry_oracle();
    numerics(images, work);
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance: aborted: %s\n", e.what());
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
