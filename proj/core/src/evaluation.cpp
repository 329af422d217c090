#include "fpm/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fpm/cube.hpp"
#include "fpm/dataset.hpp"
#include "fpm/metrics.hpp"
#include "fpm/parallel.hpp"
#include "fpm/resample.hpp"

namespace fpm {
namespace {

constexpr double kMatchTolerance = 1e-9;

bool matches_any(double value, const std::vector<double>& wanted) {
  return std::ranges::any_of(wanted,
                             [value](double w) { return std::abs(value - w) <= kMatchTolerance; });
}

// Shortest text that parses back to the same double.
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

RealImage clamp_unit(RealImage image) {
  for (double& v : image.values()) {
    v = std::clamp(v, 0.0, 1.0);
  }
  return image;
}

std::vector<std::string> split_plain(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    if (!field.empty() && field.back() == '\r') {
      field.pop_back();
    }
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

double parse_field(const std::string& text) {
  char* stop = nullptr;
  const double v = std::strtod(text.c_str(), &stop);
  if (text.empty() || stop != text.c_str() + text.size()) {
    throw FormatError(FormatErrorCode::BadMetadata, "results CSV: bad number '" + text + "'");
  }
  return v;
}

struct Job {
  std::filesystem::path cube;
  std::string method;
};

std::vector<EvalRecord> run_jobs(const std::vector<Job>& jobs, const std::filesystem::path& dir,
                                 const SweepConfig& cfg) {
  std::vector<EvalRecord> slots(jobs.size());
  std::vector<char> present(jobs.size(), 0);
  parallel_for(jobs.size(), cfg.jobs, [&](std::size_t i) {
    present[i] = evaluate_cube(jobs[i].cube, dir, jobs[i].method, cfg, slots[i]) ? 1 : 0;
  });
  std::vector<EvalRecord> out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (present[i]) {
      out.push_back(std::move(slots[i]));
    }
  }
  return out;
}

template <typename Select>
std::vector<EvalRecord> run_sweep(const std::filesystem::path& manifest_path,
                                  const SweepConfig& cfg, Select select) {
  const Manifest manifest = read_manifest(manifest_path);
  const std::filesystem::path dir = manifest_path.parent_path();
  std::vector<Job> jobs;
  for (const auto& row : manifest.rows) {
    if (!select(row)) {
      continue;
    }
    const auto cube = dir / row.cube_path;
    if (!std::filesystem::exists(cube)) {
      cfg.warn("missing cube '" + cube.string() + "', row skipped");
      continue;
    }
    for (const auto& m : cfg.methods) {
      jobs.push_back({cube, m});
    }
  }
  return run_jobs(jobs, dir, cfg);
}

void check_methods(const std::vector<std::string>& methods) {
  for (const auto& m : methods) {
    if (m != method::kAp && m != method::kApRandom && m != method::kFpnet &&
        m != method::kFpnetRandom && m != method::kBicubic) {
      throw ValidationError("unknown method '" + m + "'");
    }
  }
}

}  // namespace

std::filesystem::path prediction_path(const std::filesystem::path& cube, const std::string& m) {
  std::filesystem::path out = cube;
  out.replace_extension(m == method::kFpnetRandom ? ".fpnet-r.fpc" : ".fpnet.fpc");
  return out;
}

bool evaluate_cube(const std::filesystem::path& cube_path, const std::filesystem::path& corpus_dir,
                   const std::string& m, const SweepConfig& cfg, EvalRecord& out) {
  const IntensityCube cube = read_cube(cube_path);
  const CubeMeta& meta = cube.meta();
  const RealImage truth = read_cube(corpus_dir / meta.ground_truth).channel(0);

  out.source = meta.source_id;
  out.method = m;
  out.overlap = meta.overlap_target;
  out.noise_std = meta.noise_std;

  const auto start = std::chrono::steady_clock::now();
  RealImage estimate;
  if (m == method::kAp || m == method::kApRandom) {
    const IlluminationGrid grid = grid_from_meta(cube);
    const Pupil pupil = grid.make_pupil(meta.pupil_edge);
    ApConfig ap = cfg.ap;
    if (m == method::kApRandom) {
      ap.association = Association::Misassociated;
      ap.association_seed = meta.shuffle_seed != 0 ? meta.shuffle_seed : cfg.misassociation_seed;
      out.ordering = "misassociated";
    } else {
      ap.association = Association::Correct;
      out.ordering = to_string(ap.ordering);
    }
    const auto stack = canonical_stack(cube);
    estimate = modulus(ap_reconstruct(stack, grid, pupil, ap).field);
  } else if (m == method::kBicubic) {
    const auto stack = canonical_stack(cube);
    RealImage amplitude = stack.front();
    for (double& v : amplitude.values()) {
      v = std::sqrt(v);
    }
    estimate = clamp_unit(resize_bicubic(amplitude, truth.width(), truth.height()));
    out.ordering = "-";
  } else if (m == method::kFpnet || m == method::kFpnetRandom) {
    const auto pred = prediction_path(cube_path, m);
    if (!std::filesystem::exists(pred)) {
      return false;
    }
    estimate = read_cube(pred).channel(0);
    out.ordering = m == method::kFpnet ? "canonical" : "shuffled";
  } else {
    throw ValidationError("unknown method '" + m + "'");
  }
  out.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.psnr_db = psnr(truth, estimate);
  out.ssim = ssim(truth, estimate);
  return true;
}

std::vector<EvalRecord> run_overlap_sweep(const std::filesystem::path& manifest_path,
                                          const std::vector<double>& overlaps,
                                          const SweepConfig& cfg) {
  check_methods(cfg.methods);
  return run_sweep(manifest_path, cfg, [&](const ManifestRow& row) {
    return matches_any(row.overlap, overlaps) &&
           std::abs(row.noise_std - cfg.overlap_sweep_noise) <= kMatchTolerance;
  });
}

std::vector<EvalRecord> run_noise_sweep(const std::filesystem::path& manifest_path,
                                        const std::vector<double>& stds, const SweepConfig& cfg) {
  check_methods(cfg.methods);
  return run_sweep(manifest_path, cfg, [&](const ManifestRow& row) {
    return matches_any(row.noise_std, stds) &&
           std::abs(row.overlap - cfg.noise_sweep_overlap) <= kMatchTolerance;
  });
}

void write_records_csv(const std::vector<EvalRecord>& records, std::ostream& out) {
  out << kEvalHeader << "\n";
  for (const auto& r : records) {
    out << r.source << "," << r.method << "," << format_double(r.overlap) << ","
        << format_double(r.noise_std) << "," << r.ordering << "," << format_double(r.psnr_db)
        << "," << format_double(r.ssim) << "," << format_double(r.runtime_s) << "\n";
  }
}

void write_records_csv(const std::vector<EvalRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  write_records_csv(records, out);
}

std::vector<EvalRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_plain(line) != split_plain(kEvalHeader)) {
    throw FormatError(FormatErrorCode::BadMetadata, "results CSV: missing or wrong header");
  }
  std::vector<EvalRecord> out;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") {
      continue;
    }
    const auto f = split_plain(line);
    if (f.size() != 8) {
      throw FormatError(FormatErrorCode::BadMetadata, "results CSV: expected 8 fields");
    }
    out.push_back({f[0], f[1], parse_field(f[2]), parse_field(f[3]), f[4], parse_field(f[5]),
                   parse_field(f[6]), parse_field(f[7])});
  }
  return out;
}

std::vector<EvalRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  return read_records_csv(in);
}

std::vector<SummaryRow> summarize(const std::vector<EvalRecord>& records) {
  std::vector<SummaryRow> rows;
  std::vector<std::vector<const EvalRecord*>> members;
  for (const auto& r : records) {
    auto it = std::ranges::find_if(rows, [&](const SummaryRow& s) {
      return s.method == r.method && std::abs(s.overlap - r.overlap) <= kMatchTolerance &&
             std::abs(s.noise_std - r.noise_std) <= kMatchTolerance;
    });
    if (it == rows.end()) {
      rows.push_back({r.method, r.overlap, r.noise_std});
      members.emplace_back();
      it = rows.end() - 1;
    }
    members[static_cast<std::size_t>(it - rows.begin())].push_back(&r);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& group = members[i];
    const double n = static_cast<double>(group.size());
    double ps = 0.0, ss = 0.0;
    for (const auto* r : group) {
      ps += r->psnr_db;
      ss += r->ssim;
    }
    rows[i].count = group.size();
    rows[i].psnr_mean = ps / n;
    rows[i].ssim_mean = ss / n;
    if (group.size() > 1) {
      double pv = 0.0, sv = 0.0;
      for (const auto* r : group) {
        pv += (r->psnr_db - rows[i].psnr_mean) * (r->psnr_db - rows[i].psnr_mean);
        sv += (r->ssim - rows[i].ssim_mean) * (r->ssim - rows[i].ssim_mean);
      }
      rows[i].psnr_std = std::sqrt(pv / (n - 1.0));
      rows[i].ssim_std = std::sqrt(sv / (n - 1.0));
    }
  }
  return rows;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  out << "method,overlap,noise_std,count,psnr_mean,psnr_std,ssim_mean,ssim_std\n";
  for (const auto& r : rows) {
    out << r.method << "," << format_double(r.overlap) << "," << format_double(r.noise_std) << ","
        << r.count << "," << format_double(r.psnr_mean) << "," << format_double(r.psnr_std) << ","
        << format_double(r.ssim_mean) << "," << format_double(r.ssim_std) << "\n";
  }
}

std::vector<double> default_overlaps() { return {0.0, 0.18, 0.40, 0.65}; }
std::vector<double> default_noise_stds() { return {0.0, 1e-4, 2e-4, 3e-4}; }

}  // namespace fpm
