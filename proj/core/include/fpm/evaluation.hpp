#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fpm/ap_engine.hpp"
#include "fpm/corpus.hpp"

namespace fpm {

/// Method labels used in result tables.
namespace method {
inline constexpr const char* kAp = "AP";
inline constexpr const char* kApRandom = "AP-R";
inline constexpr const char* kFpnet = "FPNET";
inline constexpr const char* kFpnetRandom = "FPNET-R";
inline constexpr const char* kBicubic = "baseline-bicubic";
}  // namespace method

struct EvalRecord {
  std::string source;
  std::string method;
  double overlap = 0.0;
  double noise_std = 0.0;
  std::string ordering;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double runtime_s = 0.0;

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

inline constexpr const char* kEvalHeader =
    "source,method,overlap,noise_std,ordering,psnr_db,ssim,runtime_s";

struct SweepConfig {
  ApConfig ap;
  std::vector<std::string> methods = {method::kAp, method::kApRandom};
  /// AP-R association seed for cubes stored in canonical order; shuffled
  /// cubes reuse their own shuffle seed.
  std::uint64_t misassociation_seed = 1;
  /// Noise level selected by the overlap sweep.
  double overlap_sweep_noise = 0.0;
  /// Overlap selected by the noise sweep.
  double noise_sweep_overlap = 0.65;
  std::size_t jobs = 1;
  WarningSink warn = warn_to_stderr;
};

/// Path where the secondary component leaves its prediction for `cube`:
/// `<stem>.fpnet.fpc` (FPNET) or `<stem>.fpnet-r.fpc` (FPNET-R).
std::filesystem::path prediction_path(const std::filesystem::path& cube, const std::string& method);

/// One record per (row, method) for manifest rows whose overlap is in
/// `overlaps` and whose noise equals cfg.overlap_sweep_noise. FPNET rows
/// appear only where prediction files exist; missing cubes are skipped
/// with a warning.
std::vector<EvalRecord> run_overlap_sweep(const std::filesystem::path& manifest_path,
                                          const std::vector<double>& overlaps,
                                          const SweepConfig& cfg);

/// Same as run_overlap_sweep over noise levels at cfg.noise_sweep_overlap.
std::vector<EvalRecord> run_noise_sweep(const std::filesystem::path& manifest_path,
                                        const std::vector<double>& stds, const SweepConfig& cfg);

/// Evaluates a single cube (raw, 32x32xN) with one method against its
/// ground truth. Returns false if the method has no prediction for it.
bool evaluate_cube(const std::filesystem::path& cube_path, const std::filesystem::path& corpus_dir,
                   const std::string& method, const SweepConfig& cfg, EvalRecord& out);

void write_records_csv(const std::vector<EvalRecord>& records, std::ostream& out);
void write_records_csv(const std::vector<EvalRecord>& records, const std::filesystem::path& path);
std::vector<EvalRecord> read_records_csv(std::istream& in);
std::vector<EvalRecord> read_records_csv(const std::filesystem::path& path);

struct SummaryRow {
  std::string method;
  double overlap = 0.0;
  double noise_std = 0.0;
  std::size_t count = 0;
  double psnr_mean = 0.0;
  double psnr_std = 0.0;
  double ssim_mean = 0.0;
  double ssim_std = 0.0;
};

/// Mean / sample std per (method, overlap, noise_std) cell, in first-seen order.
std::vector<SummaryRow> summarize(const std::vector<EvalRecord>& records);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);

std::vector<double> default_overlaps();
std::vector<double> default_noise_stds();

}  // namespace fpm
