// fpm command-line entry point.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fpm/ap_engine.hpp"
#include "fpm/corpus.hpp"
#include "fpm/cube.hpp"
#include "fpm/dataset.hpp"
#include "fpm/error.hpp"
#include "fpm/evaluation.hpp"
#include "fpm/image_io.hpp"
#include "fpm/metrics.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 2, kIo = 3, kGeometry = 4, kNumerical = 5 };

// Thrown for flag combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path default_output_dir() {
  const char* env = std::getenv("FPM_OUTPUT_DIR");
  return env && *env ? fs::path(env) : fs::path(".");
}

fpm::PupilEdge parse_edge(const std::string& s) {
  if (s == "ramp") return fpm::PupilEdge::Ramp;
  if (s == "hard") return fpm::PupilEdge::Hard;
  throw UsageError("--edge must be 'ramp' or 'hard'");
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in)) {
        const auto ext = e.path().extension().string();
        if (e.is_regular_file() && (ext == ".pgm" || ext == ".png" || ext == ".PNG")) {
          found.push_back(e.path());
        }
      }
      std::ranges::sort(found);
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.emplace_back(in);
    }
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out || !(out << text)) {
    throw fpm::IoError("cannot write '" + path.string() + "'");
  }
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw fpm::IoError("cannot create '" + dir.string() + "': " + ec.message());
  }
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string input;
  std::string output;
  std::optional<double> overlap;
  std::optional<double> spacing;
  double pupil_radius = 12.0;
  std::size_t n_side = 5;
  double noise_std = 0.0;
  std::uint64_t noise_seed = 1;
  std::string edge = "ramp";
  std::optional<double> white_level;
};

int run_simulate(const SimulateArgs& a) {
  const fpm::LoadedImage img = fpm::read_image(a.input);
  const fpm::ComplexField object =
      fpm::prepare_ground_truth(img.image, a.white_level.value_or(img.white_level));
  const double spacing =
      a.spacing ? *a.spacing : fpm::spacing_for_overlap(a.overlap.value_or(0.65), a.pupil_radius);
  const fpm::IlluminationGrid grid(a.n_side, spacing, a.pupil_radius);
  const fpm::PupilEdge edge = parse_edge(a.edge);

  const fs::path out = a.output.empty()
                           ? default_output_dir() / (fs::path(a.input).stem().string() + ".fpc")
                           : fs::path(a.output);
  ensure_dir(out.parent_path());
  fs::path gt = out;
  gt.replace_extension(".gt.fpc");

  fpm::CubeProvenance prov;
  prov.source_id = fs::path(a.input).stem().string();
  prov.ground_truth = gt.filename().string();
  prov.overlap_target = a.overlap.value_or(fpm::overlap_ratio(spacing, a.pupil_radius));
  const fpm::IntensityCube cube = fpm::build_cube(object, grid, grid.make_pupil(edge),
                                                  {a.noise_std, a.noise_seed}, 0, prov);
  fpm::write_cube(cube, out);
  fpm::write_cube(fpm::make_image_cube(fpm::ground_truth_amplitude(object), prov.source_id), gt);

  std::printf("spacing %.6f bins, pupil radius %.6f bins\n", grid.spacing(), grid.pupil_radius());
  std::printf("achieved overlap %.4f\n", grid.achieved_overlap());
  std::printf("wrote %s (checksum %s)\n", out.string().c_str(),
              fpm::checksum_hex(fpm::payload_checksum(cube)).c_str());
  return kOk;
}

// --- gen-dataset ----------------------------------------------------------

struct DatasetArgs {
  std::vector<std::string> inputs;
  std::string output;
  std::vector<double> overlaps = fpm::default_overlaps();
  std::vector<double> noise_stds = fpm::default_noise_stds();
  double noise_overlap = 0.65;
  std::string geometry = "fixed-spacing";
  double pupil_radius = 12.0;
  double anchor_overlap = 0.65;
  std::size_t n_side = 5;
  std::string edge = "ramp";
  std::uint64_t noise_seed = 1;
  std::uint64_t shuffle_seed = 1;
  std::size_t stride = 128;
  std::size_t max_tiles = 0;
  bool upsampled = false;
  std::size_t jobs = 1;
};

int run_gen_dataset(const DatasetArgs& a) {
  fpm::CorpusConfig cfg;
  cfg.geometry.mode = fpm::geometry_mode_from_string(a.geometry);
  cfg.geometry.pupil_radius = a.pupil_radius;
  cfg.geometry.anchor_overlap = a.anchor_overlap;
  cfg.geometry.n_side = a.n_side;
  cfg.geometry.edge = parse_edge(a.edge);
  // Overlap sweep at zero noise, plus the noise sweep at one overlap.
  for (double ov : a.overlaps) cfg.settings.push_back({ov, 0.0});
  for (double ns : a.noise_stds) {
    const bool dup = std::ranges::any_of(cfg.settings, [&](const fpm::CorpusSetting& s) {
      return s.overlap == a.noise_overlap && s.noise_std == ns;
    });
    if (!dup) cfg.settings.push_back({a.noise_overlap, ns});
  }
  cfg.noise_seed = a.noise_seed;
  cfg.shuffle_seed = a.shuffle_seed;
  cfg.crop_stride = a.stride;
  cfg.max_tiles_per_image = a.max_tiles;
  cfg.write_upsampled = a.upsampled;
  cfg.jobs = a.jobs;

  const auto paths = expand_inputs(a.inputs);
  if (paths.empty()) {
    throw UsageError("no input images found");
  }
  const fs::path out = a.output.empty() ? default_output_dir() / "corpus" : fs::path(a.output);
  const fpm::Manifest m = fpm::build_corpus(std::span<const fs::path>(paths), cfg, out);
  std::printf("%zu cubes from %zu images (%zu skipped) -> %s\n", m.rows.size(),
              paths.size() - m.skipped.size(), m.skipped.size(),
              (out / fpm::kManifestFileName).string().c_str());
  return kOk;
}

// --- reconstruct ----------------------------------------------------------

struct ReconstructArgs {
  std::string cube;
  std::string output;
  std::string ground_truth;
  std::size_t iterations = 50;
  double tolerance = 1e-6;
  std::string ordering = "spiral";
  std::string init = "upsampled-center";
  bool misassociate = false;
  std::uint64_t seed = 1;
};

std::optional<fs::path> locate_ground_truth(const fs::path& cube, const fpm::CubeMeta& meta) {
  if (meta.ground_truth.empty()) return std::nullopt;
  // Corpus cubes live one level below the corpus root; simulate output sits beside its truth.
  for (const fs::path& base : {cube.parent_path(), cube.parent_path().parent_path()}) {
    const fs::path p = base / meta.ground_truth;
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

int run_reconstruct(const ReconstructArgs& a) {
  const fs::path cube_path(a.cube);
  const fpm::IntensityCube cube = fpm::read_cube(cube_path);
  if (cube.upsampled()) {
    throw fpm::ValidationError("reconstruct needs a raw cube, not an upsampled one");
  }
  const fpm::IlluminationGrid grid = fpm::grid_from_meta(cube);
  fpm::ApConfig ap;
  ap.max_iterations = a.iterations;
  ap.tolerance = a.tolerance;
  ap.ordering = fpm::ordering_from_string(a.ordering);
  ap.init = fpm::init_mode_from_string(a.init);
  ap.order_seed = ap.init_seed = ap.association_seed = a.seed;
  if (a.misassociate) ap.association = fpm::Association::Misassociated;

  const auto stack = fpm::canonical_stack(cube);
  const fpm::ApResult r = fpm::ap_reconstruct(stack, grid, grid.make_pupil(cube.meta().pupil_edge), ap);
  const fpm::RealImage amplitude = fpm::modulus(r.field);

  fs::path stem = a.output.empty() ? default_output_dir() / (cube_path.stem().string() + ".recon")
                                   : fs::path(a.output);
  ensure_dir(stem.parent_path());
  const fs::path fpc = stem.string() + ".fpc";
  const fs::path pgm = stem.string() + ".pgm";
  const fs::path log = stem.string() + ".residual.csv";
  fpm::write_cube(fpm::make_image_cube(amplitude, cube.meta().source_id), fpc);
  fpm::write_pgm16(amplitude, pgm);
  std::string text = "sweep,residual\n";
  for (std::size_t i = 0; i < r.residual_history.size(); ++i) {
    char line[64];
    std::snprintf(line, sizeof line, "%zu,%.17g\n", i + 1, r.residual_history[i]);
    text += line;
  }
  write_text(log, text);

  std::printf("%zu sweeps, final residual %.6g\n", r.iterations_run,
              r.residual_history.empty() ? 0.0 : r.residual_history.back());
  const auto gt = a.ground_truth.empty() ? locate_ground_truth(cube_path, cube.meta())
                                         : std::optional<fs::path>(a.ground_truth);
  if (gt) {
    const fpm::RealImage truth = fpm::read_cube(*gt).channel(0);
    std::printf("PSNR %.3f dB, SSIM %.4f\n", fpm::psnr(truth, amplitude), fpm::ssim(truth, amplitude));
  }
  std::printf("wrote %s, %s, %s\n", fpc.string().c_str(), pgm.string().c_str(),
              log.string().c_str());
  return kOk;
}

// --- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string corpus;
  std::string output;
  std::string sweep = "both";
  std::vector<double> overlaps = fpm::default_overlaps();
  std::vector<double> noise_stds = fpm::default_noise_stds();
  double noise_overlap = 0.65;
  std::vector<std::string> methods = {fpm::method::kAp, fpm::method::kApRandom};
  std::size_t iterations = 50;
  std::string ordering = "spiral";
  std::size_t jobs = 1;
};

void write_tables(const std::vector<fpm::EvalRecord>& recs, const fs::path& dir,
                  const std::string& name) {
  fpm::write_records_csv(recs, dir / (name + ".csv"));
  const auto summary = fpm::summarize(recs);
  fpm::write_summary_csv(summary, dir / (name + "_summary.csv"));
  std::printf("%s: %zu records\n", name.c_str(), recs.size());
  for (const auto& s : summary) {
    std::printf("  %-16s overlap %.2f noise %.1e  PSNR %6.2f +- %5.2f  SSIM %.4f  (n=%zu)\n",
                s.method.c_str(), s.overlap, s.noise_std, s.psnr_mean, s.psnr_std, s.ssim_mean,
                s.count);
  }
}

int run_evaluate(const EvaluateArgs& a) {
  if (a.sweep != "overlap" && a.sweep != "noise" && a.sweep != "both") {
    throw UsageError("--sweep must be overlap, noise or both");
  }
  fpm::SweepConfig cfg;
  cfg.ap.max_iterations = a.iterations;
  cfg.ap.ordering = fpm::ordering_from_string(a.ordering);
  cfg.methods = a.methods;
  cfg.noise_sweep_overlap = a.noise_overlap;
  cfg.jobs = a.jobs;
  const fs::path manifest = fs::path(a.corpus) / fpm::kManifestFileName;
  const fs::path out = a.output.empty() ? default_output_dir() : fs::path(a.output);
  ensure_dir(out);
  if (a.sweep != "noise") {
    write_tables(fpm::run_overlap_sweep(manifest, a.overlaps, cfg), out, "overlap_sweep");
  }
  if (a.sweep != "overlap") {
    write_tables(fpm::run_noise_sweep(manifest, a.noise_stds, cfg), out, "noise_sweep");
  }
  return kOk;
}

int exit_code_for(fpm::ErrorKind kind) {
  switch (kind) {
    case fpm::ErrorKind::Io:
    case fpm::ErrorKind::Format:
      return kIo;
    case fpm::ErrorKind::Geometry:
    case fpm::ErrorKind::Validation:
      return kGeometry;
    case fpm::ErrorKind::Numerical:
      return kNumerical;
  }
  return kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier ptychography simulation, reconstruction and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "fpm 0.1.0");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate one low-resolution stack as an unshuffled cube");
  simulate->add_option("-i,--input", sim.input, "128x128 or larger PGM/PNG image")->required();
  simulate->add_option("-o,--output", sim.output, "Cube path (default $FPM_OUTPUT_DIR/<stem>.fpc)");
  auto* ov = simulate->add_option("--overlap", sim.overlap, "Pupil overlap ratio in [0, 1) (default 0.65)");
  auto* sp = simulate->add_option("--spacing", sim.spacing, "LED spacing in spectrum bins");
  ov->excludes(sp);
  simulate->add_option("--pupil-radius", sim.pupil_radius, "Pupil radius in bins")->capture_default_str();
  simulate->add_option("--n-side", sim.n_side, "LEDs per grid side")->capture_default_str();
  simulate->add_option("--noise-std", sim.noise_std, "Gaussian noise std on the max-normalized stack")
      ->capture_default_str();
  simulate->add_option("--noise-seed", sim.noise_seed)->capture_default_str();
  simulate->add_option("--edge", sim.edge, "Pupil edge: ramp or hard")->capture_default_str();
  simulate->add_option("--white-level", sim.white_level, "Override the input's white level");

  DatasetArgs ds;
  auto* gen = app.add_subcommand("gen-dataset", "Build a cube corpus and manifest from images");
  gen->add_option("inputs", ds.inputs, "Image files or directories")->required();
  gen->add_option("-o,--output", ds.output, "Corpus directory (default $FPM_OUTPUT_DIR/corpus)");
  gen->add_option("--overlaps", ds.overlaps, "Overlaps for the zero-noise sweep")
      ->delimiter(',')->capture_default_str();
  gen->add_option("--noise-stds", ds.noise_stds, "Noise levels for the noise sweep")
      ->delimiter(',')->capture_default_str();
  gen->add_option("--noise-overlap", ds.noise_overlap)->capture_default_str();
  gen->add_option("--geometry", ds.geometry, "fixed-spacing or fixed-radius")->capture_default_str();
  gen->add_option("--pupil-radius", ds.pupil_radius)->capture_default_str();
  gen->add_option("--anchor-overlap", ds.anchor_overlap, "fixed-spacing: overlap that sets the spacing")
      ->capture_default_str();
  gen->add_option("--n-side", ds.n_side)->capture_default_str();
  gen->add_option("--edge", ds.edge)->capture_default_str();
  gen->add_option("--noise-seed", ds.noise_seed)->capture_default_str();
  gen->add_option("--shuffle-seed", ds.shuffle_seed, "0 keeps LED order")->capture_default_str();
  gen->add_option("--stride", ds.stride, "Tile stride in pixels")->capture_default_str();
  gen->add_option("--max-tiles", ds.max_tiles, "Tiles per image, 0 for all")->capture_default_str();
  gen->add_flag("--upsampled", ds.upsampled, "Also write 128x128 bicubic cubes");
  gen->add_option("-j,--jobs", ds.jobs)->capture_default_str()->check(CLI::PositiveNumber);

  ReconstructArgs rec;
  auto* recon = app.add_subcommand("reconstruct", "Run AP on a raw cube");
  recon->add_option("-c,--cube", rec.cube)->required();
  recon->add_option("-o,--output", rec.output, "Output stem (writes .fpc, .pgm, .residual.csv)");
  recon->add_option("--ground-truth", rec.ground_truth, "Truth cube (default: from metadata)");
  recon->add_option("--iterations", rec.iterations)->capture_default_str()->check(CLI::PositiveNumber);
  recon->add_option("--tolerance", rec.tolerance)->capture_default_str();
  recon->add_option("--ordering", rec.ordering, "spiral, raster or random")->capture_default_str();
  recon->add_option("--init", rec.init, "upsampled-center or random")->capture_default_str();
  recon->add_flag("--misassociate", rec.misassociate, "Pair images with a seeded random LED order");
  recon->add_option("--seed", rec.seed)->capture_default_str();

  EvaluateArgs ev;
  auto* eval = app.add_subcommand("evaluate", "Run the overlap and noise sweeps over a corpus");
  eval->add_option("-c,--corpus", ev.corpus, "Corpus directory holding manifest.csv")->required();
  eval->add_option("-o,--output", ev.output, "Directory for CSV tables (default $FPM_OUTPUT_DIR)");
  eval->add_option("--sweep", ev.sweep, "overlap, noise or both")->capture_default_str();
  eval->add_option("--overlaps", ev.overlaps)->delimiter(',')->capture_default_str();
  eval->add_option("--noise-stds", ev.noise_stds)->delimiter(',')->capture_default_str();
  eval->add_option("--noise-overlap", ev.noise_overlap)->capture_default_str();
  eval->add_option("--methods", ev.methods, "AP, AP-R, FPNET, FPNET-R, baseline-bicubic")
      ->delimiter(',')->capture_default_str();
  eval->add_option("--iterations", ev.iterations)->capture_default_str()->check(CLI::PositiveNumber);
  eval->add_option("--ordering", ev.ordering)->capture_default_str();
  eval->add_option("-j,--jobs", ev.jobs)->capture_default_str()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (gen->parsed()) return run_gen_dataset(ds);
    if (recon->parsed()) return run_reconstruct(rec);
    if (eval->parsed()) return run_evaluate(ev);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const fpm::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  }
  return kUsage;
}
