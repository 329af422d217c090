#include <gtest/gtest.h>

#include <sstream>

#include "fpm/corpus.hpp"
#include "fpm/cube.hpp"
#include "fpm/evaluation.hpp"
#include "fpm/image_io.hpp"
#include "fpm/metrics.hpp"
#include "test_support.hpp"

namespace fpm {
namespace {

// Two held-out images at every default overlap and noise level.
const std::filesystem::path& shared_corpus() {
  static const std::filesystem::path dir = [] {
    const auto d = testing::scratch_dir("eval_corpus");
    std::vector<SourceImage> images;
    for (const auto& p : {testing::heldout_images()[0], testing::heldout_images()[2]}) {
      const LoadedImage img = read_image(p);
      images.push_back({p.stem().string(), img.image, img.white_level});
    }
    CorpusConfig cfg;
    for (double ov : default_overlaps()) cfg.settings.push_back({ov, 0.0});
    for (double ns : default_noise_stds()) {
      if (ns > 0.0) cfg.settings.push_back({0.65, ns});
    }
    (void)build_corpus(std::span<const SourceImage>(images), cfg, d);
    return d;
  }();
  return dir;
}

SweepConfig quick() {
  SweepConfig cfg;
  cfg.ap.max_iterations = 10;
  cfg.warn = [](const std::string&) {};
  return cfg;
}

TEST(OverlapSweep, Cardinality) {
  const auto recs = run_overlap_sweep(shared_corpus() / kManifestFileName, default_overlaps(), quick());
  EXPECT_EQ(recs.size(), 2u * 4u * 2u);
  for (const auto& r : recs) {
    EXPECT_EQ(r.noise_std, 0.0);
    EXPECT_TRUE(r.method == method::kAp || r.method == method::kApRandom);
    EXPECT_EQ(r.ordering, r.method == method::kAp ? "spiral" : "misassociated");
    EXPECT_GT(r.psnr_db, 0.0);
    EXPECT_LE(r.ssim, 1.0);
    EXPECT_GE(r.runtime_s, 0.0);
  }
}

TEST(NoiseSweep, ZeroNoiseRowEqualsOverlapSweepRow) {
  const auto manifest = shared_corpus() / kManifestFileName;
  auto cfg = quick();
  cfg.methods = {method::kAp};
  const auto noise = run_noise_sweep(manifest, default_noise_stds(), cfg);
  EXPECT_EQ(noise.size(), 2u * 4u);
  const auto over = run_overlap_sweep(manifest, {0.65}, cfg);
  ASSERT_EQ(over.size(), 2u);
  for (const auto& o : over) {
    const auto it = std::ranges::find_if(
        noise, [&](const EvalRecord& n) { return n.source == o.source && n.noise_std == 0.0; });
    ASSERT_NE(it, noise.end());
    EXPECT_EQ(it->psnr_db, o.psnr_db);
    EXPECT_EQ(it->ssim, o.ssim);
  }
}

TEST(Evaluate, PredictionFilesAddFpnetRows) {
  const auto dir = testing::scratch_dir("eval_pred");
  std::vector<SourceImage> images = {{"r", testing::random_image(128, 128, 5), 1.0}};
  CorpusConfig ccfg;
  ccfg.settings = {{0.65, 0.0}, {0.18, 0.0}};
  const Manifest m = build_corpus(std::span<const SourceImage>(images), ccfg, dir);
  // A perfect prediction for the first cube only.
  const RealImage truth = read_cube(dir / "gt" / "r.fpc").channel(0);
  write_cube(make_image_cube(truth, "r"), prediction_path(dir / m.rows[0].cube_path, method::kFpnet));
  auto cfg = quick();
  cfg.methods = {method::kFpnet, method::kFpnetRandom};
  const auto recs = run_overlap_sweep(dir / kManifestFileName, {0.65, 0.18}, cfg);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].method, method::kFpnet);
  EXPECT_EQ(recs[0].psnr_db, kPsnrCapDb);
  EXPECT_NEAR(recs[0].ssim, 1.0, 1e-6);
}

TEST(Evaluate, PredictionPathNaming) {
  EXPECT_EQ(prediction_path("c/x__ov0.6500.fpc", method::kFpnet), "c/x__ov0.6500.fpnet.fpc");
  EXPECT_EQ(prediction_path("c/x.fpc", method::kFpnetRandom), "c/x.fpnet-r.fpc");
}

TEST(Evaluate, MissingCubeIsSkippedWithWarning) {
  const auto dir = testing::scratch_dir("eval_missing");
  std::vector<SourceImage> images = {{"q", testing::random_image(128, 128, 6), 1.0}};
  CorpusConfig ccfg;
  ccfg.settings = {{0.65, 0.0}, {0.40, 0.0}};
  const Manifest m = build_corpus(std::span<const SourceImage>(images), ccfg, dir);
  std::filesystem::remove(dir / m.rows[1].cube_path);
  std::vector<std::string> warnings;
  auto cfg = quick();
  cfg.methods = {method::kAp, method::kBicubic};
  cfg.warn = [&](const std::string& w) { warnings.push_back(w); };
  const auto recs = run_overlap_sweep(dir / kManifestFileName, {0.65, 0.40}, cfg);
  EXPECT_EQ(recs.size(), 2u);
  EXPECT_FALSE(warnings.empty());
}

TEST(Evaluate, UnknownMethodRejected) {
  auto cfg = quick();
  cfg.methods = {"magic"};
  EXPECT_THROW((void)run_overlap_sweep(shared_corpus() / kManifestFileName, {0.65}, cfg),
               ValidationError);
}

TEST(RecordsCsv, RoundTrip) {
  const std::vector<EvalRecord> recs = {
      {"a", "AP", 0.65, 0.0, "spiral", 27.123456789012345, 0.91, 0.5},
      {"b", "AP-R", 0.1 + 0.2, 3e-4, "misassociated", 6.0, -0.01, 1.25e-3}};
  std::stringstream ss;
  write_records_csv(recs, ss);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), kEvalHeader);
  EXPECT_EQ(read_records_csv(ss), recs);
}

TEST(Summarize, MeanAndStd) {
  const std::vector<EvalRecord> recs = {{"a", "AP", 0.65, 0.0, "spiral", 20.0, 0.5, 0},
                                        {"b", "AP", 0.65, 0.0, "spiral", 30.0, 0.7, 0},
                                        {"a", "AP", 0.18, 0.0, "spiral", 10.0, 0.1, 0}};
  const auto rows = summarize(recs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].count, 2u);
  EXPECT_DOUBLE_EQ(rows[0].psnr_mean, 25.0);
  EXPECT_NEAR(rows[0].psnr_std, std::sqrt(50.0), 1e-12);
  EXPECT_NEAR(rows[0].ssim_mean, 0.6, 1e-12);
  EXPECT_EQ(rows[1].count, 1u);
  EXPECT_EQ(rows[1].psnr_std, 0.0);
}

}  // namespace
}  // namespace fpm
