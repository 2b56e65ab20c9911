#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "touchcs/error.h"
#include "touchcs/pipeline.h"

namespace touchcs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TouchFrame frame_with(std::size_t N, std::vector<std::size_t> support, double dc = 0.0) {
  TouchFrame f;
  f.values.assign(N, dc);
  for (std::size_t s : support) f.values[s] += 1.0;
  f.support = std::move(support);
  f.dc = dc;
  return f;
}

TEST(ContextAware, IdleFrameCostsOnlyDetection) {
  const MatrixParams p{420, 5, 20, 10000};
  const RepeatedMatrix phi = build_phi_kl(p);
  const TouchFrame f = frame_with(p.N, {});
  Rng rng(1);
  const FrameOutcome out = run_context_aware_frame(
      phi, p, f, f.values, {.snr_readout_db = kInf, .vth = 0.5}, rng);
  EXPECT_EQ(out.measurements_used, 420u);
  EXPECT_EQ(out.recovered, std::vector<double>(p.N, 0.0));
  EXPECT_TRUE(out.truth_chunks.empty());
}

TEST(ContextAware, SmallPanelSingleBlockTouch) {
  const MatrixParams p{4, 2, 1, 6};
  const RepeatedMatrix phi = build_phi_kl(p);
  const TouchFrame f = frame_with(6, {4});
  Rng rng(1);
  const FrameOutcome out = run_context_aware_frame(
      phi, p, f, f.values, {.snr_readout_db = kInf, .vth = 0.5}, rng);
  EXPECT_EQ(out.detection->flagged_chunks(), std::vector<std::size_t>{4});
  EXPECT_EQ(out.measurements_used, 5u);
  EXPECT_EQ(out.recovered, (std::vector<double>{0, 0, 0, 0, 1, 0}));
  EXPECT_EQ(out.scheme, ReadoutScheme::kContextAware);
}

TEST(ContextAware, OneTouchedChunkOnLargePanel) {
  const MatrixParams p{420, 5, 20, 10000};
  const RepeatedMatrix phi = build_phi_kl(p);
  std::vector<std::size_t> support;
  for (std::size_t s = 0; s < 20; ++s) support.push_back(s);
  const TouchFrame f = frame_with(p.N, support);
  Rng rng(1);
  const FrameOutcome out = run_context_aware_frame(
      phi, p, f, f.values, {.snr_readout_db = kInf, .vth = 0.5}, rng);
  EXPECT_EQ(out.measurements_used, 440u);
  EXPECT_EQ(out.detection->flagged_chunks(), std::vector<std::size_t>{0});
  EXPECT_LE(out.measurements_used, p.m + p.N);
}

TEST(ContextAware, KnownDcIsRemovedOnTrimmedRows) {
  const MatrixParams p{8, 2, 3, 31};  // trimmed: some rows do not sum to zero
  const RepeatedMatrix phi = build_phi_kl(p);
  const TouchFrame f = frame_with(p.N, {0, 1, 2}, 3.0);
  Rng rng(1);
  const FrameOutcome with = run_context_aware_frame(
      phi, p, f, f.values, {.snr_readout_db = kInf, .vth = 0.5, .dc_baseline = 3.0}, rng);
  EXPECT_EQ(with.detection->flagged_chunks(), std::vector<std::size_t>{0});
  const FrameOutcome without = run_context_aware_frame(
      phi, p, f, f.values, {.snr_readout_db = kInf, .vth = 0.5}, rng);
  EXPECT_NE(without.detection->flagged_chunks(), std::vector<std::size_t>{0});
}

TEST(Tdm, NoiselessIsExactAndCostsN) {
  const ChunkMap chunks = build_phi_kl({4, 2, 1, 6}).chunks;
  const TouchFrame f = frame_with(6, {2, 5});
  Rng rng(1);
  const FrameOutcome out = run_tdm_frame(f, f.values, chunks, kInf, rng);
  EXPECT_EQ(out.recovered, f.values);
  EXPECT_EQ(out.measurements_used, 6u);
  EXPECT_EQ(out.truth_chunks, (std::vector<std::size_t>{2, 5}));
}

TEST(Cdm, NoiselessRecoversExactly) {
  const ChunkMap chunks = ChunkMap::for_phi_k(4, 4);  // 5 single-sensor chunks
  const TouchFrame f = frame_with(5, {1, 3});
  Rng rng(1);
  const FrameOutcome out = run_cdm_frame(f, f.values, chunks, build_hadamard(8), kInf, rng);
  EXPECT_EQ(out.recovered, f.values);
  EXPECT_EQ(out.measurements_used, 5u);
  EXPECT_THROW(run_cdm_frame(f, f.values, chunks, build_hadamard(4), kInf, rng),
               DimensionError);
  EXPECT_THROW(run_cdm_frame(f, f.values, chunks, build_identity(8), kInf, rng),
               DimensionError);
  EXPECT_THROW(run_cdm_frame_fast(f, f.values, chunks, 6, kInf, rng), DimensionError);
}

TEST(Cdm, FastPathMatchesExplicitMatrix) {
  const ChunkMap chunks = build_phi_kl({12, 3, 2, 30}).chunks;
  const TernaryMatrix h = build_hadamard(32);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 50; ++i) {
    TouchFrame f = frame_with(30, {});
    for (double& v : f.values) v = u(gen);
    Rng a(static_cast<std::uint64_t>(i)), b(static_cast<std::uint64_t>(i));
    const auto slow = run_cdm_frame(f, f.values, chunks, h, 30.0, a);
    const auto fast = run_cdm_frame_fast(f, f.values, chunks, 32, 30.0, b);
    for (std::size_t s = 0; s < 30; ++s) EXPECT_NEAR(slow.recovered[s], fast.recovered[s], 1e-12);
  }
}

double pooled_variance(const std::vector<std::vector<double>>& runs) {
  double sq = 0;
  std::size_t count = 0;
  for (const auto& r : runs) {
    for (double v : r) {
      sq += v * v;
      ++count;
    }
  }
  return sq / static_cast<double>(count);
}

TEST(Cdm, NoiseVarianceShrinksByOrder) {
  const std::size_t n = 16;
  const ChunkMap chunks = ChunkMap::for_phi_k(8, 1);  // 16 single-sensor chunks
  const TouchFrame f = frame_with(n, {});
  Rng rng(4);
  std::vector<std::vector<double>> runs;
  for (int t = 0; t < 10000; ++t) {
    runs.push_back(run_cdm_frame_fast(f, f.values, chunks, n, 30.0, rng).recovered);
  }
  const double sigma = snr_to_sigma(30.0, 1.0);
  EXPECT_NEAR(pooled_variance(runs) / (sigma * sigma / n), 1.0, 0.03);
}

TEST(Tdm, NoiseVarianceIsReadoutVariance) {
  const ChunkMap chunks = ChunkMap::for_phi_k(8, 1);
  const TouchFrame f = frame_with(16, {});
  Rng rng(4);
  std::vector<std::vector<double>> runs;
  for (int t = 0; t < 10000; ++t) {
    runs.push_back(run_tdm_frame(f, f.values, chunks, 30.0, rng).recovered);
  }
  const double sigma = snr_to_sigma(30.0, 1.0);
  EXPECT_NEAR(pooled_variance(runs) / (sigma * sigma), 1.0, 0.03);
}

TEST(ThresholdChunks, SumsChunkValuesLessBaseline) {
  const ChunkMap chunks({{0, 2, ChunkRole::kUnit, 0}, {2, 3, ChunkRole::kBlock, 0}});
  const std::vector<double> rec = {1.3, 1.3, 1.1, 1.1, 1.0};
  EXPECT_EQ(threshold_chunks(rec, chunks, 0.5, 1.0), (std::vector<std::uint8_t>{1, 0}));
  EXPECT_EQ(threshold_chunks(rec, chunks, 0.1, 1.0), (std::vector<std::uint8_t>{1, 1}));
  EXPECT_THROW(threshold_chunks(std::vector<double>(4, 0.0), chunks, 0.5, 0.0),
               DimensionError);
}

TEST(Score, ReferenceCases) {
  const std::vector<std::uint8_t> flags = {1, 0, 0, 0, 0, 0};
  const std::size_t truth[] = {0};
  Score s = score(flags, truth);
  EXPECT_EQ(s.tpr, 1.0);
  EXPECT_EQ(s.fpr, 0.0);
  EXPECT_EQ(s.precision, 1.0);

  s = score(std::vector<std::uint8_t>(6, 0), std::span<const std::size_t>{});
  EXPECT_EQ(s.tpr, 1.0);
  EXPECT_EQ(s.fpr, 0.0);
  EXPECT_EQ(s.precision, 1.0);

  const std::size_t two[] = {1, 4};
  s = score(std::vector<std::uint8_t>{1, 1, 0, 0, 0, 0}, two);
  EXPECT_EQ(s.tpr, 0.5);
  EXPECT_EQ(s.fpr, 0.25);
  EXPECT_EQ(s.precision, 0.5);
  EXPECT_EQ(s.true_positives, 1u);
  EXPECT_EQ(s.false_positives, 1u);
  EXPECT_EQ(s.positives, 2u);
  EXPECT_EQ(s.negatives, 4u);
}

SweepConfig small_sweep() {
  SweepConfig cfg;
  cfg.params = {24, 3, 4, 120};
  cfg.scene = {.sparsity_k = 3, .snr_tsp_db = 25.0};
  cfg.snr_readout_db = 35.0;
  cfg.vth_grid = {0.1, 0.5, 2.0, 8.0, 1e6};
  cfg.trials = 300;
  cfg.master_seed = 77;
  cfg.schemes = {ReadoutScheme::kContextAware, ReadoutScheme::kContextAwarePostprocess,
                 ReadoutScheme::kTdm, ReadoutScheme::kCdm};
  return cfg;
}

void expect_same_curves(const std::vector<RocCurve>& a, const std::vector<RocCurve>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t s = 0; s < a.size(); ++s) {
    ASSERT_EQ(a[s].points.size(), b[s].points.size());
    for (std::size_t v = 0; v < a[s].points.size(); ++v) {
      const RocPoint& x = a[s].points[v];
      const RocPoint& y = b[s].points[v];
      EXPECT_EQ(x.tpr, y.tpr);
      EXPECT_EQ(x.fpr, y.fpr);
      EXPECT_EQ(x.precision, y.precision);
      EXPECT_EQ(x.mean_measurements, y.mean_measurements);
      EXPECT_EQ(x.event_trials, y.event_trials);
    }
  }
}

TEST(RocSweep, IndependentOfThreadCount) {
  SweepConfig cfg = small_sweep();
  const auto one = roc_sweep(cfg);
  cfg.threads = 4;
  expect_same_curves(one, roc_sweep(cfg));
  cfg.paired = false;
  cfg.threads = 1;
  const auto unpaired = roc_sweep(cfg);
  cfg.threads = 3;
  expect_same_curves(unpaired, roc_sweep(cfg));
}

TEST(RocSweep, AddingASchemeDoesNotPerturbOthers) {
  SweepConfig cfg = small_sweep();
  const auto all = roc_sweep(cfg);
  cfg.schemes = {ReadoutScheme::kContextAware};
  const auto ca = roc_sweep(cfg);
  expect_same_curves({all[0]}, ca);
}

TEST(RocSweep, HugeThresholdFlagsNothing) {
  const auto curves = roc_sweep(small_sweep());
  for (const RocCurve& c : curves) {
    const RocPoint& last = c.points.back();
    EXPECT_EQ(last.tpr, 0.0);
    EXPECT_EQ(last.fpr, 0.0);
    EXPECT_EQ(last.precision, 1.0);
    EXPECT_EQ(last.event_trials, 300u);  // every frame carries a touch
  }
  EXPECT_EQ(curves[0].points.back().mean_measurements, 24.0);
  EXPECT_EQ(curves[2].points.back().mean_measurements, 120.0);
}

TEST(RocSweep, TinyThresholdFalseAlarmRateMatchesSignStatistics) {
  // Idle panel, readout noise only, vth far below the noise: a unit chunk is
  // flagged iff its row reads above zero (probability 1/2), a block chunk
  // iff some row of its group reads below zero (1 - 2^-k).
  SweepConfig cfg;
  cfg.params = {40, 2, 1, 60};
  cfg.scene = {.sparsity_k = 1, .snr_tsp_db = kInf, .event_probability = 0.0};
  cfg.snr_readout_db = 40.0;
  cfg.vth_grid = {1e-7};
  cfg.trials = 4000;
  const double expected = (40 * 0.5 + 20 * (1.0 - 0.25)) / 60.0;
  const auto curve = roc_sweep(cfg)[0];
  EXPECT_NEAR(curve.points[0].fpr, expected, 0.01);
  EXPECT_EQ(curve.points[0].event_trials, 0u);
  EXPECT_EQ(curve.points[0].tpr, 1.0);
}

TEST(RocSweep, StrongPositiveRowsShrinkAsThresholdRises) {
  const MatrixParams p{60, 5, 3, 216};
  const RepeatedMatrix phi = build_phi_kl(p);
  const SceneConfig scene{.sparsity_k = 5, .snr_tsp_db = 15.0};
  Rng rng(9);
  for (int t = 0; t < 300; ++t) {
    const TouchFrame f = generate_frame(scene, phi.chunks, rng);
    const auto x = apply_tsp_noise(f, scene.snr_tsp_db, 1.0, rng);
    const Measurement meas = measure(phi.matrix, x, 20.0, rng);
    std::vector<Code> prev;
    for (double vth : {0.05, 0.1, 0.3, 0.7, 1.5, 3.0, 6.0}) {
      const auto q = quantize(meas, vth).codes;
      if (!prev.empty()) {
        for (std::size_t r = 0; r < q.size(); ++r) {
          if (q[r] == Code::kStrongPos) EXPECT_EQ(prev[r], Code::kStrongPos);
        }
      }
      prev = q;
    }
  }
}

TEST(RocSweep, RejectsBadConfigs) {
  SweepConfig cfg = small_sweep();
  cfg.trials = 0;
  EXPECT_THROW(roc_sweep(cfg), std::invalid_argument);
  cfg = small_sweep();
  cfg.vth_grid = {0.5, 0.5};
  EXPECT_THROW(roc_sweep(cfg), std::invalid_argument);
  cfg.vth_grid = {};
  EXPECT_THROW(roc_sweep(cfg), std::invalid_argument);
  cfg = small_sweep();
  cfg.params.N = 129;
  EXPECT_THROW(roc_sweep(cfg), std::invalid_argument);
}

TEST(RocAuc, ReferenceCurves) {
  RocCurve perfect;
  perfect.points = {{.tpr = 1.0, .fpr = 0.0}};
  EXPECT_DOUBLE_EQ(roc_auc(perfect), 1.0);
  RocCurve chance;
  chance.points = {{.tpr = 0.25, .fpr = 0.25}, {.tpr = 0.75, .fpr = 0.75}};
  EXPECT_DOUBLE_EQ(roc_auc(chance), 0.5);
  EXPECT_DOUBLE_EQ(roc_auc(RocCurve{}), 0.5);
  RocCurve step;
  step.points = {{.tpr = 0.5, .fpr = 0.0}};
  EXPECT_DOUBLE_EQ(roc_auc(step), 0.75);
}

TEST(ReadoutScheme, NamesRoundTrip) {
  for (ReadoutScheme s : {ReadoutScheme::kContextAware, ReadoutScheme::kContextAwarePostprocess,
                          ReadoutScheme::kTdm, ReadoutScheme::kCdm}) {
    EXPECT_EQ(parse_readout_scheme(readout_scheme_name(s)), s);
  }
  EXPECT_THROW(parse_readout_scheme("fdm"), std::invalid_argument);
}

}  // namespace
}  // namespace touchcs
