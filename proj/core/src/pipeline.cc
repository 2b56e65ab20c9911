#include "touchcs/pipeline.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "touchcs/error.h"
#include "touchcs/parallel.h"

namespace touchcs {
namespace {

void add_readout_noise(std::span<double> values, double snr_readout_db,
                       Rng& rng) {
  const double sigma = snr_to_sigma(snr_readout_db, 1.0);
  if (sigma == 0.0) return;
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : values) v += noise(rng);
}

void check_frame(const TouchFrame& frame, std::span<const double> values,
                 std::size_t sensors) {
  if (values.size() != sensors || frame.values.size() != sensors) {
    throw DimensionError("frame has " + std::to_string(values.size()) +
                         " sensor values, expected " + std::to_string(sensors));
  }
}

bool is_context_aware(ReadoutScheme s) {
  return s == ReadoutScheme::kContextAware ||
         s == ReadoutScheme::kContextAwarePostprocess;
}

struct TrialStat {
  double tpr = 1.0;
  double fpr = 0.0;
  double precision = 1.0;
  std::size_t measurements = 0;
  bool event = false;
  bool flagged = false;
};

void record(TrialStat& stat, const Score& s, std::size_t measurements) {
  stat.tpr = s.tpr;
  stat.fpr = s.fpr;
  stat.precision = s.precision;
  stat.measurements = measurements;
  stat.event = s.positives > 0;
  stat.flagged = s.true_positives + s.false_positives > 0;
}

struct SweepContext {
  const SweepConfig& cfg;
  RepeatedMatrix phi;
  std::vector<std::int64_t> row_sums;
  std::size_t cdm_order = 0;
};

// Simulates one frame and scores it at each threshold in `vths`. Results go
// to out[scheme_index * vths.size() + v]. Random draws happen in a fixed
// order (frame, TSP noise, detection readout, TDM, CDM) so adding a scheme
// does not perturb the others.
void simulate_frame(const SweepContext& ctx, Rng& rng,
                    std::span<const double> vths, std::span<TrialStat> out) {
  const SweepConfig& cfg = ctx.cfg;
  const ChunkMap& chunks = ctx.phi.chunks;
  const TouchFrame frame = generate_frame(cfg.scene, chunks, rng);
  const std::vector<double> sensed =
      apply_tsp_noise(frame, cfg.scene.snr_tsp_db, cfg.scene.amplitude, rng);
  const std::vector<std::size_t> truth = active_chunks(frame, chunks);
  const double baseline = cfg.compensate_dc ? cfg.scene.dc : 0.0;

  const bool want_ca = std::ranges::any_of(cfg.schemes, is_context_aware);
  const bool want_tdm = std::ranges::count(cfg.schemes, ReadoutScheme::kTdm) > 0;
  const bool want_cdm = std::ranges::count(cfg.schemes, ReadoutScheme::kCdm) > 0;

  std::optional<Measurement> meas;
  if (want_ca) {
    meas = measure(ctx.phi.matrix, sensed, cfg.snr_readout_db, rng);
    subtract_dc_baseline(*meas, ctx.row_sums, baseline);
  }
  std::vector<double> tdm;
  if (want_tdm) {
    tdm = run_tdm_frame(frame, sensed, chunks, cfg.snr_readout_db, rng).recovered;
  }
  std::vector<double> cdm;
  if (want_cdm) {
    cdm = run_cdm_frame_fast(frame, sensed, chunks, ctx.cdm_order,
                             cfg.snr_readout_db, rng)
              .recovered;
  }

  const std::size_t width = vths.size();
  for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
    const ReadoutScheme scheme = cfg.schemes[s];
    for (std::size_t v = 0; v < width; ++v) {
      TrialStat& stat = out[s * width + v];
      if (is_context_aware(scheme)) {
        const DetectorOptions opts{
            .postprocess = scheme == ReadoutScheme::kContextAwarePostprocess,
            .unit_rule = cfg.unit_rule};
        const DetectionResult det =
            detect(quantize(*meas, vths[v]), cfg.params, chunks, opts);
        record(stat, score(det, truth), cfg.params.m + det.flagged_sensor_count());
      } else {
        const auto& rec = scheme == ReadoutScheme::kTdm ? tdm : cdm;
        const auto flags = threshold_chunks(rec, chunks, vths[v], baseline);
        record(stat, score(flags, truth), cfg.params.N);
      }
    }
  }
}

}  // namespace

std::string_view readout_scheme_name(ReadoutScheme scheme) {
  switch (scheme) {
    case ReadoutScheme::kContextAware:
      return "context_aware";
    case ReadoutScheme::kContextAwarePostprocess:
      return "context_aware_pp";
    case ReadoutScheme::kTdm:
      return "tdm";
    case ReadoutScheme::kCdm:
      return "cdm";
  }
  return "context_aware";
}

ReadoutScheme parse_readout_scheme(std::string_view name) {
  for (ReadoutScheme s :
       {ReadoutScheme::kContextAware, ReadoutScheme::kContextAwarePostprocess,
        ReadoutScheme::kTdm, ReadoutScheme::kCdm}) {
    if (readout_scheme_name(s) == name) return s;
  }
  throw std::invalid_argument(
      "unknown readout scheme '" + std::string(name) +
      "' (expected context_aware, context_aware_pp, tdm, cdm)");
}

FrameOutcome run_context_aware_frame(const RepeatedMatrix& phi,
                                     const MatrixParams& params,
                                     const TouchFrame& frame,
                                     std::span<const double> sensor_values,
                                     const ContextAwareSettings& settings,
                                     Rng& rng) {
  check_frame(frame, sensor_values, phi.matrix.cols());
  Measurement meas = measure(phi.matrix, sensor_values, settings.snr_readout_db, rng);
  subtract_dc_baseline(meas, phi.matrix.row_sums(), settings.dc_baseline);
  DetectionResult det = detect(quantize(meas, settings.vth), params, phi.chunks,
                               settings.detector);

  FrameOutcome out;
  out.scheme = settings.detector.postprocess
                   ? ReadoutScheme::kContextAwarePostprocess
                   : ReadoutScheme::kContextAware;
  out.truth_chunks = active_chunks(frame, phi.chunks);
  out.recovered.assign(sensor_values.size(), 0.0);
  const double sigma = snr_to_sigma(settings.snr_readout_db, 1.0);
  std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1.0);
  std::size_t reread = 0;
  for (std::size_t i = 0; i < sensor_values.size(); ++i) {
    if (!det.sensor_flags[i]) continue;
    out.recovered[i] = sensor_values[i] + (sigma > 0.0 ? noise(rng) : 0.0);
    ++reread;
  }
  out.measurements_used = params.m + reread;
  out.detection = std::move(det);
  return out;
}

FrameOutcome run_tdm_frame(const TouchFrame& frame,
                           std::span<const double> sensor_values,
                           const ChunkMap& chunks, double snr_readout_db,
                           Rng& rng) {
  check_frame(frame, sensor_values, chunks.sensor_count());
  FrameOutcome out;
  out.scheme = ReadoutScheme::kTdm;
  out.recovered.assign(sensor_values.begin(), sensor_values.end());
  add_readout_noise(out.recovered, snr_readout_db, rng);
  out.measurements_used = sensor_values.size();
  out.truth_chunks = active_chunks(frame, chunks);
  return out;
}

FrameOutcome run_cdm_frame(const TouchFrame& frame,
                           std::span<const double> sensor_values,
                           const ChunkMap& chunks, const TernaryMatrix& hadamard,
                           double snr_readout_db, Rng& rng) {
  check_frame(frame, sensor_values, chunks.sensor_count());
  const std::size_t order = hadamard.rows();
  if (hadamard.scheme() != Scheme::kCdm || hadamard.cols() != order) {
    throw DimensionError("run_cdm_frame: expected a square CDM matrix");
  }
  if (order < sensor_values.size()) {
    throw DimensionError("run_cdm_frame: Hadamard order " + std::to_string(order) +
                         " is smaller than N = " +
                         std::to_string(sensor_values.size()));
  }
  std::vector<double> padded(order, 0.0);
  std::copy(sensor_values.begin(), sensor_values.end(), padded.begin());
  std::vector<double> y = hadamard.multiply(padded);
  add_readout_noise(y, snr_readout_db, rng);
  std::vector<double> x = hadamard.multiply_transpose(y);

  FrameOutcome out;
  out.scheme = ReadoutScheme::kCdm;
  out.recovered.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(
                                                  sensor_values.size()));
  for (double& v : out.recovered) v /= static_cast<double>(order);
  out.measurements_used = sensor_values.size();
  out.truth_chunks = active_chunks(frame, chunks);
  return out;
}

FrameOutcome run_cdm_frame_fast(const TouchFrame& frame,
                                std::span<const double> sensor_values,
                                const ChunkMap& chunks, std::size_t order,
                                double snr_readout_db, Rng& rng) {
  check_frame(frame, sensor_values, chunks.sensor_count());
  if (order < sensor_values.size() || !std::has_single_bit(order)) {
    throw DimensionError("run_cdm_frame_fast: order must be a power of two >= N");
  }
  std::vector<double> buf(order, 0.0);
  std::copy(sensor_values.begin(), sensor_values.end(), buf.begin());
  fast_walsh_hadamard(buf);
  add_readout_noise(buf, snr_readout_db, rng);
  // Sylvester H is symmetric, so H^T y is another forward transform.
  fast_walsh_hadamard(buf);

  FrameOutcome out;
  out.scheme = ReadoutScheme::kCdm;
  out.recovered.assign(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(
                                                      sensor_values.size()));
  for (double& v : out.recovered) v /= static_cast<double>(order);
  out.measurements_used = sensor_values.size();
  out.truth_chunks = active_chunks(frame, chunks);
  return out;
}

std::vector<std::uint8_t> threshold_chunks(std::span<const double> recovered,
                                           const ChunkMap& chunks, double vth,
                                           double dc_baseline) {
  if (recovered.size() != chunks.sensor_count()) {
    throw DimensionError("threshold_chunks: recovered length mismatch");
  }
  std::vector<std::uint8_t> flags(chunks.chunk_count(), 0);
  for (std::size_t c = 0; c < chunks.chunk_count(); ++c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < chunks[c].length; ++i) {
      sum += recovered[chunks[c].start + i] - dc_baseline;
    }
    flags[c] = sum > vth ? 1 : 0;
  }
  return flags;
}

Score score(std::span<const std::uint8_t> chunk_flags,
            std::span<const std::size_t> truth_chunks) {
  Score s;
  s.positives = truth_chunks.size();
  s.negatives = chunk_flags.size() - truth_chunks.size();
  std::size_t flagged = 0;
  for (std::uint8_t f : chunk_flags) flagged += f ? 1 : 0;
  for (std::size_t c : truth_chunks) {
    if (c >= chunk_flags.size()) throw DimensionError("score: truth chunk out of range");
    if (chunk_flags[c]) ++s.true_positives;
  }
  s.false_positives = flagged - s.true_positives;
  if (s.positives > 0) {
    s.tpr = static_cast<double>(s.true_positives) / static_cast<double>(s.positives);
  }
  if (s.negatives > 0) {
    s.fpr = static_cast<double>(s.false_positives) / static_cast<double>(s.negatives);
  }
  if (flagged > 0) {
    s.precision = static_cast<double>(s.true_positives) / static_cast<double>(flagged);
  }
  return s;
}

Score score(const DetectionResult& detection,
            std::span<const std::size_t> truth_chunks) {
  return score(detection.chunk_flags, truth_chunks);
}

void SweepConfig::validate() const {
  params.validate();
  scene.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (vth_grid.empty()) throw std::invalid_argument("vth grid must not be empty");
  for (std::size_t i = 0; i < vth_grid.size(); ++i) {
    if (!(vth_grid[i] > 0.0) || !std::isfinite(vth_grid[i])) {
      throw std::invalid_argument("vth values must be finite and > 0");
    }
    if (i > 0 && !(vth_grid[i] > vth_grid[i - 1])) {
      throw std::invalid_argument("vth grid must be strictly increasing");
    }
  }
  if (schemes.empty()) throw std::invalid_argument("scheme list must not be empty");
}

std::vector<RocCurve> roc_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepContext ctx{cfg, build_phi_kl(cfg.params), {}, std::bit_ceil(cfg.params.N)};
  ctx.row_sums = ctx.phi.matrix.row_sums();

  const std::size_t grid = cfg.vth_grid.size();
  const std::size_t width = cfg.schemes.size() * grid;
  std::vector<TrialStat> stats(cfg.trials * width);

  parallel_for_index(cfg.trials, cfg.threads, [&](std::size_t t) {
    std::span<TrialStat> slot(stats.data() + t * width, width);
    if (cfg.paired) {
      Rng rng(derive_seed(cfg.master_seed, cfg.experiment_id, t));
      simulate_frame(ctx, rng, cfg.vth_grid, slot);
      return;
    }
    std::vector<TrialStat> one(cfg.schemes.size());
    for (std::size_t v = 0; v < grid; ++v) {
      Rng rng(derive_seed(cfg.master_seed, cfg.experiment_id, t * grid + v));
      simulate_frame(ctx, rng, std::span(cfg.vth_grid).subspan(v, 1), one);
      for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
        slot[s * grid + v] = one[s];
      }
    }
  });

  // Reduce in trial order so the sums do not depend on the worker count.
  std::vector<RocCurve> curves;
  for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
    RocCurve curve;
    curve.scheme = cfg.schemes[s];
    for (std::size_t v = 0; v < grid; ++v) {
      double tpr = 0, fpr = 0, precision = 0, meas = 0;
      std::size_t events = 0, flagged = 0;
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const TrialStat& st = stats[t * width + s * grid + v];
        fpr += st.fpr;
        meas += static_cast<double>(st.measurements);
        if (st.event) {
          tpr += st.tpr;
          ++events;
        }
        if (st.flagged) {
          precision += st.precision;
          ++flagged;
        }
      }
      const auto trials = static_cast<double>(cfg.trials);
      curve.points.push_back(RocPoint{
          .vth = cfg.vth_grid[v],
          .tpr = events > 0 ? tpr / static_cast<double>(events) : 1.0,
          .fpr = fpr / trials,
          .precision = flagged > 0 ? precision / static_cast<double>(flagged) : 1.0,
          .mean_measurements = meas / trials,
          .trials = cfg.trials,
          .event_trials = events});
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

double roc_auc(const RocCurve& curve) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(curve.points.size() + 2);
  pts.emplace_back(0.0, 0.0);
  for (const RocPoint& p : curve.points) pts.emplace_back(p.fpr, p.tpr);
  pts.emplace_back(1.0, 1.0);
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    best = std::max(best, pts[i].second);
    const double next = std::max(best, pts[i + 1].second);
    area += (pts[i + 1].first - pts[i].first) * (best + next) / 2.0;
  }
  return area;
}

}  // namespace touchcs
