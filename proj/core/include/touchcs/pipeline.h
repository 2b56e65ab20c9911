#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "touchcs/detector.h"
#include "touchcs/frontend.h"
#include "touchcs/matrices.h"
#include "touchcs/rng.h"
#include "touchcs/scene.h"

namespace touchcs {

enum class ReadoutScheme {
  kContextAware,             // detect, then TDM re-read of flagged chunks
  kContextAwarePostprocess,  // same, with the mixed-sign block filter
  kTdm,                      // read every sensor
  kCdm,                      // Hadamard-coded full readout
};

// "context_aware", "context_aware_pp", "tdm", "cdm"
std::string_view readout_scheme_name(ReadoutScheme scheme);
ReadoutScheme parse_readout_scheme(std::string_view name);

struct FrameOutcome {
  ReadoutScheme scheme = ReadoutScheme::kContextAware;
  std::size_t measurements_used = 0;
  std::vector<double> recovered;
  std::optional<DetectionResult> detection;  // context-aware schemes only
  std::vector<std::size_t> truth_chunks;
};

struct ContextAwareSettings {
  double snr_readout_db = 40.0;
  double vth = 0.5;
  DetectorOptions detector;
  // Known sensor DC, removed from rows of a trimmed matrix that do not sum
  // to zero. Leave at 0 when the DC is unknown.
  double dc_baseline = 0.0;
};

// `sensor_values` are what the panel presents to the front end (the frame's
// ideal values plus any TSP noise); `frame` supplies the ground truth.
FrameOutcome run_context_aware_frame(const RepeatedMatrix& phi,
                                     const MatrixParams& params,
                                     const TouchFrame& frame,
                                     std::span<const double> sensor_values,
                                     const ContextAwareSettings& settings,
                                     Rng& rng);

FrameOutcome run_tdm_frame(const TouchFrame& frame,
                           std::span<const double> sensor_values,
                           const ChunkMap& chunks, double snr_readout_db,
                           Rng& rng);

// recovered = H^T (H x + g) / n over the sensors zero-padded to the Hadamard
// order. Throws DimensionError when the order is smaller than N or the
// matrix is not a CDM matrix.
FrameOutcome run_cdm_frame(const TouchFrame& frame,
                           std::span<const double> sensor_values,
                           const ChunkMap& chunks, const TernaryMatrix& hadamard,
                           double snr_readout_db, Rng& rng);

// Same result via the fast Walsh-Hadamard transform, for orders where an
// explicit matrix would not fit in memory.
FrameOutcome run_cdm_frame_fast(const TouchFrame& frame,
                                std::span<const double> sensor_values,
                                const ChunkMap& chunks, std::size_t order,
                                double snr_readout_db, Rng& rng);

// Full-readout detection for baseline schemes: a chunk is flagged when the
// sum of its recovered values, less dc_baseline per sensor, exceeds vth.
std::vector<std::uint8_t> threshold_chunks(std::span<const double> recovered,
                                           const ChunkMap& chunks, double vth,
                                           double dc_baseline);

// Chunk-level confusion counts and rates.
struct Score {
  double tpr = 1.0;        // 1 when there are no active chunks
  double fpr = 0.0;        // 0 when every chunk is active
  double precision = 1.0;  // 1 when nothing is flagged
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

// truth_chunks must be ascending and unique.
Score score(std::span<const std::uint8_t> chunk_flags,
            std::span<const std::size_t> truth_chunks);
Score score(const DetectionResult& detection,
            std::span<const std::size_t> truth_chunks);

struct RocPoint {
  double vth = 0.0;
  double tpr = 1.0;        // mean over trials that contain a touch
  double fpr = 0.0;        // mean over all trials
  double precision = 1.0;  // mean over trials that flag anything
  double mean_measurements = 0.0;
  std::size_t trials = 0;
  std::size_t event_trials = 0;
};

struct RocCurve {
  ReadoutScheme scheme = ReadoutScheme::kContextAware;
  std::vector<RocPoint> points;  // vth strictly increasing
};

struct SweepConfig {
  MatrixParams params;
  SceneConfig scene;
  double snr_readout_db = 40.0;
  std::vector<double> vth_grid;
  std::size_t trials = 1;
  std::uint64_t master_seed = 1;
  std::uint64_t experiment_id = 0;
  // Paired: every vth sees the same frames. Otherwise each (trial, vth)
  // pair draws its own frame.
  bool paired = true;
  std::vector<ReadoutScheme> schemes = {ReadoutScheme::kContextAware};
  UnitFlagRule unit_rule = UnitFlagRule::kPerRow;
  // Subtract the scene's DC on trimmed rows (calibrated baseline).
  bool compensate_dc = true;
  std::size_t threads = 1;

  void validate() const;
};

// One curve per entry of cfg.schemes, in that order. Deterministic in
// (cfg minus threads).
std::vector<RocCurve> roc_sweep(const SweepConfig& cfg);

// Area under the upper envelope of the curve's points, closed with (0,0) and
// (1,1).
double roc_auc(const RocCurve& curve);

}  // namespace touchcs
