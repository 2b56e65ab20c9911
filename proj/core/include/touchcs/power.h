#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "touchcs/matrices.h"
#include "touchcs/pipeline.h"
#include "touchcs/scene.h"

namespace touchcs {

// Per-channel readout power at the reference frame rate. Defaults are the
// published driver / amplifier / ADC figures at 120 Hz.
struct PowerModel {
  double p_driver_mw = 0.3;
  double p_amp_mw = 0.2;
  double p_adc_mw = 0.4;
  double f_ref_hz = 120.0;
  double f_frame_hz = 120.0;  // at most 200 Hz
  double p_detector_mw = 0.01;  // whole digital detector, not per channel
  double cdm_driver_multiplier = 1.0;
  // Fraction of full per-channel analog power spent on each detection-phase
  // measurement. 1 charges detection like an ordinary readout.
  double detection_power_factor = 1.0;

  void validate() const;
};

// TDM: n (p_driver + p_amp + p_adc) f_frame / f_ref. CDM scales p_driver by
// cdm_driver_multiplier. Other schemes throw std::invalid_argument.
double conventional_power(const PowerModel& pm, std::size_t n_channels,
                          Scheme scheme);

struct ProposedStats {
  double mean_measurements = 0.0;  // per frame, detection + re-reads
  std::size_t N = 0;
  std::size_t m = 0;  // detection measurements per frame
};

// p_detector + (beta m + (mean - m)) / N * conventional_power(pm, N, TDM),
// with beta = detection_power_factor.
double proposed_power(const PowerModel& pm, const ProposedStats& stats);

struct EnergyReport {
  double p_conventional_mw = 0.0;
  double p_proposed_mw = 0.0;
  double saving_ratio = 0.0;
  double recall = 0.0;
};

inline constexpr double kDefaultMinRecall = 0.9;

// Throws RecallConstraintUnmet when recall < min_recall.
EnergyReport energy_saving(const PowerModel& pm, std::size_t n_channels,
                           Scheme conventional, const ProposedStats& proposed,
                           double recall, double min_recall = kDefaultMinRecall);

// The point with recall >= min_recall and the fewest mean measurements
// (largest saving); ties go to the smallest vth.
std::optional<RocPoint> select_operating_point(const RocCurve& curve,
                                               double min_recall = kDefaultMinRecall);

struct EnergyRow {
  MatrixParams params;
  double vth_op = 0.0;
  double recall = 0.0;
  double fpr = 0.0;
  EnergyReport report;
};

struct EnergySweepConfig {
  SceneConfig scene;  // sparsity_k == 0 means "use each set's k"
  double snr_readout_db = 40.0;
  std::vector<double> vth_grid;
  std::size_t trials = 1;
  std::uint64_t master_seed = 1;
  bool postprocess = false;
  UnitFlagRule unit_rule = UnitFlagRule::kPerRow;
  bool compensate_dc = true;
  Scheme conventional = Scheme::kTdm;
  double min_recall = kDefaultMinRecall;
  std::size_t threads = 1;
};

// Experiment id used for the energy sweep of one parameter set; identical
// sets map to identical ids.
std::uint64_t energy_experiment_id(const MatrixParams& params);

// One row per parameter set that reaches min_recall. Sets that do not are
// skipped and described in `skipped` (when given).
std::vector<EnergyRow> sweep_energy_savings(std::span<const MatrixParams> sets,
                                            const EnergySweepConfig& cfg,
                                            const PowerModel& pm,
                                            std::vector<std::string>* skipped = nullptr);

}  // namespace touchcs
