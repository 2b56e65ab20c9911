#include "touchcs/power.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "touchcs/error.h"
#include "touchcs/rng.h"

namespace touchcs {

void PowerModel::validate() const {
  for (double p : {p_driver_mw, p_amp_mw, p_adc_mw, p_detector_mw}) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("power figures must be finite and >= 0");
    }
  }
  if (!(f_ref_hz > 0.0)) throw std::invalid_argument("f_ref_hz must be > 0");
  if (!(f_frame_hz > 0.0 && f_frame_hz <= 200.0)) {
    throw std::invalid_argument("f_frame_hz must lie in (0, 200]");
  }
  if (!(cdm_driver_multiplier >= 1.0)) {
    throw std::invalid_argument("cdm_driver_multiplier must be >= 1");
  }
  if (!(detection_power_factor > 0.0 && detection_power_factor <= 1.0)) {
    throw std::invalid_argument("detection_power_factor must lie in (0, 1]");
  }
}

double conventional_power(const PowerModel& pm, std::size_t n_channels,
                          Scheme scheme) {
  pm.validate();
  double driver = pm.p_driver_mw;
  if (scheme == Scheme::kCdm) {
    driver *= pm.cdm_driver_multiplier;
  } else if (scheme != Scheme::kTdm) {
    throw std::invalid_argument("conventional_power: scheme must be TDM or CDM");
  }
  return static_cast<double>(n_channels) * (driver + pm.p_amp_mw + pm.p_adc_mw) *
         (pm.f_frame_hz / pm.f_ref_hz);
}

double proposed_power(const PowerModel& pm, const ProposedStats& stats) {
  if (stats.N == 0) throw std::invalid_argument("proposed_power: N must be > 0");
  if (!(stats.mean_measurements >= 0.0)) {
    throw std::invalid_argument("proposed_power: negative measurement count");
  }
  const double conventional = conventional_power(pm, stats.N, Scheme::kTdm);
  const double detection = static_cast<double>(stats.m);
  const double weighted = pm.detection_power_factor * detection +
                          (stats.mean_measurements - detection);
  return pm.p_detector_mw +
         weighted / static_cast<double>(stats.N) * conventional;
}

EnergyReport energy_saving(const PowerModel& pm, std::size_t n_channels,
                           Scheme conventional, const ProposedStats& proposed,
                           double recall, double min_recall) {
  if (!(recall >= min_recall)) {
    std::ostringstream os;
    os << "recall " << recall << " is below the required " << min_recall;
    throw RecallConstraintUnmet(os.str());
  }
  EnergyReport r;
  r.p_conventional_mw = conventional_power(pm, n_channels, conventional);
  r.p_proposed_mw = proposed_power(pm, proposed);
  r.saving_ratio = r.p_conventional_mw / r.p_proposed_mw;
  r.recall = recall;
  return r;
}

std::optional<RocPoint> select_operating_point(const RocCurve& curve,
                                               double min_recall) {
  std::optional<RocPoint> best;
  for (const RocPoint& p : curve.points) {
    if (!(p.tpr >= min_recall)) continue;
    if (!best || p.mean_measurements < best->mean_measurements) best = p;
  }
  return best;
}

std::uint64_t energy_experiment_id(const MatrixParams& p) {
  std::uint64_t h = mix64(0x656e65726779ULL);  // "energy"
  for (std::size_t v : {p.m, p.k, p.l, p.N}) h = mix64(h ^ v);
  return h;
}

std::vector<EnergyRow> sweep_energy_savings(std::span<const MatrixParams> sets,
                                            const EnergySweepConfig& cfg,
                                            const PowerModel& pm,
                                            std::vector<std::string>* skipped) {
  pm.validate();
  std::vector<EnergyRow> rows;
  for (const MatrixParams& params : sets) {
    SweepConfig sweep;
    sweep.params = params;
    sweep.scene = cfg.scene;
    if (sweep.scene.sparsity_k == 0) sweep.scene.sparsity_k = params.k;
    sweep.snr_readout_db = cfg.snr_readout_db;
    sweep.vth_grid = cfg.vth_grid;
    sweep.trials = cfg.trials;
    sweep.master_seed = cfg.master_seed;
    sweep.experiment_id = energy_experiment_id(params);
    sweep.schemes = {cfg.postprocess ? ReadoutScheme::kContextAwarePostprocess
                                     : ReadoutScheme::kContextAware};
    sweep.unit_rule = cfg.unit_rule;
    sweep.compensate_dc = cfg.compensate_dc;
    sweep.threads = cfg.threads;

    const RocCurve curve = roc_sweep(sweep).front();
    const std::optional<RocPoint> op = select_operating_point(curve, cfg.min_recall);
    if (!op) {
      if (skipped) {
        std::ostringstream os;
        os << "N=" << params.N << " k=" << params.k << " m=" << params.m
           << " l=" << params.l << ": no vth reaches recall " << cfg.min_recall;
        skipped->push_back(os.str());
      }
      continue;
    }
    EnergyRow row;
    row.params = params;
    row.vth_op = op->vth;
    row.recall = op->tpr;
    row.fpr = op->fpr;
    row.report = energy_saving(pm, params.N, cfg.conventional,
                               {op->mean_measurements, params.N, params.m},
                               op->tpr, cfg.min_recall);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace touchcs
