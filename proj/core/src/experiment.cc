#include "touchcs/experiment.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "touchcs/matrices.h"
#include "touchcs/power.h"
#include "touchcs/rng.h"

#ifndef TOUCHCS_VERSION
#define TOUCHCS_VERSION "0.0.0"
#endif

namespace touchcs {
namespace {

void write_file(const std::filesystem::path& path, const std::string& content,
                ExperimentResult& result) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
  result.files.push_back(path);
}

std::string curve_file_name(const MatrixParams& p) {
  std::ostringstream os;
  os << "roc_N" << p.N << "_k" << p.k << "_m" << p.m << "_l" << p.l << ".csv";
  return os.str();
}

std::string manifest(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# touchcs experiment manifest\n"
     << "tool = touchcs " << tool_version() << '\n'
     << "# snr convention: sigma = amplitude * 10^(-snr_db/20); readout sigma "
        "is referenced to amplitude 1\n"
     << "# roc tpr/fpr are chunk-level; tpr averages trials with a touch, fpr "
        "averages all trials\n"
     << format_config(cfg, /*with_run_details=*/false) << "# derived\n";
  for (std::size_t i = 0; i < cfg.param_sets.size(); ++i) {
    const MatrixParams& p = cfg.param_sets[i];
    const RepeatedMatrix phi = build_phi_kl(p);
    std::int64_t imbalance = 0;
    for (std::int64_t s : phi.matrix.row_sums()) imbalance = std::max(imbalance, std::abs(s));
    os << "# set " << i + 1 << ": N=" << p.N << " k=" << p.k << " m=" << p.m
       << " l=" << p.l << " chunks=" << p.chunk_count()
       << " trimmed_chunks=" << p.l * p.chunk_count() - p.N
       << " sampling_ratio=" << csv::format_double(p.sampling_ratio())
       << " max_row_imbalance=" << imbalance << '\n';
  }
  return os.str();
}

}  // namespace

std::string tool_version() { return TOUCHCS_VERSION; }

std::uint64_t roc_experiment_id(const MatrixParams& p) {
  std::uint64_t h = mix64(0x726f63ULL);  // "roc"
  for (std::size_t v : {p.m, p.k, p.l, p.N}) h = mix64(h ^ v);
  return h;
}

ExperimentResult compute_experiment(const ExperimentConfig& cfg, RunParts parts) {
  cfg.validate();
  ExperimentResult result;

  if (parts != RunParts::kEnergyOnly) {
    for (const MatrixParams& p : cfg.param_sets) {
      SweepConfig sweep;
      sweep.params = p;
      sweep.scene = cfg.scene;
      if (sweep.scene.sparsity_k == 0) sweep.scene.sparsity_k = p.k;
      sweep.snr_readout_db = cfg.snr_readout_db;
      sweep.vth_grid = cfg.vth_grid;
      sweep.trials = cfg.trials;
      sweep.master_seed = cfg.seed;
      sweep.experiment_id = roc_experiment_id(p);
      sweep.paired = cfg.paired;
      sweep.schemes = cfg.schemes;
      sweep.unit_rule = cfg.unit_rule;
      sweep.compensate_dc = cfg.compensate_dc;
      sweep.threads = cfg.threads;
      for (const RocCurve& curve : roc_sweep(sweep)) {
        for (const RocPoint& pt : curve.points) {
          result.roc_rows.push_back(csv::RocRow{
              .scheme = std::string(readout_scheme_name(curve.scheme)),
              .N = p.N, .m = p.m, .k = p.k, .l = p.l,
              .snr_tsp_db = cfg.scene.snr_tsp_db,
              .snr_ro_db = cfg.snr_readout_db,
              .vth = pt.vth,
              .trials = pt.trials,
              .tpr = pt.tpr, .fpr = pt.fpr, .precision = pt.precision,
              .mean_measurements = pt.mean_measurements,
              .seed = cfg.seed});
        }
      }
    }
  }

  if (parts != RunParts::kRocOnly && cfg.energy_enabled) {
    EnergySweepConfig energy;
    energy.scene = cfg.scene;
    energy.scene.event_probability = cfg.energy_event_probability;
    energy.snr_readout_db = cfg.snr_readout_db;
    energy.vth_grid = cfg.vth_grid;
    energy.trials = cfg.energy_trials ? cfg.energy_trials : cfg.trials;
    energy.master_seed = cfg.seed;
    energy.postprocess = cfg.energy_postprocess;
    energy.unit_rule = cfg.unit_rule;
    energy.compensate_dc = cfg.compensate_dc;
    energy.conventional = cfg.conventional;
    energy.min_recall = cfg.min_recall;
    energy.threads = cfg.threads;
    for (const EnergyRow& row :
         sweep_energy_savings(cfg.param_sets, energy, cfg.power, &result.skipped)) {
      result.energy_rows.push_back(csv::EnergyRow{
          .N = row.params.N, .m = row.params.m, .k = row.params.k, .l = row.params.l,
          .sampling_ratio = row.params.sampling_ratio(),
          .vth_op = row.vth_op,
          .recall = row.recall,
          .fpr = row.fpr,
          .p_conv_mw = row.report.p_conventional_mw,
          .p_prop_mw = row.report.p_proposed_mw,
          .saving = row.report.saving_ratio});
    }
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, RunParts parts) {
  ExperimentResult result = compute_experiment(cfg, parts);
  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  if (parts != RunParts::kEnergyOnly) {
    std::string all = std::string(csv::kRocHeader) + '\n';
    for (const auto& row : result.roc_rows) all += csv::format_row(row) + '\n';
    write_file(dir / "roc.csv", all, result);

    std::filesystem::create_directories(dir / "curves", ec);
    if (ec) throw std::runtime_error("cannot create " + (dir / "curves").string());
    for (const MatrixParams& p : cfg.param_sets) {
      std::string text = std::string(csv::kRocHeader) + '\n';
      for (const auto& row : result.roc_rows) {
        if (row.N == p.N && row.m == p.m && row.k == p.k && row.l == p.l) {
          text += csv::format_row(row) + '\n';
        }
      }
      write_file(dir / "curves" / curve_file_name(p), text, result);
    }
  }
  if (parts != RunParts::kRocOnly && cfg.energy_enabled) {
    std::string text = std::string(csv::kEnergyHeader) + '\n';
    for (const auto& row : result.energy_rows) text += csv::format_row(row) + '\n';
    write_file(dir / "energy.csv", text, result);
  }
  write_file(dir / "manifest.txt", manifest(cfg), result);
  return result;
}

}  // namespace touchcs
