#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "touchcs/config.h"
#include "touchcs/csv.h"

namespace touchcs {

std::string tool_version();

// Experiment id for the ROC sweep of one parameter set.
std::uint64_t roc_experiment_id(const MatrixParams& params);

enum class RunParts { kAll, kRocOnly, kEnergyOnly };

struct ExperimentResult {
  std::vector<csv::RocRow> roc_rows;
  std::vector<csv::EnergyRow> energy_rows;
  std::vector<std::string> skipped;  // energy sets that missed min_recall
  std::vector<std::filesystem::path> files;
};

// Pure computation, no I/O.
ExperimentResult compute_experiment(const ExperimentConfig& cfg,
                                    RunParts parts = RunParts::kAll);

// Runs the campaign and writes into cfg.output_dir:
//   roc.csv, curves/roc_N<N>_k<k>_m<m>_l<l>.csv (one per parameter set),
//   energy.csv, manifest.txt.
// Output is a function of the config alone (thread count excluded).
// Throws std::runtime_error naming the path on I/O failure.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                RunParts parts = RunParts::kAll);

}  // namespace touchcs
