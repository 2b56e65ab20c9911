#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "touchcs/detector.h"
#include "touchcs/matrices.h"
#include "touchcs/pipeline.h"
#include "touchcs/power.h"
#include "touchcs/scene.h"

namespace touchcs {

// Everything needed to reproduce one campaign. See README.md for the file
// format and the meaning of each key.
struct ExperimentConfig {
  std::vector<MatrixParams> param_sets = {{420, 5, 20, 10000}};
  SceneConfig scene{.sparsity_k = 0};  // 0: each set's own k
  double snr_readout_db = 40.0;
  std::vector<double> vth_grid;  // filled with the default range if empty
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  bool paired = true;
  std::vector<ReadoutScheme> schemes = {ReadoutScheme::kContextAware,
                                        ReadoutScheme::kContextAwarePostprocess};
  UnitFlagRule unit_rule = UnitFlagRule::kPerRow;
  bool compensate_dc = true;

  PowerModel power;
  Scheme conventional = Scheme::kTdm;
  bool energy_enabled = true;
  double energy_event_probability = 0.05;
  std::size_t energy_trials = 0;  // 0: same as trials
  bool energy_postprocess = false;
  double min_recall = kDefaultMinRecall;

  std::size_t threads = 1;
  std::string output_dir = "out";

  // Throws ConfigError naming the offending key.
  void validate() const;
};

// Geometric grid used when a config gives no thresholds.
std::vector<double> default_vth_grid();
std::vector<double> geometric_grid(double lo, double hi, std::size_t points);

// Parses the flat `section.key = value` format. '#' starts a comment that
// runs to the end of the line; a `[section]` line prefixes the keys that follow it. Throws
// ConfigError for unknown or duplicate keys, malformed values and
// constraint violations.
ExperimentConfig parse_config(std::string_view text);

// Canonical text of a resolved config: every key, grids expanded, parameter
// sets listed explicitly. parse_config(format_config(c)) reproduces c.
// `with_run_details` = false omits run.threads and run.output, which never
// affect results.
std::string format_config(const ExperimentConfig& cfg, bool with_run_details = true);

}  // namespace touchcs
