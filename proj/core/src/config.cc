#include "touchcs/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "touchcs/csv.h"
#include "touchcs/error.h"

namespace touchcs {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    const std::string_view item = trim(s.substr(pos, next - pos));
    if (!item.empty()) out.push_back(item);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, std::string> values)
      : values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::optional<std::string_view> raw(const std::string& key) {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (auto text = raw(key)) out = convert<T>(key, *text);
  }

  template <typename T>
  std::vector<T> read_list(const std::string& key) {
    std::vector<T> out;
    if (auto text = raw(key)) {
      for (std::string_view item : split_list(*text, ',')) {
        out.push_back(convert<T>(key, item));
      }
      if (out.empty()) throw ConfigError(key, "empty list");
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : values_) {
      if (!used_.count(key)) throw ConfigError(key, "unknown key");
    }
  }

  template <typename T>
  static T convert(const std::string& key, std::string_view text) {
    if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1" || text == "yes") return true;
      if (text == "false" || text == "0" || text == "no") return false;
      throw ConfigError(key, "expected true/false, got '" + std::string(text) + "'");
    } else if constexpr (std::is_same_v<T, double>) {
      try {
        return csv::parse_double(text);
      } catch (const std::invalid_argument&) {
        throw ConfigError(key, "expected a number, got '" + std::string(text) + "'");
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      return std::string(text);
    } else {
      T value{};
      const auto [ptr, ec] =
          std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(key, "expected a non-negative integer, got '" +
                                   std::string(text) + "'");
      }
      return value;
    }
  }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

template <typename Fn>
auto wrap(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += csv::format_double(values[i]);
  }
  return out;
}

}  // namespace

std::vector<double> geometric_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw std::invalid_argument("geometric grid needs 0 < lo < hi and >= 2 points");
  }
  std::vector<double> grid(points);
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo * std::exp(step * static_cast<double>(i));
  }
  grid.back() = hi;
  return grid;
}

std::vector<double> default_vth_grid() { return geometric_grid(0.1, 100.0, 31); }

void ExperimentConfig::validate() const {
  if (param_sets.empty()) throw ConfigError("grid.sets", "no parameter sets");
  for (const MatrixParams& p : param_sets) {
    wrap("matrix", [&] { p.validate(); });
  }
  wrap("scene", [&] {
    SceneConfig s = scene;
    if (s.sparsity_k == 0) s.sparsity_k = 1;
    s.validate();
  });
  if (std::isnan(snr_readout_db)) throw ConfigError("readout.snr_db", "not a number");
  if (trials < 1) throw ConfigError("sweep.trials", "trials must be >= 1");
  if (vth_grid.empty()) throw ConfigError("sweep.vth", "empty threshold grid");
  for (std::size_t i = 0; i < vth_grid.size(); ++i) {
    if (!(vth_grid[i] > 0.0) || !std::isfinite(vth_grid[i])) {
      throw ConfigError("sweep.vth", "thresholds must be finite and > 0");
    }
    if (i > 0 && !(vth_grid[i] > vth_grid[i - 1])) {
      throw ConfigError("sweep.vth", "thresholds must be strictly increasing");
    }
  }
  if (schemes.empty()) throw ConfigError("run.schemes", "no schemes");
  wrap("power", [&] { power.validate(); });
  if (conventional != Scheme::kTdm && conventional != Scheme::kCdm) {
    throw ConfigError("power.conventional", "must be TDM or CDM");
  }
  if (!(energy_event_probability >= 0.0 && energy_event_probability <= 1.0)) {
    throw ConfigError("energy.event_probability", "must lie in [0, 1]");
  }
  if (!(min_recall >= 0.0 && min_recall <= 1.0)) {
    throw ConfigError("energy.min_recall", "must lie in [0, 1]");
  }
  if (threads < 1) throw ConfigError("run.threads", "threads must be >= 1");
}

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, std::string> values;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    line = trim(line.substr(0, line.find('#')));  // drop trailing comment
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("", "line " + std::to_string(line_no) +
                                  ": unterminated section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) +
                                ": expected 'key = value'");
    }
    std::string key(trim(line.substr(0, eq)));
    if (key.empty()) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
    }
    if (!section.empty()) key = section + "." + key;
    if (!values.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
      throw ConfigError(key, "duplicate key");
    }
  }

  Reader in(std::move(values));
  ExperimentConfig cfg;

  // Parameter sets: explicit list, cartesian design grid, or a single set.
  const bool has_matrix = in.has("matrix.m") || in.has("matrix.k") ||
                          in.has("matrix.l") || in.has("matrix.N");
  const bool has_sets = in.has("grid.sets");
  const bool has_design = in.has("grid.N") || in.has("grid.k") ||
                          in.has("grid.sampling_ratio");
  if (int(has_matrix) + int(has_sets) + int(has_design) > 1) {
    throw ConfigError("grid", "matrix.*, grid.sets and grid.N/k/sampling_ratio "
                              "are mutually exclusive");
  }
  if (has_matrix) {
    MatrixParams p = cfg.param_sets.front();
    in.read("matrix.m", p.m);
    in.read("matrix.k", p.k);
    in.read("matrix.l", p.l);
    in.read("matrix.N", p.N);
    cfg.param_sets = {p};
  } else if (has_sets) {
    cfg.param_sets.clear();
    for (std::string_view item : split_list(*in.raw("grid.sets"), ',')) {
      const auto parts = split_list(item, '/');
      if (parts.size() != 4) {
        throw ConfigError("grid.sets", "expected N/k/m/l, got '" + std::string(item) + "'");
      }
      MatrixParams p;
      p.N = Reader::convert<std::size_t>("grid.sets", parts[0]);
      p.k = Reader::convert<std::size_t>("grid.sets", parts[1]);
      p.m = Reader::convert<std::size_t>("grid.sets", parts[2]);
      p.l = Reader::convert<std::size_t>("grid.sets", parts[3]);
      cfg.param_sets.push_back(p);
    }
    if (cfg.param_sets.empty()) throw ConfigError("grid.sets", "empty list");
  } else if (has_design) {
    const auto ns = in.read_list<std::size_t>("grid.N");
    const auto ks = in.read_list<std::size_t>("grid.k");
    const auto ratios = in.read_list<double>("grid.sampling_ratio");
    if (ns.empty() || ks.empty() || ratios.empty()) {
      throw ConfigError("grid", "grid.N, grid.k and grid.sampling_ratio go together");
    }
    cfg.param_sets.clear();
    for (std::size_t N : ns) {
      for (std::size_t k : ks) {
        for (double r : ratios) {
          cfg.param_sets.push_back(
              wrap("grid.sampling_ratio", [&] { return design_params(N, k, r); }));
        }
      }
    }
  }

  if (auto s = in.raw("scene.sparsity_k")) {
    cfg.scene.sparsity_k = *s == "auto" ? 0 : Reader::convert<std::size_t>("scene.sparsity_k", *s);
    if (cfg.scene.sparsity_k == 0 && *s != "auto") {
      throw ConfigError("scene.sparsity_k", "must be >= 1 or 'auto'");
    }
  }
  if (auto s = in.raw("scene.placement")) {
    cfg.scene.placement = wrap("scene.placement", [&] { return parse_placement(*s); });
  }
  in.read("scene.amplitude", cfg.scene.amplitude);
  in.read("scene.snr_tsp_db", cfg.scene.snr_tsp_db);
  in.read("scene.dc", cfg.scene.dc);
  in.read("scene.event_probability", cfg.scene.event_probability);
  in.read("readout.snr_db", cfg.snr_readout_db);

  cfg.vth_grid = in.read_list<double>("sweep.vth");
  const bool has_range = in.has("sweep.vth_min") || in.has("sweep.vth_max") ||
                         in.has("sweep.vth_points");
  if (has_range) {
    if (!cfg.vth_grid.empty()) {
      throw ConfigError("sweep.vth", "give either a list or vth_min/vth_max/vth_points");
    }
    double lo = 0.1, hi = 100.0;
    std::size_t points = 31;
    in.read("sweep.vth_min", lo);
    in.read("sweep.vth_max", hi);
    in.read("sweep.vth_points", points);
    cfg.vth_grid = wrap("sweep.vth_min", [&] { return geometric_grid(lo, hi, points); });
  }
  if (cfg.vth_grid.empty()) cfg.vth_grid = default_vth_grid();
  in.read("sweep.trials", cfg.trials);
  in.read("sweep.paired", cfg.paired);

  if (auto s = in.raw("detector.unit_rule")) {
    cfg.unit_rule = wrap("detector.unit_rule", [&] { return parse_unit_flag_rule(*s); });
  }
  in.read("detector.compensate_dc", cfg.compensate_dc);

  in.read("run.seed", cfg.seed);
  if (in.has("run.schemes")) {
    cfg.schemes.clear();
    for (const std::string& name : in.read_list<std::string>("run.schemes")) {
      cfg.schemes.push_back(
          wrap("run.schemes", [&] { return parse_readout_scheme(name); }));
    }
  }
  in.read("run.threads", cfg.threads);
  in.read("run.output", cfg.output_dir);

  in.read("power.p_driver_mw", cfg.power.p_driver_mw);
  in.read("power.p_amp_mw", cfg.power.p_amp_mw);
  in.read("power.p_adc_mw", cfg.power.p_adc_mw);
  in.read("power.f_ref_hz", cfg.power.f_ref_hz);
  in.read("power.f_frame_hz", cfg.power.f_frame_hz);
  in.read("power.p_detector_mw", cfg.power.p_detector_mw);
  in.read("power.cdm_driver_multiplier", cfg.power.cdm_driver_multiplier);
  in.read("power.detection_power_factor", cfg.power.detection_power_factor);
  if (auto s = in.raw("power.conventional")) {
    cfg.conventional = wrap("power.conventional", [&] { return parse_scheme(*s); });
  }

  in.read("energy.enabled", cfg.energy_enabled);
  in.read("energy.event_probability", cfg.energy_event_probability);
  in.read("energy.trials", cfg.energy_trials);
  in.read("energy.postprocess", cfg.energy_postprocess);
  in.read("energy.min_recall", cfg.min_recall);

  in.reject_unknown();
  cfg.validate();
  return cfg;
}

std::string format_config(const ExperimentConfig& cfg, bool with_run_details) {
  std::ostringstream os;
  const auto num = [](double v) { return csv::format_double(v); };

  os << "grid.sets = ";
  for (std::size_t i = 0; i < cfg.param_sets.size(); ++i) {
    const MatrixParams& p = cfg.param_sets[i];
    os << (i ? ", " : "") << p.N << '/' << p.k << '/' << p.m << '/' << p.l;
  }
  os << '\n';

  os << "scene.sparsity_k = ";
  if (cfg.scene.sparsity_k == 0) {
    os << "auto\n";
  } else {
    os << cfg.scene.sparsity_k << '\n';
  }
  os << "scene.placement = " << placement_name(cfg.scene.placement) << '\n'
     << "scene.amplitude = " << num(cfg.scene.amplitude) << '\n'
     << "scene.snr_tsp_db = " << num(cfg.scene.snr_tsp_db) << '\n'
     << "scene.dc = " << num(cfg.scene.dc) << '\n'
     << "scene.event_probability = " << num(cfg.scene.event_probability) << '\n'
     << "readout.snr_db = " << num(cfg.snr_readout_db) << '\n'
     << "sweep.vth = " << join_doubles(cfg.vth_grid) << '\n'
     << "sweep.trials = " << cfg.trials << '\n'
     << "sweep.paired = " << (cfg.paired ? "true" : "false") << '\n'
     << "detector.unit_rule = " << unit_flag_rule_name(cfg.unit_rule) << '\n'
     << "detector.compensate_dc = " << (cfg.compensate_dc ? "true" : "false") << '\n'
     << "run.seed = " << cfg.seed << '\n'
     << "run.schemes = ";
  for (std::size_t i = 0; i < cfg.schemes.size(); ++i) {
    os << (i ? ", " : "") << readout_scheme_name(cfg.schemes[i]);
  }
  os << '\n';
  if (with_run_details) {
    os << "run.threads = " << cfg.threads << '\n'
       << "run.output = " << cfg.output_dir << '\n';
  }
  os << "power.p_driver_mw = " << num(cfg.power.p_driver_mw) << '\n'
     << "power.p_amp_mw = " << num(cfg.power.p_amp_mw) << '\n'
     << "power.p_adc_mw = " << num(cfg.power.p_adc_mw) << '\n'
     << "power.f_ref_hz = " << num(cfg.power.f_ref_hz) << '\n'
     << "power.f_frame_hz = " << num(cfg.power.f_frame_hz) << '\n'
     << "power.p_detector_mw = " << num(cfg.power.p_detector_mw) << '\n'
     << "power.cdm_driver_multiplier = " << num(cfg.power.cdm_driver_multiplier) << '\n'
     << "power.detection_power_factor = " << num(cfg.power.detection_power_factor) << '\n'
     << "power.conventional = " << scheme_name(cfg.conventional) << '\n'
     << "energy.enabled = " << (cfg.energy_enabled ? "true" : "false") << '\n'
     << "energy.event_probability = " << num(cfg.energy_event_probability) << '\n'
     << "energy.trials = " << cfg.energy_trials << '\n'
     << "energy.postprocess = " << (cfg.energy_postprocess ? "true" : "false") << '\n'
     << "energy.min_recall = " << num(cfg.min_recall) << '\n';
  return os.str();
}

}  // namespace touchcs
