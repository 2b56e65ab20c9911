#include "touchcs/scene.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace touchcs {
namespace {

// Floyd's algorithm: `count` distinct values from [0, universe), ascending.
std::vector<std::size_t> sample_without_replacement(std::size_t universe,
                                                    std::size_t count,
                                                    Rng& rng) {
  std::set<std::size_t> picked;
  for (std::size_t j = universe - count; j < universe; ++j) {
    const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
    if (!picked.insert(t).second) picked.insert(j);
  }
  return {picked.begin(), picked.end()};
}

}  // namespace

std::string_view placement_name(Placement placement) {
  switch (placement) {
    case Placement::kRandom:
      return "random";
    case Placement::kContiguous:
      return "contiguous";
    case Placement::kSensorRandom:
      return "sensor_random";
  }
  return "random";
}

Placement parse_placement(std::string_view name) {
  if (name == "random") return Placement::kRandom;
  if (name == "contiguous") return Placement::kContiguous;
  if (name == "sensor_random") return Placement::kSensorRandom;
  throw std::invalid_argument("unknown placement '" + std::string(name) +
                              "' (expected random, contiguous, sensor_random)");
}

void SceneConfig::validate() const {
  if (sparsity_k < 1) throw std::invalid_argument("sparsity_k must be >= 1");
  if (!(event_probability >= 0.0 && event_probability <= 1.0)) {
    throw std::invalid_argument("event_probability must lie in [0, 1]");
  }
  if (std::isnan(snr_tsp_db) || snr_tsp_db == -INFINITY) {
    throw std::invalid_argument("snr_tsp_db must be a number or +inf");
  }
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw std::invalid_argument("amplitude must be positive");
  }
  if (!std::isfinite(dc)) throw std::invalid_argument("dc must be finite");
}

double snr_to_sigma(double snr_db, double ref_amplitude) {
  if (!(ref_amplitude > 0.0)) {
    throw std::invalid_argument("snr_to_sigma: reference amplitude must be > 0");
  }
  if (snr_db == INFINITY) return 0.0;
  return ref_amplitude * std::pow(10.0, -snr_db / 20.0);
}

TouchFrame generate_frame(const SceneConfig& cfg, const ChunkMap& chunks,
                          Rng& rng) {
  cfg.validate();
  TouchFrame frame;
  frame.dc = cfg.dc;
  frame.values.assign(chunks.sensor_count(), cfg.dc);

  const bool event =
      std::uniform_real_distribution<double>(0.0, 1.0)(rng) < cfg.event_probability;
  if (!event || chunks.chunk_count() == 0) return frame;

  const bool sensor_level = cfg.placement == Placement::kSensorRandom;
  const std::size_t universe =
      sensor_level ? chunks.sensor_count() : chunks.chunk_count();
  const std::size_t s = std::uniform_int_distribution<std::size_t>(
      1, std::min(cfg.sparsity_k, universe))(rng);

  std::vector<std::size_t> picked;
  if (cfg.placement == Placement::kContiguous) {
    const std::size_t first =
        std::uniform_int_distribution<std::size_t>(0, universe - s)(rng);
    for (std::size_t c = first; c < first + s; ++c) picked.push_back(c);
  } else {
    picked = sample_without_replacement(universe, s, rng);
  }

  if (sensor_level) {
    frame.support = std::move(picked);
  } else {
    for (std::size_t c : picked) {
      for (std::size_t i = 0; i < chunks[c].length; ++i) {
        frame.support.push_back(chunks[c].start + i);
      }
    }
  }
  for (std::size_t sensor : frame.support) frame.values[sensor] += cfg.amplitude;
  return frame;
}

std::vector<double> apply_tsp_noise(const TouchFrame& frame, double snr_tsp_db,
                                    double ref_amplitude, Rng& rng) {
  std::vector<double> noisy = frame.values;
  const double sigma = snr_to_sigma(snr_tsp_db, ref_amplitude);
  if (sigma == 0.0) return noisy;
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : noisy) v += noise(rng);
  return noisy;
}

std::vector<std::size_t> active_chunks(const TouchFrame& frame,
                                       const ChunkMap& chunks) {
  std::vector<std::size_t> out;
  for (std::size_t sensor : frame.support) {
    const std::size_t c = chunks.chunk_of_sensor(sensor);
    if (out.empty() || out.back() != c) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace touchcs
