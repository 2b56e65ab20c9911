#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "touchcs/matrices.h"
#include "touchcs/rng.h"

namespace touchcs {

enum class Placement {
  kRandom,      // s distinct chunks, uniformly without replacement
  kContiguous,  // s adjacent chunks
  kSensorRandom // s individual sensors; stress mode, not chunk-aligned
};

std::string_view placement_name(Placement placement);
Placement parse_placement(std::string_view name);

struct SceneConfig {
  std::size_t sparsity_k = 1;
  Placement placement = Placement::kRandom;
  double amplitude = 1.0;  // a.u.; 1.0 is a nominal touch
  double snr_tsp_db = 30.0;
  double dc = 0.0;
  double event_probability = 1.0;

  void validate() const;
};

// Ideal (noise-free) sensor signals for one frame.
struct TouchFrame {
  std::vector<double> values;        // amplitude on active sensors, plus dc
  std::vector<std::size_t> support;  // active sensors, ascending
  double dc = 0.0;
};

// sigma = ref_amplitude * 10^(-snr_db / 20); +inf dB gives 0.
double snr_to_sigma(double snr_db, double ref_amplitude);

TouchFrame generate_frame(const SceneConfig& cfg, const ChunkMap& chunks,
                          Rng& rng);

// Frame values plus i.i.d. Gaussian noise on every sensor. An infinite SNR
// returns the values untouched and draws nothing from `rng`.
std::vector<double> apply_tsp_noise(const TouchFrame& frame, double snr_tsp_db,
                                    double ref_amplitude, Rng& rng);

// Chunks that contain at least one active sensor, ascending.
std::vector<std::size_t> active_chunks(const TouchFrame& frame,
                                       const ChunkMap& chunks);

}  // namespace touchcs
