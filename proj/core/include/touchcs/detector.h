#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "touchcs/frontend.h"
#include "touchcs/matrices.h"

namespace touchcs {

// How the unit chunks of a group are flagged once the group shows a strong
// negative sample (its block chunk is active).
enum class UnitFlagRule {
  kPerRow,   // every row reading above -vth/2 flags its own unit chunk
  kAllRows,  // unit chunks flagged only if all k rows read above -vth/2
};

std::string_view unit_flag_rule_name(UnitFlagRule rule);
UnitFlagRule parse_unit_flag_rule(std::string_view name);

struct DetectorOptions {
  // Clear a block-chunk flag when its group holds both a strong positive and
  // a strong negative code; such a group cannot come from a sparse touch.
  bool postprocess = false;
  UnitFlagRule unit_rule = UnitFlagRule::kPerRow;
};

struct DetectionResult {
  std::vector<std::uint8_t> sensor_flags;  // length N
  std::vector<std::uint8_t> chunk_flags;   // length n
  std::size_t elapsed_ops = 0;             // code comparisons performed

  std::vector<std::size_t> flagged_chunks() const;
  std::size_t flagged_sensor_count() const;
};

// ROI detection on 4-level codes. Each group of k rows is handled on its own:
//  - any strong negative: flag the group's block chunk, plus the unit chunk
//    of each row reading above -vth/2 (near zero or strong positive);
//  - otherwise: flag the unit chunk of each strong positive row.
// Throws DimensionError when q, params and chunks disagree on sizes.
DetectionResult detect(const QuantizedMeasurement& q, const MatrixParams& params,
                       const ChunkMap& chunks, const DetectorOptions& opts = {});

DetectionResult detect_with_postprocess(const QuantizedMeasurement& q,
                                        const MatrixParams& params,
                                        const ChunkMap& chunks);

// Same as detect() but visits the groups in `group_order`, which must be a
// permutation of [0, m/k). The result does not depend on the order.
DetectionResult detect_in_order(const QuantizedMeasurement& q,
                                const MatrixParams& params,
                                const ChunkMap& chunks,
                                const DetectorOptions& opts,
                                std::span<const std::size_t> group_order);

struct ExactnessReport {
  std::size_t supports_checked = 0;
  std::size_t failures = 0;
  std::vector<std::vector<std::size_t>> failing_supports;  // first few only
};

// Noiseless exhaustive check on an untrimmed matrix (N = l n): every chunk
// support of size <= k, unit amplitudes, each dc in `dcs`, must be flagged
// exactly at threshold `vth`.
ExactnessReport check_noiseless_exactness(const MatrixParams& params, double vth,
                                          std::span<const double> dcs,
                                          const DetectorOptions& opts = {});

}  // namespace touchcs
