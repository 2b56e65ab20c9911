#include "touchcs/detector.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "touchcs/error.h"
#include "touchcs/scene.h"

namespace touchcs {
namespace {

void check_shapes(const QuantizedMeasurement& q, const MatrixParams& params,
                  const ChunkMap& chunks) {
  if (params.k == 0 || params.m % params.k != 0) {
    throw DimensionError("detect: m must be a multiple of k");
  }
  if (q.codes.size() != params.m) {
    throw DimensionError("detect: " + std::to_string(q.codes.size()) +
                         " codes for m = " + std::to_string(params.m));
  }
  if (chunks.chunk_count() != params.chunk_count()) {
    throw DimensionError("detect: chunk map has " +
                         std::to_string(chunks.chunk_count()) +
                         " chunks, expected m + m/k = " +
                         std::to_string(params.chunk_count()));
  }
}

void process_group(std::span<const Code> codes, std::size_t group,
                   const MatrixParams& params, const DetectorOptions& opts,
                   DetectionResult& out) {
  const std::size_t k = params.k;
  const std::size_t first = group * k;
  const auto rows = codes.subspan(first, k);
  out.elapsed_ops += k;

  const bool any_strong_neg = std::ranges::any_of(
      rows, [](Code c) { return c == Code::kStrongNeg; });
  out.elapsed_ops += k;

  if (!any_strong_neg) {
    for (std::size_t i = 0; i < k; ++i) {
      if (rows[i] == Code::kStrongPos) out.chunk_flags[first + i] = 1;
    }
    return;
  }

  const std::size_t block = params.m + group;
  out.chunk_flags[block] = 1;
  const auto above_half = [](Code c) { return c >= Code::kNearZero; };
  if (opts.unit_rule == UnitFlagRule::kPerRow) {
    for (std::size_t i = 0; i < k; ++i) {
      if (above_half(rows[i])) out.chunk_flags[first + i] = 1;
    }
  } else if (std::ranges::all_of(rows, above_half)) {
    for (std::size_t i = 0; i < k; ++i) out.chunk_flags[first + i] = 1;
  }

  if (opts.postprocess &&
      std::ranges::any_of(rows, [](Code c) { return c == Code::kStrongPos; })) {
    out.chunk_flags[block] = 0;
  }
}

void expand(const ChunkMap& chunks, DetectionResult& out) {
  out.sensor_flags.assign(chunks.sensor_count(), 0);
  for (std::size_t c = 0; c < chunks.chunk_count(); ++c) {
    if (!out.chunk_flags[c]) continue;
    std::fill_n(out.sensor_flags.begin() +
                    static_cast<std::ptrdiff_t>(chunks[c].start),
                chunks[c].length, std::uint8_t{1});
  }
}

}  // namespace

std::string_view unit_flag_rule_name(UnitFlagRule rule) {
  return rule == UnitFlagRule::kPerRow ? "per_row" : "all_rows";
}

UnitFlagRule parse_unit_flag_rule(std::string_view name) {
  if (name == "per_row") return UnitFlagRule::kPerRow;
  if (name == "all_rows") return UnitFlagRule::kAllRows;
  throw std::invalid_argument("unknown unit flag rule '" + std::string(name) +
                              "' (expected per_row or all_rows)");
}

std::vector<std::size_t> DetectionResult::flagged_chunks() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < chunk_flags.size(); ++c) {
    if (chunk_flags[c]) out.push_back(c);
  }
  return out;
}

std::size_t DetectionResult::flagged_sensor_count() const {
  return static_cast<std::size_t>(
      std::count(sensor_flags.begin(), sensor_flags.end(), std::uint8_t{1}));
}

DetectionResult detect_in_order(const QuantizedMeasurement& q,
                                const MatrixParams& params,
                                const ChunkMap& chunks,
                                const DetectorOptions& opts,
                                std::span<const std::size_t> group_order) {
  check_shapes(q, params, chunks);
  const std::size_t groups = params.group_count();
  std::vector<std::uint8_t> seen(groups, 0);
  if (group_order.size() != groups) {
    throw DimensionError("detect_in_order: order is not a permutation of groups");
  }
  for (std::size_t g : group_order) {
    if (g >= groups || seen[g]) {
      throw DimensionError("detect_in_order: order is not a permutation of groups");
    }
    seen[g] = 1;
  }

  DetectionResult out;
  out.chunk_flags.assign(params.chunk_count(), 0);
  for (std::size_t g : group_order) process_group(q.codes, g, params, opts, out);
  expand(chunks, out);
  return out;
}

DetectionResult detect(const QuantizedMeasurement& q, const MatrixParams& params,
                       const ChunkMap& chunks, const DetectorOptions& opts) {
  check_shapes(q, params, chunks);
  DetectionResult out;
  out.chunk_flags.assign(params.chunk_count(), 0);
  for (std::size_t g = 0; g < params.group_count(); ++g) {
    process_group(q.codes, g, params, opts, out);
  }
  expand(chunks, out);
  return out;
}

DetectionResult detect_with_postprocess(const QuantizedMeasurement& q,
                                        const MatrixParams& params,
                                        const ChunkMap& chunks) {
  return detect(q, params, chunks, DetectorOptions{.postprocess = true});
}

ExactnessReport check_noiseless_exactness(const MatrixParams& params, double vth,
                                          std::span<const double> dcs,
                                          const DetectorOptions& opts) {
  if (params.N != params.l * params.chunk_count()) {
    throw std::invalid_argument(
        "check_noiseless_exactness: needs an untrimmed matrix (N = l n)");
  }
  const RepeatedMatrix phi = build_phi_kl(params);
  const std::size_t n = params.chunk_count();
  const std::size_t max_size = std::min(params.k, n);
  Rng unused(0);

  ExactnessReport report;
  std::vector<std::size_t> support;
  const auto check = [&](double dc) {
    std::vector<double> x(params.N, dc);
    for (std::size_t c : support) {
      for (std::size_t i = 0; i < phi.chunks[c].length; ++i) {
        x[phi.chunks[c].start + i] += 1.0;
      }
    }
    const Measurement meas =
        measure(phi.matrix, x, std::numeric_limits<double>::infinity(), unused);
    const DetectionResult det = detect(quantize(meas, vth), params, phi.chunks, opts);
    ++report.supports_checked;
    if (det.flagged_chunks() != support) {
      ++report.failures;
      if (report.failing_supports.size() < 8) report.failing_supports.push_back(support);
    }
  };

  for (double dc : dcs) {
    support.clear();
    check(dc);
    for (std::size_t size = 1; size <= max_size; ++size) {
      support.resize(size);
      std::iota(support.begin(), support.end(), std::size_t{0});
      while (true) {
        check(dc);
        std::size_t i = size;
        while (i > 0 && support[i - 1] == n - size + (i - 1)) --i;
        if (i == 0) break;
        ++support[i - 1];
        for (std::size_t j = i; j < size; ++j) support[j] = support[j - 1] + 1;
      }
    }
  }
  return report;
}

}  // namespace touchcs
