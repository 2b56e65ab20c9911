#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "touchcs/matrices.h"
#include "touchcs/rng.h"

namespace touchcs {

// 2-bit quantizer output, ordered by the value it encodes.
enum class Code : std::uint8_t {
  kStrongNeg = 0,  // y < -vth
  kMidNeg = 1,     // -vth <= y < -vth/2
  kNearZero = 2,   // -vth/2 <= y <= vth
  kStrongPos = 3,  // y > vth
};

std::string_view code_name(Code code);  // "SN", "MN", "NZ", "SP"

struct Measurement {
  std::vector<double> samples;
  Scheme scheme = Scheme::kPhiKL;
  double snr_readout_db = 0.0;
};

struct QuantizedMeasurement {
  std::vector<Code> codes;
  double vth = 0.0;
};

// samples = mat * sensor_values + g, g ~ N(0, snr_to_sigma(snr, 1.0)) drawn
// once per sample in row order. Throws DimensionError on size mismatch.
Measurement measure(const TernaryMatrix& mat,
                    std::span<const double> sensor_values,
                    double snr_readout_db, Rng& rng);

// Removes a known common offset: samples[j] -= dc * row_sums[j]. Only needed
// for trimmed matrices, whose rows do not all sum to zero.
void subtract_dc_baseline(Measurement& meas,
                          std::span<const std::int64_t> row_sums, double dc);

Code quantize_sample(double y, double vth);
// Throws std::invalid_argument unless vth > 0.
QuantizedMeasurement quantize(const Measurement& meas, double vth);
QuantizedMeasurement quantize(std::span<const double> samples, double vth);

}  // namespace touchcs
