#include "touchcs/frontend.h"

#include <random>
#include <stdexcept>

#include "touchcs/error.h"
#include "touchcs/scene.h"

namespace touchcs {

std::string_view code_name(Code code) {
  switch (code) {
    case Code::kStrongNeg:
      return "SN";
    case Code::kMidNeg:
      return "MN";
    case Code::kNearZero:
      return "NZ";
    case Code::kStrongPos:
      return "SP";
  }
  return "??";
}

Measurement measure(const TernaryMatrix& mat,
                    std::span<const double> sensor_values,
                    double snr_readout_db, Rng& rng) {
  Measurement meas;
  meas.samples = mat.multiply(sensor_values);
  meas.scheme = mat.scheme();
  meas.snr_readout_db = snr_readout_db;
  const double sigma = snr_to_sigma(snr_readout_db, 1.0);
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& y : meas.samples) y += noise(rng);
  }
  return meas;
}

void subtract_dc_baseline(Measurement& meas,
                          std::span<const std::int64_t> row_sums, double dc) {
  if (row_sums.size() != meas.samples.size()) {
    throw DimensionError("subtract_dc_baseline: row_sums length mismatch");
  }
  if (dc == 0.0) return;
  for (std::size_t j = 0; j < row_sums.size(); ++j) {
    if (row_sums[j] != 0) meas.samples[j] -= dc * static_cast<double>(row_sums[j]);
  }
}

Code quantize_sample(double y, double vth) {
  if (y < -vth) return Code::kStrongNeg;
  if (y < -vth / 2) return Code::kMidNeg;
  if (y <= vth) return Code::kNearZero;
  return Code::kStrongPos;
}

QuantizedMeasurement quantize(std::span<const double> samples, double vth) {
  if (!(vth > 0.0)) throw std::invalid_argument("quantize: vth must be > 0");
  QuantizedMeasurement q;
  q.vth = vth;
  q.codes.reserve(samples.size());
  for (double y : samples) q.codes.push_back(quantize_sample(y, vth));
  return q;
}

QuantizedMeasurement quantize(const Measurement& meas, double vth) {
  return quantize(meas.samples, vth);
}

}  // namespace touchcs
