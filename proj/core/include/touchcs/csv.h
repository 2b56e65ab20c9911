#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace touchcs::csv {

inline constexpr std::string_view kRocHeader =
    "scheme,N,m,k,l,snr_tsp_db,snr_ro_db,vth,trials,tpr,fpr,precision,"
    "mean_measurements,seed";
inline constexpr std::string_view kEnergyHeader =
    "N,m,k,l,sampling_ratio,vth_op,recall,fpr,p_conv_mw,p_prop_mw,saving";

struct RocRow {
  std::string scheme;
  std::size_t N = 0, m = 0, k = 0, l = 0;
  double snr_tsp_db = 0, snr_ro_db = 0, vth = 0;
  std::size_t trials = 0;
  double tpr = 0, fpr = 0, precision = 0, mean_measurements = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const RocRow&, const RocRow&) = default;
};

struct EnergyRow {
  std::size_t N = 0, m = 0, k = 0, l = 0;
  double sampling_ratio = 0, vth_op = 0, recall = 0, fpr = 0;
  double p_conv_mw = 0, p_prop_mw = 0, saving = 0;

  friend bool operator==(const EnergyRow&, const EnergyRow&) = default;
};

// Shortest text that parses back to the same double ("inf" for infinity).
std::string format_double(double value);
// Throws std::invalid_argument on anything that is not a whole number.
double parse_double(std::string_view text);

std::string format_row(const RocRow& row);
std::string format_row(const EnergyRow& row);
// Throw std::invalid_argument naming the bad field.
RocRow parse_roc_row(std::string_view line);
EnergyRow parse_energy_row(std::string_view line);

}  // namespace touchcs::csv
