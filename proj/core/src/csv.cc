#include "touchcs/csv.h"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace touchcs::csv {
namespace {

std::vector<std::string_view> split(std::string_view line, std::size_t expected) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    fields.push_back(line.substr(pos, comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (fields.size() != expected) {
    throw std::invalid_argument("csv: expected " + std::to_string(expected) +
                                " fields, got " + std::to_string(fields.size()));
  }
  return fields;
}

template <typename Int>
Int parse_int(std::string_view text, const char* field) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument(std::string("csv: bad integer in field ") + field);
  }
  return value;
}

double parse_field(std::string_view text, const char* field) {
  try {
    return parse_double(text);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument(std::string("csv: bad number in field ") + field);
  }
}

}  // namespace

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  // Plain decimals read better in a spreadsheet; fall back to the shortest
  // form for very large or very small magnitudes.
  char buf[400];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (res.ec == std::errc() && res.ptr - buf <= 24) return std::string(buf, res.ptr);
  res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const char* first = text.data();
  if (!text.empty() && text.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string format_row(const RocRow& r) {
  std::string out = r.scheme;
  for (std::size_t v : {r.N, r.m, r.k, r.l}) out += ',' + std::to_string(v);
  for (double v : {r.snr_tsp_db, r.snr_ro_db, r.vth}) out += ',' + format_double(v);
  out += ',' + std::to_string(r.trials);
  for (double v : {r.tpr, r.fpr, r.precision, r.mean_measurements}) {
    out += ',' + format_double(v);
  }
  out += ',' + std::to_string(r.seed);
  return out;
}

std::string format_row(const EnergyRow& r) {
  std::string out = std::to_string(r.N);
  for (std::size_t v : {r.m, r.k, r.l}) out += ',' + std::to_string(v);
  for (double v : {r.sampling_ratio, r.vth_op, r.recall, r.fpr, r.p_conv_mw,
                   r.p_prop_mw, r.saving}) {
    out += ',' + format_double(v);
  }
  return out;
}

RocRow parse_roc_row(std::string_view line) {
  const auto f = split(line, 14);
  RocRow r;
  r.scheme = std::string(f[0]);
  if (r.scheme.empty()) throw std::invalid_argument("csv: empty scheme");
  r.N = parse_int<std::size_t>(f[1], "N");
  r.m = parse_int<std::size_t>(f[2], "m");
  r.k = parse_int<std::size_t>(f[3], "k");
  r.l = parse_int<std::size_t>(f[4], "l");
  r.snr_tsp_db = parse_field(f[5], "snr_tsp_db");
  r.snr_ro_db = parse_field(f[6], "snr_ro_db");
  r.vth = parse_field(f[7], "vth");
  r.trials = parse_int<std::size_t>(f[8], "trials");
  r.tpr = parse_field(f[9], "tpr");
  r.fpr = parse_field(f[10], "fpr");
  r.precision = parse_field(f[11], "precision");
  r.mean_measurements = parse_field(f[12], "mean_measurements");
  r.seed = parse_int<std::uint64_t>(f[13], "seed");
  return r;
}

EnergyRow parse_energy_row(std::string_view line) {
  const auto f = split(line, 11);
  EnergyRow r;
  r.N = parse_int<std::size_t>(f[0], "N");
  r.m = parse_int<std::size_t>(f[1], "m");
  r.k = parse_int<std::size_t>(f[2], "k");
  r.l = parse_int<std::size_t>(f[3], "l");
  r.sampling_ratio = parse_field(f[4], "sampling_ratio");
  r.vth_op = parse_field(f[5], "vth_op");
  r.recall = parse_field(f[6], "recall");
  r.fpr = parse_field(f[7], "fpr");
  r.p_conv_mw = parse_field(f[8], "p_conv_mw");
  r.p_prop_mw = parse_field(f[9], "p_prop_mw");
  r.saving = parse_field(f[10], "saving");
  return r;
}

}  // namespace touchcs::csv
