#include "touchcs/matrices.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include "touchcs/error.h"
#include "touchcs/rng.h"

namespace touchcs {
namespace {

constexpr std::array<std::string_view, 5> kSchemeNames = {
    "TDM", "CDM", "PHI_K", "PHI_KL", "BERNOULLI"};

std::string describe(const MatrixParams& p) {
  std::ostringstream os;
  os << "(m=" << p.m << ", k=" << p.k << ", l=" << p.l << ", N=" << p.N << ")";
  return os.str();
}

// Builds the column-major arrays from a per-column generator.
template <typename ColumnFn>
TernaryMatrix assemble(std::size_t rows, std::size_t cols, Scheme scheme,
                       ColumnFn&& fill_column) {
  std::vector<std::size_t> col_ptr;
  col_ptr.reserve(cols + 1);
  col_ptr.push_back(0);
  std::vector<MatrixEntry> entries;
  for (std::size_t c = 0; c < cols; ++c) {
    fill_column(c, entries);
    col_ptr.push_back(entries.size());
  }
  return TernaryMatrix(rows, cols, scheme, std::move(col_ptr),
                       std::move(entries));
}

void append_phi_k_column(std::size_t m, std::size_t k, std::size_t chunk,
                         std::vector<MatrixEntry>& out) {
  if (chunk < m) {
    out.push_back({static_cast<std::uint32_t>(chunk), 1});
    return;
  }
  const std::size_t first = (chunk - m) * k;
  for (std::size_t r = first; r < first + k; ++r) {
    out.push_back({static_cast<std::uint32_t>(r), -1});
  }
}

// Fraction-free Gaussian elimination (Bareiss). Returns the rank of the
// column-major integer matrix `cols` (each inner vector has `rows` entries).
std::size_t integer_rank(std::vector<std::vector<std::int64_t>> cols,
                         std::size_t rows) {
  const std::size_t ncols = cols.size();
  std::size_t rank = 0;
  std::int64_t prev_pivot = 1;
  for (std::size_t c = 0; c < ncols && rank < rows; ++c) {
    std::size_t pivot_row = rank;
    while (pivot_row < rows && cols[c][pivot_row] == 0) ++pivot_row;
    if (pivot_row == rows) continue;
    if (pivot_row != rank) {
      for (auto& col : cols) std::swap(col[pivot_row], col[rank]);
    }
    const std::int64_t pivot = cols[c][rank];
    for (std::size_t r = rank + 1; r < rows; ++r) {
      const std::int64_t factor = cols[c][r];
      for (std::size_t j = c; j < ncols; ++j) {
        std::int64_t a = 0;
        std::int64_t b = 0;
        if (__builtin_mul_overflow(pivot, cols[j][r], &a) ||
            __builtin_mul_overflow(factor, cols[j][rank], &b)) {
          throw std::overflow_error("integer_rank: entries too large");
        }
        cols[j][r] = (a - b) / prev_pivot;
      }
    }
    prev_pivot = pivot;
    ++rank;
  }
  return rank;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  // result * (n - k + i) / i stays exact; saturate once past the budget.
  constexpr std::uint64_t kCap = kIndependenceBudget * 16;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > kCap) return kCap;
  }
  return result;
}

}  // namespace

std::string_view scheme_name(Scheme scheme) {
  return kSchemeNames[static_cast<std::size_t>(scheme)];
}

Scheme parse_scheme(std::string_view name) {
  for (std::size_t i = 0; i < kSchemeNames.size(); ++i) {
    if (kSchemeNames[i] == name) return static_cast<Scheme>(i);
  }
  throw std::invalid_argument("unknown matrix scheme '" + std::string(name) +
                              "'");
}

TernaryMatrix::TernaryMatrix(std::size_t rows, std::size_t cols, Scheme scheme,
                             std::vector<std::size_t> col_ptr,
                             std::vector<MatrixEntry> entries)
    : rows_(rows),
      cols_(cols),
      scheme_(scheme),
      col_ptr_(std::move(col_ptr)),
      entries_(std::move(entries)) {
  if (col_ptr_.size() != cols_ + 1 || col_ptr_.front() != 0 ||
      col_ptr_.back() != entries_.size()) {
    throw std::invalid_argument("TernaryMatrix: malformed column pointers");
  }
  for (std::size_t c = 0; c < cols_; ++c) {
    if (col_ptr_[c] > col_ptr_[c + 1]) {
      throw std::invalid_argument("TernaryMatrix: decreasing column pointers");
    }
    for (std::size_t p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p) {
      const MatrixEntry& e = entries_[p];
      if (e.row >= rows_) {
        throw std::invalid_argument("TernaryMatrix: row index out of range");
      }
      if (e.value != 1 && e.value != -1) {
        throw std::invalid_argument("TernaryMatrix: entry outside {-1, +1}");
      }
      if (p > col_ptr_[c] && entries_[p - 1].row >= e.row) {
        throw std::invalid_argument(
            "TernaryMatrix: rows within a column must be strictly increasing");
      }
    }
  }
}

std::span<const MatrixEntry> TernaryMatrix::column(std::size_t c) const {
  if (c >= cols_) throw std::out_of_range("TernaryMatrix::column");
  return std::span<const MatrixEntry>(entries_).subspan(
      col_ptr_[c], col_ptr_[c + 1] - col_ptr_[c]);
}

int TernaryMatrix::at(std::size_t row, std::size_t col) const {
  if (row >= rows_) throw std::out_of_range("TernaryMatrix::at");
  for (const MatrixEntry& e : column(col)) {
    if (e.row == row) return e.value;
  }
  return 0;
}

std::vector<double> TernaryMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) {
    throw DimensionError("multiply: vector has " + std::to_string(x.size()) +
                         " entries, matrix has " + std::to_string(cols_) +
                         " columns");
  }
  std::vector<double> y(rows_, 0.0);
  for (std::size_t c = 0; c < cols_; ++c) {
    const double xc = x[c];
    for (std::size_t p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p) {
      const MatrixEntry& e = entries_[p];
      if (e.value > 0) {
        y[e.row] += xc;
      } else {
        y[e.row] -= xc;
      }
    }
  }
  return y;
}

std::vector<double> TernaryMatrix::multiply_transpose(
    std::span<const double> y) const {
  if (y.size() != rows_) {
    throw DimensionError("multiply_transpose: vector has " +
                         std::to_string(y.size()) + " entries, matrix has " +
                         std::to_string(rows_) + " rows");
  }
  std::vector<double> x(cols_, 0.0);
  for (std::size_t c = 0; c < cols_; ++c) {
    double acc = 0.0;
    for (std::size_t p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p) {
      const MatrixEntry& e = entries_[p];
      acc += e.value > 0 ? y[e.row] : -y[e.row];
    }
    x[c] = acc;
  }
  return x;
}

std::vector<std::int64_t> TernaryMatrix::row_sums() const {
  std::vector<std::int64_t> sums(rows_, 0);
  for (const MatrixEntry& e : entries_) sums[e.row] += e.value;
  return sums;
}

void MatrixParams::validate() const {
  if (m == 0) throw std::invalid_argument("m must be positive " + describe(*this));
  if (k == 0) throw std::invalid_argument("k must be >= 1 " + describe(*this));
  if (m % k != 0) {
    throw std::invalid_argument("m must be multiple of k " + describe(*this));
  }
  if (l == 0) throw std::invalid_argument("l must be >= 1 " + describe(*this));
  const std::size_t n = chunk_count();
  if (N > l * n) {
    throw std::invalid_argument("N exceeds l*(m + m/k) " + describe(*this));
  }
  if (N <= (l - 1) * n) {
    throw std::invalid_argument(
        "N <= (l-1)*(m + m/k); a smaller l suffices " + describe(*this));
  }
  if (l == 1 && N != n) {
    throw std::invalid_argument("l = 1 requires N == m + m/k " +
                                describe(*this));
  }
}

MatrixParams design_params(std::size_t N, std::size_t k, double target_ratio) {
  if (N == 0 || k == 0 || !(target_ratio > 0.0) || target_ratio > 1.0) {
    throw std::invalid_argument("design_params: need N > 0, k >= 1, 0 < ratio <= 1");
  }
  const double groups = std::round(target_ratio * static_cast<double>(N) /
                                   static_cast<double>(k));
  MatrixParams p;
  p.k = k;
  p.m = std::max<std::size_t>(1, static_cast<std::size_t>(groups)) * k;
  p.N = N;
  const std::size_t n = p.chunk_count();
  p.l = (N + n - 1) / n;
  p.validate();
  return p;
}

ChunkMap::ChunkMap(std::vector<Chunk> chunks) : chunks_(std::move(chunks)) {
  std::size_t next = 0;
  for (const Chunk& ch : chunks_) {
    if (ch.start != next || ch.length == 0) {
      throw std::invalid_argument(
          "ChunkMap: chunks must be contiguous, ordered and non-empty");
    }
    next += ch.length;
  }
  sensor_count_ = next;
  owner_.resize(sensor_count_);
  for (std::size_t c = 0; c < chunks_.size(); ++c) {
    std::fill_n(owner_.begin() + static_cast<std::ptrdiff_t>(chunks_[c].start),
                chunks_[c].length, static_cast<std::uint32_t>(c));
  }
}

ChunkMap ChunkMap::for_phi_k(std::size_t m, std::size_t k) {
  MatrixParams p{m, k, 1, 0};
  p.N = p.chunk_count();
  return build_phi_kl(p).chunks;
}

std::size_t ChunkMap::chunk_of_sensor(std::size_t sensor) const {
  if (sensor >= sensor_count_) throw std::out_of_range("ChunkMap::chunk_of_sensor");
  return owner_[sensor];
}

TernaryMatrix build_phi_k(std::size_t m, std::size_t k) {
  if (k < 1) throw std::invalid_argument("build_phi_k: k must be >= 1");
  if (m < k || m % k != 0) {
    throw std::invalid_argument("build_phi_k: m must be a positive multiple of k");
  }
  const std::size_t n = m + m / k;
  return assemble(m, n, Scheme::kPhiK,
                  [&](std::size_t c, std::vector<MatrixEntry>& out) {
                    append_phi_k_column(m, k, c, out);
                  });
}

RepeatedMatrix build_phi_kl(const MatrixParams& params) {
  params.validate();
  const std::size_t m = params.m;
  const std::size_t k = params.k;
  const std::size_t l = params.l;
  const std::size_t n = params.chunk_count();
  const std::size_t trimmed = l * n - params.N;

  std::vector<Chunk> chunks;
  chunks.reserve(n);
  std::size_t start = 0;
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t length = c + trimmed >= n ? l - 1 : l;
    const bool unit = c < m;
    chunks.push_back({start, length, unit ? ChunkRole::kUnit : ChunkRole::kBlock,
                      unit ? c : c - m});
    start += length;
  }
  ChunkMap map(std::move(chunks));

  TernaryMatrix mat = assemble(
      m, params.N, Scheme::kPhiKL,
      [&](std::size_t col, std::vector<MatrixEntry>& out) {
        append_phi_k_column(m, k, map.chunk_of_sensor(col), out);
      });
  return {std::move(mat), std::move(map)};
}

TernaryMatrix build_identity(std::size_t n) {
  if (n == 0) throw std::invalid_argument("build_identity: n must be >= 1");
  return assemble(n, n, Scheme::kTdm,
                  [](std::size_t c, std::vector<MatrixEntry>& out) {
                    out.push_back({static_cast<std::uint32_t>(c), 1});
                  });
}

TernaryMatrix build_hadamard(std::size_t n) {
  if (n == 0 || !std::has_single_bit(n)) {
    throw std::invalid_argument("build_hadamard: order must be a power of two");
  }
  return assemble(n, n, Scheme::kCdm,
                  [n](std::size_t c, std::vector<MatrixEntry>& out) {
                    for (std::size_t r = 0; r < n; ++r) {
                      const bool odd = std::popcount(r & c) % 2 == 1;
                      out.push_back({static_cast<std::uint32_t>(r),
                                     static_cast<std::int8_t>(odd ? -1 : 1)});
                    }
                  });
}

TernaryMatrix build_bernoulli(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m == 0 || m > n) {
    throw std::invalid_argument("build_bernoulli: need 0 < m <= n");
  }
  Rng rng(mix64(seed));
  std::uint64_t bits = 0;
  int remaining = 0;
  return assemble(m, n, Scheme::kBernoulli,
                  [&](std::size_t, std::vector<MatrixEntry>& out) {
                    for (std::size_t r = 0; r < m; ++r) {
                      if (remaining == 0) {
                        bits = rng();
                        remaining = 64;
                      }
                      const bool neg = bits & 1U;
                      bits >>= 1;
                      --remaining;
                      out.push_back({static_cast<std::uint32_t>(r),
                                     static_cast<std::int8_t>(neg ? -1 : 1)});
                    }
                  });
}

std::optional<std::vector<std::size_t>> find_dependent_columns(
    const TernaryMatrix& mat, std::size_t k) {
  const std::size_t cols = mat.cols();
  const std::size_t size = std::min(k, cols);
  if (size == 0) return std::nullopt;
  // Any dependent subset of fewer columns extends to a dependent subset of
  // exactly `size` columns, so only that size is enumerated.
  if (binomial(cols, size) > kIndependenceBudget) {
    throw std::invalid_argument(
        "verify_k_independence: instance exceeds the enumeration budget");
  }

  std::vector<std::vector<std::int64_t>> dense(
      cols, std::vector<std::int64_t>(mat.rows(), 0));
  for (std::size_t c = 0; c < cols; ++c) {
    for (const MatrixEntry& e : mat.column(c)) dense[c][e.row] = e.value;
  }

  std::vector<std::size_t> subset(size);
  for (std::size_t i = 0; i < size; ++i) subset[i] = i;
  std::vector<std::vector<std::int64_t>> work(size);
  while (true) {
    for (std::size_t i = 0; i < size; ++i) work[i] = dense[subset[i]];
    if (integer_rank(work, mat.rows()) < size) return subset;

    std::size_t i = size;
    while (i > 0 && subset[i - 1] == cols - size + (i - 1)) --i;
    if (i == 0) break;
    ++subset[i - 1];
    for (std::size_t j = i; j < size; ++j) subset[j] = subset[j - 1] + 1;
  }
  return std::nullopt;
}

bool verify_k_independence(const TernaryMatrix& mat, std::size_t k) {
  return !find_dependent_columns(mat, k).has_value();
}

void fast_walsh_hadamard(std::span<double> data) {
  const std::size_t n = data.size();
  if (n == 0 || !std::has_single_bit(n)) {
    throw DimensionError("fast_walsh_hadamard: length must be a power of two");
  }
  for (std::size_t half = 1; half < n; half <<= 1) {
    for (std::size_t block = 0; block < n; block += 2 * half) {
      for (std::size_t i = block; i < block + half; ++i) {
        const double a = data[i];
        const double b = data[i + half];
        data[i] = a + b;
        data[i + half] = a - b;
      }
    }
  }
}

void write_triplets(std::ostream& out, const TernaryMatrix& mat) {
  std::vector<std::tuple<std::uint32_t, std::size_t, int>> rows;
  rows.reserve(mat.nonzeros());
  for (std::size_t c = 0; c < mat.cols(); ++c) {
    for (const MatrixEntry& e : mat.column(c)) rows.emplace_back(e.row, c, e.value);
  }
  std::sort(rows.begin(), rows.end());
  out << mat.rows() << ' ' << mat.cols() << ' ' << scheme_name(mat.scheme())
      << '\n';
  for (const auto& [r, c, v] : rows) {
    out << r + 1 << ' ' << c + 1 << ' ' << v << '\n';
  }
}

TernaryMatrix read_triplets(std::istream& in) {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string scheme;
  if (!(in >> rows >> cols >> scheme)) {
    throw std::invalid_argument("read_triplets: missing 'm N scheme' header");
  }
  std::vector<std::vector<MatrixEntry>> by_col(cols);
  long long r = 0;
  long long c = 0;
  int v = 0;
  while (in >> r >> c >> v) {
    if (v != 1 && v != -1) {
      throw std::invalid_argument("read_triplets: value outside {-1, +1}");
    }
    if (r < 1 || c < 1 || static_cast<std::size_t>(r) > rows ||
        static_cast<std::size_t>(c) > cols) {
      throw std::invalid_argument("read_triplets: index out of range");
    }
    by_col[static_cast<std::size_t>(c - 1)].push_back(
        {static_cast<std::uint32_t>(r - 1), static_cast<std::int8_t>(v)});
  }
  if (!in.eof()) throw std::invalid_argument("read_triplets: malformed line");
  return assemble(rows, cols, parse_scheme(scheme),
                  [&](std::size_t col, std::vector<MatrixEntry>& out) {
                    auto& entries = by_col[col];
                    std::sort(entries.begin(), entries.end(),
                              [](const MatrixEntry& a, const MatrixEntry& b) {
                                return a.row < b.row;
                              });
                    out.insert(out.end(), entries.begin(), entries.end());
                  });
}

}  // namespace touchcs
