#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace touchcs {

enum class Scheme { kTdm, kCdm, kPhiK, kPhiKL, kBernoulli };

std::string_view scheme_name(Scheme scheme);
// Accepts the names produced by scheme_name(); throws std::invalid_argument.
Scheme parse_scheme(std::string_view name);

struct MatrixEntry {
  std::uint32_t row;
  std::int8_t value;  // -1 or +1

  friend bool operator==(const MatrixEntry&, const MatrixEntry&) = default;
};

// Sparse m x N matrix with entries in {-1, 0, +1}, stored column-major.
// Immutable after construction.
class TernaryMatrix {
 public:
  // `col_ptr` has cols + 1 offsets into `entries`; rows inside each column
  // must be strictly increasing. Throws std::invalid_argument otherwise.
  TernaryMatrix(std::size_t rows, std::size_t cols, Scheme scheme,
                std::vector<std::size_t> col_ptr,
                std::vector<MatrixEntry> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Scheme scheme() const noexcept { return scheme_; }
  std::size_t nonzeros() const noexcept { return entries_.size(); }

  std::span<const MatrixEntry> column(std::size_t c) const;
  int at(std::size_t row, std::size_t col) const;

  // y = A x. Throws DimensionError when x.size() != cols().
  std::vector<double> multiply(std::span<const double> x) const;
  // x = A^T y. Throws DimensionError when y.size() != rows().
  std::vector<double> multiply_transpose(std::span<const double> y) const;

  // Exact integer row sums; zero rows cancel a common DC offset.
  std::vector<std::int64_t> row_sums() const;

  friend bool operator==(const TernaryMatrix&, const TernaryMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  Scheme scheme_;
  std::vector<std::size_t> col_ptr_;
  std::vector<MatrixEntry> entries_;
};

// Design parameters of the repeated-column detection matrix.
//   m  measurements, k  sparsity parameter (m % k == 0),
//   l  columns per chunk, N  sensors, with (l-1) n < N <= l n, n = m + m/k.
struct MatrixParams {
  std::size_t m = 0;
  std::size_t k = 1;
  std::size_t l = 1;
  std::size_t N = 0;

  std::size_t chunk_count() const noexcept { return k == 0 ? 0 : m + m / k; }
  std::size_t group_count() const noexcept { return k == 0 ? 0 : m / k; }
  double sampling_ratio() const noexcept {
    return N == 0 ? 0.0 : static_cast<double>(m) / static_cast<double>(N);
  }
  // Throws std::invalid_argument with a readable message.
  void validate() const;

  friend bool operator==(const MatrixParams&, const MatrixParams&) = default;
};

// Smallest-l parameter set with m close to target_ratio * N (rounded to a
// multiple of k). Throws std::invalid_argument if no valid set exists.
MatrixParams design_params(std::size_t N, std::size_t k, double target_ratio);

enum class ChunkRole { kUnit, kBlock };

// One detection chunk: a run of adjacent sensors sharing a matrix column.
// Unit chunks (e_i columns) map to measurement row `index`; block chunks
// (a_{i,k} columns) map to measurement group `index`.
struct Chunk {
  std::size_t start = 0;
  std::size_t length = 0;
  ChunkRole role = ChunkRole::kUnit;
  std::size_t index = 0;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

class ChunkMap {
 public:
  ChunkMap() = default;
  // Chunks must be contiguous, ordered and non-empty; throws otherwise.
  explicit ChunkMap(std::vector<Chunk> chunks);

  // One sensor per chunk over the columns of build_phi_k(m, k).
  static ChunkMap for_phi_k(std::size_t m, std::size_t k);

  std::size_t chunk_count() const noexcept { return chunks_.size(); }
  std::size_t sensor_count() const noexcept { return sensor_count_; }
  const Chunk& operator[](std::size_t c) const { return chunks_[c]; }
  std::span<const Chunk> chunks() const noexcept { return chunks_; }
  std::size_t chunk_of_sensor(std::size_t sensor) const;

  friend bool operator==(const ChunkMap&, const ChunkMap&) = default;

 private:
  std::vector<Chunk> chunks_;
  std::vector<std::uint32_t> owner_;
  std::size_t sensor_count_ = 0;
};

struct RepeatedMatrix {
  TernaryMatrix matrix;
  ChunkMap chunks;
};

TernaryMatrix build_phi_k(std::size_t m, std::size_t k);
// When N < l n the trailing (l n - N) chunks get l - 1 columns.
RepeatedMatrix build_phi_kl(const MatrixParams& params);
TernaryMatrix build_identity(std::size_t n);
// Sylvester ordering; n must be a power of two.
TernaryMatrix build_hadamard(std::size_t n);
TernaryMatrix build_bernoulli(std::size_t m, std::size_t n, std::uint64_t seed);

// Upper bound on the number of column subsets verify_k_independence will
// enumerate.
inline constexpr std::uint64_t kIndependenceBudget = 5'000'000;

// First (lexicographic) set of at most k columns that is linearly dependent,
// or nullopt. Exact integer arithmetic. Throws std::invalid_argument when
// the enumeration exceeds kIndependenceBudget.
std::optional<std::vector<std::size_t>> find_dependent_columns(
    const TernaryMatrix& mat, std::size_t k);
bool verify_k_independence(const TernaryMatrix& mat, std::size_t k);

// In-place unnormalized Walsh-Hadamard transform in Sylvester order, i.e.
// data <- H data with H = build_hadamard(data.size()).
void fast_walsh_hadamard(std::span<double> data);

// Plain-text export: header "m N scheme", then one "row col value" line per
// nonzero (1-based, row-major order).
void write_triplets(std::ostream& out, const TernaryMatrix& mat);
TernaryMatrix read_triplets(std::istream& in);

}  // namespace touchcs
