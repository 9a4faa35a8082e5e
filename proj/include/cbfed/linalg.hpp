#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbfed {

using DenseVector = std::vector<double>;

/// Compressed sparse row matrix. Column indices are strictly increasing within
/// each row and carry no duplicates.
struct CsrMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_offsets{0};
  std::vector<std::size_t> col_indices;
  std::vector<double> values;

  [[nodiscard]] std::size_t nnz() const { return values.size(); }
  /// Entry (r, c), zero when not stored.
  [[nodiscard]] double at(std::size_t r, std::size_t c) const;
  [[nodiscard]] CsrMatrix transpose() const;

  static CsrMatrix identity(std::size_t n);
};

/// Coordinate-format accumulator. Duplicates are summed in insertion order,
/// so the resulting CSR is independent of everything but the call sequence.
class TripletBuilder {
 public:
  TripletBuilder(std::size_t n_rows, std::size_t n_cols) : n_rows_(n_rows), n_cols_(n_cols) {}

  void reserve(std::size_t n) { entries_.reserve(n); }
  void add(std::size_t r, std::size_t c, double v) { entries_.push_back({r, c, v}); }

  [[nodiscard]] CsrMatrix build() const;

 private:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };
  std::size_t n_rows_;
  std::size_t n_cols_;
  std::vector<Entry> entries_;
};

/// y = A x with a fixed left-to-right summation order per row.
DenseVector spmv(const CsrMatrix& a, std::span<const double> x);

double norm2(std::span<const double> x);

class LinearSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relative residual bound every solve must meet: |Ax - b| / max(|b|, 1).
inline constexpr double kResidualContract = 1e-10;

/// Sparse LU factorization (UMFPACK, partial pivoting with a fill-reducing
/// column ordering). Factor once, solve for many right-hand sides.
class SparseLu {
 public:
  explicit SparseLu(const CsrMatrix& a);
  ~SparseLu();
  SparseLu(const SparseLu&) = delete;
  SparseLu& operator=(const SparseLu&) = delete;
  SparseLu(SparseLu&&) noexcept;
  SparseLu& operator=(SparseLu&&) noexcept;

  /// Solves A x = b and enforces the residual contract; throws
  /// LinearSolveError on non-finite input or a contract violation.
  [[nodiscard]] DenseVector solve(std::span<const double> b) const;

  /// New numeric factorization of a matrix with the same pattern, reusing the
  /// fill-reducing ordering. Throws std::invalid_argument on a pattern change.
  void refactor(const CsrMatrix& a);

  /// Relative residual of the last solve.
  [[nodiscard]] double last_residual() const { return last_residual_; }
  /// Reciprocal condition estimate reported by the factorization.
  [[nodiscard]] double rcond() const { return rcond_; }

 private:
  static void default_control(double* control);
  void factor_numeric();

  std::size_t n_ = 0;
  CsrMatrix matrix_;
  std::vector<int> ap_;
  std::vector<int> ai_;
  void* symbolic_ = nullptr;
  void* numeric_ = nullptr;
  double rcond_ = 0.0;
  mutable double last_residual_ = 0.0;
};

/// One-shot factor-and-solve.
DenseVector solve(const CsrMatrix& a, std::span<const double> b);

/// "%%MatrixMarket matrix coordinate real general", 1-based indices.
void write_matrix_market(std::ostream& os, const CsrMatrix& a);

}  // namespace cbfed
