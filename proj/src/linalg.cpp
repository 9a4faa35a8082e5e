#include "cbfed/linalg.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <utility>

extern "C" {
#include <umfpack.h>
}

namespace cbfed {

double CsrMatrix::at(std::size_t r, std::size_t c) const {
  const auto first = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[r]);
  const auto last = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[r + 1]);
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return 0.0;
  return values[static_cast<std::size_t>(it - col_indices.begin())];
}

CsrMatrix CsrMatrix::transpose() const {
  CsrMatrix t;
  t.n_rows = n_cols;
  t.n_cols = n_rows;
  t.row_offsets.assign(n_cols + 1, 0);
  for (auto c : col_indices) ++t.row_offsets[c + 1];
  std::partial_sum(t.row_offsets.begin(), t.row_offsets.end(), t.row_offsets.begin());
  t.col_indices.resize(nnz());
  t.values.resize(nnz());
  std::vector<std::size_t> next(t.row_offsets.begin(), t.row_offsets.end() - 1);
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (auto k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
      const auto slot = next[col_indices[k]]++;
      t.col_indices[slot] = r;
      t.values[slot] = values[k];
    }
  }
  return t;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  CsrMatrix m;
  m.n_rows = m.n_cols = n;
  m.row_offsets.resize(n + 1);
  std::iota(m.row_offsets.begin(), m.row_offsets.end(), std::size_t{0});
  m.col_indices.resize(n);
  std::iota(m.col_indices.begin(), m.col_indices.end(), std::size_t{0});
  m.values.assign(n, 1.0);
  return m;
}

CsrMatrix TripletBuilder::build() const {
  // Counting sort by row keeps insertion order within a row; a stable sort by
  // column then fixes the duplicate summation order.
  std::vector<std::size_t> count(n_rows_ + 1, 0);
  for (const auto& e : entries_) {
    if (e.row >= n_rows_ || e.col >= n_cols_) {
      throw std::out_of_range("TripletBuilder: entry outside matrix bounds");
    }
    ++count[e.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<std::pair<std::size_t, double>> sorted(entries_.size());
  {
    std::vector<std::size_t> next(count.begin(), count.end() - 1);
    for (const auto& e : entries_) sorted[next[e.row]++] = {e.col, e.value};
  }

  CsrMatrix m;
  m.n_rows = n_rows_;
  m.n_cols = n_cols_;
  m.row_offsets.assign(n_rows_ + 1, 0);
  m.col_indices.reserve(entries_.size() / 2);
  m.values.reserve(entries_.size() / 2);
  for (std::size_t r = 0; r < n_rows_; ++r) {
    auto first = sorted.begin() + static_cast<std::ptrdiff_t>(count[r]);
    auto last = sorted.begin() + static_cast<std::ptrdiff_t>(count[r + 1]);
    std::stable_sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = first; it != last; ++it) {
      if (m.col_indices.size() > m.row_offsets[r] && m.col_indices.back() == it->first) {
        m.values.back() += it->second;
      } else {
        m.col_indices.push_back(it->first);
        m.values.push_back(it->second);
      }
    }
    m.row_offsets[r + 1] = m.col_indices.size();
  }
  return m;
}

DenseVector spmv(const CsrMatrix& a, std::span<const double> x) {
  if (x.size() != a.n_cols) {
    throw std::invalid_argument("spmv: dimension mismatch (" + std::to_string(a.n_cols) +
                                " columns, vector of " + std::to_string(x.size()) + ")");
  }
  DenseVector y(a.n_rows, 0.0);
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    double s = 0.0;
    for (auto k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
      s += a.values[k] * x[a.col_indices[k]];
    }
    y[r] = s;
  }
  return y;
}

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

namespace {

void check_finite(std::span<const double> v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw LinearSolveError(std::string("non-finite ") + what + " entry at index " +
                             std::to_string(i));
    }
  }
}

}  // namespace

SparseLu::SparseLu(const CsrMatrix& a) : n_(a.n_rows), matrix_(a) {
  if (a.n_rows != a.n_cols) {
    throw std::invalid_argument("SparseLu: matrix must be square");
  }
  if (a.nnz() > static_cast<std::size_t>(INT_MAX)) {
    throw std::length_error("SparseLu: matrix too large for 32-bit UMFPACK indices");
  }
  check_finite(a.values, "matrix");
  // The CSR arrays of A are the CSC arrays of A^T; factor A^T and solve with
  // the transposed system below.
  ap_.assign(a.row_offsets.begin(), a.row_offsets.end());
  ai_.assign(a.col_indices.begin(), a.col_indices.end());

  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  default_control(control);
  const int status =
      umfpack_di_symbolic(static_cast<int>(n_), static_cast<int>(n_), ap_.data(), ai_.data(),
                          matrix_.values.data(), &symbolic_, control, info);
  if (status != UMFPACK_OK) {
    throw LinearSolveError("UMFPACK symbolic analysis failed, status " + std::to_string(status));
  }
  try {
    factor_numeric();
  } catch (...) {
    umfpack_di_free_symbolic(&symbolic_);
    throw;
  }
}

void SparseLu::refactor(const CsrMatrix& a) {
  if (a.n_rows != n_ || a.row_offsets != matrix_.row_offsets ||
      a.col_indices != matrix_.col_indices) {
    throw std::invalid_argument("SparseLu::refactor: sparsity pattern differs");
  }
  check_finite(a.values, "matrix");
  matrix_.values = a.values;
  if (numeric_ != nullptr) umfpack_di_free_numeric(&numeric_);
  factor_numeric();
}

void SparseLu::default_control(double* control) {
  umfpack_di_defaults(control);
  // The pattern is symmetric but the pressure block has a zero diagonal, which
  // makes the automatic choice fall back to COLAMD with far more fill.
  control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
  control[UMFPACK_ORDERING] = UMFPACK_ORDERING_METIS;
}

void SparseLu::factor_numeric() {
  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  default_control(control);
  const int status = umfpack_di_numeric(ap_.data(), ai_.data(), matrix_.values.data(), symbolic_,
                                        &numeric_, control, info);
  rcond_ = info[UMFPACK_RCOND];
  if (status == UMFPACK_WARNING_singular_matrix) {
    // Locate the first zero pivot in the original numbering.
    std::vector<int> p(n_), q(n_);
    std::vector<double> d(n_);
    int do_recip = 0;
    umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, p.data(), q.data(),
                           d.data(), &do_recip, nullptr, numeric_);
    std::size_t k = 0;
    while (k < n_ && d[k] != 0.0) ++k;
    std::ostringstream msg;
    msg << "matrix is singular to working precision: zero pivot at elimination step " << k;
    if (k < n_) msg << " (matrix row " << q[k] << ")";
    umfpack_di_free_numeric(&numeric_);
    throw LinearSolveError(msg.str());
  }
  if (status != UMFPACK_OK) {
    if (numeric_ != nullptr) umfpack_di_free_numeric(&numeric_);
    throw LinearSolveError("UMFPACK numeric factorization failed, status " +
                           std::to_string(status));
  }
}

SparseLu::~SparseLu() {
  if (numeric_ != nullptr) umfpack_di_free_numeric(&numeric_);
  if (symbolic_ != nullptr) umfpack_di_free_symbolic(&symbolic_);
}

SparseLu::SparseLu(SparseLu&& o) noexcept
    : n_(o.n_),
      matrix_(std::move(o.matrix_)),
      ap_(std::move(o.ap_)),
      ai_(std::move(o.ai_)),
      symbolic_(std::exchange(o.symbolic_, nullptr)),
      numeric_(std::exchange(o.numeric_, nullptr)),
      rcond_(o.rcond_),
      last_residual_(o.last_residual_) {}

SparseLu& SparseLu::operator=(SparseLu&& o) noexcept {
  if (this != &o) {
    if (numeric_ != nullptr) umfpack_di_free_numeric(&numeric_);
    if (symbolic_ != nullptr) umfpack_di_free_symbolic(&symbolic_);
    n_ = o.n_;
    matrix_ = std::move(o.matrix_);
    ap_ = std::move(o.ap_);
    ai_ = std::move(o.ai_);
    symbolic_ = std::exchange(o.symbolic_, nullptr);
    numeric_ = std::exchange(o.numeric_, nullptr);
    rcond_ = o.rcond_;
    last_residual_ = o.last_residual_;
  }
  return *this;
}

DenseVector SparseLu::solve(std::span<const double> b) const {
  if (b.size() != n_) {
    throw std::invalid_argument("SparseLu::solve: right-hand side has wrong length");
  }
  check_finite(b, "right-hand side");
  DenseVector x(n_, 0.0);
  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  default_control(control);
  const int status = umfpack_di_solve(UMFPACK_At, ap_.data(), ai_.data(), matrix_.values.data(),
                                      x.data(), b.data(), numeric_, control, info);
  if (status != UMFPACK_OK) {
    throw LinearSolveError("UMFPACK solve failed, status " + std::to_string(status));
  }
  const auto ax = spmv(matrix_, x);
  double rr = 0.0;
  for (std::size_t i = 0; i < n_; ++i) rr += (ax[i] - b[i]) * (ax[i] - b[i]);
  last_residual_ = std::sqrt(rr) / std::max(norm2(b), 1.0);
  if (!(last_residual_ <= kResidualContract)) {
    std::ostringstream msg;
    msg << "linear solve violates residual contract: relative residual " << last_residual_ << " > "
        << kResidualContract << " (refinement steps " << info[UMFPACK_IR_TAKEN] << ", rcond "
        << rcond_ << ")";
    throw LinearSolveError(msg.str());
  }
  return x;
}

DenseVector solve(const CsrMatrix& a, std::span<const double> b) {
  const SparseLu lu(a);
  return lu.solve(b);
}

void write_matrix_market(std::ostream& os, const CsrMatrix& a) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.n_rows << ' ' << a.n_cols << ' ' << a.nnz() << '\n';
  os.precision(17);
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    for (auto k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
      os << r + 1 << ' ' << a.col_indices[k] + 1 << ' ' << a.values[k] << '\n';
    }
  }
}

}  // namespace cbfed
