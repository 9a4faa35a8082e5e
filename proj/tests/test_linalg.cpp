#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "cbfed/forms.hpp"
#include "cbfed/linalg.hpp"

using namespace cbfed;

namespace {

CsrMatrix from_dense(const std::vector<std::vector<double>>& a) {
  TripletBuilder b(a.size(), a.empty() ? 0 : a[0].size());
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < a[r].size(); ++c)
      if (a[r][c] != 0.0) b.add(r, c, a[r][c]);
  return b.build();
}

}  // namespace

TEST(Csr, DuplicatesAreSummedAndSorted) {
  TripletBuilder b(2, 3);
  b.add(0, 2, 1.0);
  b.add(0, 0, 2.0);
  b.add(0, 2, 0.5);
  b.add(1, 1, -1.0);
  const auto m = b.build();
  EXPECT_EQ(m.nnz(), 3u);
  EXPECT_EQ((std::vector<std::size_t>{0, 2, 3}), m.row_offsets);
  EXPECT_EQ((std::vector<std::size_t>{0, 2, 1}), m.col_indices);
  EXPECT_DOUBLE_EQ(m.at(0, 2), 1.5);
  EXPECT_EQ(m.at(1, 0), 0.0);
  TripletBuilder bad(2, 2);
  bad.add(2, 0, 1.0);
  EXPECT_THROW((void)bad.build(), std::out_of_range);
}

TEST(Csr, Transpose) {
  const auto m = from_dense({{1, 2, 0}, {0, 0, 3}});
  const auto t = m.transpose();
  EXPECT_EQ(t.n_rows, 3u);
  EXPECT_EQ(t.at(1, 0), 2.0);
  EXPECT_EQ(t.at(2, 1), 3.0);
  EXPECT_EQ(t.at(0, 1), 0.0);
}

TEST(Spmv, SmallCases) {
  const auto id = CsrMatrix::identity(3);
  EXPECT_EQ(spmv(id, std::vector<double>{1, 2, 3}), (std::vector<double>{1, 2, 3}));
  const auto a = from_dense({{2, 1}, {0, 3}});
  EXPECT_EQ(spmv(a, std::vector<double>{1, 1}), (std::vector<double>{3, 3}));
  EXPECT_THROW(spmv(a, std::vector<double>{1, 1, 1}), std::invalid_argument);
}

TEST(Spmv, MatchesDenseProduct) {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution keep(0.1);
  const std::size_t n = 50;
  std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
  for (auto& row : dense)
    for (auto& v : row)
      if (keep(gen)) v = u(gen);
  std::vector<double> x(n);
  for (auto& v : x) v = u(gen);
  const auto y = spmv(from_dense(dense), x);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += dense[r][c] * x[c];
    EXPECT_NEAR(y[r], s, 1e-13);
  }
}

TEST(Solve, Identity) {
  const std::vector<double> b{1.0, -2.0, 3.5};
  const auto x = solve(CsrMatrix::identity(3), b);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(x[i], b[i]);
}

TEST(Solve, TridiagonalKnownInverse) {
  // inv([[2,-1,0],[-1,2,-1],[0,-1,2]]) = [[3,2,1],[2,4,2],[1,2,3]] / 4
  const auto a = from_dense({{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}});
  const auto x = solve(a, std::vector<double>{1.0, 0.0, 0.0});
  EXPECT_NEAR(x[0], 0.75, 1e-15);
  EXPECT_NEAR(x[1], 0.5, 1e-15);
  EXPECT_NEAR(x[2], 0.25, 1e-15);
}

TEST(Solve, NeedsPivoting) {
  // Zero leading diagonal, like the pressure block of a saddle-point matrix.
  const auto a = from_dense({{0, 1}, {1, 0}});
  const auto x = solve(a, std::vector<double>{2.0, 3.0});
  EXPECT_DOUBLE_EQ(x[0], 3.0);
  EXPECT_DOUBLE_EQ(x[1], 2.0);
}

TEST(Solve, SingularMatrixIsDiagnosed) {
  const auto a = from_dense({{1, 2}, {2, 4}});
  try {
    (void)solve(a, std::vector<double>{1.0, 1.0});
    FAIL() << "expected LinearSolveError";
  } catch (const LinearSolveError& e) {
    EXPECT_NE(std::string(e.what()).find("singular"), std::string::npos) << e.what();
  }
}

TEST(Solve, NonFiniteInputRejected) {
  auto a = from_dense({{1, 0}, {0, 1}});
  EXPECT_THROW(solve(a, std::vector<double>{std::nan(""), 1.0}), LinearSolveError);
  a.values[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(solve(a, std::vector<double>{1.0, 1.0}), LinearSolveError);
  EXPECT_THROW(SparseLu(from_dense({{1, 2, 3}})), std::invalid_argument);
}

TEST(Solve, StokesSystemMeetsResidualContract) {
  const auto mesh = unit_square_mesh(6);
  const auto dofs = build_dofmap(mesh);
  const SystemAssembler as(mesh, dofs);
  const std::vector<double> zero(dofs.n_velocity_dofs(), 0.0);
  const auto sys = as.assemble(ProblemParams{}, zero,
                               [](double x, double y) { return Vec2{std::sin(3 * y), x * x}; });
  const SparseLu lu(sys.matrix);
  const auto x = lu.solve(sys.rhs);
  EXPECT_LE(lu.last_residual(), kResidualContract);
  EXPECT_GT(lu.rcond(), 0.0);
  const auto r = spmv(sys.matrix, x);
  // Pressure rows are the discrete divergence constraint.
  for (std::size_t i = sys.layout.pressure_offset(); i < sys.layout.size(); ++i) {
    EXPECT_NEAR(r[i], sys.rhs[i], 1e-12);
  }
  const auto x2 = lu.solve(sys.rhs);
  EXPECT_EQ(x, x2);
}

TEST(Solve, RefactorReusesPattern) {
  auto a = from_dense({{4, 1}, {1, 3}});
  SparseLu lu(a);
  a.values = {2.0, 0.0, 0.0, 5.0};
  lu.refactor(a);
  const auto x = lu.solve(std::vector<double>{2.0, 5.0});
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
  EXPECT_THROW(lu.refactor(from_dense({{1, 0}, {0, 1}})), std::invalid_argument);
  EXPECT_THROW((void)lu.solve(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(MatrixMarket, Format) {
  std::ostringstream os;
  write_matrix_market(os, from_dense({{1.5, 0}, {0, -2}}));
  EXPECT_EQ(os.str(), "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.5\n2 2 -2\n");
}
