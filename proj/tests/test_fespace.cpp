#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "cbfed/fespace.hpp"
#include "cbfed/quadrature.hpp"

using namespace cbfed;

namespace {

double fact(int k) { return k <= 1 ? 1.0 : k * fact(k - 1); }

// Integral of xi^a eta^b over the reference triangle.
double ref_monomial(int a, int b) { return fact(a) * fact(b) / fact(a + b + 2); }

double apply_rule(const QuadratureRule& r, int a, int b) {
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    s += r.weights[q] * std::pow(r.points[q][1], a) * std::pow(r.points[q][2], b);
  }
  return s;
}

}  // namespace

TEST(DofMap, SingleCell) {
  const auto m = unit_square_mesh(1);
  const auto d = build_dofmap(m);
  EXPECT_EQ(d.n_velocity_dofs(), 12u);
  EXPECT_EQ(d.n_pressure_dofs(), 4u);
  EXPECT_EQ(d.n_multiplier_dofs(), 0u);
}

TEST(DofMap, TwoCells) {
  const auto m = unit_square_mesh(2);
  const auto d = build_dofmap(m);
  EXPECT_EQ(d.n_velocity_dofs(), 34u);
  EXPECT_EQ(d.n_pressure_dofs(), 9u);
  ASSERT_EQ(d.n_multiplier_dofs(), 1u);
  const auto& p = m.vertices[d.multiplier_vertices[0]];
  EXPECT_DOUBLE_EQ(p.x, 0.5);
  EXPECT_DOUBLE_EQ(p.y, 1.0);
}

TEST(DofMap, FiveCells) {
  const auto d = build_dofmap(unit_square_mesh(5));
  EXPECT_EQ(d.n_velocity_dofs(), 172u);
}

TEST(DofMap, CountFormulas) {
  for (std::size_t n = 1; n <= 16; ++n) {
    const auto m = unit_square_mesh(n);
    const auto d = build_dofmap(m);
    EXPECT_EQ(d.n_velocity_dofs(), 2 * ((n + 1) * (n + 1) + 2 * n * n));
    EXPECT_EQ(d.n_pressure_dofs(), (n + 1) * (n + 1));
    EXPECT_EQ(d.n_multiplier_dofs(), n - 1);
    EXPECT_EQ(d.total_dofs(), d.n_velocity_dofs() + d.n_pressure_dofs() + (n - 1) + 1);
  }
}

TEST(DofMap, ConstraintPattern) {
  const auto m = unit_square_mesh(6);
  const auto d = build_dofmap(m);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const auto& p = m.vertices[v];
    const bool gamma0 = p.x == 0.0 || p.x == 1.0 || p.y == 0.0;
    const bool top = p.y == 1.0;
    EXPECT_EQ(d.constraints.is_fixed(d.vertex_dof(0, v)), gamma0) << v;
    EXPECT_EQ(d.constraints.is_fixed(d.vertex_dof(1, v)), gamma0 || top) << v;
  }
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    EXPECT_FALSE(d.constraints.is_fixed(d.bubble_dof(0, t)));
    EXPECT_FALSE(d.constraints.is_fixed(d.bubble_dof(1, t)));
  }
  for (std::size_t k = 1; k < d.multiplier_vertices.size(); ++k) {
    EXPECT_LT(m.vertices[d.multiplier_vertices[k - 1]].x, m.vertices[d.multiplier_vertices[k]].x);
  }
}

TEST(Quadrature, OnePointRule) {
  const auto r = triangle_quadrature(1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r.points[0][0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.points[0][1], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.weights[0], 0.5, 1e-15);
}

TEST(Quadrature, DegreeSixMonomial) {
  EXPECT_NEAR(apply_rule(triangle_quadrature(6), 4, 2), 1.0 / 840.0, 1e-15);
}

TEST(Quadrature, TriangleRulesExactAndPositive) {
  for (int deg = 1; deg <= kMaxTriangleDegree; ++deg) {
    const auto r = triangle_quadrature(deg);
    EXPECT_GE(r.degree, deg);
    double wsum = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) {
      EXPECT_GT(r.weights[q], 0.0) << "degree " << deg;
      EXPECT_NEAR(r.points[q][0] + r.points[q][1] + r.points[q][2], 1.0, 1e-14);
      for (double l : r.points[q]) EXPECT_GE(l, 0.0);
      wsum += r.weights[q];
    }
    EXPECT_NEAR(wsum, 0.5, 1e-14) << "degree " << deg;
    for (int a = 0; a <= deg; ++a) {
      for (int b = 0; a + b <= deg; ++b) {
        EXPECT_NEAR(apply_rule(r, a, b), ref_monomial(a, b), 1e-14)
            << "degree " << deg << " monomial " << a << "," << b;
      }
    }
  }
}

TEST(Quadrature, LowRuleMissesHigherMonomial) {
  // Guards the exactness test itself: the centroid rule cannot integrate xi^2.
  EXPECT_GT(std::abs(apply_rule(triangle_quadrature(1), 2, 0) - ref_monomial(2, 0)), 1e-3);
}

TEST(Quadrature, UnsupportedDegreeThrows) {
  EXPECT_THROW(triangle_quadrature(0), std::invalid_argument);
  EXPECT_THROW(triangle_quadrature(11), std::invalid_argument);
}

TEST(Quadrature, EdgeRules) {
  const auto r1 = edge_quadrature(1);
  ASSERT_EQ(r1.size(), 1u);
  EXPECT_NEAR(r1.points[0][0], 0.5, 1e-15);
  EXPECT_NEAR(r1.weights[0], 1.0, 1e-15);

  const auto r5 = edge_quadrature(5);
  EXPECT_EQ(r5.size(), 3u);
  for (int deg = 1; deg <= 9; ++deg) {
    const auto r = edge_quadrature(deg);
    EXPECT_NEAR(std::accumulate(r.weights.begin(), r.weights.end(), 0.0), 1.0, 1e-14);
    for (int k = 0; k <= deg; ++k) {
      double s = 0.0;
      for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.points[q][0], k);
      EXPECT_NEAR(s, 1.0 / (k + 1), 1e-14) << "degree " << deg << " power " << k;
    }
  }
  double s4 = 0.0;
  for (std::size_t q = 0; q < r5.size(); ++q) s4 += r5.weights[q] * std::pow(r5.points[q][0], 4);
  EXPECT_NEAR(s4, 0.2, 1e-15);
}

TEST(Shapes, PartitionOfUnityAndBubble) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    double a = u(gen), b = u(gen);
    if (a + b > 1.0) {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    std::array<double, 4> val{};
    std::array<Vec2, 4> g{};
    p1b_shape({1.0 - a - b, a, b}, val, g);
    EXPECT_NEAR(val[0] + val[1] + val[2], 1.0, 1e-15);
    EXPECT_NEAR(g[0][0] + g[1][0] + g[2][0], 0.0, 1e-15);
    EXPECT_NEAR(g[0][1] + g[1][1] + g[2][1], 0.0, 1e-15);
    // Bubble gradient against central differences in (xi, eta).
    const double e = 1e-6;
    auto bub = [](double x, double y) { return 27.0 * (1.0 - x - y) * x * y; };
    EXPECT_NEAR(g[3][0], (bub(a + e, b) - bub(a - e, b)) / (2 * e), 1e-8);
    EXPECT_NEAR(g[3][1], (bub(a, b + e) - bub(a, b - e)) / (2 * e), 1e-8);
  }
  std::array<double, 4> val{};
  std::array<Vec2, 4> g{};
  p1b_shape({1.0 / 3, 1.0 / 3, 1.0 / 3}, val, g);
  EXPECT_NEAR(val[3], 1.0, 1e-15);
  EXPECT_NEAR(g[3][0], 0.0, 1e-14);
  EXPECT_NEAR(g[3][1], 0.0, 1e-14);
  for (double t : {0.0, 0.2, 0.6, 1.0}) {
    p1b_shape({0.0, t, 1.0 - t}, val, g);
    EXPECT_EQ(val[3], 0.0);
    p1b_shape({t, 0.0, 1.0 - t}, val, g);
    EXPECT_EQ(val[3], 0.0);
    p1b_shape({t, 1.0 - t, 0.0}, val, g);
    EXPECT_EQ(val[3], 0.0);
  }
}

TEST(Evaluate, ConstantAndLinearFields) {
  const auto m = unit_square_mesh(4);
  const auto d = build_dofmap(m);
  const auto one = interpolate_velocity(m, d, [](double, double) { return Vec2{1.0, 1.0}; });
  const auto pc = interpolate_pressure(m, [](double, double) { return 1.0; });
  const auto v = evaluate_fe_function(m, d, one, pc, {0.37, 0.81});
  EXPECT_NEAR(v.u[0], 1.0, 1e-15);
  EXPECT_NEAR(v.u[1], 1.0, 1e-15);
  EXPECT_NEAR(v.p, 1.0, 1e-15);

  const auto lin = interpolate_velocity(m, d, [](double x, double y) { return Vec2{x, -y}; });
  const auto w = evaluate_fe_function(m, d, lin, {}, {0.3, 0.7});
  EXPECT_NEAR(w.u[0], 0.3, 1e-15);
  EXPECT_NEAR(w.u[1], -0.7, 1e-15);
  EXPECT_NEAR(w.grad_u[0][0], 1.0, 1e-13);
  EXPECT_NEAR(w.grad_u[0][1], 0.0, 1e-13);
  EXPECT_NEAR(w.grad_u[1][1], -1.0, 1e-13);
  EXPECT_THROW(evaluate_fe_function(m, d, lin, {}, {1.5, 0.5}), std::out_of_range);
}

TEST(Evaluate, BubbleCoefficient) {
  const auto m = unit_square_mesh(3);
  const auto d = build_dofmap(m);
  const std::size_t t = 7;
  std::vector<double> u(d.n_velocity_dofs(), 0.0);
  u[d.bubble_dof(0, t)] = 1.0;
  const auto& tri = m.triangles[t];
  const auto& a = m.vertices[tri[0]];
  const auto& b = m.vertices[tri[1]];
  const auto& c = m.vertices[tri[2]];
  const Point centroid{(a.x + b.x + c.x) / 3, (a.y + b.y + c.y) / 3};
  EXPECT_NEAR(evaluate_fe_function(m, d, u, {}, centroid).u[0], 1.0, 1e-14);
  const Point mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  EXPECT_NEAR(evaluate_fe_function(m, d, u, {}, mid).u[0], 0.0, 1e-14);
  EXPECT_NEAR(evaluate_fe_function(m, d, u, {}, centroid).u[1], 0.0, 0.0);
}

TEST(Interpolation, GradientErrorIsFirstOrder) {
  // |grad(I_h u - u)|_L2 for a smooth u should halve with h.
  auto field = [](double x, double y) { return Vec2{std::sin(2.0 * x) * std::cos(y), x * x * y}; };
  auto gradf = [](double x, double y) {
    return Mat2{{{2.0 * std::cos(2.0 * x) * std::cos(y), -std::sin(2.0 * x) * std::sin(y)},
                 {2.0 * x * y, x * x}}};
  };
  const auto rule = triangle_quadrature(6);
  std::vector<double> errs;
  for (std::size_t n : {8, 16, 32}) {
    const auto m = unit_square_mesh(n);
    const auto d = build_dofmap(m);
    const auto u = interpolate_velocity(m, d, field);
    double e2 = 0.0;
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
      const ElementMap em(m, t);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point p = em.map(rule.points[q]);
        const auto fv = evaluate_fe_function(m, d, u, {}, p);
        const auto ge = gradf(p.x, p.y);
        double s = 0.0;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) s += std::pow(fv.grad_u[i][j] - ge[i][j], 2);
        e2 += rule.weights[q] * em.det * s;
      }
    }
    errs.push_back(std::sqrt(e2));
  }
  EXPECT_NEAR(std::log2(errs[0] / errs[1]), 1.0, 0.1);
  EXPECT_NEAR(std::log2(errs[1] / errs[2]), 1.0, 0.1);
}
