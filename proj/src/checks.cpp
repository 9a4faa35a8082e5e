#include "cbfed/checks.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cbfed/forms.hpp"
#include "cbfed/linalg.hpp"
#include "cbfed/mesh.hpp"

namespace cbfed {

MonotonicityReport check_monotonicity(double r, std::size_t samples, std::uint64_t seed) {
  if (!(r >= 1.0)) throw std::invalid_argument("monotonicity check needs r >= 1");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  MonotonicityReport rep;
  rep.r = r;
  rep.samples = samples;
  rep.min_slack_weighted = std::numeric_limits<double>::infinity();
  rep.min_slack_strong = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    const double x0 = coord(gen), x1 = coord(gen), y0 = coord(gen), y1 = coord(gen);
    const double nx = std::hypot(x0, x1), ny = std::hypot(y0, y1);
    const double d0 = x0 - y0, d1 = x1 - y1;
    const double nd2 = d0 * d0 + d1 * d1;
    const double px = std::pow(nx, r - 1.0), py = std::pow(ny, r - 1.0);
    const double lhs = (px * x0 - py * y0) * d0 + (px * x1 - py * y1) * d1;
    const double scale = std::max(1.0, std::abs(lhs));
    const double weighted = 0.5 * (px + py) * nd2;
    const double strong = std::pow(2.0, 1.0 - r) * std::pow(nd2, 0.5 * (r + 1.0));
    rep.min_slack_weighted = std::min(rep.min_slack_weighted, (lhs - weighted) / scale);
    rep.min_slack_strong = std::min(rep.min_slack_strong, (lhs - strong) / scale);
  }
  return rep;
}

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

double triangle_exactness_error(const QuadratureRule& rule, int degree) {
  double worst = 0.0;
  for (int a = 0; a <= degree; ++a) {
    for (int b = 0; a + b <= degree; ++b) {
      double sum = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        sum += rule.weights[q] * std::pow(rule.points[q][1], a) * std::pow(rule.points[q][2], b);
      }
      const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
      worst = std::max(worst, std::abs(sum - exact));
    }
  }
  return worst;
}

double edge_exactness_error(const QuadratureRule& rule, int degree) {
  double worst = 0.0;
  for (int k = 0; k <= degree; ++k) {
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      sum += rule.weights[q] * std::pow(rule.points[q][0], k);
    }
    worst = std::max(worst, std::abs(sum - 1.0 / (k + 1)));
  }
  return worst;
}

double stokes_patch_error(std::size_t n, const VectorField& exact) {
  const TriMesh mesh = unit_square_mesh(n);
  const DofMap dofs = build_dofmap(mesh);
  VelocityConstraints c = dofs.constraints;
  for (auto tag : {BoundaryTag::Gamma0, BoundaryTag::Gamma1}) {
    for (auto v : boundary_vertices(mesh, tag)) {
      const Vec2 u = exact(mesh.vertices[v].x, mesh.vertices[v].y);
      c.fix(dofs.vertex_dof(0, v), u[0]);
      c.fix(dofs.vertex_dof(1, v), u[1]);
    }
  }
  ProblemParams stokes;
  stokes.mu = 1.0;
  stokes.alpha = 0.0;
  stokes.beta = 0.0;
  stokes.kappa = 0.0;
  const SystemAssembler assembler(mesh, dofs, c);
  const DenseVector zero(dofs.n_velocity_dofs(), 0.0);
  const auto sys =
      assembler.assemble(stokes, zero, [](double, double) { return Vec2{0.0, 0.0}; }, false);
  const DenseVector x = solve(sys.matrix, sys.rhs);
  const DenseVector u = sys.layout.velocity(x);
  const DenseVector p = sys.layout.pressure(x);
  const DenseVector ui = interpolate_velocity(mesh, dofs, exact);
  double err = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(u[i] - ui[i]));
  for (double v : p) err = std::max(err, std::abs(v));
  return err;
}

double inf_sup_constant(std::size_t n) {
  const TriMesh mesh = unit_square_mesh(n);
  const DofMap dofs = build_dofmap(mesh);
  const CsrMatrix a = assemble_a(mesh, dofs);
  const CsrMatrix d = assemble_d(mesh, dofs);
  const CsrMatrix m = assemble_a0(mesh, dofs);

  // Velocity dofs of V_h with v = 0 on the whole boundary.
  std::vector<char> on_boundary(mesh.num_vertices(), 0);
  for (const auto& e : mesh.boundary_edges) on_boundary[e.v0] = on_boundary[e.v1] = 1;
  std::vector<std::ptrdiff_t> idx(dofs.n_velocity_dofs(), -1);
  std::ptrdiff_t nv = 0;
  for (std::size_t i = 0; i < dofs.n_velocity_dofs(); ++i) {
    const bool vertex = i < 2 * dofs.n_vertices;
    if (vertex && on_boundary[i % dofs.n_vertices]) continue;
    idx[i] = nv++;
  }
  const auto np = static_cast<Eigen::Index>(dofs.n_pressure_dofs());

  // |v|_V^2 = |eps(v)|^2 = v^T A v / 2.
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nv, nv);
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    if (idx[r] < 0) continue;
    for (auto e = a.row_offsets[r]; e < a.row_offsets[r + 1]; ++e) {
      const auto c = idx[a.col_indices[e]];
      if (c >= 0) k(idx[r], c) = 0.5 * a.values[e];
    }
  }
  Eigen::MatrixXd bt = Eigen::MatrixXd::Zero(nv, np);
  for (std::size_t r = 0; r < d.n_rows; ++r) {
    for (auto e = d.row_offsets[r]; e < d.row_offsets[r + 1]; ++e) {
      const auto c = idx[d.col_indices[e]];
      if (c >= 0) bt(c, static_cast<Eigen::Index>(r)) = d.values[e];
    }
  }
  // The x-vertex block of the vector mass matrix is the scalar P1 mass.
  Eigen::MatrixXd mp = Eigen::MatrixXd::Zero(np, np);
  for (Eigen::Index r = 0; r < np; ++r) {
    const auto rr = static_cast<std::size_t>(r);
    for (auto e = m.row_offsets[rr]; e < m.row_offsets[rr + 1]; ++e) {
      if (m.col_indices[e] < static_cast<std::size_t>(np)) {
        mp(r, static_cast<Eigen::Index>(m.col_indices[e])) = m.values[e];
      }
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) throw std::runtime_error("inf-sup: stiffness not SPD");
  const Eigen::MatrixXd s = bt.transpose() * llt.solve(bt);
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (s + s.transpose()), mp,
                                                                      Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  // The constant pressure is in the kernel; skip it.
  const double cut = 1e-10 * ev.maxCoeff();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cut) return std::sqrt(ev(i));
  }
  return 0.0;
}

std::vector<CheckItem> run_checks(const CheckOptions& opts) {
  std::vector<CheckItem> items;
  auto fmt = [](auto&&... parts) {
    std::ostringstream os;
    os.precision(3);
    (os << ... << parts);
    return os.str();
  };

  for (int r = 1; r <= 5; ++r) {
    const auto m = check_monotonicity(r, opts.samples, opts.seed + static_cast<std::uint64_t>(r));
    items.push_back({fmt("monotonicity r=", r), m.passed(),
                     fmt("min slack ", m.min_slack_weighted, " / ", m.min_slack_strong, " over ",
                         m.samples, " pairs")});
  }

  double tri_worst = 0.0;
  int tri_bad = 0;
  for (int deg = 1; deg <= kMaxTriangleDegree; ++deg) {
    const auto rule =
        triangle_quadrature(opts.quadrature_override > 0 ? opts.quadrature_override : deg);
    const double e = triangle_exactness_error(rule, deg);
    tri_worst = std::max(tri_worst, e);
    if (!(e <= 1e-13)) tri_bad = tri_bad == 0 ? deg : tri_bad;
  }
  items.push_back(
      {"triangle quadrature exactness", tri_bad == 0,
       tri_bad == 0 ? fmt("max monomial error ", tri_worst)
                    : fmt("degree ", tri_bad, " not integrated exactly (error ", tri_worst, ")")});
  double edge_worst = 0.0;
  for (int deg = 1; deg <= 9; ++deg) {
    edge_worst = std::max(edge_worst, edge_exactness_error(edge_quadrature(deg), deg));
  }
  items.push_back(
      {"edge quadrature exactness", edge_worst <= 1e-14, fmt("max monomial error ", edge_worst)});

  const double patch =
      std::max(stokes_patch_error(4, [](double, double y) { return Vec2{y, 0.0}; }),
               stokes_patch_error(4, [](double x, double y) { return Vec2{x, -y}; }));
  items.push_back({"stokes patch test", patch <= 1e-9, fmt("nodal max error ", patch)});

  const double b4 = inf_sup_constant(4), b8 = inf_sup_constant(8), b16 = inf_sup_constant(16);
  const bool ok = b4 > 0.0 && b8 > 0.0 && b16 > 0.0 && std::min(b8, b16) >= 0.5 * b4;
  items.push_back({"inf-sup sweep", ok, fmt("n=4: ", b4, ", n=8: ", b8, ", n=16: ", b16)});
  return items;
}

}  // namespace cbfed
