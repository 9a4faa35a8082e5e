#include "cbfed/manufactured.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

namespace cbfed {

std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::Ex1:
      return "ex1";
    case CaseId::Ex2:
      return "ex2";
    case CaseId::Ex3:
      return "ex3";
  }
  return "?";
}

std::optional<CaseId> parse_case_id(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (l == "ex1") return CaseId::Ex1;
  if (l == "ex2") return CaseId::Ex2;
  if (l == "ex3") return CaseId::Ex3;
  return std::nullopt;
}

ManufacturedCase manufactured_case(CaseId id) {
  ManufacturedCase c;
  c.id = id;
  switch (id) {
    case CaseId::Ex1:
      c.params = {.mu = 1.2,
                  .alpha = 2.0,
                  .beta = 1.5,
                  .kappa = 0.0,
                  .r = 3.0,
                  .q = 1.0,
                  .friction = {.a = 1.55, .b = 1.53, .rho = 8.0}};
      c.eta = 1.0;
      c.grids = {5, 10, 15, 20, 25, 30};
      c.n_ref = 160;
      break;
    case CaseId::Ex2:
      c.params = {.mu = 0.8,
                  .alpha = 1.5,
                  .beta = 2.0,
                  .kappa = -1.2,
                  .r = 3.0,
                  .q = 2.0,
                  .friction = {.a = 5.01, .b = 5.00, .rho = 8.0}};
      c.eta = 1.0;
      c.grids = {5, 10, 15, 20, 25, 30};
      c.n_ref = 160;
      break;
    case CaseId::Ex3:
      c.params = {.mu = 1.0,
                  .alpha = 0.5,
                  .beta = 1.2,
                  .kappa = -1.0,
                  .r = 4.0,
                  .q = 3.0,
                  .friction = {.a = 3.25, .b = 3.20, .rho = 6.0}};
      c.eta = 0.8;
      c.grids = {8, 16, 24, 32, 40, 48};
      c.n_ref = 192;
      break;
  }
  return c;
}

// Examples 1 and 3 share the stream function psi = (x^3 - x^2)(y^3 - y^2)
// with u = sign * (-d psi / dy, d psi / dx); Example 3 flips the sign.
namespace {

struct Poly {
  double x, y;
  double A() const { return x * x * x - x * x; }
  double A1() const { return 3 * x * x - 2 * x; }
  double A2() const { return 6 * x - 2; }
  double C() const { return y * y * y - y * y; }
  double C1() const { return 3 * y * y - 2 * y; }
  double C2() const { return 6 * y - 2; }
};

double poly_sign(CaseId id) { return id == CaseId::Ex3 ? -1.0 : 1.0; }

constexpr double k2pi = 2.0 * std::numbers::pi;

}  // namespace

Vec2 ManufacturedCase::velocity(double x, double y) const {
  if (id == CaseId::Ex2) {
    return {-std::cos(k2pi * x) * std::sin(k2pi * y) + std::sin(k2pi * y),
            std::sin(k2pi * x) * std::cos(k2pi * y) - std::sin(k2pi * x)};
  }
  const Poly P{x, y};
  const double s = poly_sign(id);
  return {-s * P.A() * P.C1(), s * P.A1() * P.C()};
}

Mat2 ManufacturedCase::velocity_gradient(double x, double y) const {
  if (id == CaseId::Ex2) {
    const double k = k2pi;
    const double sx = std::sin(k * x), cx = std::cos(k * x);
    const double sy = std::sin(k * y), cy = std::cos(k * y);
    return {{{k * sy * sx, k * cy * (1.0 - cx)}, {k * cx * (cy - 1.0), -k * sx * sy}}};
  }
  const Poly P{x, y};
  const double s = poly_sign(id);
  return {{{-s * P.A1() * P.C1(), -s * P.A() * P.C2()}, {s * P.A2() * P.C(), s * P.A1() * P.C1()}}};
}

Vec2 ManufacturedCase::velocity_laplacian(double x, double y) const {
  if (id == CaseId::Ex2) {
    const double k2 = k2pi * k2pi;
    return {k2 * std::sin(k2pi * y) * (2.0 * std::cos(k2pi * x) - 1.0),
            -k2 * std::sin(k2pi * x) * (2.0 * std::cos(k2pi * y) - 1.0)};
  }
  const Poly P{x, y};
  const double s = poly_sign(id);
  return {-s * (P.A2() * P.C1() + P.A() * 6.0), s * (6.0 * P.C() + P.A1() * P.C2())};
}

double ManufacturedCase::pressure(double x, double y) const {
  if (id == CaseId::Ex2) return k2pi * (std::cos(k2pi * y) - std::cos(k2pi * x));
  return (2.0 * x - 1.0) * (2.0 * y - 1.0);
}

Vec2 ManufacturedCase::pressure_gradient(double x, double y) const {
  if (id == CaseId::Ex2) {
    const double k2 = k2pi * k2pi;
    return {k2 * std::sin(k2pi * x), -k2 * std::sin(k2pi * y)};
  }
  return {2.0 * (2.0 * y - 1.0), 2.0 * (2.0 * x - 1.0)};
}

Vec2 forcing(const ManufacturedCase& c, Point pt) {
  const auto& pr = c.params;
  const Vec2 u = c.velocity(pt.x, pt.y);
  const Mat2 g = c.velocity_gradient(pt.x, pt.y);
  const Vec2 lap = c.velocity_laplacian(pt.x, pt.y);
  const Vec2 gp = c.pressure_gradient(pt.x, pt.y);
  const double mag = std::hypot(u[0], u[1]);
  const double damp = pr.beta * std::pow(mag, pr.r - 1.0);
  const double pump = pr.kappa != 0.0 ? pr.kappa * std::pow(mag, pr.q - 1.0) : 0.0;
  Vec2 f{};
  for (int d = 0; d < 2; ++d) {
    f[d] = -pr.mu * lap[d] + (u[0] * g[d][0] + u[1] * g[d][1]) + pr.alpha * u[d] + damp * u[d] +
           pump * u[d] + gp[d];
  }
  return f;
}

VectorField forcing_field(const ManufacturedCase& c) {
  return [c](double x, double y) { return forcing(c, {x, y}); };
}

namespace {

template <class F>
double diff1(F f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

template <class F>
double diff2(F f, double x, double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

}  // namespace

double forcing_consistency_error(const ManufacturedCase& c, std::size_t points,
                                 std::uint64_t seed) {
  constexpr double h = 1e-3;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> coord(0.01, 0.99);
  const auto& pr = c.params;
  double worst = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    const double x = coord(gen), y = coord(gen);
    const Vec2 u = c.velocity(x, y);
    const double mag = std::hypot(u[0], u[1]);
    double react = pr.alpha + pr.beta * std::pow(mag, pr.r - 1.0);
    if (pr.kappa != 0.0) react += pr.kappa * std::pow(mag, pr.q - 1.0);
    const Vec2 f = forcing(c, {x, y});
    double dev = 0.0;
    for (int i = 0; i < 2; ++i) {
      auto ux = [&](double s) { return c.velocity(s, y)[i]; };
      auto uy = [&](double s) { return c.velocity(x, s)[i]; };
      const double gp = i == 0 ? diff1([&](double s) { return c.pressure(s, y); }, x, h)
                               : diff1([&](double s) { return c.pressure(x, s); }, y, h);
      const double g = -pr.mu * (diff2(ux, x, h) + diff2(uy, y, h)) + u[0] * diff1(ux, x, h) +
                       u[1] * diff1(uy, y, h) + react * u[i] + gp;
      dev += (g - f[i]) * (g - f[i]);
    }
    worst = std::max(worst, std::sqrt(dev) / std::max({1.0, std::abs(f[0]), std::abs(f[1])}));
  }
  return worst;
}

ErrorNorms error_norms(const TriMesh& mesh, const DofMap& dofs, const DiscreteState& state,
                       const TriMesh& ref_mesh, const DofMap& ref_dofs,
                       const DiscreteState& reference, int degree) {
  if (mesh.n == 0 || ref_mesh.n == 0) throw std::invalid_argument("error_norms: empty mesh");
  const QuadratureRule rule = triangle_quadrature(degree);
  // Each coarse triangle is cut into m x m similar pieces no larger than a
  // reference cell. On nested grids every piece is one reference triangle.
  const std::size_t m = (ref_mesh.n + mesh.n - 1) / mesh.n;
  const double md = static_cast<double>(m);
  std::vector<std::array<std::array<double, 2>, 3>> pieces;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i + j < m; ++i) {
      const double a = static_cast<double>(i), b = static_cast<double>(j);
      pieces.push_back({{{a, b}, {a + 1, b}, {a, b + 1}}});
      if (i + j + 1 < m) pieces.push_back({{{a + 1, b}, {a + 1, b + 1}, {a, b + 1}}});
    }
  }
  double eu = 0.0, ev = 0.0, ep = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const ElementMap em(mesh, t);
    const double wscale = em.det / (md * md);
    for (const auto& pc : pieces) {
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& l = rule.points[q];
        const double xi = (l[0] * pc[0][0] + l[1] * pc[1][0] + l[2] * pc[2][0]) / md;
        const double et = (l[0] * pc[0][1] + l[1] * pc[1][1] + l[2] * pc[2][1]) / md;
        const Point x = em.map({1.0 - xi - et, xi, et});
        const double w = rule.weights[q] * wscale;
        const FeValue fa = evaluate_fe_function(mesh, dofs, state.u, state.p, x);
        const FeValue fb = evaluate_fe_function(ref_mesh, ref_dofs, reference.u, reference.p, x);
        const double du0 = fa.u[0] - fb.u[0];
        const double du1 = fa.u[1] - fb.u[1];
        eu += w * (du0 * du0 + du1 * du1);
        const double e00 = fa.grad_u[0][0] - fb.grad_u[0][0];
        const double e11 = fa.grad_u[1][1] - fb.grad_u[1][1];
        const double e01 =
            0.5 * (fa.grad_u[0][1] + fa.grad_u[1][0] - fb.grad_u[0][1] - fb.grad_u[1][0]);
        ev += w * (e00 * e00 + e11 * e11 + 2.0 * e01 * e01);
        const double dp = fa.p - fb.p;
        ep += w * dp * dp;
      }
    }
  }
  return {std::sqrt(eu), std::sqrt(ev), std::sqrt(ep)};
}

double observed_order(double e1, double e2, double h1, double h2) {
  if (!(e1 > 0.0) || !(e2 > 0.0) || h1 == h2) return std::numeric_limits<double>::quiet_NaN();
  return std::log(e1 / e2) / std::log(h1 / h2);
}

std::vector<ConvergenceRow> convergence_table(const std::vector<std::size_t>& grids,
                                              const std::vector<ErrorNorms>& errors) {
  if (grids.size() != errors.size()) {
    throw std::invalid_argument("convergence_table: grids and errors differ in length");
  }
  std::vector<ConvergenceRow> rows(grids.size());
  for (std::size_t i = 0; i < grids.size(); ++i) {
    rows[i].grid = grids[i];
    rows[i].err = errors[i];
    if (i == 0) continue;
    const double h1 = 1.0 / static_cast<double>(grids[i - 1]);
    const double h2 = 1.0 / static_cast<double>(grids[i]);
    const auto& e1 = errors[i - 1];
    const auto& e2 = errors[i];
    rows[i].ord_l2_u = observed_order(e1.l2_u, e2.l2_u, h1, h2);
    rows[i].ord_v_u = observed_order(e1.v_u, e2.v_u, h1, h2);
    rows[i].ord_l2_p = observed_order(e1.l2_p, e2.l2_p, h1, h2);
  }
  return rows;
}

namespace {

struct SolvedGrid {
  TriMesh mesh;
  DofMap dofs;
  DiscreteState state;
  GridRun run;
};

SolvedGrid solve_grid(const ManufacturedCase& c, std::size_t n, const SolverConfig& config) {
  SolvedGrid g;
  g.mesh = unit_square_mesh(n);
  const auto start = std::chrono::steady_clock::now();
  const CbfedSolver solver(g.mesh, c.params, config, forcing_field(c));
  SolveResult res = solver.solve();
  g.run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  g.dofs = solver.dofs();
  g.run.grid = n;
  g.run.report = std::move(res.report);
  g.run.complementarity = check_complementarity(g.dofs, res.state);
  g.state = std::move(res.state);
  return g;
}

}  // namespace

ConvergenceStudy run_convergence_study(const ManufacturedCase& c,
                                       const std::vector<std::size_t>& grids, std::size_t n_ref,
                                       const SolverConfig& config) {
  if (grids.empty()) throw std::invalid_argument("convergence study needs at least one grid");
  for (std::size_t i = 0; i < grids.size(); ++i) {
    if (grids[i] == 0 || grids[i] >= n_ref) {
      throw std::invalid_argument("grid " + std::to_string(grids[i]) +
                                  " must be positive and coarser than the reference grid " +
                                  std::to_string(n_ref));
    }
    if (i > 0 && grids[i] <= grids[i - 1]) {
      throw std::invalid_argument("grids must be strictly ascending");
    }
  }
  ConvergenceStudy study;
  SolvedGrid ref = solve_grid(c, n_ref, config);
  study.reference = ref.run;
  std::vector<ErrorNorms> errors;
  for (auto n : grids) {
    SolvedGrid g = solve_grid(c, n, config);
    errors.push_back(error_norms(g.mesh, g.dofs, g.state, ref.mesh, ref.dofs, ref.state));
    study.runs.push_back(std::move(g.run));
  }
  study.rows = convergence_table(grids, errors);
  return study;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "grid,e_l2_u,ord_l2_u,e_V_u,ord_V_u,e_l2_p,ord_l2_p\n";
  char buf[64];
  auto err = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return std::string(buf);
  };
  auto ord = [&](double v) {
    if (std::isnan(v)) return std::string();
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    os << r.grid << ',' << err(r.err.l2_u) << ',' << ord(r.ord_l2_u) << ',' << err(r.err.v_u) << ','
       << ord(r.ord_v_u) << ',' << err(r.err.l2_p) << ',' << ord(r.ord_l2_p) << '\n';
  }
}

}  // namespace cbfed
