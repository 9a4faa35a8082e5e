#include "cbfed/forms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cbfed {

void FrictionLaw::validate() const {
  if (!(a > b && b > 0.0)) {
    throw std::invalid_argument("friction law requires a > b > 0");
  }
  if (!(rho > 0.0)) {
    throw std::invalid_argument("friction law requires rho > 0");
  }
}

double FrictionLaw::omega(double t) const { return (a - b) * std::exp(-rho * t) + b; }

void ProblemParams::validate() const {
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(kappa <= 0.0)) throw std::invalid_argument("kappa must be nonpositive");
  if (!(r >= 1.0)) throw std::invalid_argument("r must be >= 1");
  if (kappa != 0.0 && !(q >= 1.0 && q < r)) {
    throw std::invalid_argument("pumping exponent must satisfy 1 <= q < r");
  }
  friction.validate();
}

namespace {

using Local88 = std::array<std::array<double, 8>, 8>;  // [test][trial]
using Local8 = std::array<double, 8>;
using Local38 = std::array<std::array<double, 8>, 3>;  // [pressure test][velocity trial]

/// Per-element quadrature data: weights scaled to the physical element,
/// physical gradients, and the linearization point u_n at each point.
struct ElementData {
  std::size_t nq = 0;
  std::vector<double> jxw;
  std::vector<std::array<Vec2, 4>> grad;
  std::vector<Vec2> u;
  std::vector<Mat2> grad_u;

  void reinit(const ShapeTable& shapes, const ElementMap& em) {
    nq = shapes.rule.size();
    jxw.resize(nq);
    grad.resize(nq);
    for (std::size_t q = 0; q < nq; ++q) {
      jxw[q] = shapes.rule.weights[q] * em.det;
      for (int a = 0; a < 4; ++a) grad[q][a] = em.grad(shapes.ref_grad[q][a]);
    }
  }

  void eval_velocity(const ShapeTable& shapes, std::span<const double> coef,
                     const std::array<std::size_t, 8>& ed) {
    u.assign(nq, Vec2{});
    grad_u.assign(nq, Mat2{});
    if (coef.empty()) return;
    for (std::size_t q = 0; q < nq; ++q) {
      for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < 4; ++a) {
          const double k = coef[ed[4 * c + a]];
          u[q][c] += k * shapes.value[q][a];
          grad_u[q][c][0] += k * grad[q][a][0];
          grad_u[q][c][1] += k * grad[q][a][1];
        }
      }
    }
  }
};

void add_strain(const ElementData& ed, double coef, Local88& m) {
  for (std::size_t q = 0; q < ed.nq; ++q) {
    const double w = coef * ed.jxw[q];
    const auto& g = ed.grad[q];
    for (int j = 0; j < 8; ++j) {
      const int d = j / 4;
      const auto& gj = g[j % 4];
      for (int i = 0; i < 8; ++i) {
        const int c = i / 4;
        const auto& gi = g[i % 4];
        double v = gi[d] * gj[c];
        if (c == d) v += gi[0] * gj[0] + gi[1] * gj[1];
        m[j][i] += w * v;
      }
    }
  }
}

void add_mass(const ElementData& ed, const ShapeTable& shapes, double coef, Local88& m) {
  for (std::size_t q = 0; q < ed.nq; ++q) {
    const double w = coef * ed.jxw[q];
    const auto& phi = shapes.value[q];
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        const double v = w * phi[a] * phi[b];
        m[a][b] += v;
        m[4 + a][4 + b] += v;
      }
    }
  }
}

void add_convection(const ElementData& ed, const ShapeTable& shapes, Local88& m, Local8& rhs) {
  for (std::size_t q = 0; q < ed.nq; ++q) {
    const double w = ed.jxw[q];
    const auto& phi = shapes.value[q];
    const auto& g = ed.grad[q];
    const Vec2& u = ed.u[q];
    const Mat2& gu = ed.grad_u[q];
    std::array<double, 4> adv{};
    for (int a = 0; a < 4; ++a) adv[a] = u[0] * g[a][0] + u[1] * g[a][1];
    for (int j = 0; j < 8; ++j) {
      const int d = j / 4;
      const double pj = w * phi[j % 4];
      for (int i = 0; i < 8; ++i) {
        const int c = i / 4;
        double v = phi[i % 4] * gu[d][c];
        if (c == d) v += adv[i % 4];
        m[j][i] += pj * v;
      }
      rhs[j] += pj * (u[0] * gu[d][0] + u[1] * gu[d][1]);
    }
  }
}

void add_damping(const ElementData& ed, const ShapeTable& shapes, double c, double s,
                 double eps_reg, Local88& m, Local8& rhs) {
  for (std::size_t q = 0; q < ed.nq; ++q) {
    const double w = c * ed.jxw[q];
    const auto& phi = shapes.value[q];
    const Vec2& u = ed.u[q];
    const double mag2 = u[0] * u[0] + u[1] * u[1];
    const double mag = std::sqrt(mag2);
    const double iso = std::pow(mag, s - 1.0);
    double aniso = 0.0;
    if (s != 1.0) {
      const double base = s < 3.0 ? std::sqrt(mag2 + eps_reg * eps_reg) : mag;
      aniso = (s - 1.0) * std::pow(base, s - 3.0);
    }
    const double uu[2][2] = {{u[0] * u[0], u[0] * u[1]}, {u[1] * u[0], u[1] * u[1]}};
    for (int j = 0; j < 8; ++j) {
      const int d = j / 4;
      const double pj = w * phi[j % 4];
      for (int i = 0; i < 8; ++i) {
        const int cc = i / 4;
        double v = aniso * uu[d][cc];
        if (cc == d) v += iso;
        m[j][i] += pj * phi[i % 4] * v;
      }
      rhs[j] += pj * (s - 1.0) * iso * u[d];
    }
  }
}

void add_divergence(const ElementData& ed, const ShapeTable& shapes, Local38& m) {
  for (std::size_t q = 0; q < ed.nq; ++q) {
    const double w = ed.jxw[q];
    const auto& phi = shapes.value[q];
    const auto& g = ed.grad[q];
    for (int a = 0; a < 3; ++a) {
      for (int i = 0; i < 8; ++i) {
        m[a][i] -= w * phi[a] * g[i % 4][i / 4];
      }
    }
  }
}

void add_forcing(const ElementData& ed, const ShapeTable& shapes, const ElementMap& em,
                 const VectorField& f, Local8& rhs) {
  for (std::size_t q = 0; q < ed.nq; ++q) {
    const Point x = em.map(shapes.rule.points[q]);
    const Vec2 fv = f(x.x, x.y);
    const auto& phi = shapes.value[q];
    for (int j = 0; j < 8; ++j) rhs[j] += ed.jxw[q] * fv[j / 4] * phi[j % 4];
  }
}

/// CSR pattern with a stored zero at every position an element touches.
class PatternBuilder {
 public:
  PatternBuilder(std::size_t n_rows, std::size_t n_cols) : cols_(n_rows), n_cols_(n_cols) {}
  void add(std::size_t r, std::size_t c) { cols_[r].push_back(c); }
  CsrMatrix build() {
    CsrMatrix m;
    m.n_rows = cols_.size();
    m.n_cols = n_cols_;
    m.row_offsets.assign(m.n_rows + 1, 0);
    for (std::size_t r = 0; r < m.n_rows; ++r) {
      auto& c = cols_[r];
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      m.col_indices.insert(m.col_indices.end(), c.begin(), c.end());
      m.row_offsets[r + 1] = m.col_indices.size();
      std::vector<std::size_t>().swap(c);
    }
    m.values.assign(m.col_indices.size(), 0.0);
    return m;
  }

 private:
  std::vector<std::vector<std::size_t>> cols_;
  std::size_t n_cols_;
};

void add_entry(CsrMatrix& m, std::size_t r, std::size_t c, double v) {
  const auto first = m.col_indices.begin() + static_cast<std::ptrdiff_t>(m.row_offsets[r]);
  const auto last = m.col_indices.begin() + static_cast<std::ptrdiff_t>(m.row_offsets[r + 1]);
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) {
    throw std::logic_error("sparsity pattern is missing an element entry");
  }
  m.values[static_cast<std::size_t>(it - m.col_indices.begin())] += v;
}

CsrMatrix velocity_pattern(const TriMesh& mesh, const DofMap& dofs) {
  PatternBuilder pb(dofs.n_velocity_dofs(), dofs.n_velocity_dofs());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto ed = dofs.element_velocity_dofs(mesh, t);
    for (auto r : ed) {
      for (auto c : ed) pb.add(r, c);
    }
  }
  return pb.build();
}

template <class Kernel>
CsrMatrix assemble_velocity_operator(const TriMesh& mesh, const DofMap& dofs,
                                     const AssemblyOptions& opts, std::span<const double> u_n,
                                     DenseVector* rhs, Kernel&& kernel) {
  const ShapeTable shapes(triangle_quadrature(opts.volume_degree));
  CsrMatrix m = velocity_pattern(mesh, dofs);
  if (rhs != nullptr) rhs->assign(dofs.n_velocity_dofs(), 0.0);
  ElementData data;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const ElementMap em(mesh, t);
    const auto ed = dofs.element_velocity_dofs(mesh, t);
    data.reinit(shapes, em);
    data.eval_velocity(shapes, u_n, ed);
    Local88 local{};
    Local8 local_rhs{};
    kernel(data, shapes, local, local_rhs);
    for (int j = 0; j < 8; ++j) {
      for (int i = 0; i < 8; ++i) add_entry(m, ed[j], ed[i], local[j][i]);
      if (rhs != nullptr) (*rhs)[ed[j]] += local_rhs[j];
    }
  }
  return m;
}

void check_velocity_length(const DofMap& dofs, std::span<const double> u) {
  if (u.size() != dofs.n_velocity_dofs()) {
    throw std::invalid_argument("velocity vector has " + std::to_string(u.size()) +
                                " entries, expected " + std::to_string(dofs.n_velocity_dofs()));
  }
}

}  // namespace

CsrMatrix assemble_a(const TriMesh& mesh, const DofMap& dofs, const AssemblyOptions& opts) {
  return assemble_velocity_operator(
      mesh, dofs, opts, {}, nullptr,
      [](const ElementData& d, const ShapeTable&, Local88& m, Local8&) { add_strain(d, 1.0, m); });
}

CsrMatrix assemble_a0(const TriMesh& mesh, const DofMap& dofs, const AssemblyOptions& opts) {
  return assemble_velocity_operator(mesh, dofs, opts, {}, nullptr,
                                    [](const ElementData& d, const ShapeTable& s, Local88& m,
                                       Local8&) { add_mass(d, s, 1.0, m); });
}

CsrMatrix assemble_d(const TriMesh& mesh, const DofMap& dofs, const AssemblyOptions& opts) {
  const ShapeTable shapes(triangle_quadrature(opts.volume_degree));
  PatternBuilder pb(dofs.n_pressure_dofs(), dofs.n_velocity_dofs());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto ed = dofs.element_velocity_dofs(mesh, t);
    for (auto v : mesh.triangles[t]) {
      for (auto c : ed) pb.add(v, c);
    }
  }
  CsrMatrix m = pb.build();
  ElementData data;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const ElementMap em(mesh, t);
    const auto ed = dofs.element_velocity_dofs(mesh, t);
    data.reinit(shapes, em);
    Local38 local{};
    add_divergence(data, shapes, local);
    for (int a = 0; a < 3; ++a) {
      for (int i = 0; i < 8; ++i) add_entry(m, mesh.triangles[t][a], ed[i], local[a][i]);
    }
  }
  return m;
}

LinearizedTerm assemble_convection_newton(const TriMesh& mesh, const DofMap& dofs,
                                          std::span<const double> u_n,
                                          const AssemblyOptions& opts) {
  check_velocity_length(dofs, u_n);
  LinearizedTerm out;
  out.matrix = assemble_velocity_operator(mesh, dofs, opts, u_n, &out.rhs,
                                          [](const ElementData& d, const ShapeTable& s, Local88& m,
                                             Local8& r) { add_convection(d, s, m, r); });
  return out;
}

LinearizedTerm assemble_damping_newton(const TriMesh& mesh, const DofMap& dofs,
                                       std::span<const double> u_n, double c, double s,
                                       const AssemblyOptions& opts) {
  if (!(s >= 1.0)) {
    throw std::invalid_argument("damping exponent must be >= 1");
  }
  check_velocity_length(dofs, u_n);
  LinearizedTerm out;
  out.matrix =
      assemble_velocity_operator(mesh, dofs, opts, u_n, &out.rhs,
                                 [&](const ElementData& d, const ShapeTable& sh, Local88& m,
                                     Local8& r) { add_damping(d, sh, c, s, opts.eps_reg, m, r); });
  return out;
}

DenseVector assemble_slip_rhs(const TriMesh& mesh, const DofMap& dofs, const FrictionLaw& law,
                              std::span<const double> u_n, std::span<const double> lambda,
                              const AssemblyOptions& opts) {
  check_velocity_length(dofs, u_n);
  if (lambda.size() != dofs.n_multiplier_dofs()) {
    throw std::invalid_argument("multiplier vector has wrong length");
  }
  std::vector<double> lambda_at_vertex(mesh.num_vertices(), 0.0);
  for (std::size_t k = 0; k < dofs.multiplier_vertices.size(); ++k) {
    lambda_at_vertex[dofs.multiplier_vertices[k]] = lambda[k];
  }
  const QuadratureRule rule = edge_quadrature(opts.edge_degree);
  DenseVector rhs(dofs.n_velocity_dofs(), 0.0);
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != BoundaryTag::Gamma1) continue;
    const Point& p0 = mesh.vertices[e.v0];
    const Point& p1 = mesh.vertices[e.v1];
    const double len = std::hypot(p1.x - p0.x, p1.y - p0.y);
    const std::size_t d0 = dofs.vertex_dof(0, e.v0);
    const std::size_t d1 = dofs.vertex_dof(0, e.v1);
    // Flat top boundary: tau = (1, 0), so u_tau is the x-component.
    const double ut0 = u_n[d0];
    const double ut1 = u_n[d1];
    const double l0 = lambda_at_vertex[e.v0];
    const double l1 = lambda_at_vertex[e.v1];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = rule.points[q][0];
      const double ut = (1.0 - t) * ut0 + t * ut1;
      const double lam = (1.0 - t) * l0 + t * l1;
      const double g = rule.weights[q] * len * law.omega(std::abs(ut)) * lam;
      rhs[d0] -= g * (1.0 - t);
      rhs[d1] -= g * t;
    }
  }
  return rhs;
}

DenseVector assemble_forcing(const TriMesh& mesh, const DofMap& dofs, const VectorField& f,
                             const AssemblyOptions& opts) {
  const ShapeTable shapes(triangle_quadrature(opts.volume_degree));
  DenseVector rhs(dofs.n_velocity_dofs(), 0.0);
  ElementData data;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const ElementMap em(mesh, t);
    data.reinit(shapes, em);
    Local8 local{};
    add_forcing(data, shapes, em, f, local);
    const auto ed = dofs.element_velocity_dofs(mesh, t);
    for (int j = 0; j < 8; ++j) rhs[ed[j]] += local[j];
  }
  return rhs;
}

DenseVector pressure_mean_weights(const TriMesh& mesh) {
  DenseVector w(mesh.num_vertices(), 0.0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double third = mesh.signed_area(t) / 3.0;
    for (auto v : mesh.triangles[t]) w[v] += third;
  }
  return w;
}

SystemLayout::SystemLayout(const DofMap& dofs, VelocityConstraints c)
    : constraints(std::move(c)), n_pressure(dofs.n_pressure_dofs()) {
  free_index.assign(dofs.n_velocity_dofs(), -1);
  for (std::size_t i = 0; i < free_index.size(); ++i) {
    if (!constraints.is_fixed(i)) free_index[i] = static_cast<std::ptrdiff_t>(n_free++);
  }
}

DenseVector SystemLayout::restrict_velocity(std::span<const double> full) const {
  DenseVector out(n_free);
  for (std::size_t i = 0; i < free_index.size(); ++i) {
    if (free_index[i] >= 0) out[static_cast<std::size_t>(free_index[i])] = full[i];
  }
  return out;
}

DenseVector SystemLayout::velocity(std::span<const double> x) const {
  DenseVector u(free_index.size());
  for (std::size_t i = 0; i < free_index.size(); ++i) {
    u[i] = free_index[i] >= 0 ? x[static_cast<std::size_t>(free_index[i])] : constraints.value[i];
  }
  return u;
}

DenseVector SystemLayout::pressure(std::span<const double> x) const {
  const auto first = x.begin() + static_cast<std::ptrdiff_t>(pressure_offset());
  return {first, first + static_cast<std::ptrdiff_t>(n_pressure)};
}

SystemAssembler::SystemAssembler(const TriMesh& mesh, const DofMap& dofs, AssemblyOptions opts)
    : SystemAssembler(mesh, dofs, dofs.constraints, opts) {}

SystemAssembler::SystemAssembler(const TriMesh& mesh, const DofMap& dofs,
                                 VelocityConstraints constraints, AssemblyOptions opts)
    : mesh_(&mesh),
      dofs_(&dofs),
      opts_(opts),
      layout_(dofs, std::move(constraints)),
      mean_weights_(pressure_mean_weights(mesh)) {
  const auto& fi = layout_.free_index;
  const std::size_t po = layout_.pressure_offset();
  PatternBuilder pb(layout_.size(), layout_.size());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto ed = dofs.element_velocity_dofs(mesh, t);
    for (auto r : ed) {
      if (fi[r] < 0) continue;
      const auto rr = static_cast<std::size_t>(fi[r]);
      for (auto c : ed) {
        if (fi[c] >= 0) pb.add(rr, static_cast<std::size_t>(fi[c]));
      }
      for (auto v : mesh.triangles[t]) {
        pb.add(rr, po + v);
        pb.add(po + v, rr);
      }
    }
  }
  for (std::size_t v = 0; v < layout_.n_pressure; ++v) {
    pb.add(layout_.mean_row(), po + v);
    pb.add(po + v, layout_.mean_row());
  }
  pattern_ = pb.build();
}

AssembledSystem SystemAssembler::assemble(const ProblemParams& params, std::span<const double> u_n,
                                          const VectorField& f, bool include_convection) const {
  const TriMesh& mesh = *mesh_;
  const DofMap& dofs = *dofs_;
  check_velocity_length(dofs, u_n);
  const ShapeTable shapes(triangle_quadrature(opts_.volume_degree));
  const auto& fi = layout_.free_index;
  const auto& cv = layout_.constraints.value;
  const std::size_t po = layout_.pressure_offset();

  AssembledSystem sys;
  sys.layout = layout_;
  sys.matrix = pattern_;
  sys.rhs.assign(layout_.size(), 0.0);

  ElementData data;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const ElementMap em(mesh, t);
    const auto ed = dofs.element_velocity_dofs(mesh, t);
    data.reinit(shapes, em);
    data.eval_velocity(shapes, u_n, ed);

    Local88 k{};
    Local8 rhs{};
    Local38 div{};
    add_strain(data, params.mu, k);
    if (params.alpha != 0.0) add_mass(data, shapes, params.alpha, k);
    if (include_convection) add_convection(data, shapes, k, rhs);
    if (params.beta != 0.0) add_damping(data, shapes, params.beta, params.r, opts_.eps_reg, k, rhs);
    if (params.kappa != 0.0) {
      add_damping(data, shapes, params.kappa, params.q, opts_.eps_reg, k, rhs);
    }
    if (f) add_forcing(data, shapes, em, f, rhs);
    add_divergence(data, shapes, div);

    const auto& tri = mesh.triangles[t];
    for (int j = 0; j < 8; ++j) {
      if (fi[ed[j]] < 0) continue;
      const auto row = static_cast<std::size_t>(fi[ed[j]]);
      sys.rhs[row] += rhs[j];
      for (int i = 0; i < 8; ++i) {
        if (fi[ed[i]] >= 0) {
          add_entry(sys.matrix, row, static_cast<std::size_t>(fi[ed[i]]), k[j][i]);
        } else {
          sys.rhs[row] -= k[j][i] * cv[ed[i]];
        }
      }
      // d(v, p) block: transpose of the divergence rows.
      for (int a = 0; a < 3; ++a) add_entry(sys.matrix, row, po + tri[a], div[a][j]);
    }
    for (int a = 0; a < 3; ++a) {
      const std::size_t prow = po + tri[a];
      for (int i = 0; i < 8; ++i) {
        if (fi[ed[i]] >= 0) {
          add_entry(sys.matrix, prow, static_cast<std::size_t>(fi[ed[i]]), div[a][i]);
        } else {
          sys.rhs[prow] -= div[a][i] * cv[ed[i]];
        }
      }
    }
  }
  for (std::size_t v = 0; v < layout_.n_pressure; ++v) {
    add_entry(sys.matrix, layout_.mean_row(), po + v, mean_weights_[v]);
    add_entry(sys.matrix, po + v, layout_.mean_row(), mean_weights_[v]);
  }
  return sys;
}

AssembledSystem assemble_system(const TriMesh& mesh, const DofMap& dofs,
                                const ProblemParams& params, std::span<const double> u_n,
                                std::span<const double> lambda_n, const VectorField& f,
                                const AssemblyOptions& opts) {
  const SystemAssembler assembler(mesh, dofs, opts);
  AssembledSystem sys = assembler.assemble(params, u_n, f);
  const auto slip = assemble_slip_rhs(mesh, dofs, params.friction, u_n, lambda_n, opts);
  const auto slip_free = sys.layout.restrict_velocity(slip);
  for (std::size_t i = 0; i < slip_free.size(); ++i) sys.rhs[i] += slip_free[i];
  return sys;
}

}  // namespace cbfed
