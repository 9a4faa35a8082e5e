#include "cbfed/fespace.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cbfed {

std::array<std::size_t, 8> DofMap::element_velocity_dofs(const TriMesh& mesh, std::size_t t) const {
  const auto& tri = mesh.triangles[t];
  std::array<std::size_t, 8> dofs{};
  for (int c = 0; c < 2; ++c) {
    for (int a = 0; a < 3; ++a) dofs[4 * c + a] = vertex_dof(c, tri[a]);
    dofs[4 * c + 3] = bubble_dof(c, t);
  }
  return dofs;
}

DofMap build_dofmap(const TriMesh& mesh) {
  DofMap dm;
  dm.n_vertices = mesh.num_vertices();
  dm.n_triangles = mesh.num_triangles();
  const std::size_t nvel = dm.n_velocity_dofs();
  dm.constraints.fixed.assign(nvel, 0);
  dm.constraints.value.assign(nvel, 0.0);

  const auto g0 = boundary_vertices(mesh, BoundaryTag::Gamma0);
  const auto g1 = boundary_vertices(mesh, BoundaryTag::Gamma1);
  for (auto v : g0) {
    dm.constraints.fix(dm.vertex_dof(0, v), 0.0);
    dm.constraints.fix(dm.vertex_dof(1, v), 0.0);
  }
  for (auto v : g1) {
    dm.constraints.fix(dm.vertex_dof(1, v), 0.0);
    if (!std::binary_search(g0.begin(), g0.end(), v)) {
      dm.multiplier_vertices.push_back(v);
    }
  }
  std::sort(dm.multiplier_vertices.begin(), dm.multiplier_vertices.end(),
            [&](std::size_t a, std::size_t b) { return mesh.vertices[a].x < mesh.vertices[b].x; });
  return dm;
}

void p1b_shape(const std::array<double, 3>& l, std::array<double, 4>& value,
               std::array<Vec2, 4>& ref_grad) {
  value = {l[0], l[1], l[2], 27.0 * l[0] * l[1] * l[2]};
  ref_grad[0] = {-1.0, -1.0};
  ref_grad[1] = {1.0, 0.0};
  ref_grad[2] = {0.0, 1.0};
  // d/dxi = d/dl2 - d/dl1, d/deta = d/dl3 - d/dl1
  const double d1 = 27.0 * l[1] * l[2];
  const double d2 = 27.0 * l[0] * l[2];
  const double d3 = 27.0 * l[0] * l[1];
  ref_grad[3] = {d2 - d1, d3 - d1};
}

ShapeTable::ShapeTable(QuadratureRule r) : rule(std::move(r)) {
  value.resize(rule.size());
  ref_grad.resize(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    p1b_shape(rule.points[q], value[q], ref_grad[q]);
  }
}

ElementMap::ElementMap(const TriMesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles[t];
  const Point& a = mesh.vertices[tri[0]];
  const Point& b = mesh.vertices[tri[1]];
  const Point& c = mesh.vertices[tri[2]];
  origin = a;
  jac = {{{b.x - a.x, c.x - a.x}, {b.y - a.y, c.y - a.y}}};
  det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
  if (!(det > 0.0)) {
    throw std::runtime_error("degenerate or inverted triangle " + std::to_string(t));
  }
  const double inv = 1.0 / det;
  inv_jac = {{{jac[1][1] * inv, -jac[0][1] * inv}, {-jac[1][0] * inv, jac[0][0] * inv}}};
}

FeValue evaluate_fe_function(const TriMesh& mesh, const DofMap& dofs, std::span<const double> u,
                             std::span<const double> p, Point point) {
  const std::size_t t = mesh.locate(point);
  const ElementMap em(mesh, t);
  const double dx = point.x - em.origin.x;
  const double dy = point.y - em.origin.y;
  const double xi = em.inv_jac[0][0] * dx + em.inv_jac[0][1] * dy;
  const double eta = em.inv_jac[1][0] * dx + em.inv_jac[1][1] * dy;
  const std::array<double, 3> bary{1.0 - xi - eta, xi, eta};

  std::array<double, 4> val{};
  std::array<Vec2, 4> rg{};
  p1b_shape(bary, val, rg);
  const auto ed = dofs.element_velocity_dofs(mesh, t);

  FeValue out;
  for (int c = 0; c < 2; ++c) {
    for (int a = 0; a < 4; ++a) {
      const double coef = u[ed[4 * c + a]];
      const Vec2 g = em.grad(rg[a]);
      out.u[c] += coef * val[a];
      out.grad_u[c][0] += coef * g[0];
      out.grad_u[c][1] += coef * g[1];
    }
  }
  if (!p.empty()) {
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a) out.p += p[tri[a]] * val[a];
  }
  return out;
}

std::vector<double> interpolate_velocity(const TriMesh& mesh, const DofMap& dofs,
                                         const VectorField& field) {
  std::vector<double> u(dofs.n_velocity_dofs(), 0.0);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const auto val = field(mesh.vertices[v].x, mesh.vertices[v].y);
    u[dofs.vertex_dof(0, v)] = val[0];
    u[dofs.vertex_dof(1, v)] = val[1];
  }
  return u;
}

std::vector<double> interpolate_pressure(const TriMesh& mesh, const ScalarField& field) {
  std::vector<double> p(mesh.num_vertices());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    p[v] = field(mesh.vertices[v].x, mesh.vertices[v].y);
  }
  return p;
}

}  // namespace cbfed
