#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cbfed/mesh.hpp"
#include "cbfed/quadrature.hpp"

namespace cbfed {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;  // m[i][j] = d u_i / d x_j

/// Prescribed values for velocity dofs; `fixed[i]` marks dof i as eliminated.
struct VelocityConstraints {
  std::vector<char> fixed;
  std::vector<double> value;

  [[nodiscard]] bool is_fixed(std::size_t dof) const { return fixed[dof] != 0; }
  void fix(std::size_t dof, double v) {
    fixed[dof] = 1;
    value[dof] = v;
  }
};

/// Global numbering for the MINI (P1-bubble / P1) pair plus the slip multiplier:
///   [x vertex | y vertex | x bubble | y bubble | pressure | multiplier | mean row]
struct DofMap {
  std::size_t n_vertices = 0;
  std::size_t n_triangles = 0;
  /// Gamma1 vertices that are not Gamma0 vertices, ordered by x.
  std::vector<std::size_t> multiplier_vertices;
  /// Homogeneous constraints: u = 0 at Gamma0 vertices, u_y = 0 at Gamma1 vertices.
  VelocityConstraints constraints;

  [[nodiscard]] std::size_t n_velocity_dofs() const { return 2 * (n_vertices + n_triangles); }
  [[nodiscard]] std::size_t n_pressure_dofs() const { return n_vertices; }
  [[nodiscard]] std::size_t n_multiplier_dofs() const { return multiplier_vertices.size(); }

  [[nodiscard]] std::size_t vertex_dof(int comp, std::size_t v) const {
    return static_cast<std::size_t>(comp) * n_vertices + v;
  }
  [[nodiscard]] std::size_t bubble_dof(int comp, std::size_t t) const {
    return 2 * n_vertices + static_cast<std::size_t>(comp) * n_triangles + t;
  }
  [[nodiscard]] std::size_t pressure_dof(std::size_t v) const { return n_velocity_dofs() + v; }
  [[nodiscard]] std::size_t multiplier_dof(std::size_t k) const {
    return n_velocity_dofs() + n_pressure_dofs() + k;
  }
  [[nodiscard]] std::size_t mean_constraint_row() const {
    return n_velocity_dofs() + n_pressure_dofs() + n_multiplier_dofs();
  }
  [[nodiscard]] std::size_t total_dofs() const { return mean_constraint_row() + 1; }

  /// The 8 velocity dofs of triangle t: x-component (3 vertices, bubble) then y.
  [[nodiscard]] std::array<std::size_t, 8> element_velocity_dofs(const TriMesh& mesh,
                                                                 std::size_t t) const;
};

DofMap build_dofmap(const TriMesh& mesh);

/// Values and reference gradients of the three P1 functions and the bubble
/// 27 l1 l2 l3 at the points of a triangle rule.
struct ShapeTable {
  QuadratureRule rule;
  std::vector<std::array<double, 4>> value;
  std::vector<std::array<Vec2, 4>> ref_grad;

  explicit ShapeTable(QuadratureRule r);
};

/// Evaluates the 4 P1b shape functions and their reference gradients at a
/// barycentric point.
void p1b_shape(const std::array<double, 3>& bary, std::array<double, 4>& value,
               std::array<Vec2, 4>& ref_grad);

/// Affine map of one triangle.
struct ElementMap {
  Point origin;
  Mat2 jac;      // columns: x1 - x0, x2 - x0
  Mat2 inv_jac;  // inverse of jac
  double det = 0.0;

  ElementMap(const TriMesh& mesh, std::size_t t);

  [[nodiscard]] double area() const { return 0.5 * det; }
  [[nodiscard]] Vec2 grad(const Vec2& ref) const {
    // J^{-T} * ref
    return {inv_jac[0][0] * ref[0] + inv_jac[1][0] * ref[1],
            inv_jac[0][1] * ref[0] + inv_jac[1][1] * ref[1]};
  }
  [[nodiscard]] Point map(const std::array<double, 3>& bary) const {
    return {origin.x + jac[0][0] * bary[1] + jac[0][1] * bary[2],
            origin.y + jac[1][0] * bary[1] + jac[1][1] * bary[2]};
  }
};

struct FeValue {
  Vec2 u{};
  Mat2 grad_u{};
  double p = 0.0;
};

/// Point evaluation of a discrete (u, p) pair. `u` spans all velocity dofs and
/// `p` all pressure dofs. Throws std::out_of_range for points outside the domain.
FeValue evaluate_fe_function(const TriMesh& mesh, const DofMap& dofs, std::span<const double> u,
                             std::span<const double> p, Point point);

using VectorField = std::function<Vec2(double, double)>;
using ScalarField = std::function<double(double, double)>;

/// Nodal P1 interpolant of a vector field; bubble coefficients are zero.
std::vector<double> interpolate_velocity(const TriMesh& mesh, const DofMap& dofs,
                                         const VectorField& field);
std::vector<double> interpolate_pressure(const TriMesh& mesh, const ScalarField& field);

}  // namespace cbfed
