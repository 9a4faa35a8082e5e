#pragma once

#include <array>
#include <vector>

namespace cbfed {

/// Quadrature on the reference triangle {(0,0),(1,0),(0,1)} (area 1/2) or on
/// the unit interval [0,1] (length 1).
///
/// For triangle rules `points` holds barycentric coordinates (l1, l2, l3) with
/// reference coordinates (xi, eta) = (l2, l3). For edge rules only the first
/// entry is used: the parameter t in [0,1].
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  [[nodiscard]] std::size_t size() const { return weights.size(); }
};

inline constexpr int kMaxTriangleDegree = 10;

/// Symmetric positive-weight (Dunavant) rule exact for polynomials of total
/// degree >= min_degree. Throws std::invalid_argument outside [1, 10].
QuadratureRule triangle_quadrature(int min_degree);

/// Gauss-Legendre rule on [0,1] exact for degree >= min_degree.
QuadratureRule edge_quadrature(int min_degree);

}  // namespace cbfed
