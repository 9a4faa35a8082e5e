#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cbfed/fespace.hpp"
#include "cbfed/quadrature.hpp"

namespace cbfed {

/// Sampled pointwise check of the monotonicity bounds for C(x) = |x|^(r-1) x
/// on random pairs in R^2:
///   (C(x) - C(y)).(x - y) >= 1/2 |x|^(r-1) |x-y|^2 + 1/2 |y|^(r-1) |x-y|^2
///   (C(x) - C(y)).(x - y) >= 2^(1-r) |x-y|^(r+1)
/// Slack is (lhs - rhs) / max(1, lhs), so the minimum is comparable across r.
struct MonotonicityReport {
  double r = 0.0;
  std::size_t samples = 0;
  double min_slack_weighted = 0.0;
  double min_slack_strong = 0.0;

  [[nodiscard]] bool passed(double tol = -1e-12) const {
    return min_slack_weighted >= tol && min_slack_strong >= tol;
  }
};

MonotonicityReport check_monotonicity(double r, std::size_t samples, std::uint64_t seed);

/// Largest error over the monomials xi^a eta^b, a + b <= degree, against
/// a! b! / (a + b + 2)! on the reference triangle.
double triangle_exactness_error(const QuadratureRule& rule, int degree);
/// Same for t^k, k <= degree, on [0, 1].
double edge_exactness_error(const QuadratureRule& rule, int degree);

/// Stokes problem (mu = 1, no reaction, no convection, no friction) with every
/// boundary velocity dof prescribed from `exact`, f = 0. Returns the largest
/// nodal deviation from the P1 interpolant (bubbles and pressure must vanish).
/// `exact` has to be linear and divergence-free for the answer to be zero.
double stokes_patch_error(std::size_t n, const VectorField& exact);

/// Discrete inf-sup constant on the n x n mesh: the smallest nonzero value of
/// sup_v d(v, q) / |v|_V over q in Q_h, v in V_h with v = 0 on the whole
/// boundary. Dense generalized eigenproblem, meant for n <= 16.
double inf_sup_constant(std::size_t n);

struct CheckItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CheckOptions {
  std::uint64_t seed = 1;
  std::size_t samples = 10000;
  /// When positive, the exactness check uses this rule instead of the one
  /// requested for each degree. Only useful to see the check fail.
  int quadrature_override = 0;
};

/// Monotonicity, quadrature exactness, patch test and inf-sup sweep.
std::vector<CheckItem> run_checks(const CheckOptions& opts);

}  // namespace cbfed
