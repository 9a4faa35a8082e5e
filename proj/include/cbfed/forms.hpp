#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cbfed/fespace.hpp"
#include "cbfed/linalg.hpp"
#include "cbfed/mesh.hpp"

namespace cbfed {

/// Slip coefficient omega(t) = (a - b) exp(-rho t) + b.
struct FrictionLaw {
  double a = 1.0;
  double b = 0.5;
  double rho = 1.0;

  /// Requires a > b > 0 and rho > 0.
  void validate() const;
  [[nodiscard]] double omega(double t) const;
};

struct ProblemParams {
  double mu = 1.0;     // Brinkman viscosity, > 0
  double alpha = 0.0;  // Darcy coefficient, >= 0
  double beta = 1.0;   // Forchheimer coefficient, > 0
  double kappa = 0.0;  // pumping coefficient, <= 0
  double r = 3.0;      // absorption exponent, >= 1
  double q = 1.0;      // pumping exponent, 1 <= q < r (unused when kappa == 0)
  FrictionLaw friction;

  /// Throws std::invalid_argument on violated coefficient ranges.
  void validate() const;
};

struct AssemblyOptions {
  int volume_degree = 6;
  int edge_degree = 5;
  /// Regularization of |u| inside |u|^(s-3) when s < 3.
  double eps_reg = 1e-10;
};

/// Matrix and right-hand-side contribution of one Newton-linearized term.
struct LinearizedTerm {
  CsrMatrix matrix;
  DenseVector rhs;
};

// Unconstrained operators over all velocity dofs (rows = test, cols = trial).

/// a(u, v) = int 2 eps(u) : eps(v)
CsrMatrix assemble_a(const TriMesh& mesh, const DofMap& dofs, const AssemblyOptions& opts = {});
/// a0(u, v) = int u . v
CsrMatrix assemble_a0(const TriMesh& mesh, const DofMap& dofs, const AssemblyOptions& opts = {});
/// d(v, q) = -int q div v; rows are pressure dofs, columns velocity dofs.
CsrMatrix assemble_d(const TriMesh& mesh, const DofMap& dofs, const AssemblyOptions& opts = {});

/// w -> int [(w . grad) u_n + (u_n . grad) w] . v, with rhs int (u_n . grad) u_n . v.
LinearizedTerm assemble_convection_newton(const TriMesh& mesh, const DofMap& dofs,
                                          std::span<const double> u_n,
                                          const AssemblyOptions& opts = {});

/// w -> c int [|u_n|^(s-1) w + (s-1) |u_n|^(s-3) (u_n . w) u_n] . v with rhs
/// c (s-1) int |u_n|^(s-1) u_n . v. Throws std::invalid_argument for s < 1.
LinearizedTerm assemble_damping_newton(const TriMesh& mesh, const DofMap& dofs,
                                       std::span<const double> u_n, double c, double s,
                                       const AssemblyOptions& opts = {});

/// -int_{Gamma1} omega(|u_tau,n|) lambda v_tau dS over all velocity dofs.
/// `lambda` holds one value per multiplier dof; corner nodes carry lambda = 0.
DenseVector assemble_slip_rhs(const TriMesh& mesh, const DofMap& dofs, const FrictionLaw& law,
                              std::span<const double> u_n, std::span<const double> lambda,
                              const AssemblyOptions& opts = {});

/// int f . v over all velocity dofs.
DenseVector assemble_forcing(const TriMesh& mesh, const DofMap& dofs, const VectorField& f,
                             const AssemblyOptions& opts = {});

/// int psi_j for every pressure basis function.
DenseVector pressure_mean_weights(const TriMesh& mesh);

/// Unknown ordering of the reduced saddle-point system:
/// [free velocity dofs | pressure | mean-pressure multiplier].
struct SystemLayout {
  std::vector<std::ptrdiff_t> free_index;  // per velocity dof, -1 if fixed
  VelocityConstraints constraints;
  std::size_t n_free = 0;
  std::size_t n_pressure = 0;

  SystemLayout() = default;
  SystemLayout(const DofMap& dofs, VelocityConstraints c);

  [[nodiscard]] std::size_t pressure_offset() const { return n_free; }
  [[nodiscard]] std::size_t mean_row() const { return n_free + n_pressure; }
  [[nodiscard]] std::size_t size() const { return n_free + n_pressure + 1; }

  /// Restricts a full velocity vector to the free rows.
  [[nodiscard]] DenseVector restrict_velocity(std::span<const double> full) const;
  /// Full velocity coefficients (prescribed values at fixed dofs) from a system solution.
  [[nodiscard]] DenseVector velocity(std::span<const double> x) const;
  [[nodiscard]] DenseVector pressure(std::span<const double> x) const;
};

struct AssembledSystem {
  CsrMatrix matrix;
  DenseVector rhs;
  SystemLayout layout;
};

/// Assembles the linearized saddle-point system around u_n, without the slip
/// term, over a fixed sparsity pattern. One instance per mesh.
class SystemAssembler {
 public:
  SystemAssembler(const TriMesh& mesh, const DofMap& dofs, VelocityConstraints constraints,
                  AssemblyOptions opts = {});
  SystemAssembler(const TriMesh& mesh, const DofMap& dofs, AssemblyOptions opts = {});

  /// Velocity block mu a + alpha a0 + convection + damping(beta, r) + pumping(kappa, q);
  /// pressure coupling, mean row, and (f, v) plus Newton terms on the right.
  /// `include_convection` switches the Navier-Stokes term off for Stokes-type runs.
  [[nodiscard]] AssembledSystem assemble(const ProblemParams& params, std::span<const double> u_n,
                                         const VectorField& f,
                                         bool include_convection = true) const;

  [[nodiscard]] const SystemLayout& layout() const { return layout_; }
  [[nodiscard]] const AssemblyOptions& options() const { return opts_; }

 private:
  const TriMesh* mesh_;
  const DofMap* dofs_;
  AssemblyOptions opts_;
  SystemLayout layout_;
  CsrMatrix pattern_;
  DenseVector mean_weights_;
};

/// Linearized system around u_n with the slip load for multiplier lambda_n folded in.
AssembledSystem assemble_system(const TriMesh& mesh, const DofMap& dofs,
                                const ProblemParams& params, std::span<const double> u_n,
                                std::span<const double> lambda_n, const VectorField& f,
                                const AssemblyOptions& opts = {});

}  // namespace cbfed
