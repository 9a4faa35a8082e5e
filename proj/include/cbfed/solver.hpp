#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "cbfed/fespace.hpp"
#include "cbfed/forms.hpp"
#include "cbfed/linalg.hpp"
#include "cbfed/mesh.hpp"

namespace cbfed {

struct SolverConfig {
  double eta = 1.0;         // Uzawa step
  double eps_outer = 1e-8;  // outer increment tolerance
  double eps_inner = 1e-8;  // inner increment tolerance
  int max_outer = 50;
  int max_inner = 20;
  bool warm_start_lambda = true;
  /// Outer test on |u_{n+1} - u_n| / |u_{n+1}| instead of the absolute increment.
  bool relative_outer = false;
  AssemblyOptions assembly;

  /// Requires eta > 0, positive tolerances and caps >= 1.
  void validate() const;
};

/// Velocity, pressure and slip multiplier coefficients of one iterate.
struct DiscreteState {
  DenseVector u;
  DenseVector p;
  DenseVector lambda;
};

/// Thrown when a runtime invariant (multiplier feasibility, discrete
/// incompressibility, zero pressure mean) fails after a solve.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kConstraintTolerance = 1e-9;

struct InnerReport {
  int iterations = 0;  // linear solves performed
  bool converged = false;
  std::vector<double> increments;  // |u_l - u_{l-1}|_L2, from l = 1 on
  double max_linear_residual = 0.0;
  double max_divergence_residual = 0.0;
  double max_pressure_mean = 0.0;
};

struct OuterRecord {
  int index = 0;
  int inner_iterations = 0;
  bool inner_converged = false;
  double increment = 0.0;
  double linear_residual = 0.0;
  double divergence_residual = 0.0;
  double pressure_mean = 0.0;
};

struct IterationReport {
  std::vector<OuterRecord> outer;
  bool converged = false;
  double final_increment = 0.0;

  [[nodiscard]] int outer_iterations() const { return static_cast<int>(outer.size()); }
  /// One JSON object per outer iteration.
  void write_jsonl(std::ostream& os) const;
};

struct UzawaResult {
  DiscreteState state;  // u_{n+1}, p_{n+1}, lambda_{n+2}
  InnerReport report;
};

struct SolveResult {
  DiscreteState state;
  IterationReport report;
};

/// Nodewise projection onto {|lambda| <= 1}: lambda / max(1, |lambda|).
DenseVector project_lambda(std::span<const double> lambda);

/// Newton linearization with an inner Uzawa loop for the slip multiplier.
/// Holds the mesh-dependent machinery (dof map, sparsity pattern, mass matrix)
/// so repeated solves on one mesh share it. The mesh must outlive the solver.
class CbfedSolver {
 public:
  CbfedSolver(const TriMesh& mesh, ProblemParams params, SolverConfig config, VectorField f);
  ~CbfedSolver();
  CbfedSolver(CbfedSolver&&) noexcept;

  /// Inner loop around the frozen linearization point state.u, starting from
  /// the multiplier state.lambda.
  [[nodiscard]] UzawaResult uzawa_step(const DiscreteState& state) const;

  /// Outer loop from u = 0, lambda = 0. Non-convergence at the cap is
  /// reported through IterationReport::converged, not thrown. The observer,
  /// if set, sees every outer record as soon as it exists, so a caller keeps
  /// the history even when a later iteration throws.
  [[nodiscard]] SolveResult solve(
      const std::function<void(const OuterRecord&)>& observer = nullptr) const;

  /// Discrete L2 norm of a velocity coefficient vector via the mass matrix.
  [[nodiscard]] double l2_norm(std::span<const double> u) const;

  [[nodiscard]] const TriMesh& mesh() const { return *mesh_; }
  [[nodiscard]] const DofMap& dofs() const { return dofs_; }
  [[nodiscard]] const ProblemParams& params() const { return params_; }
  [[nodiscard]] const SolverConfig& config() const { return config_; }
  [[nodiscard]] DiscreteState zero_state() const;

 private:
  const TriMesh* mesh_;
  DofMap dofs_;
  ProblemParams params_;
  SolverConfig config_;
  VectorField f_;
  SystemAssembler assembler_;
  CsrMatrix mass_;
  // The pattern never changes, so the ordering is computed once and each
  // outer iteration only refactors.
  mutable std::unique_ptr<SparseLu> lu_;
};

SolveResult solve_cbfed(const TriMesh& mesh, const ProblemParams& params,
                        const SolverConfig& config, const VectorField& f);

/// Tangential velocity at each multiplier node (x-component, tau = (1, 0)).
DenseVector tangential_velocity(const DofMap& dofs, std::span<const double> u);

struct ComplementarityReport {
  std::size_t nodes = 0;
  std::size_t saturated = 0;  // |lambda| = 1 within tol
  std::size_t sticking = 0;   // |u_tau| <= tol * max |u_tau|, not saturated
  [[nodiscard]] std::size_t satisfied() const { return saturated + sticking; }
  [[nodiscard]] double fraction() const {
    return nodes == 0 ? 1.0 : static_cast<double>(satisfied()) / static_cast<double>(nodes);
  }
};

/// Nodewise check of lambda . u_tau = |u_tau|: each node must have |lambda| = 1
/// or a (relatively) vanishing tangential velocity.
ComplementarityReport check_complementarity(const DofMap& dofs, const DiscreteState& state,
                                            double tol = 1e-6);

}  // namespace cbfed
