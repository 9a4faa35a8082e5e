#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cbfed/fespace.hpp"
#include "cbfed/forms.hpp"
#include "cbfed/mesh.hpp"
#include "cbfed/solver.hpp"

namespace cbfed {

enum class CaseId { Ex1, Ex2, Ex3 };

std::string to_string(CaseId id);
/// Accepts "ex1", "ex2", "ex3" (case-insensitive).
std::optional<CaseId> parse_case_id(const std::string& s);

/// Analytic velocity/pressure pair, its derivatives, and the run setup of one
/// benchmark example.
struct ManufacturedCase {
  CaseId id = CaseId::Ex1;
  ProblemParams params;
  double eta = 1.0;
  std::vector<std::size_t> grids;
  std::size_t n_ref = 160;

  [[nodiscard]] Vec2 velocity(double x, double y) const;
  [[nodiscard]] Mat2 velocity_gradient(double x, double y) const;
  [[nodiscard]] Vec2 velocity_laplacian(double x, double y) const;
  [[nodiscard]] double pressure(double x, double y) const;
  [[nodiscard]] Vec2 pressure_gradient(double x, double y) const;
};

ManufacturedCase manufactured_case(CaseId id);

/// f = -mu lap u + (u . grad) u + alpha u + beta |u|^(r-1) u + kappa |u|^(q-1) u + grad p
Vec2 forcing(const ManufacturedCase& c, Point p);
VectorField forcing_field(const ManufacturedCase& c);

/// Largest deviation of forcing() from the PDE operator applied to (u0, p0)
/// by fourth-order central differences, over `points` random interior points.
/// Each deviation is relative to max(1, |f|).
double forcing_consistency_error(const ManufacturedCase& c, std::size_t points, std::uint64_t seed);

struct ErrorNorms {
  double l2_u = 0.0;
  double v_u = 0.0;  // |eps(u_h) - eps(u*)|_L2
  double l2_p = 0.0;
};

/// Errors of a coarse solution against a finer reference. Every coarse
/// triangle is split into ceil(n_ref / n)^2 similar pieces and integrated
/// piecewise; on nested grids the pieces are exactly the reference triangles,
/// so the rule integrates both fields exactly up to its degree.
ErrorNorms error_norms(const TriMesh& mesh, const DofMap& dofs, const DiscreteState& state,
                       const TriMesh& ref_mesh, const DofMap& ref_dofs,
                       const DiscreteState& reference, int degree = 6);

struct ConvergenceRow {
  std::size_t grid = 0;
  ErrorNorms err;
  double ord_l2_u = std::numeric_limits<double>::quiet_NaN();
  double ord_v_u = std::numeric_limits<double>::quiet_NaN();
  double ord_l2_p = std::numeric_limits<double>::quiet_NaN();
};

/// log(e1 / e2) / log(h1 / h2); NaN when either error is zero.
double observed_order(double e1, double e2, double h1, double h2);

/// Fills the order columns from the second row on (h = 1 / grid).
std::vector<ConvergenceRow> convergence_table(const std::vector<std::size_t>& grids,
                                              const std::vector<ErrorNorms>& errors);

struct GridRun {
  std::size_t grid = 0;
  IterationReport report;
  ComplementarityReport complementarity;
  double seconds = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  std::vector<GridRun> runs;
  GridRun reference;
};

/// Solves on every grid and on the reference grid, then tabulates errors and
/// orders. Throws std::invalid_argument unless grids ascend and stay below n_ref.
ConvergenceStudy run_convergence_study(const ManufacturedCase& c,
                                       const std::vector<std::size_t>& grids, std::size_t n_ref,
                                       const SolverConfig& config);

/// grid,e_l2_u,ord_l2_u,e_V_u,ord_V_u,e_l2_p,ord_l2_p; orders blank on the first row.
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);

}  // namespace cbfed
