#include "cbfed/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

namespace cbfed {

void SolverConfig::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("Uzawa step eta must be positive");
  if (!(eps_outer > 0.0) || !(eps_inner > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  if (max_outer < 1 || max_inner < 1) {
    throw std::invalid_argument("iteration caps must be at least 1");
  }
}

void IterationReport::write_jsonl(std::ostream& os) const {
  for (const auto& r : outer) {
    nlohmann::json j = {{"outer", r.index},
                        {"inner_iterations", r.inner_iterations},
                        {"inner_converged", r.inner_converged},
                        {"increment", r.increment},
                        {"linear_residual", r.linear_residual},
                        {"divergence_residual", r.divergence_residual},
                        {"pressure_mean", r.pressure_mean}};
    os << j.dump() << '\n';
  }
}

DenseVector project_lambda(std::span<const double> lambda) {
  DenseVector out(lambda.begin(), lambda.end());
  for (double& l : out) l /= std::max(1.0, std::abs(l));
  return out;
}

DenseVector tangential_velocity(const DofMap& dofs, std::span<const double> u) {
  DenseVector ut(dofs.n_multiplier_dofs());
  for (std::size_t k = 0; k < ut.size(); ++k) {
    ut[k] = u[dofs.vertex_dof(0, dofs.multiplier_vertices[k])];
  }
  return ut;
}

ComplementarityReport check_complementarity(const DofMap& dofs, const DiscreteState& state,
                                            double tol) {
  const auto ut = tangential_velocity(dofs, state.u);
  double umax = 0.0;
  for (double v : ut) umax = std::max(umax, std::abs(v));
  ComplementarityReport rep;
  rep.nodes = ut.size();
  for (std::size_t k = 0; k < ut.size(); ++k) {
    if (std::abs(std::abs(state.lambda[k]) - 1.0) <= tol) {
      ++rep.saturated;
    } else if (std::abs(ut[k]) <= tol * umax) {
      ++rep.sticking;
    }
  }
  return rep;
}

CbfedSolver::CbfedSolver(const TriMesh& mesh, ProblemParams params, SolverConfig config,
                         VectorField f)
    : mesh_(&mesh),
      dofs_(build_dofmap(mesh)),
      params_(params),
      config_(std::move(config)),
      f_(std::move(f)),
      assembler_(mesh, dofs_, config_.assembly),
      mass_(assemble_a0(mesh, dofs_, config_.assembly)) {
  params_.validate();
  // eta = 0 is allowed here so tests can freeze the multiplier.
  if (!(config_.eta >= 0.0)) throw std::invalid_argument("Uzawa step eta must be nonnegative");
  if (config_.max_outer < 1 || config_.max_inner < 1) {
    throw std::invalid_argument("iteration caps must be at least 1");
  }
}

CbfedSolver::~CbfedSolver() = default;
CbfedSolver::CbfedSolver(CbfedSolver&&) noexcept = default;

DiscreteState CbfedSolver::zero_state() const {
  return {DenseVector(dofs_.n_velocity_dofs(), 0.0), DenseVector(dofs_.n_pressure_dofs(), 0.0),
          DenseVector(dofs_.n_multiplier_dofs(), 0.0)};
}

double CbfedSolver::l2_norm(std::span<const double> u) const {
  const auto mu = spmv(mass_, u);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * mu[i];
  return std::sqrt(std::max(s, 0.0));
}

namespace {

double increment_norm(const CbfedSolver& s, std::span<const double> a, std::span<const double> b) {
  DenseVector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return s.l2_norm(d);
}

}  // namespace

UzawaResult CbfedSolver::uzawa_step(const DiscreteState& state) const {
  const AssembledSystem sys = assembler_.assemble(params_, state.u, f_);
  const SystemLayout& layout = sys.layout;
  if (lu_) {
    lu_->refactor(sys.matrix);
  } else {
    lu_ = std::make_unique<SparseLu>(sys.matrix);
  }
  const SparseLu& lu = *lu_;
  const auto mean_w = pressure_mean_weights(*mesh_);

  UzawaResult out;
  out.state.lambda = state.lambda;
  DenseVector u_prev;
  for (int l = 0; l < config_.max_inner; ++l) {
    DenseVector rhs = sys.rhs;
    const auto slip = layout.restrict_velocity(assemble_slip_rhs(
        *mesh_, dofs_, params_.friction, state.u, out.state.lambda, config_.assembly));
    for (std::size_t i = 0; i < slip.size(); ++i) rhs[i] += slip[i];

    DenseVector x;
    try {
      x = lu.solve(rhs);
    } catch (const LinearSolveError& e) {
      throw LinearSolveError(std::string(e.what()) + " [inner iteration " + std::to_string(l) +
                             "]");
    }
    auto& rep = out.report;
    rep.iterations = l + 1;
    rep.max_linear_residual = std::max(rep.max_linear_residual, lu.last_residual());

    // Constraint rows: discrete divergence and the pressure mean.
    const auto ax = spmv(sys.matrix, x);
    double div_res = 0.0;
    for (std::size_t a = 0; a < layout.n_pressure; ++a) {
      const std::size_t row = layout.pressure_offset() + a;
      div_res = std::max(div_res, std::abs(ax[row] - rhs[row]));
    }
    DenseVector u = layout.velocity(x);
    DenseVector p = layout.pressure(x);
    double mean = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) mean += mean_w[a] * p[a];
    rep.max_divergence_residual = std::max(rep.max_divergence_residual, div_res);
    rep.max_pressure_mean = std::max(rep.max_pressure_mean, std::abs(mean));
    if (!(div_res <= kConstraintTolerance) || !(std::abs(mean) <= kConstraintTolerance)) {
      std::ostringstream msg;
      msg << "constraint residual after solve (inner iteration " << l << "): divergence " << div_res
          << ", pressure mean " << mean;
      throw InvariantViolation(msg.str());
    }

    const auto ut = tangential_velocity(dofs_, u);
    DenseVector trial(out.state.lambda.size());
    for (std::size_t k = 0; k < trial.size(); ++k) {
      trial[k] = out.state.lambda[k] + config_.eta * ut[k];
    }
    out.state.lambda = project_lambda(trial);
    for (double lam : out.state.lambda) {
      if (!(std::abs(lam) <= 1.0)) throw InvariantViolation("multiplier left the unit ball");
    }

    bool done = false;
    if (!u_prev.empty()) {
      const double inc = increment_norm(*this, u, u_prev);
      rep.increments.push_back(inc);
      done = inc <= config_.eps_inner;
    }
    out.state.u = std::move(u);
    out.state.p = std::move(p);
    if (done) {
      rep.converged = true;
      break;
    }
    u_prev = out.state.u;
  }
  return out;
}

SolveResult CbfedSolver::solve(const std::function<void(const OuterRecord&)>& observer) const {
  SolveResult res;
  res.state = zero_state();
  for (int n = 0; n < config_.max_outer; ++n) {
    DiscreteState start = res.state;
    if (!config_.warm_start_lambda) std::fill(start.lambda.begin(), start.lambda.end(), 0.0);
    UzawaResult step;
    try {
      step = uzawa_step(start);
    } catch (const LinearSolveError& e) {
      throw LinearSolveError(std::string(e.what()) + " [outer iteration " + std::to_string(n) +
                             "]");
    }
    double inc = increment_norm(*this, step.state.u, res.state.u);
    if (config_.relative_outer) {
      const double un = l2_norm(step.state.u);
      inc = un > 0.0 ? inc / un : inc;
    }
    OuterRecord rec;
    rec.index = n;
    rec.inner_iterations = step.report.iterations;
    rec.inner_converged = step.report.converged;
    rec.increment = inc;
    rec.linear_residual = step.report.max_linear_residual;
    rec.divergence_residual = step.report.max_divergence_residual;
    rec.pressure_mean = step.report.max_pressure_mean;
    res.report.outer.push_back(rec);
    if (observer) observer(rec);
    res.report.final_increment = inc;
    res.state = std::move(step.state);
    if (inc <= config_.eps_outer) {
      res.report.converged = true;
      break;
    }
  }
  return res;
}

SolveResult solve_cbfed(const TriMesh& mesh, const ProblemParams& params,
                        const SolverConfig& config, const VectorField& f) {
  const CbfedSolver solver(mesh, params, config, f);
  return solver.solve();
}

}  // namespace cbfed
