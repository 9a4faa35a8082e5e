// Command-line front end: solve, convergence, check.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "cbfed/checks.hpp"
#include "cbfed/manufactured.hpp"
#include "cbfed/solver.hpp"
#include "run_config.hpp"
#include "svg_plot.hpp"

using namespace cbfed;
using namespace cbfed::cli;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kSolverError = 2, kCheckFailed = 3 };

struct Flags {
  std::string config;
  std::string preset;
  std::string out;
  std::string grids;
  std::optional<std::size_t> nref;
  std::optional<std::uint64_t> seed;
  bool export_mesh = false;
  bool export_matrix = false;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "INI file; unknown keys are errors");
  cmd->add_option("--preset", f.preset, "built-in example: ex1, ex2 or ex3");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--grids", f.grids, "comma-separated grid sizes (solve takes one)");
  cmd->add_option("--nref", f.nref, "reference grid for convergence studies");
  cmd->add_option("--seed", f.seed, "seed for the sampled property checks");
}

RunConfig build_config(const Flags& f, bool single_grid) {
  CaseId id = CaseId::Ex1;
  if (!f.preset.empty()) {
    const auto p = parse_case_id(f.preset);
    if (!p) throw ConfigError("unknown preset '" + f.preset + "'");
    id = *p;
  }
  RunConfig cfg = preset_config(id);
  if (!f.config.empty()) {
    if (!fs::exists(f.config)) throw ConfigError("config file '" + f.config + "' not found");
    apply_config_file(cfg, f.config);
  }
  if (!f.out.empty()) cfg.out = f.out;
  if (!f.grids.empty()) {
    const auto g = parse_grid_list(f.grids);
    if (single_grid) {
      if (g.size() != 1) throw ConfigError("solve takes a single grid size");
      cfg.grid = g.front();
    } else {
      cfg.grids = g;
    }
  }
  if (f.nref) cfg.n_ref = *f.nref;
  if (f.seed) cfg.seed = *f.seed;
  cfg.export_mesh = cfg.export_mesh || f.export_mesh;
  cfg.export_matrix = cfg.export_matrix || f.export_matrix;
  cfg.validate();
  return cfg;
}

VectorField forcing_of(const RunConfig& cfg) {
  if (cfg.forcing == ForcingKind::Zero) return [](double, double) { return Vec2{0.0, 0.0}; };
  return forcing_field(cfg.problem);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

int cmd_solve(const RunConfig& cfg) {
  fs::create_directories(cfg.out);
  const TriMesh mesh = unit_square_mesh(cfg.grid);
  const VectorField f = forcing_of(cfg);
  const CbfedSolver solver(mesh, cfg.problem.params, cfg.solver, f);
  const auto& dofs = solver.dofs();

  auto report = open_out(cfg.out / "report.jsonl");
  IterationReport streamed;
  auto observer = [&](const OuterRecord& r) {
    streamed.outer.assign(1, r);
    streamed.write_jsonl(report);
    report.flush();
  };
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult res;
  try {
    res = solver.solve(observer);
  } catch (const std::exception& e) {
    report << nlohmann::json{{"error", e.what()}}.dump() << '\n';
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverError;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto comp = check_complementarity(dofs, res.state);
  report << nlohmann::json{{"summary",
                            {{"grid", cfg.grid},
                             {"case", to_string(cfg.problem.id)},
                             {"converged", res.report.converged},
                             {"outer_iterations", res.report.outer_iterations()},
                             {"final_increment", res.report.final_increment},
                             {"complementarity_nodes", comp.nodes},
                             {"complementarity_satisfied", comp.satisfied()},
                             {"seconds", secs}}}}
                .dump()
         << '\n';

  char buf[256];
  auto nodes = open_out(cfg.out / "nodes.csv");
  nodes << "x,y,u_x,u_y,p\n";
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.12e,%.12e,%.12e\n", mesh.vertices[v].x,
                  mesh.vertices[v].y, res.state.u[dofs.vertex_dof(0, v)],
                  res.state.u[dofs.vertex_dof(1, v)], res.state.p[v]);
    nodes << buf;
  }

  // Every Gamma1 vertex; the two corners carry no multiplier and report 0.
  std::vector<double> lam_at(mesh.num_vertices(), 0.0);
  for (std::size_t k = 0; k < dofs.multiplier_vertices.size(); ++k) {
    lam_at[dofs.multiplier_vertices[k]] = res.state.lambda[k];
  }
  auto top = boundary_vertices(mesh, BoundaryTag::Gamma1);
  std::sort(top.begin(), top.end(),
            [&](auto a, auto b) { return mesh.vertices[a].x < mesh.vertices[b].x; });
  auto g1 = open_out(cfg.out / "gamma1.csv");
  g1 << "x,u_tau,lambda,omega_lambda\n";
  for (auto v : top) {
    const double ut = res.state.u[dofs.vertex_dof(0, v)];
    const double lam = lam_at[v];
    std::snprintf(buf, sizeof buf, "%.6f,%.12e,%.12e,%.12e\n", mesh.vertices[v].x, ut, lam,
                  cfg.problem.params.friction.omega(std::abs(ut)) * lam);
    g1 << buf;
  }

  if (cfg.export_mesh) {
    auto os = open_out(cfg.out / "mesh.txt");
    write_mesh(os, mesh);
  }
  if (cfg.export_matrix) {
    const auto sys = assemble_system(mesh, dofs, cfg.problem.params, res.state.u, res.state.lambda,
                                     f, cfg.solver.assembly);
    auto os = open_out(cfg.out / "system.mtx");
    write_matrix_market(os, sys.matrix);
  }

  std::printf("%s n=%zu: %s after %d outer iterations (increment %.2e), %.2f s\n",
              to_string(cfg.problem.id).c_str(), cfg.grid,
              res.report.converged ? "converged" : "stopped at the cap",
              res.report.outer_iterations(), res.report.final_increment, secs);
  std::printf("complementarity %zu/%zu nodes; output in %s\n", comp.satisfied(), comp.nodes,
              cfg.out.c_str());
  if (!res.report.converged) {
    std::cerr << "warning: outer iteration did not reach eps_outer = " << cfg.solver.eps_outer
              << '\n';
  }
  return kOk;
}

int cmd_convergence(const RunConfig& cfg) {
  if (cfg.forcing != ForcingKind::Manufactured) {
    throw ConfigError("convergence needs problem.forcing = manufactured");
  }
  if (cfg.grids.empty()) throw ConfigError("no grids given");
  for (auto g : cfg.grids) {
    if (g >= cfg.n_ref) {
      throw ConfigError("grid " + std::to_string(g) + " is not coarser than n_ref " +
                        std::to_string(cfg.n_ref));
    }
  }
  fs::create_directories(cfg.out);
  ConvergenceStudy st;
  try {
    st = run_convergence_study(cfg.problem, cfg.grids, cfg.n_ref, cfg.solver);
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverError;
  }
  {
    auto csv = open_out(cfg.out / "convergence.csv");
    write_convergence_csv(csv, st.rows);
  }
  write_convergence_csv(std::cout, st.rows);

  std::vector<Series> series{{"L2 velocity", "#1f77b4", {}, {}},
                             {"V velocity", "#d62728", {}, {}},
                             {"L2 pressure", "#2ca02c", {}, {}}};
  for (const auto& r : st.rows) {
    const double h = 1.0 / static_cast<double>(r.grid);
    for (auto& s : series) s.x.push_back(h);
    series[0].y.push_back(r.err.l2_u);
    series[1].y.push_back(r.err.v_u);
    series[2].y.push_back(r.err.l2_p);
  }
  {
    auto svg = open_out(cfg.out / "convergence.svg");
    write_loglog_svg(svg,
                     "Convergence, " + to_string(cfg.problem.id) + " (reference " +
                         std::to_string(cfg.n_ref) + ")",
                     "h", "error", series);
  }
  auto runs = open_out(cfg.out / "runs.jsonl");
  auto dump = [&](const GridRun& r, bool reference) {
    std::vector<int> inner;
    for (const auto& rec : r.report.outer) inner.push_back(rec.inner_iterations);
    runs << nlohmann::json{{"grid", r.grid},
                           {"reference", reference},
                           {"converged", r.report.converged},
                           {"outer_iterations", r.report.outer_iterations()},
                           {"inner_iterations", inner},
                           {"final_increment", r.report.final_increment},
                           {"complementarity_nodes", r.complementarity.nodes},
                           {"complementarity_satisfied", r.complementarity.satisfied()},
                           {"seconds", r.seconds}}
                .dump()
         << '\n';
    if (!r.report.converged) {
      std::cerr << "warning: grid " << r.grid << " stopped at the outer cap\n";
    }
  };
  dump(st.reference, true);
  for (const auto& r : st.runs) dump(r, false);
  return kOk;
}

int cmd_check(const RunConfig& cfg) {
  CheckOptions opts;
  opts.seed = cfg.seed;
  opts.samples = cfg.samples;
  opts.quadrature_override = cfg.check_quadrature_degree;
  auto items = run_checks(opts);
  for (auto id : {CaseId::Ex1, CaseId::Ex2, CaseId::Ex3}) {
    const double e = forcing_consistency_error(manufactured_case(id), 100, cfg.seed);
    char buf[96];
    std::snprintf(buf, sizeof buf, "max relative deviation %.2e", e);
    items.push_back({"forcing consistency " + to_string(id), e <= 1e-6, buf});
  }
  int failed = 0;
  for (const auto& it : items) {
    std::printf("%s  %s: %s\n", it.passed ? "PASS" : "FAIL", it.name.c_str(), it.detail.c_str());
    if (!it.passed) ++failed;
  }
  if (failed > 0) {
    std::printf("%d of %zu checks failed\n", failed, items.size());
    return kCheckFailed;
  }
  std::printf("all %zu checks passed\n", items.size());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary CBFeD flow with a nonsmooth slip law on the top boundary"};
  app.require_subcommand(1);
  Flags flags;
  auto* solve = app.add_subcommand("solve", "solve on one grid and write field tables");
  auto* conv = app.add_subcommand("convergence", "convergence study against a fine reference");
  auto* check = app.add_subcommand("check", "property and diagnostic suites");
  for (auto* c : {solve, conv, check}) add_common_flags(c, flags);
  solve->add_flag("--export-mesh", flags.export_mesh, "also write mesh.txt");
  solve->add_flag("--export-matrix", flags.export_matrix,
                  "also write the final linearized system as system.mtx");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (solve->parsed()) return cmd_solve(build_config(flags, true));
    if (conv->parsed()) return cmd_convergence(build_config(flags, false));
    return cmd_check(build_config(flags, false));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverError;
  }
}
