#include "run_config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

namespace cbfed::cli {

namespace {

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"run.case",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const auto id = parse_case_id(v);
         if (!id) throw ConfigError("key '" + k + "': unknown case '" + v + "'");
         const auto keep = c;
         c = preset_config(*id);
         c.out = keep.out;
         c.seed = keep.seed;
       }},
      {"run.grid", [](RunConfig& c, auto& k, auto& v) { c.grid = to_size(k, v); }},
      {"run.grids",
       [](RunConfig& c, auto& k, auto& v) {
         try {
           c.grids = parse_grid_list(v);
         } catch (const ConfigError& e) {
           throw ConfigError("key '" + k + "': " + e.what());
         }
       }},
      {"run.n_ref", [](RunConfig& c, auto& k, auto& v) { c.n_ref = to_size(k, v); }},
      {"run.out", [](RunConfig& c, auto&, auto& v) { c.out = v; }},
      {"run.seed", [](RunConfig& c, auto& k, auto& v) { c.seed = to_size(k, v); }},
      {"problem.mu", [](RunConfig& c, auto& k, auto& v) { c.problem.params.mu = to_double(k, v); }},
      {"problem.alpha",
       [](RunConfig& c, auto& k, auto& v) { c.problem.params.alpha = to_double(k, v); }},
      {"problem.beta",
       [](RunConfig& c, auto& k, auto& v) { c.problem.params.beta = to_double(k, v); }},
      {"problem.kappa",
       [](RunConfig& c, auto& k, auto& v) { c.problem.params.kappa = to_double(k, v); }},
      {"problem.r", [](RunConfig& c, auto& k, auto& v) { c.problem.params.r = to_double(k, v); }},
      {"problem.q", [](RunConfig& c, auto& k, auto& v) { c.problem.params.q = to_double(k, v); }},
      {"problem.forcing",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "manufactured") {
           c.forcing = ForcingKind::Manufactured;
         } else if (v == "zero") {
           c.forcing = ForcingKind::Zero;
         } else {
           throw ConfigError("key '" + k + "': expected manufactured or zero, got '" + v + "'");
         }
       }},
      {"friction.a",
       [](RunConfig& c, auto& k, auto& v) { c.problem.params.friction.a = to_double(k, v); }},
      {"friction.b",
       [](RunConfig& c, auto& k, auto& v) { c.problem.params.friction.b = to_double(k, v); }},
      {"friction.rho",
       [](RunConfig& c, auto& k, auto& v) { c.problem.params.friction.rho = to_double(k, v); }},
      {"solver.eta", [](RunConfig& c, auto& k, auto& v) { c.solver.eta = to_double(k, v); }},
      {"solver.eps_outer",
       [](RunConfig& c, auto& k, auto& v) { c.solver.eps_outer = to_double(k, v); }},
      {"solver.eps_inner",
       [](RunConfig& c, auto& k, auto& v) { c.solver.eps_inner = to_double(k, v); }},
      {"solver.max_outer", [](RunConfig& c, auto& k,
                              auto& v) { c.solver.max_outer = static_cast<int>(to_size(k, v)); }},
      {"solver.max_inner", [](RunConfig& c, auto& k,
                              auto& v) { c.solver.max_inner = static_cast<int>(to_size(k, v)); }},
      {"solver.warm_start",
       [](RunConfig& c, auto& k, auto& v) { c.solver.warm_start_lambda = to_bool(k, v); }},
      {"solver.relative_outer",
       [](RunConfig& c, auto& k, auto& v) { c.solver.relative_outer = to_bool(k, v); }},
      {"quadrature.volume_degree",
       [](RunConfig& c, auto& k, auto& v) {
         c.solver.assembly.volume_degree = static_cast<int>(to_size(k, v));
       }},
      {"quadrature.edge_degree",
       [](RunConfig& c, auto& k, auto& v) {
         c.solver.assembly.edge_degree = static_cast<int>(to_size(k, v));
       }},
      {"check.samples", [](RunConfig& c, auto& k, auto& v) { c.samples = to_size(k, v); }},
      {"check.quadrature_degree",
       [](RunConfig& c, auto& k, auto& v) {
         c.check_quadrature_degree = static_cast<int>(to_size(k, v));
       }},
      {"export.mesh", [](RunConfig& c, auto& k, auto& v) { c.export_mesh = to_bool(k, v); }},
      {"export.matrix", [](RunConfig& c, auto& k, auto& v) { c.export_matrix = to_bool(k, v); }},
  };
  return table;
}

bool known_section(const std::string& section) {
  for (const auto& [key, setter] : setters()) {
    if (key.compare(0, section.size() + 1, section + ".") == 0) return true;
  }
  return false;
}

}  // namespace

RunConfig preset_config(CaseId id) {
  RunConfig c;
  c.problem = manufactured_case(id);
  c.solver.eta = c.problem.eta;
  c.grids = c.problem.grids;
  c.n_ref = c.problem.n_ref;
  return c;
}

std::vector<std::size_t> parse_grid_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    std::size_t n = 0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), n);
    if (item.empty() || ec != std::errc() || p != item.data() + item.size() || n == 0) {
      throw ConfigError("bad grid size '" + item + "' in list '" + s + "'");
    }
    if (!out.empty() && n <= out.back()) {
      throw ConfigError("grid list '" + s + "' is not strictly ascending");
    }
    out.push_back(n);
  }
  if (out.empty()) throw ConfigError("empty grid list");
  return out;
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  // "case" first: it resets everything to the preset the other keys refine.
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("unknown key '" + section + "' outside a section");
    }
    if (body.empty() && !known_section(section)) {
      throw ConfigError("unknown section '" + section + "'");
    }
    for (const auto& [key, value] : body) {
      if (!value.empty()) throw ConfigError("nested key under '" + section + "." + key + "'");
      entries.emplace_back(section + "." + key, value.data());
    }
  }
  std::stable_partition(entries.begin(), entries.end(),
                        [](const auto& e) { return e.first == "run.case"; });
  const auto& table = setters();
  for (const auto& [key, value] : entries) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
    it->second(cfg, key, value);
  }
}

void RunConfig::validate() const {
  try {
    problem.params.validate();
    solver.validate();
    (void)triangle_quadrature(solver.assembly.volume_degree);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (solver.assembly.edge_degree < 1) throw ConfigError("edge quadrature degree must be >= 1");
  if (grid == 0) throw ConfigError("grid must be positive");
  if (check_quadrature_degree < 0 || check_quadrature_degree > kMaxTriangleDegree) {
    throw ConfigError("check.quadrature_degree must be in [0, 10]");
  }
}

}  // namespace cbfed::cli
