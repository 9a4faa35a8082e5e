#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbfed/forms.hpp"
#include "cbfed/manufactured.hpp"
#include "cbfed/solver.hpp"

namespace cbfed::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ForcingKind { Manufactured, Zero };

/// Everything one command needs. Built from a preset, then a config file,
/// then command-line flags, each layer overriding the previous one.
struct RunConfig {
  ManufacturedCase problem = manufactured_case(CaseId::Ex1);
  ForcingKind forcing = ForcingKind::Manufactured;
  SolverConfig solver;
  std::size_t grid = 10;
  std::vector<std::size_t> grids;
  std::size_t n_ref = 0;
  std::filesystem::path out = "out";
  std::uint64_t seed = 1;
  std::size_t samples = 10000;
  int check_quadrature_degree = 0;
  bool export_mesh = false;
  bool export_matrix = false;

  /// Checks every value against the ranges of the library types.
  void validate() const;
};

RunConfig preset_config(CaseId id);

/// Applies a flat INI file on top of `cfg`. Unknown sections or keys, bad
/// values and duplicates raise ConfigError naming the offending key.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Parses "5,10,20" into a strictly ascending list of positive integers.
std::vector<std::size_t> parse_grid_list(const std::string& s);

}  // namespace cbfed::cli
