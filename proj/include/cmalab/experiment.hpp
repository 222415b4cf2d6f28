#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmalab/grid.hpp"

namespace cmalab {

/// Seeded density recipe. kinds: constant (F = amplitude), cosine
/// (amplitude cos 2 pi x0 cos 2 pi x1), random_modes (sum of `modes` random
/// Fourier modes with |F| <= amplitude).
struct DensityRecipe {
  std::string kind = "random_modes";
  double amplitude = 0.3;
  int modes = 4;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  std::string experiment;
  int n = 1;
  int N = 16;
  std::string operator_kind = "monge_ampere";  // monge_ampere, hessian, pma
  int operator_order = 0;                      // k for hessian, p for pma
  DensityRecipe density;
  double solver_tol = 1e-10;
  double phi_tol = 1e-6;
  std::string out_dir = "cmalab_out";
  bool dump_fields = false;
  nlohmann::json params = nlohmann::json::object();  // experiment-specific, defaults filled in

  nlohmann::json to_json() const;
};

const std::vector<std::string>& experiment_names();

/// JSON with comments allowed. Errors are Config with "line L, column C"
/// for syntax problems and "field 'a.b'" for schema problems. Every
/// experiment parameter is resolved to its default here, so the report
/// carries the full configuration.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

ScalarField make_density(const TorusGrid& grid, const DensityRecipe& recipe);

struct ExperimentOutcome {
  bool pass = false;
  nlohmann::json report;
  std::vector<std::string> profile_header;
  std::vector<std::vector<double>> profile_rows;
  std::vector<std::pair<std::string, ScalarField>> fields;
};

ExperimentOutcome run_experiment(const ExperimentConfig& config);

/// report.json, profile.csv and (when requested) <name>.field files.
/// Nothing is written outside `dir`.
void write_outputs(const ExperimentOutcome& outcome, const std::filesystem::path& dir, bool dump_fields);

}  // namespace cmalab
