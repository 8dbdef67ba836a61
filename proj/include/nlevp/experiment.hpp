// SPDX-License-Identifier: Apache-2.0

#ifndef NLEVP_EXPERIMENT_HPP
#define NLEVP_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>
#include "nlevp/gallery.hpp"
#include "nlevp/solvers.hpp"

//
// Batch experiments driven by flat key-value files:
//
//   # comment
//   mode = solve                  # solve | sweep | oracle
//   problem.name = delay          # diag | quadratic | delay
//   problem.n = 6
//   problem.A0.re = 1 0; 0 2      # rows separated by ';' (optional .im companion)
//   domain.kind = circle          # circle | ellipse | interval
//   solver.m = 25
//
// Reports are written in the same syntax; their config.* lines re-parse to the config.
//

namespace nlevp
{

enum class Mode
{
  Solve,
  Sweep,
  Oracle
};

enum class Pipeline
{
  Reduced,
  Arnoldi
};

struct ProblemSpec
{
  std::string name = "delay";
  Index n = 6;
  Index inside = 3;  // eigenvalues placed in the default region by the standard instances
  std::uint64_t seed = 7;
  double tau = 1.0;
  std::vector<Complex> roots;  // diag only
  std::optional<DenseMatrix> a0, a1, m2, c1, k0;

  bool operator==(const ProblemSpec &) const = default;
};

struct ExperimentConfig
{
  Mode mode = Mode::Solve;
  ProblemSpec problem;
  std::optional<Contour> domain;  // the gallery's suggested region when absent
  SolverConfig solver;
  Pipeline pipeline = Pipeline::Reduced;
  std::vector<std::size_t> sweep_m;
  double sweep_grid_scale = 0.5;
  std::size_t oracle_grid = 50;
  std::string report_path;

  bool operator==(const ExperimentConfig &) const = default;
};

// Throws ConfigError with "line N" or the offending key in the message.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string &path);

// Cross-field checks run by parse_config; call again after modifying a parsed config.
void validate_config(const ExperimentConfig &cfg);

// Key-value lines for every field, each prefixed with `prefix`.
std::string echo_config(const ExperimentConfig &cfg, std::string_view prefix = "config.");

// Parses the config.* lines of a report.
ExperimentConfig config_from_report(std::string_view report);

// Gallery instance for the spec; the domain is cfg.domain or the instance's suggestion.
struct Instance
{
  GalleryProblem gallery;
  Contour domain;
};
Instance instantiate(const ExperimentConfig &cfg);

struct RunOptions
{
  bool timings = false;  // wall-clock lines make reports non-reproducible
};

struct RunOutcome
{
  std::string report;  // report document (solve/oracle) or CSV table (sweep)
  std::string summary; // human-readable lines for stdout
  int exit_code = 0;   // 0 converged, 2 not converged
};

RunOutcome run_solve(const ExperimentConfig &cfg, const RunOptions &options = {});
RunOutcome run_sweep(const ExperimentConfig &cfg, const RunOptions &options = {});
RunOutcome run_oracle(const ExperimentConfig &cfg, const RunOptions &options = {});
RunOutcome run_experiment(const ExperimentConfig &cfg, const RunOptions &options = {});

// 17 significant digits.
std::string format_real(double x);

}  // namespace nlevp

#endif  // NLEVP_EXPERIMENT_HPP
