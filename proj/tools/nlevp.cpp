// SPDX-License-Identifier: Apache-2.0
//
// nlevp solve|sweep|oracle <config> [--seed N] [--out PATH] [--quiet] [--timings]

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>
#include "nlevp/experiment.hpp"

namespace
{

std::size_t thread_cap()
{
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char *env = std::getenv("NLEVP_THREADS"))
  {
    char *end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1)
    {
      threads = std::min(threads, static_cast<std::size_t>(cap));
    }
  }
  return threads;
}

int exit_code_for(nlevp::ErrorCode code)
{
  if (code == nlevp::ErrorCode::ConfigError)
  {
    return 1;
  }
  return nlevp::is_numerical_failure(code) ? 3 : 1;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Contour-based nonlinear eigenvalue solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  bool quiet = false;
  bool timings = false;

  const std::pair<const char *, nlevp::Mode> modes[] = {
      {"solve", nlevp::Mode::Solve},
      {"sweep", nlevp::Mode::Sweep},
      {"oracle", nlevp::Mode::Oracle}};
  std::map<CLI::App *, nlevp::Mode> mode_of;
  const char *descriptions[] = {"Compute eigenpairs inside the domain",
                                "Tabulate approximation error against the order",
                                "Solve and compare against the reference oracle"};
  for (std::size_t i = 0; i < 3; ++i)
  {
    CLI::App *sub = app.add_subcommand(modes[i].first, descriptions[i]);
    sub->add_option("config", config_path, "Key-value experiment file")->required();
    sub->add_option("--seed", seed, "Override solver.seed");
    sub->add_option("--out", out_path, "Report path (overrides output.report)");
    sub->add_flag("--quiet", quiet, "Suppress the summary on stdout");
    sub->add_flag("--timings", timings, "Append wall-clock timings to the report");
    mode_of[sub] = modes[i].second;
  }

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try
  {
    nlevp::ExperimentConfig cfg = nlevp::load_config(config_path);
    cfg.mode = mode_of.at(app.get_subcommands().front());
    if (seed)
    {
      cfg.solver.seed = *seed;
    }
    if (!out_path.empty())
    {
      cfg.report_path = out_path;
    }
    nlevp::validate_config(cfg);
    cfg.solver.threads = thread_cap();

    const nlevp::RunOutcome outcome = nlevp::run_experiment(cfg, {timings});
    if (cfg.report_path.empty())
    {
      std::cout << outcome.report;
      if (!quiet)
      {
        std::cerr << outcome.summary;
      }
    }
    else
    {
      std::ofstream file(cfg.report_path, std::ios::binary);
      file << outcome.report;
      if (!file)
      {
        std::cerr << "error: ConfigError: cannot write report to " << cfg.report_path << '\n';
        return 1;
      }
      if (!quiet)
      {
        std::cout << outcome.summary;
      }
    }
    return outcome.exit_code;
  }
  catch (const nlevp::Error &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
