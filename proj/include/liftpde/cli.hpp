#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "liftpde/geometry.hpp"

namespace liftpde {

// Distinct process exit codes; scripts branch on these.
enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,        // unexpected internal error
  exit_config_error = 2,   // malformed flags, config file, or domain/boundary spec
  exit_not_converged = 3,  // solver hit the iteration cap
  exit_censored = 4,       // Monte Carlo run hit the step cap on some trajectory
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string domain_spec;
  double p = 2.0;
  double eps = 0.0;
  double ratio = 8.0;  // eps / h when h is not given explicitly
  double h = 0.0;      // explicit lattice spacing overrides ratio
  std::string boundary_spec = "constant:0";
  double tol = 1e-10;
  long max_iter = 500000;
  double relaxation = 1.0;
  std::string init = "lower_barrier";
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  // play
  std::vector<double> x0;
  double s0 = 0.0;
  std::string strategy_one = "greedy_max";
  std::string strategy_two = "greedy_min";
  long n_traj = 10000;
  std::string mode = "lattice";
  long dump_trajectories = 0;
  std::int64_t step_cap = 10'000'000;
  // sweep, crosscheck
  std::vector<double> eps_list;
  // verify-lift
  int n_samples = 200;
  double height = 1.0;
  // crosscheck
  int dim = 1;
  std::vector<double> x_point;
};

// "box1d:0,1", "box2d:0,1,0,1" (per-axis lo,hi pairs), "ball2d:cx,cy,r".
DomainShape parse_domain(const std::string& spec);

// Parses argv (subcommand plus flags, with optional --config JSON file whose
// keys are the long option names; explicit flags win over file values;
// unknown keys are errors). Throws ConfigError.
RunConfig parse_cli(const std::vector<std::string>& args);

// Executes a parsed run and writes its artifacts under cfg.out_dir.
int run(const RunConfig& cfg);

// parse + run + error mapping; the binary's main defers here.
int main_entry(int argc, const char* const* argv);

}  // namespace liftpde
