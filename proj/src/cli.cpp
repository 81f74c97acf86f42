#include "liftpde/cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "liftpde/boundary.hpp"
#include "liftpde/dpp.hpp"
#include "liftpde/game.hpp"
#include "liftpde/io.hpp"
#include "liftpde/kernel.hpp"
#include "liftpde/verify.hpp"

namespace liftpde {
namespace {

using nlohmann::ordered_json;

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string tok = text.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (...) {
      throw ConfigError(what + ": malformed number '" + tok + "'");
    }
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  return out;
}

}  // namespace

DomainShape parse_domain(const std::string& spec) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("domain '" + spec + "': expected kind<dim>:params, e.g. box1d:0,1");
  }
  const std::string head = spec.substr(0, colon);
  std::string kind;
  std::size_t i = 0;
  while (i < head.size() && std::isalpha(static_cast<unsigned char>(head[i]))) kind += head[i++];
  if (i >= head.size() || head.back() != 'd') {
    throw ConfigError("domain '" + spec + "': expected a dimension suffix like box2d");
  }
  int dim = 0;
  try {
    dim = std::stoi(head.substr(i, head.size() - i - 1));
  } catch (...) {
    throw ConfigError("domain '" + spec + "': malformed dimension");
  }
  if (dim < 1 || dim > 3) throw ConfigError("domain '" + spec + "': dimension must be 1, 2, or 3");

  const auto params = parse_double_list(spec.substr(colon + 1), "domain '" + spec + "'");
  try {
    if (kind == "box") {
      if (static_cast<int>(params.size()) != 2 * dim) {
        throw ConfigError("domain '" + spec + "': box takes lo,hi per axis (" +
                          std::to_string(2 * dim) + " numbers)");
      }
      Eigen::VectorXd lo(dim), hi(dim);
      for (int a = 0; a < dim; ++a) {
        lo[a] = params[static_cast<std::size_t>(2 * a)];
        hi[a] = params[static_cast<std::size_t>(2 * a + 1)];
      }
      return DomainShape::box(lo, hi);
    }
    if (kind == "ball") {
      if (static_cast<int>(params.size()) != dim + 1) {
        throw ConfigError("domain '" + spec + "': ball takes center coordinates plus a radius");
      }
      Eigen::VectorXd c(dim);
      for (int a = 0; a < dim; ++a) c[a] = params[static_cast<std::size_t>(a)];
      return DomainShape::make_ball(c, params.back());
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("domain '" + spec + "': " + e.what());
  }
  throw ConfigError("domain '" + spec + "': unknown kind '" + kind + "' (box or ball)");
}

namespace {

struct HelpRequest {
  std::string text;
};

struct Binding {
  CLI::Option* opt = nullptr;
  std::function<void(const ordered_json&)> apply;
};

class SubSetup {
 public:
  explicit SubSetup(CLI::App* sub) : sub_(sub) {
    sub_->add_option("--config", config_path_, "JSON config file; explicit flags override its values");
  }

  void number(const std::string& name, double* target, const std::string& help) {
    auto* o = sub_->add_option(name, *target, help);
    bind(name, o, [target, name](const ordered_json& v) {
      if (!v.is_number()) throw ConfigError("config key '" + key_of(name) + "' must be a number");
      *target = v.get<double>();
    });
  }

  void integer(const std::string& name, long* target, const std::string& help) {
    auto* o = sub_->add_option(name, *target, help);
    bind(name, o, [target, name](const ordered_json& v) {
      if (!v.is_number_integer()) throw ConfigError("config key '" + key_of(name) + "' must be an integer");
      *target = v.get<long>();
    });
  }

  void integer64(const std::string& name, std::int64_t* target, const std::string& help) {
    auto* o = sub_->add_option(name, *target, help);
    bind(name, o, [target, name](const ordered_json& v) {
      if (!v.is_number_integer()) throw ConfigError("config key '" + key_of(name) + "' must be an integer");
      *target = v.get<std::int64_t>();
    });
  }

  void integer32(const std::string& name, int* target, const std::string& help) {
    auto* o = sub_->add_option(name, *target, help);
    bind(name, o, [target, name](const ordered_json& v) {
      if (!v.is_number_integer()) throw ConfigError("config key '" + key_of(name) + "' must be an integer");
      *target = v.get<int>();
    });
  }

  void seed(const std::string& name, std::uint64_t* target, const std::string& help) {
    auto* o = sub_->add_option(name, *target, help);
    bind(name, o, [target, name](const ordered_json& v) {
      if (!v.is_number_unsigned() && !v.is_number_integer()) {
        throw ConfigError("config key '" + key_of(name) + "' must be a nonnegative integer");
      }
      *target = v.get<std::uint64_t>();
    });
  }

  void text(const std::string& name, std::string* target, const std::string& help) {
    auto* o = sub_->add_option(name, *target, help);
    bind(name, o, [target, name](const ordered_json& v) {
      if (!v.is_string()) throw ConfigError("config key '" + key_of(name) + "' must be a string");
      *target = v.get<std::string>();
    });
  }

  // Comma-separated list flag; the config file form is a JSON array.
  void numbers(const std::string& name, std::vector<double>* target, const std::string& help) {
    auto* o = sub_->add_option_function<std::string>(
        name, [target, name](const std::string& s) { *target = parse_double_list(s, key_of(name)); },
        help);
    bind(name, o, [target, name](const ordered_json& v) {
      if (!v.is_array()) throw ConfigError("config key '" + key_of(name) + "' must be an array of numbers");
      target->clear();
      for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError("config key '" + key_of(name) + "' must contain numbers only");
        target->push_back(e.get<double>());
      }
    });
  }

  // Applies the config file (if any) for keys whose flags were not given.
  void finalize() {
    if (config_path_.empty()) return;
    std::ifstream in(config_path_);
    if (!in) throw ConfigError("cannot open config file '" + config_path_ + "'");
    ordered_json doc;
    try {
      doc = ordered_json::parse(in);
    } catch (const std::exception& e) {
      throw ConfigError("config file '" + config_path_ + "': " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config file '" + config_path_ + "' must hold a JSON object");
    for (const auto& [key, value] : doc.items()) {
      const auto it = bindings_.find(key);
      if (it == bindings_.end()) {
        throw ConfigError("config file '" + config_path_ + "': unknown key '" + key + "'");
      }
      if (it->second.opt->count() > 0) continue;  // explicit flag wins
      it->second.apply(value);
    }
  }

 private:
  static std::string key_of(const std::string& flag) {
    std::string key = flag.substr(flag.find_first_not_of('-'));
    for (char& c : key) {
      if (c == '-') c = '_';
    }
    return key;
  }

  void bind(const std::string& flag, CLI::Option* opt, std::function<void(const ordered_json&)> fn) {
    bindings_[key_of(flag)] = Binding{opt, std::move(fn)};
  }

  CLI::App* sub_;
  std::string config_path_;
  std::map<std::string, Binding> bindings_;
};

void validate_common(const RunConfig& cfg, bool needs_domain, bool needs_eps) {
  if (cfg.p < 2.0) {
    throw ConfigError("p = " + std::to_string(cfg.p) +
                      " is outside the scheme's validity range; p must be at least 2");
  }
  if (needs_domain && cfg.domain_spec.empty()) throw ConfigError("missing --domain");
  if (needs_eps && !(cfg.eps > 0.0)) throw ConfigError("missing or nonpositive --eps");
  if (cfg.h < 0.0) throw ConfigError("--spacing must be positive when given");
  if (cfg.h == 0.0 && !(cfg.ratio > 0.0)) throw ConfigError("--ratio must be positive");
  if (!(cfg.tol > 0.0)) throw ConfigError("--tol must be positive");
  if (cfg.max_iter <= 0) throw ConfigError("--max-iter must be positive");
  if (cfg.init != "lower_barrier" && cfg.init != "upper_barrier") {
    throw ConfigError("--init must be lower_barrier or upper_barrier");
  }
}

double spacing_of(const RunConfig& cfg) { return cfg.h > 0.0 ? cfg.h : cfg.eps / cfg.ratio; }

// The grid lives behind a unique_ptr so the address captured by the solved
// field's grid pointer stays valid when the struct is returned.
struct SolveArtifacts {
  std::unique_ptr<GridDomain> grid;
  KernelWeights weights;
  SchemeParams params;
  BoundaryData boundary;
  SolveResult sol;
};

SolveArtifacts solve_from_config(const RunConfig& cfg) {
  const DomainShape shape = parse_domain(cfg.domain_spec);
  const double h = spacing_of(cfg);
  auto grid = [&] {
    try {
      return std::make_unique<GridDomain>(build_grid(shape, h, cfg.eps));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  KernelWeights weights = quadrature_weights(*grid);
  SchemeParams params = [&] {
    try {
      return SchemeParams::make(cfg.p, cfg.eps, shape.dim);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  params.tol = cfg.tol;
  params.max_iterations = cfg.max_iter;
  params.relaxation = cfg.relaxation;
  BoundaryData boundary = [&] {
    try {
      return parse_boundary(cfg.boundary_spec, shape.dim);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  const ValueField start = make_field(*grid, boundary.f, 0.0);
  const InitMode init = cfg.init == "upper_barrier" ? InitMode::upper_barrier : InitMode::lower_barrier;
  SolveResult sol = solve_fixed_point(start, params, weights, init);
  return SolveArtifacts{std::move(grid), std::move(weights), params, std::move(boundary), std::move(sol)};
}

ordered_json config_echo(const RunConfig& cfg) {
  ordered_json j;
  j["command"] = cfg.command;
  if (!cfg.domain_spec.empty()) j["domain"] = cfg.domain_spec;
  j["p"] = cfg.p;
  if (cfg.eps > 0.0) {
    j["eps"] = cfg.eps;
    j["h"] = spacing_of(cfg);
  }
  j["boundary"] = cfg.boundary_spec;
  j["tol"] = cfg.tol;
  j["max_iter"] = cfg.max_iter;
  j["init"] = cfg.init;
  j["seed"] = cfg.seed;
  return j;
}

ordered_json solver_summary(const SolveArtifacts& art) {
  ordered_json j;
  j["alpha"] = art.params.alpha;
  j["beta"] = art.params.beta;
  j["num_nodes"] = art.grid->num_nodes();
  j["num_interior"] = static_cast<std::int64_t>(art.grid->interior_nodes().size());
  j["num_strip"] = static_cast<std::int64_t>(art.grid->strip_nodes().size());
  j["raw_quadrature_sum"] = art.weights.raw_sum;
  j["iterations"] = art.sol.iterations;
  j["final_residual"] = art.sol.residuals.empty() ? 0.0 : art.sol.residuals.back();
  j["converged"] = art.sol.converged;
  return j;
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  atomic_write_file(path, j.dump(2) + "\n");
}

Strategy parse_strategy(const std::string& spec, const ValueField& value, int dim) {
  const std::size_t colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  if (name == "greedy_max") return Strategy::greedy_max(value);
  if (name == "greedy_min") return Strategy::greedy_min(value);
  if (name == "random") return Strategy::random_move();
  if (name == "pull") {
    if (colon == std::string::npos) throw ConfigError("pull strategy needs a target point: pull:x1,...");
    const auto ps = parse_double_list(spec.substr(colon + 1), "pull target");
    if (static_cast<int>(ps.size()) != dim) throw ConfigError("pull target dimension mismatch");
    Eigen::VectorXd t(dim);
    for (int i = 0; i < dim; ++i) t[i] = ps[static_cast<std::size_t>(i)];
    return Strategy::pull_toward(std::move(t));
  }
  throw ConfigError("unknown strategy '" + name + "'; expected greedy_max, greedy_min, random, or pull");
}

int run_solve(const RunConfig& cfg) {
  const SolveArtifacts art = solve_from_config(cfg);
  const std::filesystem::path out(cfg.out_dir);
  atomic_write_file(out / "field.csv", field_to_csv(art.sol.field));
  ordered_json meta;
  meta["schema_version"] = "liftpde/1";
  meta["config"] = config_echo(cfg);
  meta["result"] = solver_summary(art);
  write_json(out / "meta.json", meta);
  return art.sol.converged ? exit_ok : exit_not_converged;
}

int run_play(const RunConfig& cfg) {
  if (cfg.x0.empty()) throw ConfigError("play requires --x0");
  if (cfg.n_traj <= 0) throw ConfigError("--n-traj must be positive");
  if (cfg.mode != "lattice" && cfg.mode != "continuum") {
    throw ConfigError("--mode must be lattice or continuum");
  }
  const SolveArtifacts art = solve_from_config(cfg);
  const int dim = art.grid->dim();
  if (static_cast<int>(cfg.x0.size()) != dim) throw ConfigError("--x0 dimension mismatch");
  Eigen::VectorXd x0(dim);
  for (int i = 0; i < dim; ++i) x0[i] = cfg.x0[static_cast<std::size_t>(i)];

  GameInstance game;
  game.grid = art.grid.get();
  game.scheme = art.params;
  game.mode = cfg.mode == "lattice" ? GameMode::lattice : GameMode::continuum;
  game.boundary = art.boundary;
  game.step_cap = cfg.step_cap;

  NodeId x0_node = -1;
  if (game.mode == GameMode::lattice) {
    x0_node = art.grid->snap_inside(x0);
    if (art.grid->label(x0_node) != NodeLabel::interior) {
      throw ConfigError("--x0 does not snap to an interior node");
    }
  } else if (!art.grid->shape().contains(x0)) {
    throw ConfigError("--x0 must lie inside the domain");
  }

  const Strategy s1 = parse_strategy(cfg.strategy_one, art.sol.field, dim);
  const Strategy s2 = parse_strategy(cfg.strategy_two, art.sol.field, dim);

  const MCEstimate est = estimate_value(game, x0_node, x0, cfg.s0, s1, s2, cfg.n_traj, cfg.seed);

  const std::filesystem::path out(cfg.out_dir);
  ordered_json j;
  j["schema_version"] = "liftpde/1";
  j["config"] = config_echo(cfg);
  j["config"]["x0"] = cfg.x0;
  j["config"]["s0"] = cfg.s0;
  j["config"]["strategy_one"] = cfg.strategy_one;
  j["config"]["strategy_two"] = cfg.strategy_two;
  j["config"]["n_traj"] = cfg.n_traj;
  j["config"]["mode"] = cfg.mode;
  if (game.mode == GameMode::lattice) {
    j["config"]["x0_node"] = x0_node;
    const Eigen::VectorXd snapped = art.grid->coords(x0_node);
    j["config"]["x0_snapped"] = std::vector<double>(snapped.data(), snapped.data() + dim);
  }
  j["solver"] = solver_summary(art);
  ordered_json r;
  r["mean"] = est.mean;
  r["standard_error"] = est.standard_error;
  // fixed-point value at the start, the quantity the estimate approximates
  if (game.mode == GameMode::lattice) {
    r["solver_value"] = art.sol.field(x0_node) + cfg.s0;
  } else {
    r["solver_value"] = interpolate(art.sol.field, art.boundary, x0) + cfg.s0;
  }
  r["n_trajectories"] = est.n_trajectories;
  r["mean_tau"] = est.mean_tau;
  r["max_tau"] = est.max_tau;
  r["censored"] = est.censored;
  r["valid"] = est.valid;
  j["estimate"] = r;
  write_json(out / "estimate.json", j);

  if (cfg.dump_trajectories > 0) {
    std::string lines;
    const std::int64_t count = std::min<std::int64_t>(cfg.dump_trajectories, cfg.n_traj);
    for (std::int64_t i = 0; i < count; ++i) {
      const Trajectory tr = run_trajectory(game, x0_node, x0, cfg.s0, s1, s2, cfg.seed,
                                           static_cast<std::uint64_t>(i), TrajectoryOptions{});
      lines += trajectory_to_jsonl_line(tr, game.mode) + "\n";
    }
    atomic_write_file(out / "trajectories.jsonl", lines);
  }

  if (!art.sol.converged) return exit_not_converged;
  return est.valid ? exit_ok : exit_censored;
}

int run_sweep(const RunConfig& cfg) {
  if (cfg.eps_list.empty()) throw ConfigError("sweep requires --eps-list");
  const DomainShape shape = parse_domain(cfg.domain_spec);
  BoundaryData boundary = [&] {
    try {
      return parse_boundary(cfg.boundary_spec, shape.dim);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  const auto oracle = oracle_for_boundary(boundary, cfg.p, shape.dim);
  if (!oracle) {
    throw ConfigError("sweep needs a closed-form reference for boundary '" + boundary.name +
                      "' at p = " + std::to_string(cfg.p) + "; none is available");
  }
  const double slack = 1e-5;  // separates solver-floor noise from real error growth
  SweepReport rep;
  try {
    rep = eps_sweep(shape, boundary, cfg.p, cfg.eps_list, cfg.ratio, *oracle, cfg.tol,
                    cfg.max_iter, slack);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const std::filesystem::path out(cfg.out_dir);
  atomic_write_file(out / "sweep.csv", sweep_to_csv(rep));
  ordered_json meta;
  meta["schema_version"] = "liftpde/1";
  meta["config"] = config_echo(cfg);
  meta["config"]["eps_list"] = cfg.eps_list;
  meta["config"]["ratio"] = cfg.ratio;
  meta["result"] = {{"collar", rep.collar},
                    {"monotone", rep.monotone},
                    {"monotone_slack", rep.monotone_slack},
                    {"all_converged", rep.all_converged}};
  write_json(out / "meta.json", meta);
  return rep.all_converged ? exit_ok : exit_not_converged;
}

int run_verify_lift(const RunConfig& cfg) {
  if (cfg.n_samples <= 0) throw ConfigError("--n-samples must be positive");
  const SolveArtifacts art = solve_from_config(cfg);
  LiftedResidualReport rep;
  try {
    rep = lifted_dpp_residual(art.sol.field, art.params, cfg.n_samples, cfg.height, cfg.seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::filesystem::path out(cfg.out_dir);
  ordered_json j;
  j["schema_version"] = "liftpde/1";
  j["config"] = config_echo(cfg);
  j["config"]["n_samples"] = cfg.n_samples;
  j["config"]["height"] = cfg.height;
  j["solver"] = solver_summary(art);
  j["result"] = {{"max_residual", rep.max_residual},
                 {"samples", rep.samples},
                 {"product_points", rep.product_points}};
  write_json(out / "residual.json", j);
  return art.sol.converged ? exit_ok : exit_not_converged;
}

int run_verify_pde(const RunConfig& cfg) {
  const SolveArtifacts art = solve_from_config(cfg);
  double residual = 0.0;
  try {
    residual = pde_residual(art.sol.field, art.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::filesystem::path out(cfg.out_dir);
  ordered_json j;
  j["schema_version"] = "liftpde/1";
  j["config"] = config_echo(cfg);
  j["solver"] = solver_summary(art);
  j["result"] = {{"max_pde_residual", residual}};
  write_json(out / "residual.json", j);
  return art.sol.converged ? exit_ok : exit_not_converged;
}

int run_crosscheck(const RunConfig& cfg) {
  if (cfg.eps_list.empty()) throw ConfigError("crosscheck requires --eps-list");
  if (cfg.x_point.empty()) throw ConfigError("crosscheck requires --x");
  if (static_cast<int>(cfg.x_point.size()) != cfg.dim) {
    throw ConfigError("--x dimension must match --dim");
  }
  Eigen::VectorXd x(cfg.dim);
  for (int i = 0; i < cfg.dim; ++i) x[i] = cfg.x_point[static_cast<std::size_t>(i)];
  CrosscheckReport rep;
  try {
    rep = constants_crosscheck(cfg.p, cfg.dim, quadratic_test_function(cfg.dim), x, cfg.eps_list);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::filesystem::path out(cfg.out_dir);
  ordered_json j;
  j["schema_version"] = "liftpde/1";
  j["config"] = config_echo(cfg);
  j["config"]["dim"] = cfg.dim;
  j["config"]["x"] = cfg.x_point;
  j["config"]["eps_list"] = cfg.eps_list;
  ordered_json rows = ordered_json::array();
  for (const CrosscheckRow& r : rep.rows) {
    rows.push_back({{"eps", r.eps}, {"avg_gap", r.avg_gap}, {"tilt_gap", r.tilt_gap}});
  }
  j["rows"] = rows;
  j["result"] = {{"fitted_avg_coeff", rep.fitted_avg_coeff},
                 {"analytic_avg_coeff", rep.analytic_avg_coeff},
                 {"avg_rel_error", rep.avg_rel_error},
                 {"fitted_tilt_coeff", rep.fitted_tilt_coeff},
                 {"analytic_tilt_coeff", rep.analytic_tilt_coeff},
                 {"tilt_rel_error", rep.tilt_rel_error}};
  write_json(out / "report.json", j);
  return exit_ok;
}

}  // namespace

RunConfig parse_cli(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"solver, game simulator, and verification harness for the projected "
               "p-harmonious scheme"};
  app.require_subcommand(1);

  std::vector<std::unique_ptr<SubSetup>> setups;
  const auto common = [&](CLI::App* sub, bool with_solver) {
    auto setup = std::make_unique<SubSetup>(sub);
    setup->text("--domain", &cfg.domain_spec, "domain spec, e.g. box1d:0,1 or ball2d:0,0,1");
    setup->number("--p", &cfg.p, "exponent p >= 2");
    setup->text("--boundary", &cfg.boundary_spec, "boundary datum spec");
    setup->seed("--seed", &cfg.seed, "master seed");
    setup->text("--out", &cfg.out_dir, "output directory");
    if (with_solver) {
      setup->number("--eps", &cfg.eps, "step scale eps");
      setup->number("--ratio", &cfg.ratio, "eps/h ratio (h derived)");
      setup->number("--spacing", &cfg.h, "explicit lattice spacing (overrides --ratio)");
      setup->number("--tol", &cfg.tol, "sup-norm residual stopping threshold");
      setup->integer("--max-iter", &cfg.max_iter, "iteration cap");
      setup->number("--relaxation", &cfg.relaxation, "over-relaxation factor (1 = plain iteration)");
      setup->text("--init", &cfg.init, "lower_barrier or upper_barrier");
    }
    return setup;
  };

  auto* solve = app.add_subcommand("solve", "solve the scheme fixed point and write the field");
  setups.push_back(common(solve, true));

  auto* play = app.add_subcommand("play", "Monte Carlo game value estimate");
  {
    auto s = common(play, true);
    s->numbers("--x0", &cfg.x0, "start point");
    s->number("--s0", &cfg.s0, "initial score");
    s->text("--strategy-one", &cfg.strategy_one, "player one strategy");
    s->text("--strategy-two", &cfg.strategy_two, "player two strategy");
    s->integer("--n-traj", &cfg.n_traj, "trajectory count");
    s->text("--mode", &cfg.mode, "lattice or continuum");
    s->integer("--dump-trajectories", &cfg.dump_trajectories, "write this many trajectories as JSONL");
    s->integer64("--step-cap", &cfg.step_cap, "censoring cap per trajectory");
    setups.push_back(std::move(s));
  }

  auto* sweep = app.add_subcommand("sweep", "solve along an eps list and report core errors");
  {
    auto s = common(sweep, true);
    s->numbers("--eps-list", &cfg.eps_list, "descending eps values");
    setups.push_back(std::move(s));
  }

  auto* vlift = app.add_subcommand("verify-lift", "residual of the lifted dynamic programming identity");
  {
    auto s = common(vlift, true);
    s->integer32("--n-samples", &cfg.n_samples, "sampled (node, height) pairs");
    s->number("--height", &cfg.height, "height range for sampled scores");
    setups.push_back(std::move(s));
  }

  auto* vpde = app.add_subcommand("verify-pde", "finite-difference residual of the limit equation");
  setups.push_back(common(vpde, true));

  auto* cross = app.add_subcommand("crosscheck", "expansion-constant crosscheck at a point");
  {
    auto s = common(cross, false);
    s->integer32("--dim", &cfg.dim, "space dimension");
    s->numbers("--x", &cfg.x_point, "test point");
    s->numbers("--eps-list", &cfg.eps_list, "eps values for the fit");
    setups.push_back(std::move(s));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto parsed = app.get_subcommands();
    throw HelpRequest{parsed.empty() ? app.help() : parsed.front()->help()};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  for (auto& s : setups) s->finalize();

  if (solve->parsed()) cfg.command = "solve";
  if (play->parsed()) cfg.command = "play";
  if (sweep->parsed()) cfg.command = "sweep";
  if (vlift->parsed()) cfg.command = "verify-lift";
  if (vpde->parsed()) cfg.command = "verify-pde";
  if (cross->parsed()) cfg.command = "crosscheck";
  return cfg;
}

int run(const RunConfig& cfg) {
  if (cfg.command == "solve") {
    validate_common(cfg, true, true);
    return run_solve(cfg);
  }
  if (cfg.command == "play") {
    validate_common(cfg, true, true);
    return run_play(cfg);
  }
  if (cfg.command == "sweep") {
    validate_common(cfg, true, false);
    return run_sweep(cfg);
  }
  if (cfg.command == "verify-lift") {
    validate_common(cfg, true, true);
    return run_verify_lift(cfg);
  }
  if (cfg.command == "verify-pde") {
    validate_common(cfg, true, true);
    return run_verify_pde(cfg);
  }
  if (cfg.command == "crosscheck") {
    validate_common(cfg, false, false);
    return run_crosscheck(cfg);
  }
  throw ConfigError("no subcommand selected");
}

int main_entry(int argc, const char* const* argv) {
  try {
    const std::vector<std::string> args(argv + 1, argv + argc);
    const RunConfig cfg = parse_cli(args);
    return run(cfg);
  } catch (const HelpRequest& h) {
    std::cout << h.text;
    return exit_ok;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return exit_config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
}

}  // namespace liftpde
