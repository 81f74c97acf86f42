#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "liftpde/boundary.hpp"
#include "liftpde/dpp.hpp"
#include "liftpde/geometry.hpp"
#include "liftpde/rng.hpp"

namespace liftpde {

enum class GameMode { lattice, continuum };
enum class MoveType : std::uint8_t { noise, player_one, player_two };

// One round of play from an interior state: a single uniform draw selects the
// move type by the fixed partition
//   [0, beta)              noise (kernel draw),
//   [beta, beta + alpha/2) player one (score += tilt),
//   [beta + alpha/2, 1)    player two (score -= tilt),
// after which the chosen mover relocates inside the closed eps-ball. The strip
// is absorbing: once the position leaves Omega the state never changes again.
struct GameInstance {
  const GridDomain* grid = nullptr;
  SchemeParams scheme;
  GameMode mode = GameMode::lattice;
  BoundaryData boundary;  // payoff datum F, evaluated at the exit position
  std::int64_t step_cap = 10'000'000;
};

// Augmented game state. The score is tracked as the tilt total accumulated
// since the start (score_delta); the running score is s0 + score_delta, kept
// split so that the s0-shift identity of payoffs is exact in floating point.
struct GameState {
  NodeId node = -1;          // lattice mode
  Eigen::VectorXd pos;       // continuum mode
  double score_delta = 0.0;
  std::int64_t steps = 0;
  bool absorbed = false;
};

struct Strategy {
  enum class Kind { greedy_max, greedy_min, random_move, pull_toward };

  Kind kind = Kind::random_move;
  const ValueField* value = nullptr;  // greedy_* consult this field
  Eigen::VectorXd target;             // pull_toward
  double eta0 = 1e-2;                 // continuum mesh-search slack scale

  static Strategy greedy_max(const ValueField& v);
  static Strategy greedy_min(const ValueField& v);
  static Strategy random_move();
  static Strategy pull_toward(Eigen::VectorXd target);
};

struct StepRecord {
  MoveType type = MoveType::noise;
  NodeId node = -1;          // position after the move (lattice)
  Eigen::VectorXd pos;       // position after the move (continuum)
  double score_change = 0.0; // +tilt, -tilt, or 0
};

struct TrajectoryOptions {
  bool record_steps = true;  // keep step records at all (estimators turn this off)
  bool record_full = false;  // keep every step; otherwise first/last 100
};

struct Trajectory {
  std::uint64_t master_seed = 0;
  std::uint64_t stream = 0;
  double s0 = 0.0;
  std::int64_t tau = 0;
  bool censored = false;      // step cap hit before absorption
  double score_delta = 0.0;   // sum of signed tilts over the trajectory
  double base_payoff = 0.0;   // F(x_tau) + score_delta
  double payoff = 0.0;        // base_payoff + s0
  std::int64_t moves_noise = 0;
  std::int64_t moves_one = 0;
  std::int64_t moves_two = 0;
  NodeId end_node = -1;
  Eigen::VectorXd end_pos;
  bool full_log = false;
  std::vector<StepRecord> head;  // first steps (all of them when full_log)
  std::vector<StepRecord> tail;  // last 100 steps when truncated
};

// Advances one round. Strategic moves are validated against the closed
// eps-ball and the grid labels; a strategy that proposes anything else is a
// contract violation and throws std::logic_error. Returns the executed move.
StepRecord step(GameState& state, const GameInstance& game, const Strategy& player_one,
                const Strategy& player_two, CounterRng& rng);

// Full playout from (x0, s0) under the derived generator
// CounterRng(master_seed, stream); the pair fully determines the trajectory.
Trajectory run_trajectory(const GameInstance& game, NodeId x0_node, const Eigen::VectorXd& x0,
                          double s0, const Strategy& player_one, const Strategy& player_two,
                          std::uint64_t master_seed, std::uint64_t stream,
                          const TrajectoryOptions& opts = {});

struct MCEstimate {
  double mean = 0.0;            // base_mean + s0
  double base_mean = 0.0;       // mean of F(x_tau) + score_delta over trajectories
  double standard_error = 0.0;
  std::int64_t n_trajectories = 0;
  double mean_tau = 0.0;
  std::int64_t max_tau = 0;
  std::int64_t censored = 0;
  bool valid = false;           // false iff any trajectory was censored
  double s0 = 0.0;
  std::vector<std::int64_t> taus;
};

// Monte Carlo value estimate over trajectories 0..n-1, trajectory i drawn from
// stream i of master_seed. Results are independent of the worker count.
MCEstimate estimate_value(const GameInstance& game, NodeId x0_node, const Eigen::VectorXd& x0,
                          double s0, const Strategy& player_one, const Strategy& player_two,
                          std::int64_t n_trajectories, std::uint64_t master_seed);

struct ExitTimeStats {
  std::int64_t block = 0;        // N: smallest integer with N eps/2 > axis extent
  double delta_hat = 0.0;        // empirical P(tau <= N)
  std::vector<double> tail;      // tail[m] = empirical P(tau > m N)
  double mean_tau = 0.0;
  std::int64_t max_tau = 0;
};

ExitTimeStats exit_time_stats(const std::vector<std::int64_t>& taus, const GameInstance& game);

// Checks tail[m] <= (1 - delta_hat + z SE_delta)^m + z SE_m for every block
// index with the binomial standard errors of an n-sample estimate.
bool geometric_decay_within_bands(const ExitTimeStats& stats, std::int64_t n_samples, double z);

// Multilinear interpolation of a lattice field at a continuum point of the
// eps-neighborhood. Cell corners labeled exterior fall back to the boundary
// datum; used by the continuum-mode greedy strategies.
double interpolate(const ValueField& field, const BoundaryData& boundary,
                   const Eigen::VectorXd& x);

}  // namespace liftpde
