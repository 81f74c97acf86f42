#include "liftpde/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "liftpde/numeric.hpp"
#include "liftpde/parallel.hpp"

namespace liftpde {

Strategy Strategy::greedy_max(const ValueField& v) {
  Strategy s;
  s.kind = Kind::greedy_max;
  s.value = &v;
  return s;
}

Strategy Strategy::greedy_min(const ValueField& v) {
  Strategy s;
  s.kind = Kind::greedy_min;
  s.value = &v;
  return s;
}

Strategy Strategy::random_move() { return Strategy{}; }

Strategy Strategy::pull_toward(Eigen::VectorXd target) {
  Strategy s;
  s.kind = Kind::pull_toward;
  s.target = std::move(target);
  return s;
}

namespace {

void require_value_field(const Strategy& s, const GameInstance& gi) {
  if (s.value == nullptr || s.value->grid != gi.grid) {
    throw std::logic_error("greedy strategy requires a value field on the game grid");
  }
}

NodeId choose_lattice(const Strategy& s, const GameInstance& gi, NodeId from, CounterRng& rng) {
  const GridDomain& grid = *gi.grid;
  switch (s.kind) {
    case Strategy::Kind::greedy_max:
      require_value_field(s, gi);
      return tilted_sup(*s.value, from).node;
    case Strategy::Kind::greedy_min:
      require_value_field(s, gi);
      return tilted_inf(*s.value, from).node;
    case Strategy::Kind::random_move: {
      std::vector<NodeId> candidates;
      candidates.reserve(grid.stencil_offsets().size());
      for (const StencilOffset& o : grid.stencil_offsets()) {
        const NodeId id = from + o.id_delta;
        if (grid.label(id) != NodeLabel::exterior) candidates.push_back(id);
      }
      return candidates[rng.next_index(candidates.size())];
    }
    case Strategy::Kind::pull_toward: {
      NodeId best = -1;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (const StencilOffset& o : grid.stencil_offsets()) {
        const NodeId id = from + o.id_delta;
        if (grid.label(id) == NodeLabel::exterior) continue;
        const double d2 = (grid.coords(id) - s.target).squaredNorm();
        if (d2 < best_d2) {  // offsets ascend in id: ties keep the smallest id
          best_d2 = d2;
          best = id;
        }
      }
      return best;
    }
  }
  throw std::logic_error("unknown strategy kind");
}

Eigen::VectorXd uniform_ball(int n, CounterRng& rng) {
  Eigen::VectorXd u(n);
  for (;;) {
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      u[i] = rng.next_symmetric();
      sq += u[i] * u[i];
    }
    if (sq < 1.0) return u;
  }
}

// Mesh-search almost-optimizer for the continuum tilted envelopes: a coarse
// lattice over the closed eps-ball followed by dyadic zooms around the
// incumbent. The admissible slack follows the selector schedule
// eta_k = eta0 2^{-k-1}; the mesh is refined until its spacing falls below
// eta_k * eps (capped), so the attained value trails the true envelope by a
// slack that halves along the trajectory.
Eigen::VectorXd continuum_search(const GameInstance& gi, const Strategy& s,
                                 const Eigen::VectorXd& x, bool maximize, std::int64_t step_index) {
  require_value_field(s, gi);
  const int n = gi.grid->dim();
  const double eps = gi.scheme.eps;
  const double e2 = eps * eps;
  const double eta_k = s.eta0 * std::pow(0.5, static_cast<double>(std::min<std::int64_t>(step_index, 48)) + 1.0);
  const double target_spacing = std::max(eta_k * eps, 1e-7 * eps);

  const auto objective = [&](const Eigen::VectorXd& d) {
    const double tilt = std::sqrt(std::max(0.0, e2 - d.squaredNorm()));
    const double val = interpolate(*s.value, gi.boundary, x + d);
    return maximize ? val + tilt : val - tilt;
  };

  Eigen::VectorXd best_d = Eigen::VectorXd::Zero(n);
  double best_val = objective(best_d);
  const auto consider = [&](const Eigen::VectorXd& d) {
    if (d.squaredNorm() > e2) return;
    const double val = objective(d);
    if (maximize ? val > best_val : val < best_val) {
      best_val = val;
      best_d = d;
    }
  };

  // Coarse pass: spacing eps/8 over the bounding cube of the ball.
  double spacing = eps / 8.0;
  Eigen::VectorXi k = Eigen::VectorXi::Constant(n, -8);
  for (;;) {
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d[i] = k[i] * spacing;
    consider(d);
    int i = n - 1;
    for (; i >= 0; --i) {
      if (++k[i] <= 8) break;
      k[i] = -8;
    }
    if (i < 0) break;
  }

  // Zoom passes: 5^n cube of half the spacing around the incumbent.
  for (int level = 0; level < 40 && spacing > target_spacing; ++level) {
    spacing *= 0.5;
    const Eigen::VectorXd center = best_d;
    Eigen::VectorXi c = Eigen::VectorXi::Constant(n, -2);
    for (;;) {
      Eigen::VectorXd d = center;
      for (int i = 0; i < n; ++i) d[i] += c[i] * spacing;
      consider(d);
      int i = n - 1;
      for (; i >= 0; --i) {
        if (++c[i] <= 2) break;
        c[i] = -2;
      }
      if (i < 0) break;
    }
  }
  return x + best_d;
}

Eigen::VectorXd choose_continuum(const Strategy& s, const GameInstance& gi,
                                 const Eigen::VectorXd& x, bool maximize, std::int64_t step_index,
                                 CounterRng& rng) {
  const double eps = gi.scheme.eps;
  switch (s.kind) {
    case Strategy::Kind::greedy_max:
      return continuum_search(gi, s, x, true, step_index);
    case Strategy::Kind::greedy_min:
      return continuum_search(gi, s, x, false, step_index);
    case Strategy::Kind::random_move:
      return x + eps * uniform_ball(gi.grid->dim(), rng);
    case Strategy::Kind::pull_toward: {
      Eigen::VectorXd dir = s.target - x;
      const double dist = dir.norm();
      if (dist <= eps || dist == 0.0) return s.target;
      return x + (eps / dist) * dir;
    }
  }
  (void)maximize;
  throw std::logic_error("unknown strategy kind");
}

}  // namespace

double interpolate(const ValueField& field, const BoundaryData& boundary,
                   const Eigen::VectorXd& x) {
  const GridDomain& grid = *field.grid;
  const int n = grid.dim();
  const double h = grid.spacing();
  Eigen::VectorXi base(n);
  Eigen::VectorXd t(n);
  for (int i = 0; i < n; ++i) {
    const double rel = (x[i] - grid.origin()[i]) / h;
    double cell = std::floor(rel);
    cell = std::clamp(cell, static_cast<double>(grid.block_min()[i]),
                      static_cast<double>(grid.block_max()[i] - 1));
    base[i] = static_cast<int>(cell);
    t[i] = std::clamp(rel - cell, 0.0, 1.0);
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << n); ++corner) {
    Eigen::VectorXi k = base;
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      const bool hi = (corner >> i) & 1;
      if (hi) k[i] += 1;
      w *= hi ? t[i] : 1.0 - t[i];
    }
    if (w == 0.0) continue;
    const NodeId id = grid.node_at(k);
    double val;
    if (id >= 0 && grid.label(id) != NodeLabel::exterior) {
      val = field.values[id];
    } else {
      Eigen::VectorXd corner_x(n);
      for (int i = 0; i < n; ++i) corner_x[i] = grid.origin()[i] + k[i] * h;
      val = boundary(corner_x);
    }
    acc += w * val;
  }
  return acc;
}

StepRecord step(GameState& state, const GameInstance& game, const Strategy& player_one,
                const Strategy& player_two, CounterRng& rng) {
  const GridDomain& grid = *game.grid;
  StepRecord rec;
  if (state.absorbed) {
    // Absorbing strip: the chain is frozen; no randomness is consumed.
    rec.node = state.node;
    rec.pos = state.pos;
    return rec;
  }

  const double u = rng.next_double();
  const double noise_cut = game.scheme.beta;
  const double one_cut = game.scheme.beta + 0.5 * game.scheme.alpha;

  if (game.mode == GameMode::lattice) {
    const NodeId from = state.node;
    if (u < noise_cut) {
      const Eigen::VectorXd target = grid.coords(from) + sample_noise(game.scheme.eps, grid.dim(), rng);
      state.node = grid.snap_inside(target);
      rec.type = MoveType::noise;
    } else {
      const bool is_one = u < one_cut;
      const Strategy& s = is_one ? player_one : player_two;
      const NodeId to = choose_lattice(s, game, from, rng);
      if (to < 0 || to >= grid.num_nodes() || grid.label(to) == NodeLabel::exterior) {
        throw std::logic_error("strategy moved outside the eps-neighborhood of the domain");
      }
      const double tilt = grid.tilt_between(from, to);
      if (tilt < 0.0) {
        throw std::logic_error("strategy moved outside the closed eps-ball");
      }
      state.node = to;
      rec.type = is_one ? MoveType::player_one : MoveType::player_two;
      rec.score_change = is_one ? tilt : -tilt;
      state.score_delta += rec.score_change;
    }
    state.absorbed = grid.label(state.node) == NodeLabel::strip;
    rec.node = state.node;
  } else {
    const Eigen::VectorXd from = state.pos;
    if (u < noise_cut) {
      state.pos = from + sample_noise(game.scheme.eps, grid.dim(), rng);
      rec.type = MoveType::noise;
    } else {
      const bool is_one = u < one_cut;
      const Strategy& s = is_one ? player_one : player_two;
      const Eigen::VectorXd to = choose_continuum(s, game, from, is_one, state.steps, rng);
      const double d2 = (to - from).squaredNorm();
      const double e2 = game.scheme.eps * game.scheme.eps;
      if (d2 > e2 * (1.0 + 1e-12)) {
        throw std::logic_error("strategy moved outside the closed eps-ball");
      }
      const double tilt = std::sqrt(std::max(0.0, e2 - d2));
      state.pos = to;
      rec.type = is_one ? MoveType::player_one : MoveType::player_two;
      rec.score_change = is_one ? tilt : -tilt;
      state.score_delta += rec.score_change;
    }
    state.absorbed = !grid.shape().contains(state.pos);
    rec.pos = state.pos;
  }
  ++state.steps;
  return rec;
}

Trajectory run_trajectory(const GameInstance& game, NodeId x0_node, const Eigen::VectorXd& x0,
                          double s0, const Strategy& player_one, const Strategy& player_two,
                          std::uint64_t master_seed, std::uint64_t stream,
                          const TrajectoryOptions& opts) {
  const GridDomain& grid = *game.grid;
  CounterRng rng(master_seed, stream);

  GameState state;
  if (game.mode == GameMode::lattice) {
    if (x0_node < 0 || x0_node >= grid.num_nodes() ||
        grid.label(x0_node) == NodeLabel::exterior) {
      throw std::invalid_argument("run_trajectory: start node must be interior or strip");
    }
    state.node = x0_node;
    state.absorbed = grid.label(x0_node) == NodeLabel::strip;
  } else {
    if (grid.shape().distance(x0) > game.scheme.eps) {
      throw std::invalid_argument("run_trajectory: start point must lie in the eps-neighborhood");
    }
    state.pos = x0;
    state.absorbed = !grid.shape().contains(x0);
  }

  Trajectory tr;
  tr.master_seed = master_seed;
  tr.stream = stream;
  tr.s0 = s0;
  tr.full_log = opts.record_full;

  constexpr std::size_t kKeep = 100;
  std::vector<StepRecord> ring;
  std::size_t ring_next = 0;

  while (!state.absorbed && state.steps < game.step_cap) {
    StepRecord rec = step(state, game, player_one, player_two, rng);
    switch (rec.type) {
      case MoveType::noise: ++tr.moves_noise; break;
      case MoveType::player_one: ++tr.moves_one; break;
      case MoveType::player_two: ++tr.moves_two; break;
    }
    if (opts.record_full) {
      tr.head.push_back(std::move(rec));
    } else if (opts.record_steps) {
      if (tr.head.size() < kKeep) {
        tr.head.push_back(std::move(rec));
      } else {
        if (ring.size() < kKeep) {
          ring.push_back(std::move(rec));
        } else {
          ring[ring_next] = std::move(rec);
        }
        ring_next = (ring_next + 1) % kKeep;
      }
    }
  }

  if (!opts.record_full && !ring.empty()) {
    tr.tail.reserve(ring.size());
    for (std::size_t i = 0; i < ring.size(); ++i) {
      tr.tail.push_back(ring[(ring_next + i) % ring.size()]);
    }
  }

  tr.tau = state.steps;
  tr.censored = !state.absorbed;
  tr.score_delta = state.score_delta;
  if (game.mode == GameMode::lattice) {
    tr.end_node = state.node;
    tr.end_pos = grid.coords(state.node);
  } else {
    tr.end_pos = state.pos;
  }
  // The s0 split keeps payoff(s0) == payoff(0) + s0 exact in floating point.
  tr.base_payoff = game.boundary(tr.end_pos) + tr.score_delta;
  tr.payoff = tr.base_payoff + s0;
  return tr;
}

MCEstimate estimate_value(const GameInstance& game, NodeId x0_node, const Eigen::VectorXd& x0,
                          double s0, const Strategy& player_one, const Strategy& player_two,
                          std::int64_t n_trajectories, std::uint64_t master_seed) {
  if (n_trajectories <= 0) throw std::invalid_argument("estimate_value: need at least one trajectory");

  std::vector<double> payoffs(static_cast<std::size_t>(n_trajectories));
  std::vector<std::int64_t> taus(static_cast<std::size_t>(n_trajectories));
  std::vector<std::uint8_t> censored(static_cast<std::size_t>(n_trajectories));

  TrajectoryOptions opts;
  opts.record_steps = false;
  parallel_for(n_trajectories, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      const Trajectory tr = run_trajectory(game, x0_node, x0, 0.0, player_one, player_two,
                                           master_seed, static_cast<std::uint64_t>(i), opts);
      payoffs[static_cast<std::size_t>(i)] = tr.base_payoff;
      taus[static_cast<std::size_t>(i)] = tr.tau;
      censored[static_cast<std::size_t>(i)] = tr.censored ? 1 : 0;
    }
  });

  MCEstimate est;
  est.n_trajectories = n_trajectories;
  est.s0 = s0;
  est.base_mean = compensated_sum(payoffs) / static_cast<double>(n_trajectories);
  est.mean = est.base_mean + s0;

  CompensatedSum var;
  for (const double p : payoffs) {
    const double d = p - est.base_mean;
    var.add(d * d);
  }
  if (n_trajectories > 1) {
    est.standard_error = std::sqrt(var.value() / static_cast<double>(n_trajectories - 1)) /
                         std::sqrt(static_cast<double>(n_trajectories));
  }

  CompensatedSum tau_sum;
  for (const std::int64_t t : taus) {
    tau_sum.add(static_cast<double>(t));
    est.max_tau = std::max(est.max_tau, t);
  }
  est.mean_tau = tau_sum.value() / static_cast<double>(n_trajectories);
  for (const auto c : censored) est.censored += c;
  est.valid = est.censored == 0;
  est.taus = std::move(taus);
  return est;
}

ExitTimeStats exit_time_stats(const std::vector<std::int64_t>& taus, const GameInstance& game) {
  if (taus.empty()) throw std::invalid_argument("exit_time_stats: no samples");
  ExitTimeStats st;
  const double extent = game.grid->shape().axis_extent();
  const double eps = game.scheme.eps;
  std::int64_t block = static_cast<std::int64_t>(std::floor(2.0 * extent / eps)) + 1;
  while (static_cast<double>(block) * eps / 2.0 <= extent) ++block;
  st.block = block;

  const auto n = static_cast<double>(taus.size());
  CompensatedSum mean;
  for (const std::int64_t t : taus) {
    mean.add(static_cast<double>(t));
    st.max_tau = std::max(st.max_tau, t);
  }
  st.mean_tau = mean.value() / n;

  for (std::int64_t m = 0;; ++m) {
    const std::int64_t cut = m * block;
    std::int64_t count = 0;
    for (const std::int64_t t : taus) {
      if (t > cut) ++count;
    }
    st.tail.push_back(static_cast<double>(count) / n);
    if (count == 0) break;
  }
  st.delta_hat = st.tail.size() > 1 ? 1.0 - st.tail[1] : 1.0;
  return st;
}

bool geometric_decay_within_bands(const ExitTimeStats& stats, std::int64_t n_samples, double z) {
  const double n = static_cast<double>(n_samples);
  const double delta = stats.delta_hat;
  const double se_delta = std::sqrt(std::max(delta * (1.0 - delta), 1.0 / n) / n);
  const double survive = std::min(1.0, 1.0 - delta + z * se_delta);
  for (std::size_t m = 1; m < stats.tail.size(); ++m) {
    const double p = stats.tail[m];
    const double se = std::sqrt(std::max(p * (1.0 - p), 1.0 / n) / n);
    const double bound = std::pow(survive, static_cast<double>(m)) + z * se;
    if (p > bound) return false;
  }
  return true;
}

}  // namespace liftpde
