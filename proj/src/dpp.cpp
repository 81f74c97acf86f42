#include "liftpde/dpp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "liftpde/parallel.hpp"

namespace liftpde {

std::pair<double, double> coefficients(double p, int dim) {
  if (!(p >= 2.0)) {
    throw std::invalid_argument("coefficients: p must be >= 2 (scheme validity range)");
  }
  if (dim <= 0) throw std::invalid_argument("coefficients: dimension must be positive");
  const double alpha = (p - 2.0) / (p + dim + 1.0);
  return {alpha, 1.0 - alpha};
}

SchemeParams SchemeParams::make(double p, double eps, int dim) {
  SchemeParams s;
  const auto [alpha, beta] = coefficients(p, dim);
  s.p = p;
  s.eps = eps;
  s.dim = dim;
  s.alpha = alpha;
  s.beta = beta;
  return s;
}

ValueField make_field(const GridDomain& grid,
                      const std::function<double(const Eigen::VectorXd&)>& boundary,
                      double interior_value) {
  ValueField f;
  f.grid = &grid;
  f.values = Eigen::VectorXd::Zero(grid.num_nodes());
  for (const NodeId id : grid.interior_nodes()) f.values[id] = interior_value;
  for (const NodeId id : grid.strip_nodes()) f.values[id] = boundary(grid.coords(id));
  return f;
}

ValueField sample_field(const GridDomain& grid,
                        const std::function<double(const Eigen::VectorXd&)>& fn) {
  ValueField f;
  f.grid = &grid;
  f.values = Eigen::VectorXd::Zero(grid.num_nodes());
  for (const NodeId id : grid.interior_nodes()) f.values[id] = fn(grid.coords(id));
  for (const NodeId id : grid.strip_nodes()) f.values[id] = fn(grid.coords(id));
  return f;
}

double sup_norm_interior(const ValueField& u) {
  double m = 0.0;
  for (const NodeId id : u.grid->interior_nodes()) m = std::max(m, std::abs(u.values[id]));
  return m;
}

double sup_norm_strip(const ValueField& u) {
  double m = 0.0;
  for (const NodeId id : u.grid->strip_nodes()) m = std::max(m, std::abs(u.values[id]));
  return m;
}

namespace {

// Merged per-offset table for the hot loop: neighbor id shift, kernel weight
// (zero on the eps-sphere shell), and the strategic tilt.
struct OpEntry {
  std::int64_t delta;
  double w;
  double tilt;
};

std::vector<OpEntry> build_entries(const GridDomain& grid, const KernelWeights& weights) {
  const auto& offsets = grid.stencil_offsets();
  std::vector<OpEntry> entries;
  entries.reserve(offsets.size());
  std::size_t wi = 0;
  for (const StencilOffset& o : offsets) {
    OpEntry e{o.id_delta, 0.0, o.tilt};
    if (o.open) {
      // quadrature_weights enumerates open-ball offsets in the same order.
      e.w = weights.weights[static_cast<Eigen::Index>(wi++)];
    }
    entries.push_back(e);
  }
  if (wi != static_cast<std::size_t>(weights.weights.size())) {
    throw std::invalid_argument("apply_T: kernel weights do not match the grid stencil");
  }
  return entries;
}

void check_compatible(const ValueField& u, const SchemeParams& params,
                      const KernelWeights& weights) {
  if (u.grid == nullptr) throw std::invalid_argument("apply_T: field has no grid");
  if (u.values.size() != u.grid->num_nodes()) {
    throw std::invalid_argument("apply_T: field size does not match the grid");
  }
  if (params.dim != u.grid->dim() || weights.dim != u.grid->dim()) {
    throw std::invalid_argument("apply_T: dimension mismatch");
  }
  if (params.eps != u.grid->eps() || weights.eps != u.grid->eps()) {
    throw std::invalid_argument("apply_T: eps mismatch between field, params, and weights");
  }
}

// Applies the operator into `out` and returns the sup-norm residual
// max |out - in| over interior nodes. Strip and exterior entries of `out`
// must already equal those of `in`.
double apply_into(const Eigen::VectorXd& in, Eigen::VectorXd& out,
                  const std::vector<NodeId>& interior, const std::vector<OpEntry>& entries,
                  double alpha, double beta, double relaxation) {
  const double* v = in.data();
  double* o = out.data();
  const OpEntry* es = entries.data();
  const std::size_t m = entries.size();
  const double half_alpha = 0.5 * alpha;
  const bool pure_average = alpha == 0.0;
  const bool plain = relaxation == 1.0;

  const int workers = worker_count();
  std::vector<double> worker_max(static_cast<std::size_t>(workers) * 64, 0.0);
  std::atomic<int> next_worker{0};

  parallel_for(static_cast<std::int64_t>(interior.size()),
               [&](std::int64_t lo, std::int64_t hi) {
                 const int slot = next_worker.fetch_add(1);
                 double local_max = 0.0;
                 for (std::int64_t idx = lo; idx < hi; ++idx) {
                   const NodeId id = interior[static_cast<std::size_t>(idx)];
                   double result;
                   if (pure_average) {
                     double acc = 0.0;
                     for (std::size_t j = 0; j < m; ++j) {
                       acc += es[j].w * v[id + es[j].delta];
                     }
                     result = acc;
                   } else {
                     double acc = 0.0;
                     double smax = -std::numeric_limits<double>::infinity();
                     double smin = std::numeric_limits<double>::infinity();
                     for (std::size_t j = 0; j < m; ++j) {
                       const double val = v[id + es[j].delta];
                       acc += es[j].w * val;
                       const double up = val + es[j].tilt;
                       if (up > smax) smax = up;
                       const double dn = val - es[j].tilt;
                       if (dn < smin) smin = dn;
                     }
                     result = half_alpha * (smax + smin) + beta * acc;
                   }
                   if (!plain) result = v[id] + relaxation * (result - v[id]);
                   o[id] = result;
                   local_max = std::max(local_max, std::abs(result - v[id]));
                 }
                 worker_max[static_cast<std::size_t>(slot) * 64] = local_max;
               });

  double residual = 0.0;
  for (int t = 0; t < workers; ++t) {
    residual = std::max(residual, worker_max[static_cast<std::size_t>(t) * 64]);
  }
  return residual;
}

}  // namespace

ArgInfo tilted_sup(const ValueField& u, NodeId x) {
  if (u.grid->label(x) != NodeLabel::interior) {
    throw std::invalid_argument("tilted_sup: node must be interior");
  }
  ArgInfo best;
  double best_val = -std::numeric_limits<double>::infinity();
  for (const StencilOffset& o : u.grid->stencil_offsets()) {
    const NodeId id = x + o.id_delta;
    if (u.grid->label(id) == NodeLabel::exterior) continue;
    const double val = u.values[id] + o.tilt;
    if (val > best_val) {  // strict: offsets ascend in id, ties keep smallest
      best_val = val;
      best = ArgInfo{id, val, o.tilt};
    }
  }
  return best;
}

ArgInfo tilted_inf(const ValueField& u, NodeId x) {
  if (u.grid->label(x) != NodeLabel::interior) {
    throw std::invalid_argument("tilted_inf: node must be interior");
  }
  ArgInfo best;
  double best_val = std::numeric_limits<double>::infinity();
  for (const StencilOffset& o : u.grid->stencil_offsets()) {
    const NodeId id = x + o.id_delta;
    if (u.grid->label(id) == NodeLabel::exterior) continue;
    const double val = u.values[id] - o.tilt;
    if (val < best_val) {
      best_val = val;
      best = ArgInfo{id, val, o.tilt};
    }
  }
  return best;
}

ValueField apply_T(const ValueField& u, const SchemeParams& params, const KernelWeights& weights) {
  check_compatible(u, params, weights);
  const auto entries = build_entries(*u.grid, weights);
  ValueField out;
  out.grid = u.grid;
  out.values = u.values;  // strip and exterior carried through
  apply_into(u.values, out.values, u.grid->interior_nodes(), entries, params.alpha, params.beta,
             params.relaxation);
  return out;
}

SolveResult solve_fixed_point(const ValueField& start, const SchemeParams& params,
                              const KernelWeights& weights, InitMode init) {
  check_compatible(start, params, weights);
  const GridDomain& grid = *start.grid;
  if (grid.strip_nodes().empty()) {
    throw std::invalid_argument("solve_fixed_point: grid has no strip nodes");
  }
  const auto entries = build_entries(grid, weights);

  SolveResult res;
  res.field.grid = &grid;
  res.field.values = start.values;
  if (init != InitMode::custom) {
    double barrier = init == InitMode::lower_barrier
                         ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
    for (const NodeId id : grid.strip_nodes()) {
      barrier = init == InitMode::lower_barrier ? std::min(barrier, start.values[id])
                                                : std::max(barrier, start.values[id]);
    }
    for (const NodeId id : grid.interior_nodes()) res.field.values[id] = barrier;
  }

  Eigen::VectorXd next = res.field.values;
  res.residuals.reserve(256);
  while (res.iterations < params.max_iterations) {
    const double residual = apply_into(res.field.values, next, grid.interior_nodes(), entries,
                                       params.alpha, params.beta, params.relaxation);
    res.field.values.swap(next);
    ++res.iterations;
    res.residuals.push_back(residual);
    if (residual <= params.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

ComparisonReport check_comparison(const ValueField& u, const ValueField& v, double slack) {
  if (u.grid != v.grid) throw std::invalid_argument("check_comparison: fields live on different grids");
  ComparisonReport rep;
  rep.slack = slack;
  double si = -std::numeric_limits<double>::infinity();
  for (const NodeId id : u.grid->interior_nodes()) si = std::max(si, u.values[id] - v.values[id]);
  double ss = -std::numeric_limits<double>::infinity();
  for (const NodeId id : u.grid->strip_nodes()) ss = std::max(ss, u.values[id] - v.values[id]);
  rep.sup_interior_diff = si;
  rep.sup_strip_diff = ss;
  rep.holds = si <= ss + slack;
  return rep;
}

}  // namespace liftpde
