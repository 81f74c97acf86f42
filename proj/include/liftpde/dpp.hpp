#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "liftpde/geometry.hpp"
#include "liftpde/kernel.hpp"

namespace liftpde {

// Mixture coefficients of the projected scheme,
//
//   alpha = (p - 2) / (p + n + 1),   beta = (n + 3) / (p + n + 1),
//
// computed as beta = 1 - alpha so the pair sums to one exactly. Requires
// p >= 2; alpha = 0 iff p = 2.
std::pair<double, double> coefficients(double p, int dim);

struct SchemeParams {
  double p = 2.0;
  double eps = 0.0;
  int dim = 0;
  double alpha = 0.0;
  double beta = 1.0;
  double tol = 1e-10;           // sup-norm residual stopping threshold
  long max_iterations = 500000;
  double relaxation = 1.0;      // optional over-relaxation; 1.0 is plain iteration

  static SchemeParams make(double p, double eps, int dim);
};

// Node-indexed scalar field over a grid. Strip entries hold the boundary
// data and are never modified by the operator; exterior entries are unused
// and kept at zero.
struct ValueField {
  const GridDomain* grid = nullptr;
  Eigen::VectorXd values;

  double operator()(NodeId id) const { return values[static_cast<Eigen::Index>(id)]; }
};

// Field with strip nodes set to boundary(x) and every interior node set to
// interior_value.
ValueField make_field(const GridDomain& grid,
                      const std::function<double(const Eigen::VectorXd&)>& boundary,
                      double interior_value);

// Field sampled from a closed form on interior and strip nodes alike.
ValueField sample_field(const GridDomain& grid,
                        const std::function<double(const Eigen::VectorXd&)>& fn);

double sup_norm_interior(const ValueField& u);
double sup_norm_strip(const ValueField& u);

struct ArgInfo {
  NodeId node = -1;
  double value = 0.0;  // attained tilted optimum
  double tilt = 0.0;   // sqrt(eps^2 - |x_opt - x|^2)
};

// Discrete tilted envelopes over the closed eps-ball stencil:
//   sup  of u(y) + sqrt(eps^2 - |y - x|^2)   (tilted_sup)
//   inf  of u(y) - sqrt(eps^2 - |y - x|^2)   (tilted_inf)
// Ties are broken toward the smallest node id. Precondition: x interior.
ArgInfo tilted_sup(const ValueField& u, NodeId x);
ArgInfo tilted_inf(const ValueField& u, NodeId x);

// One application of the scheme operator:
//   (T u)(x) = alpha/2 [S+ u(x) + S- u(x)] + beta * sum_i w_i u(x + d_i)
// on interior nodes; strip values are copied through unchanged.
ValueField apply_T(const ValueField& u, const SchemeParams& params, const KernelWeights& weights);

enum class InitMode { lower_barrier, upper_barrier, custom };

struct SolveResult {
  ValueField field;
  std::vector<double> residuals;  // sup-norm update per iteration
  long iterations = 0;
  bool converged = false;
};

// Iterates u <- u + relaxation (T u - u) from the chosen start until the
// sup-norm residual drops to params.tol. From the lower barrier (interior
// preset to the strip minimum) the plain iteration is pointwise nondecreasing;
// from the upper barrier, nonincreasing. Hitting max_iterations leaves
// converged = false with the full residual history for inspection; it is a
// reported outcome, not an exception.
SolveResult solve_fixed_point(const ValueField& start, const SchemeParams& params,
                              const KernelWeights& weights, InitMode init);

struct ComparisonReport {
  double sup_interior_diff = 0.0;  // sup over interior of u - v
  double sup_strip_diff = 0.0;     // sup over strip of u - v
  double slack = 0.0;
  bool holds = false;              // sup_interior <= sup_strip + slack
};

ComparisonReport check_comparison(const ValueField& u, const ValueField& v, double slack);

}  // namespace liftpde
