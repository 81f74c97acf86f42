#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "liftpde/boundary.hpp"
#include "liftpde/dpp.hpp"
#include "liftpde/geometry.hpp"

namespace liftpde {

// Closed-form reference solution used to measure scheme error.
struct Oracle {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> value;
};

Oracle affine_oracle(Eigen::VectorXd a, double b);
// v(x) = x_1; the limit solution of the unit-interval ramp problem for any p.
Oracle ramp_oracle();
Oracle harmonic_xy_oracle();
Oracle harmonic_x2y2_oracle();

// Oracle matching a builtin boundary datum where one exists (constant, affine,
// linear_ramp on the unit interval, harmonics at p = 2).
std::optional<Oracle> oracle_for_boundary(const BoundaryData& boundary, double p, int dim);

// Sup of |field - oracle| over interior nodes at boundary distance > collar.
// Throws when the collar leaves no nodes.
double core_sup_error(const ValueField& field, const Oracle& oracle, double collar);

struct LiftedResidualReport {
  double max_residual = 0.0;
  int samples = 0;
  std::int64_t product_points = 0;  // lattice points of the (n+1)-ball stencil
};

// Residual of the standard (n+1)-dimensional p-harmonious dynamic programming
// identity applied to the lifted field w(y, t) = field(y) + t, sampled at
// random interior nodes whose eps-ball avoids the strip and random heights
// t ~ U(-height, height). The identity's averages run over the lattice points
// of the closed (n+1)-ball (uniform weights, the lifted noise law) and its
// envelopes over the same points with the height shift added, so the residual
// is independent of t up to rounding and shrinks like the lattice spacing.
LiftedResidualReport lifted_dpp_residual(const ValueField& field, const SchemeParams& params,
                                         int n_samples, double height, std::uint64_t seed);

// Max over core nodes of |F(grad v, Hess v)| for
//   F(q, X) = -tr(X) - (p - 2) <X q, q> / (1 + |q|^2),
// with derivatives from central differences on the lattice. The core excludes
// nodes within eps of the boundary. Requires h <= eps/8; coarser grids are
// refused because the second differences would be dominated by scheme error.
double pde_residual(const ValueField& field, const SchemeParams& params);

struct SweepRow {
  double eps = 0.0;
  double h = 0.0;
  double core_error = 0.0;
  long iterations = 0;
  double residual = 0.0;
  double wall_ms = 0.0;
  bool converged = false;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  double collar = 0.0;          // core collar: the largest eps of the sweep
  double monotone_slack = 0.0;
  bool monotone = false;        // errors nonincreasing within the slack
  bool all_converged = false;
};

// Solves the scheme along eps_list (descending recommended) with h = eps/ratio
// and measures the interior-core error against the oracle on a fixed core
// (boundary distance > max eps). The monotonicity flag allows an additive
// slack so solver-floor noise on instances the lattice reproduces exactly is
// not mistaken for divergence.
SweepReport eps_sweep(const DomainShape& shape, const BoundaryData& boundary, double p,
                      const std::vector<double>& eps_list, double ratio, const Oracle& oracle,
                      double tol, long max_iterations, double monotone_slack);

// Smooth test function with analytic derivatives for the expansion checks.
struct TestFunction {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

TestFunction quadratic_test_function(int dim);  // |x|^2

struct CrosscheckRow {
  double eps = 0.0;
  double avg_gap = 0.0;   // kernel average minus v(x)
  double tilt_gap = 0.0;  // tilted mean minus v(x)
};

struct CrosscheckReport {
  std::vector<CrosscheckRow> rows;
  double fitted_avg_coeff = 0.0;    // least-squares eps^2 coefficient
  double fitted_tilt_coeff = 0.0;
  double analytic_avg_coeff = 0.0;  // Laplacian of the lift / (2 (n + 3))
  double analytic_tilt_coeff = 0.0; // normalized infinity-Laplacian of the lift / 2
  double avg_rel_error = 0.0;
  double tilt_rel_error = 0.0;
};

// Second-order expansion crosscheck at a point: the continuum kernel average
// and tilted mean of the test function are computed by high-resolution
// quadrature and dense search, their eps^2 coefficients fitted over eps_list,
// and compared against the analytic Laplacian / normalized infinity-Laplacian
// of the lifted function w(y, t) = v(y) + t, whose gradient (grad v, 1) never
// degenerates. Supported for dim 1 and 2.
CrosscheckReport constants_crosscheck(double p, int dim, const TestFunction& fn,
                                      const Eigen::VectorXd& x, const std::vector<double>& eps_list);

}  // namespace liftpde
