#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace liftpde {

// Closed-form boundary datum, defined on all of R^n so it can be evaluated at
// strip nodes and at continuum exit points alike.
struct BoundaryData {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> f;

  double operator()(const Eigen::VectorXd& x) const { return f(x); }
};

BoundaryData constant_boundary(double c);
// a . x + b
BoundaryData affine_boundary(Eigen::VectorXd a, double b);
// clamp(x_1, 0, 1); the usual datum for the unit-interval ramp problem.
BoundaryData linear_ramp_boundary();
// x y (requires n = 2)
BoundaryData harmonic_xy_boundary();
// x^2 - y^2 (requires n = 2)
BoundaryData harmonic_x2y2_boundary();

// Parses "constant:c", "affine:a_1,...,a_n,b", "linear_ramp", "harmonic_xy",
// "harmonic_x2y2". Throws std::invalid_argument on unknown names, malformed
// parameters, or dimension mismatch.
BoundaryData parse_boundary(const std::string& spec, int dim);

}  // namespace liftpde
