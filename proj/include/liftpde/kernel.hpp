#pragma once

#include <Eigen/Dense>
#include <vector>

#include "liftpde/geometry.hpp"
#include "liftpde/rng.hpp"

namespace liftpde {
class CounterRng;

// Volume of the unit ball in dimension m.
double unit_ball_volume(int m);

// Semicircular density on R^n obtained by pushing the uniform law on the
// (n+1)-dimensional eps-ball through the projection that drops the last
// coordinate:
//
//   rho_eps(y) = 2 sqrt(eps^2 - |y|^2) / |B_eps^{n+1}|,  |y| <= eps.
//
// Strictly positive on the open ball, zero on the sphere |y| = eps.
// Throws if |y| > eps.
double rho(const Eigen::VectorXd& offset, double eps, int dim);

// Normalized lattice quadrature for rho_eps on the grid stencil. Offsets run
// over the open-ball lattice shifts (|offset| < eps strictly); raw weights are
// rho(offset) h^n and are renormalized to sum to one. raw_sum records the
// unnormalized total as a resolution diagnostic (it tends to 1 as h -> 0).
struct KernelWeights {
  int dim = 0;
  double eps = 0.0;
  double h = 0.0;
  std::vector<Eigen::VectorXi> offsets;  // lattice steps, lexicographic order
  Eigen::VectorXd weights;               // normalized, positive
  double raw_sum = 0.0;
};

KernelWeights quadrature_weights(const GridDomain& grid);

// One draw from rho_eps: sample the (n+1)-ball uniformly by rejection from
// the enclosing cube, then drop the last coordinate. |result| < eps almost
// surely and exactly as computed here.
Eigen::VectorXd sample_noise(double eps, int dim, CounterRng& rng);

}  // namespace liftpde
