#include "liftpde/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "liftpde/numeric.hpp"

namespace liftpde {

double unit_ball_volume(int m) {
  if (m <= 0) throw std::invalid_argument("unit_ball_volume: dimension must be positive");
  return std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

double rho(const Eigen::VectorXd& offset, double eps, int dim) {
  if (offset.size() != dim) throw std::invalid_argument("rho: offset dimension mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("rho: eps must be positive");
  const double r2 = offset.squaredNorm();
  const double e2 = eps * eps;
  if (r2 > e2) throw std::invalid_argument("rho: offset lies outside the eps-ball");
  const double ball = std::pow(eps, dim + 1) * unit_ball_volume(dim + 1);
  return 2.0 * std::sqrt(std::max(0.0, e2 - r2)) / ball;
}

KernelWeights quadrature_weights(const GridDomain& grid) {
  const int n = grid.dim();
  const double h = grid.spacing();
  const double eps = grid.eps();
  const double ball = std::pow(eps, n + 1) * unit_ball_volume(n + 1);
  const double cell = std::pow(h, n);

  KernelWeights kw;
  kw.dim = n;
  kw.eps = eps;
  kw.h = h;

  std::vector<double> raw;
  const double h2 = h * h;
  const double e2 = eps * eps;
  for (const StencilOffset& o : grid.stencil_offsets()) {
    if (!o.open) continue;
    // rho at the lattice offset, via the exact integer squared norm.
    const double density = 2.0 * std::sqrt(e2 - h2 * static_cast<double>(o.sq)) / ball;
    kw.offsets.push_back(o.dk);
    raw.push_back(density * cell);
  }

  std::int64_t min_count = 1;
  for (int i = 0; i < n; ++i) min_count *= 3;
  if (static_cast<std::int64_t>(raw.size()) < min_count) {
    throw std::invalid_argument("quadrature_weights: stencil has fewer than 3^n nodes");
  }

  kw.raw_sum = compensated_sum(raw);
  kw.weights.resize(static_cast<Eigen::Index>(raw.size()));
  for (Eigen::Index i = 0; i < kw.weights.size(); ++i) {
    kw.weights[i] = raw[static_cast<std::size_t>(i)] / kw.raw_sum;
  }
  return kw;
}

Eigen::VectorXd sample_noise(double eps, int dim, CounterRng& rng) {
  if (!(eps > 0.0)) throw std::invalid_argument("sample_noise: eps must be positive");
  if (dim <= 0) throw std::invalid_argument("sample_noise: dimension must be positive");
  const int m = dim + 1;
  Eigen::VectorXd u(m);
  for (;;) {
    double sq = 0.0;
    for (int i = 0; i < m; ++i) {
      u[i] = rng.next_symmetric();
      sq += u[i] * u[i];
    }
    if (sq < 1.0) break;
  }
  return eps * u.head(dim);
}

}  // namespace liftpde
