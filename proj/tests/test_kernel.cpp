#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "liftpde/geometry.hpp"
#include "liftpde/kernel.hpp"
#include "liftpde/rng.hpp"

using namespace liftpde;

namespace {

Eigen::VectorXd vecn(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

GridDomain grid_1d(double eps, double h) {
  return build_grid(DomainShape::box(vecn({0.0}), vecn({1.0})), h, eps);
}

GridDomain grid_2d(double eps, double h) {
  return build_grid(DomainShape::box(vecn({0.0, 0.0}), vecn({1.0, 1.0})), h, eps);
}

// Antiderivative of sqrt(c^2 - t^2), clamped to the support.
double circ_prim(double t, double c) {
  t = std::clamp(t, -c, c);
  return 0.5 * (t * std::sqrt(std::max(0.0, c * c - t * t)) + c * c * std::asin(t / c));
}

// Exact integral of the 1-D semicircular density over [a, b].
double semicircle_mass_1d(double a, double b, double eps) {
  const double vol = std::numbers::pi * eps * eps;  // |B^2_eps|
  return 2.0 * (circ_prim(b, eps) - circ_prim(a, eps)) / vol;
}

// Mass of the 2-D projected density over the rectangle [a1,b1]x[a2,b2]:
// the y-integral is closed-form, the x-integral is a fine Simpson rule.
double semicircle_mass_2d(double a1, double b1, double a2, double b2, double eps) {
  const double vol = 4.0 / 3.0 * std::numbers::pi * eps * eps * eps;  // |B^3_eps|
  const auto slice = [&](double x) {
    const double c2 = eps * eps - x * x;
    if (c2 <= 0.0) return 0.0;
    const double c = std::sqrt(c2);
    return 2.0 * (circ_prim(b2, c) - circ_prim(a2, c)) / vol;
  };
  const int panels = 4096;
  const double w = (b1 - a1) / panels;
  double sum = slice(a1) + slice(b1);
  for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * slice(a1 + w * i);
  return sum * w / 3.0;
}

}  // namespace

TEST_CASE("unit ball volumes against closed forms") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 / 3.0 * std::numbers::pi).epsilon(1e-14));
  CHECK(unit_ball_volume(4) == doctest::Approx(std::numbers::pi * std::numbers::pi / 2.0)
                                   .epsilon(1e-14));
}

TEST_CASE("density closed-form values") {
  CHECK(rho(vecn({0.0}), 1.0, 1) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-14));
  CHECK(rho(vecn({1.0}), 1.0, 1) == 0.0);
  CHECK(rho(vecn({0.0, 0.15}), 0.15, 2) == 0.0);
  // independent evaluation of 2 sqrt(0.25 - 0.09) / (0.5^3 |B^3_1|)
  const double expected = 2.0 * std::sqrt(0.25 - 0.09) / (0.125 * (4.0 / 3.0 * std::numbers::pi));
  CHECK(rho(vecn({0.3, 0.0}), 0.5, 2) == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(rho(vecn({0.11}), 0.1, 1), std::invalid_argument);
}

TEST_CASE("quadrature weights normalize, center dominates, radial symmetry") {
  for (const GridDomain& grid : {grid_1d(0.1, 0.0125), grid_2d(0.12, 0.02)}) {
    const KernelWeights kw = quadrature_weights(grid);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < kw.weights.size(); ++i) sum += kw.weights[i];
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    std::map<std::int64_t, double> by_square;
    double at_zero = -1.0;
    for (std::size_t i = 0; i < kw.offsets.size(); ++i) {
      const double w = kw.weights[static_cast<Eigen::Index>(i)];
      CHECK(w > 0.0);
      const std::int64_t sq = kw.offsets[i].squaredNorm();
      if (sq == 0) at_zero = w;
      const auto it = by_square.find(sq);
      if (it == by_square.end()) {
        by_square[sq] = w;
      } else {
        CHECK(w == it->second);  // equal radius, bitwise equal weight
      }
    }
    REQUIRE(at_zero > 0.0);
    for (Eigen::Index i = 0; i < kw.weights.size(); ++i) CHECK(kw.weights[i] <= at_zero);
  }
}

TEST_CASE("weights exclude the eps sphere and keep the open ball") {
  const GridDomain grid = grid_1d(0.1, 0.0125);  // eps = 8 h, sphere on-lattice
  const KernelWeights kw = quadrature_weights(grid);
  CHECK(kw.offsets.size() == 15);  // k = -7..7
  for (const auto& off : kw.offsets) CHECK(std::abs(off[0]) <= 7);
}

TEST_CASE("raw quadrature sums approach the density integral monotonically") {
  const double eps = 0.1;
  // reference: high-resolution Simpson of the 1-D density (equals 1)
  const int panels = 1 << 16;
  double integral = 0.0;
  {
    const double w = 2.0 * eps / panels;
    const auto f = [&](double t) {
      return t * t >= eps * eps ? 0.0 : rho(vecn({t}), eps, 1);
    };
    double sum = f(-eps) + f(eps);
    for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(-eps + w * i);
    integral = sum * w / 3.0;
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));

  std::vector<double> raw;
  for (double ratio : {4.0, 8.0, 16.0}) {
    raw.push_back(quadrature_weights(grid_1d(eps, eps / ratio)).raw_sum);
  }
  for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
    CHECK(std::abs(raw[i + 1] - integral) < std::abs(raw[i] - integral));
  }
  CHECK(raw.back() < 1.0);
  CHECK(raw.back() > 0.99);

  // same approach in two dimensions
  std::vector<double> raw2;
  for (double ratio : {4.0, 8.0, 16.0}) {
    raw2.push_back(quadrature_weights(grid_2d(0.12, 0.12 / ratio)).raw_sum);
  }
  CHECK(raw2[0] < raw2[1]);
  CHECK(raw2[1] < raw2[2]);
  CHECK(raw2[2] < 1.0);
}

TEST_CASE("noise samples stay in the open ball and have zero mean") {
  const double eps = 0.1;
  CounterRng rng(2024, 0);
  const int n_samples = 100000;
  for (int dim : {1, 2}) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (int s = 0; s < n_samples; ++s) {
      const Eigen::VectorXd y = sample_noise(eps, dim, rng);
      REQUIRE(y.norm() < eps);
      mean += y;
    }
    mean /= n_samples;
    // per-coordinate second moment of the projected law is eps^2 / (n + 3)
    const double se = eps / std::sqrt(static_cast<double>(dim + 3) * n_samples);
    for (int a = 0; a < dim; ++a) CHECK(std::abs(mean[a]) <= 4.0 * se);
  }
}

TEST_CASE("cap probabilities match analytic integrals of the density") {
  const double eps = 0.1;
  const int n_samples = 200000;

  // P(y >= eps/2) in 1-D: closed-form integral of the semicircle tail
  {
    CounterRng rng(77, 0);
    int hits = 0;
    for (int s = 0; s < n_samples; ++s) {
      if (sample_noise(eps, 1, rng)[0] >= eps / 2.0) ++hits;
    }
    const double target = semicircle_mass_1d(eps / 2.0, eps, eps);
    const double se = std::sqrt(target * (1.0 - target) / n_samples);
    CHECK(std::abs(static_cast<double>(hits) / n_samples - target) <= 4.0 * se);
  }

  // P(y_1 >= eps/2) in 2-D equals the 3-ball cap fraction 5/32
  {
    CounterRng rng(78, 0);
    int hits = 0;
    for (int s = 0; s < n_samples; ++s) {
      if (sample_noise(eps, 2, rng)[0] >= eps / 2.0) ++hits;
    }
    const double target = 5.0 / 32.0;
    const double se = std::sqrt(target * (1.0 - target) / n_samples);
    CHECK(std::abs(static_cast<double>(hits) / n_samples - target) <= 4.0 * se);
  }
}

TEST_CASE("snapped sample histogram matches the density cell by cell, 1-D") {
  const double eps = 0.1;
  const double h = 0.0125;
  const int n = 1000000;
  CounterRng rng(555, 0);
  std::map<int, std::int64_t> counts;
  for (int s = 0; s < n; ++s) {
    counts[static_cast<int>(std::llround(sample_noise(eps, 1, rng)[0] / h))] += 1;
  }

  // every snap cell, including the zero-weight sphere nodes, against the
  // exact mass of its rounding interval
  for (int k = -8; k <= 8; ++k) {
    const double expected = semicircle_mass_1d((k - 0.5) * h, (k + 0.5) * h, eps);
    const double freq = static_cast<double>(counts[k]) / n;
    const double se = std::sqrt(std::max(expected * (1.0 - expected), 1e-12) / n);
    CHECK(std::abs(freq - expected) <= 5.0 * se);
  }

  // inner cells additionally match the quadrature weights themselves. The
  // weights differ from the cell masses by the normalization shift
  // (1/raw_sum - 1) * w, a known deterministic effect of renormalizing the
  // sphere-edge deficit, plus a curvature term well under 40% of that shift
  // at |k| h <= 0.75 eps; everything past it is sampling noise.
  const KernelWeights kw = quadrature_weights(grid_1d(eps, h));
  const double shift1 = 1.0 / kw.raw_sum - 1.0;
  for (std::size_t i = 0; i < kw.offsets.size(); ++i) {
    const int k = kw.offsets[i][0];
    if (std::abs(k) * h > 0.75 * eps) continue;
    const double w = kw.weights[static_cast<Eigen::Index>(i)];
    const double freq = static_cast<double>(counts[k]) / n;
    const double se = std::sqrt(w * (1.0 - w) / n);
    CHECK(std::abs(freq - w) <= 5.0 * se + 1.4 * shift1 * w);
  }
}

TEST_CASE("snapped sample histogram matches the density cell by cell, 2-D") {
  const double eps = 0.12;
  const double h = 0.02;
  const int n = 1000000;
  CounterRng rng(556, 0);
  std::map<std::pair<int, int>, std::int64_t> counts;
  for (int s = 0; s < n; ++s) {
    const Eigen::VectorXd y = sample_noise(eps, 2, rng);
    counts[{static_cast<int>(std::llround(y[0] / h)),
            static_cast<int>(std::llround(y[1] / h))}] += 1;
  }

  for (int k1 = -7; k1 <= 7; ++k1) {
    for (int k2 = -7; k2 <= 7; ++k2) {
      const double expected = semicircle_mass_2d((k1 - 0.5) * h, (k1 + 0.5) * h,
                                                 (k2 - 0.5) * h, (k2 + 0.5) * h, eps);
      const auto it = counts.find({k1, k2});
      const double freq =
          it == counts.end() ? 0.0 : static_cast<double>(it->second) / n;
      const double se = std::sqrt(std::max(expected * (1.0 - expected), 4e-12) / n);
      CHECK(std::abs(freq - expected) <= 5.0 * se);
    }
  }

  // same normalization-shift accounting as the 1-D case
  const KernelWeights kw = quadrature_weights(grid_2d(eps, h));
  const double shift2 = 1.0 / kw.raw_sum - 1.0;
  for (std::size_t i = 0; i < kw.offsets.size(); ++i) {
    const Eigen::VectorXi& k = kw.offsets[i];
    if (k.norm() * h > 0.75 * eps) continue;
    const double w = kw.weights[static_cast<Eigen::Index>(i)];
    const auto it = counts.find({k[0], k[1]});
    const double freq = it == counts.end() ? 0.0 : static_cast<double>(it->second) / n;
    const double se = std::sqrt(w * (1.0 - w) / n);
    CHECK(std::abs(freq - w) <= 5.0 * se + 1.4 * shift2 * w);
  }
}
