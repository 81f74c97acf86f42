#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <stdexcept>

#include "liftpde/geometry.hpp"

using namespace liftpde;

namespace {

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

DomainShape unit_interval() { return DomainShape::box(vec1(0.0), vec1(1.0)); }
DomainShape unit_square() { return DomainShape::box(vec2(0.0, 0.0), vec2(1.0, 1.0)); }

}  // namespace

TEST_CASE("1-D unit interval labels follow the strip definition") {
  const GridDomain grid = build_grid(unit_interval(), 0.025, 0.1);
  for (NodeId id = 0; id < grid.num_nodes(); ++id) {
    const double x = grid.coords(id)[0];
    const NodeLabel lab = grid.label(id);
    if (x > 0.0 && x < 1.0) {
      CHECK(lab == NodeLabel::interior);
    } else if (x >= -0.1 - 1e-15 && x <= 1.1 + 1e-15) {
      CHECK(lab == NodeLabel::strip);
    } else {
      CHECK(lab == NodeLabel::exterior);
    }
  }
  // lattice anchored at the box corner: 0 and 1 are lattice points, labeled
  // strip (the domain is open)
  CHECK(grid.label(grid.snap(vec1(0.0))) == NodeLabel::strip);
  CHECK(grid.label(grid.snap(vec1(1.0))) == NodeLabel::strip);
}

TEST_CASE("ball domain labels from exact distance") {
  const DomainShape disk = DomainShape::make_ball(vec2(0.0, 0.0), 1.0);
  const GridDomain grid = build_grid(disk, 0.05, 0.2);
  CHECK(grid.label(grid.snap(vec2(0.0, 0.0))) == NodeLabel::interior);
  CHECK(grid.label(grid.snap(vec2(1.1, 0.0))) == NodeLabel::strip);
  CHECK(grid.label(grid.snap(vec2(1.25, 0.0))) == NodeLabel::exterior);
}

TEST_CASE("2-D interior count equals brute-force lattice scan") {
  const GridDomain grid = build_grid(unit_square(), 0.05, 0.2);
  // independent scan: lattice points k h with both coordinates strictly
  // inside (0,1), enumerated directly over integer ranges
  std::int64_t expected = 0;
  for (int i = -30; i <= 30; ++i) {
    for (int j = -30; j <= 30; ++j) {
      const double x = 0.05 * i;
      const double y = 0.05 * j;
      if (x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) ++expected;
    }
  }
  CHECK(static_cast<std::int64_t>(grid.interior_nodes().size()) == expected);
}

TEST_CASE("strip count equals brute-force distance scan") {
  const GridDomain grid = build_grid(unit_square(), 0.05, 0.2);
  std::int64_t expected = 0;
  for (int i = -30; i <= 30; ++i) {
    for (int j = -30; j <= 30; ++j) {
      const double x = 0.05 * i;
      const double y = 0.05 * j;
      if (x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) continue;
      const double dx = std::max({0.0 - x, x - 1.0, 0.0});
      const double dy = std::max({0.0 - y, y - 1.0, 0.0});
      // same ulp guard as the grid: the far edge ring sits at exact-decimal
      // distance eps but rounds a few ulps past it
      if (std::hypot(dx, dy) <= 0.2 * (1.0 + 1e-12)) ++expected;
    }
  }
  CHECK(static_cast<std::int64_t>(grid.strip_nodes().size()) == expected);
}

TEST_CASE("1-D ball stencil at an interior center") {
  const GridDomain grid = build_grid(unit_interval(), 0.025, 0.1);
  const NodeId center = grid.snap(vec1(0.5));
  REQUIRE(grid.label(center) == NodeLabel::interior);
  const auto stencil = ball_stencil(grid, center);
  REQUIRE(stencil.size() == 9);
  for (std::size_t i = 0; i < stencil.size(); ++i) {
    const double x = grid.coords(stencil[i].first)[0];
    CHECK(x == doctest::Approx(0.4 + 0.025 * static_cast<double>(i)).epsilon(1e-12));
    CHECK(stencil[i].second[0] == doctest::Approx(x - 0.5).epsilon(1e-12));
  }
  // the center itself appears with offset zero
  bool found_center = false;
  for (const auto& [id, off] : stencil) {
    if (id == center) {
      found_center = true;
      CHECK(off.norm() == 0.0);
    }
  }
  CHECK(found_center);
}

TEST_CASE("2-D ball stencil count equals closed-disk lattice count") {
  const GridDomain grid = build_grid(unit_square(), 0.05, 0.2);
  const NodeId center = grid.snap(vec2(0.5, 0.5));
  const auto stencil = ball_stencil(grid, center);
  std::int64_t expected = 0;
  for (int i = -5; i <= 5; ++i) {
    for (int j = -5; j <= 5; ++j) {
      if (0.0025 * (i * i + j * j) <= 0.04 + 1e-18) ++expected;
    }
  }
  CHECK(static_cast<std::int64_t>(stencil.size()) == expected);
  for (const auto& [id, off] : stencil) {
    CHECK(grid.label(id) != NodeLabel::exterior);
    CHECK(off.norm() <= 0.2 + 1e-12);
  }
}

TEST_CASE("stencil offsets are shared, sorted, and tagged with exact squares") {
  const GridDomain grid = build_grid(unit_square(), 0.03, 0.15);
  const auto& offs = grid.stencil_offsets();
  REQUIRE(!offs.empty());
  std::int64_t prev = offs.front().id_delta - 1;
  for (const auto& o : offs) {
    CHECK(o.id_delta > prev);
    prev = o.id_delta;
    CHECK(o.sq == static_cast<std::int64_t>(o.dk.squaredNorm()));
    CHECK(0.03 * 0.03 * static_cast<double>(o.sq) <= 0.15 * 0.15 + 1e-15);
    CHECK(o.tilt == doctest::Approx(std::sqrt(std::max(
                        0.0, 0.15 * 0.15 - 0.03 * 0.03 * static_cast<double>(o.sq)))));
    CHECK(o.open == (0.03 * 0.03 * static_cast<double>(o.sq) < 0.15 * 0.15));
  }
}

TEST_CASE("stencil symmetry between interior neighbors") {
  const GridDomain grid = build_grid(unit_square(), 0.05, 0.2);
  const NodeId a = grid.snap(vec2(0.35, 0.55));
  REQUIRE(grid.label(a) == NodeLabel::interior);
  for (const auto& [b, off] : ball_stencil(grid, a)) {
    if (grid.label(b) != NodeLabel::interior) continue;
    bool back = false;
    for (const auto& [c, off2] : ball_stencil(grid, b)) {
      if (c == a) {
        back = true;
        CHECK((off2 + off).norm() == 0.0);
      }
    }
    CHECK(back);
  }
}

TEST_CASE("grid construction is deterministic") {
  const GridDomain g1 = build_grid(unit_square(), 0.04, 0.17);
  const GridDomain g2 = build_grid(unit_square(), 0.04, 0.17);
  REQUIRE(g1.num_nodes() == g2.num_nodes());
  for (NodeId id = 0; id < g1.num_nodes(); ++id) {
    CHECK(g1.label(id) == g2.label(id));
    CHECK((g1.coords(id) - g2.coords(id)).norm() == 0.0);
  }
  CHECK(g1.interior_nodes() == g2.interior_nodes());
  CHECK(g1.strip_nodes() == g2.strip_nodes());
}

TEST_CASE("node ids and lattice coordinates are mutually inverse") {
  const GridDomain grid = build_grid(unit_square(), 0.05, 0.2);
  for (NodeId id = 0; id < grid.num_nodes(); id += 7) {
    CHECK(grid.node_at(grid.lattice_coords(id)) == id);
  }
  Eigen::VectorXi outside = grid.block_max();
  outside[0] += 1;
  CHECK(grid.node_at(outside) == -1);
}

TEST_CASE("resolution and degeneracy guards") {
  CHECK_THROWS_AS(build_grid(unit_interval(), 0.03, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(unit_interval(), 0.1, 0.6), std::invalid_argument);
  CHECK_THROWS_AS(DomainShape::box(vec1(1.0), vec1(0.0)), std::invalid_argument);
  CHECK_THROWS_AS(DomainShape::make_ball(vec2(0.0, 0.0), -1.0), std::invalid_argument);
}

TEST_CASE("snap picks the nearest node and snap_inside avoids the exterior") {
  const GridDomain grid = build_grid(unit_interval(), 0.025, 0.1);
  const NodeId id = grid.snap(vec1(0.513));
  CHECK(grid.coords(id)[0] == doctest::Approx(0.525));
  CHECK(grid.snap(vec1(0.512)) == grid.snap(vec1(0.5 + 0.0125 - 1e-9)));

  // a point just past the strip end rounds to an exterior node; snap_inside
  // must come back with a strip node instead
  const NodeId far = grid.snap_inside(vec1(1.0 + 0.1 - 1e-12));
  CHECK(grid.label(far) != NodeLabel::exterior);
  for (double x : {-0.099, 0.001, 0.47, 0.999, 1.099}) {
    CHECK(grid.label(grid.snap_inside(vec1(x))) != NodeLabel::exterior);
  }
}

TEST_CASE("tilt_between matches the closed-ball tilt formula") {
  const GridDomain grid = build_grid(unit_interval(), 0.025, 0.1);
  const NodeId x = grid.snap(vec1(0.5));
  for (const auto& [y, off] : ball_stencil(grid, x)) {
    const double t = grid.tilt_between(x, y);
    REQUIRE(t >= 0.0);
    CHECK(t == doctest::Approx(std::sqrt(std::max(0.0, 0.01 - off.squaredNorm())))
                   .epsilon(1e-12));
  }
  CHECK(grid.tilt_between(x, grid.snap(vec1(0.7))) == -1.0);
}

TEST_CASE("core nodes keep the prescribed boundary clearance") {
  const GridDomain grid = build_grid(unit_square(), 0.05, 0.2);
  const auto core = grid.core_nodes(0.2);
  REQUIRE(!core.empty());
  std::set<NodeId> core_set(core.begin(), core.end());
  for (NodeId id : grid.interior_nodes()) {
    const Eigen::VectorXd x = grid.coords(id);
    const double d = grid.shape().boundary_distance(x);
    CHECK((d > 0.2) == (core_set.count(id) == 1));
  }
}

TEST_CASE("interior stencils never reach the exterior shell") {
  const GridDomain grid = build_grid(unit_square(), 0.05, 0.2);
  for (std::size_t i = 0; i < grid.interior_nodes().size(); i += 11) {
    const NodeId x = grid.interior_nodes()[i];
    for (const auto& [y, off] : ball_stencil(grid, x)) {
      CHECK(grid.label(y) != NodeLabel::exterior);
    }
  }
}
