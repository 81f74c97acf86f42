#include "liftpde/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace liftpde {

const char* label_name(NodeLabel label) {
  switch (label) {
    case NodeLabel::interior: return "interior";
    case NodeLabel::strip: return "strip";
    case NodeLabel::exterior: return "exterior";
  }
  return "?";
}

DomainShape DomainShape::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw std::invalid_argument("box: lower/upper must be nonempty and of equal dimension");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) {
      throw std::invalid_argument("box: lower bound must be strictly below upper bound on every axis");
    }
  }
  DomainShape s;
  s.kind = Kind::box;
  s.dim = static_cast<int>(lower.size());
  s.lower = std::move(lower);
  s.upper = std::move(upper);
  return s;
}

DomainShape DomainShape::make_ball(Eigen::VectorXd center, double radius) {
  if (center.size() == 0) throw std::invalid_argument("ball: center must be nonempty");
  if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be positive");
  DomainShape s;
  s.kind = Kind::ball;
  s.dim = static_cast<int>(center.size());
  s.center = std::move(center);
  s.radius = radius;
  return s;
}

bool DomainShape::contains(const Eigen::VectorXd& x) const {
  if (kind == Kind::box) {
    for (int i = 0; i < dim; ++i) {
      if (!(lower[i] < x[i] && x[i] < upper[i])) return false;
    }
    return true;
  }
  return (x - center).norm() < radius;
}

double DomainShape::distance(const Eigen::VectorXd& x) const {
  if (kind == Kind::box) {
    double sq = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double c = std::clamp(x[i], lower[i], upper[i]);
      const double d = x[i] - c;
      sq += d * d;
    }
    return std::sqrt(sq);
  }
  return std::max(0.0, (x - center).norm() - radius);
}

double DomainShape::boundary_distance(const Eigen::VectorXd& x) const {
  if (kind == Kind::box) {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim; ++i) {
      d = std::min(d, std::min(x[i] - lower[i], upper[i] - x[i]));
    }
    return d;
  }
  return radius - (x - center).norm();
}

double DomainShape::diameter() const {
  if (kind == Kind::box) return (upper - lower).norm();
  return 2.0 * radius;
}

double DomainShape::axis_extent() const {
  if (kind == Kind::box) return upper[0] - lower[0];
  return 2.0 * radius;
}

void DomainShape::bounding_box(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const {
  if (kind == Kind::box) {
    lo = lower;
    hi = upper;
  } else {
    lo = center.array() - radius;
    hi = center.array() + radius;
  }
}

GridDomain::GridDomain(DomainShape shape, double h, double eps)
    : shape_(std::move(shape)), h_(h), eps_(eps) {
  const int n = shape_.dim;
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("grid: spacing must be positive");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("grid: eps must be positive");
  if (eps < 4.0 * h) {
    throw std::invalid_argument("grid: eps/h must be at least 4; the lattice cannot resolve the eps-ball");
  }
  if (shape_.diameter() < 2.0 * eps) {
    throw std::invalid_argument("grid: domain diameter below 2*eps; the domain degenerates to pure strip");
  }

  // Lattice anchor: coordinates are origin + k*h componentwise.
  origin_ = shape_.kind == DomainShape::Kind::box ? shape_.lower : shape_.center;

  // Integer block covering the bounding box of Omega inflated by at least
  // eps + h per side: margin of ceil(eps/h) + 1 lattice steps beyond the
  // domain extent. The extra step also keeps every nearest-node snap of a
  // point within eps of Omega inside the block.
  const int margin = static_cast<int>(std::ceil(eps / h)) + 1;
  Eigen::VectorXd lo, hi;
  shape_.bounding_box(lo, hi);
  kmin_.resize(n);
  kmax_.resize(n);
  dims_.resize(n);
  for (int i = 0; i < n; ++i) {
    const int k_lo = static_cast<int>(std::floor((lo[i] - origin_[i]) / h));
    const int k_hi = static_cast<int>(std::ceil((hi[i] - origin_[i]) / h));
    kmin_[i] = k_lo - margin;
    kmax_[i] = k_hi + margin;
    dims_[i] = kmax_[i] - kmin_[i] + 1;
  }

  // Lexicographic node order: axis 0 most significant.
  strides_.assign(n, 1);
  std::int64_t total = 1;
  for (int i = n - 1; i >= 0; --i) {
    strides_[i] = total;
    total *= dims_[i];
  }

  labels_.resize(static_cast<std::size_t>(total));
  Eigen::VectorXi k = kmin_;
  Eigen::VectorXd x(n);
  // Relative guard on the strip's outer edge: a lattice point at exact
  // distance eps can land a few ulps past it once h and eps are rounded to
  // binary (e.g. 44 * 0.025 vs 1 + 0.1). The guard is ~1e5 times smaller
  // than any genuine node separation, so no real geometry can flip.
  const double strip_reach = eps_ * (1.0 + 1e-12);
  for (std::int64_t id = 0; id < total; ++id) {
    for (int i = 0; i < n; ++i) x[i] = origin_[i] + k[i] * h_;
    NodeLabel lab;
    if (shape_.contains(x)) {
      lab = NodeLabel::interior;
    } else if (shape_.distance(x) <= strip_reach) {
      lab = NodeLabel::strip;
    } else {
      lab = NodeLabel::exterior;
    }
    labels_[static_cast<std::size_t>(id)] = lab;
    if (lab == NodeLabel::interior) interior_.push_back(id);
    if (lab == NodeLabel::strip) strip_.push_back(id);
    // Advance k in lexicographic order, last axis fastest.
    for (int i = n - 1; i >= 0; --i) {
      if (++k[i] <= kmax_[i]) break;
      k[i] = kmin_[i];
    }
  }

  // Shared stencil: integer offsets with h^2 |dk|^2 <= eps^2. Comparing in
  // exact integer squared norms keeps membership translation invariant and
  // free of coordinate rounding.
  const double h2 = h_ * h_;
  const double r2 = eps_ * eps_;
  const int reach = margin;  // |dk| <= eps/h < margin on every axis
  Eigen::VectorXi dk = Eigen::VectorXi::Constant(n, -reach);
  for (;;) {
    std::int64_t sq = 0;
    for (int i = 0; i < n; ++i) sq += static_cast<std::int64_t>(dk[i]) * dk[i];
    if (h2 * static_cast<double>(sq) <= r2) {
      StencilOffset o;
      o.dk = dk;
      o.sq = sq;
      o.id_delta = 0;
      for (int i = 0; i < n; ++i) o.id_delta += static_cast<std::int64_t>(dk[i]) * strides_[i];
      o.dist = h_ * std::sqrt(static_cast<double>(sq));
      o.tilt = std::sqrt(std::max(0.0, r2 - h2 * static_cast<double>(sq)));
      o.open = h2 * static_cast<double>(sq) < r2;
      offsets_.push_back(std::move(o));
    }
    int i = n - 1;
    for (; i >= 0; --i) {
      if (++dk[i] <= reach) break;
      dk[i] = -reach;
    }
    if (i < 0) break;
  }
  std::sort(offsets_.begin(), offsets_.end(),
            [](const StencilOffset& a, const StencilOffset& b) { return a.id_delta < b.id_delta; });
}

Eigen::VectorXd GridDomain::coords(NodeId id) const {
  const Eigen::VectorXi k = lattice_coords(id);
  Eigen::VectorXd x(shape_.dim);
  for (int i = 0; i < shape_.dim; ++i) x[i] = origin_[i] + k[i] * h_;
  return x;
}

Eigen::VectorXi GridDomain::lattice_coords(NodeId id) const {
  const int n = shape_.dim;
  Eigen::VectorXi k(n);
  std::int64_t rest = id;
  for (int i = 0; i < n; ++i) {
    k[i] = kmin_[i] + static_cast<int>(rest / strides_[i]);
    rest %= strides_[i];
  }
  return k;
}

NodeId GridDomain::node_at(const Eigen::VectorXi& k) const {
  std::int64_t id = 0;
  for (int i = 0; i < shape_.dim; ++i) {
    if (k[i] < kmin_[i] || k[i] > kmax_[i]) return -1;
    id += static_cast<std::int64_t>(k[i] - kmin_[i]) * strides_[i];
  }
  return id;
}

std::vector<NodeId> GridDomain::core_nodes(double collar) const {
  std::vector<NodeId> core;
  for (const NodeId id : interior_) {
    if (shape_.boundary_distance(coords(id)) > collar) core.push_back(id);
  }
  return core;
}

NodeId GridDomain::snap(const Eigen::VectorXd& x) const {
  Eigen::VectorXi k(shape_.dim);
  for (int i = 0; i < shape_.dim; ++i) {
    const auto r = static_cast<int>(std::llround((x[i] - origin_[i]) / h_));
    k[i] = std::clamp(r, kmin_[i], kmax_[i]);
  }
  const NodeId id = node_at(k);
  return id;
}

NodeId GridDomain::snap_inside(const Eigen::VectorXd& x) const {
  const NodeId direct = snap(x);
  if (label(direct) != NodeLabel::exterior) return direct;

  // Widening cube search around the rounded node. A point within eps of Omega
  // has a strip or interior node within ~1.5 h sqrt(n), so radius 3 suffices;
  // ties go to the smallest node id.
  const Eigen::VectorXi kc = lattice_coords(direct);
  const int n = shape_.dim;
  NodeId best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  Eigen::VectorXi dk = Eigen::VectorXi::Constant(n, -3);
  for (;;) {
    const Eigen::VectorXi k = kc + dk;
    const NodeId id = node_at(k);
    if (id >= 0 && label(id) != NodeLabel::exterior) {
      const double d2 = (coords(id) - x).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && id < best)) {
        best_d2 = d2;
        best = id;
      }
    }
    int i = n - 1;
    for (; i >= 0; --i) {
      if (++dk[i] <= 3) break;
      dk[i] = -3;
    }
    if (i < 0) break;
  }
  if (best < 0) {
    throw std::invalid_argument("snap_inside: point is not within the eps-neighborhood of the domain");
  }
  return best;
}

double GridDomain::tilt_between(NodeId from, NodeId to) const {
  const Eigen::VectorXi dk = lattice_coords(to) - lattice_coords(from);
  std::int64_t sq = 0;
  for (int i = 0; i < shape_.dim; ++i) sq += static_cast<std::int64_t>(dk[i]) * dk[i];
  const double h2 = h_ * h_;
  const double r2 = eps_ * eps_;
  if (h2 * static_cast<double>(sq) > r2) return -1.0;
  return std::sqrt(std::max(0.0, r2 - h2 * static_cast<double>(sq)));
}

GridDomain build_grid(const DomainShape& shape, double h, double eps) {
  return GridDomain(shape, h, eps);
}

std::vector<std::pair<NodeId, Eigen::VectorXd>> ball_stencil(const GridDomain& grid,
                                                             NodeId center) {
  if (grid.label(center) != NodeLabel::interior) {
    throw std::invalid_argument("ball_stencil: center must be an interior node");
  }
  std::vector<std::pair<NodeId, Eigen::VectorXd>> out;
  out.reserve(grid.stencil_offsets().size());
  const double h = grid.spacing();
  for (const StencilOffset& o : grid.stencil_offsets()) {
    const NodeId id = center + o.id_delta;
    if (grid.label(id) == NodeLabel::exterior) continue;  // eps-sphere shell rounding guard
    out.emplace_back(id, o.dk.cast<double>() * h);
  }
  return out;
}

}  // namespace liftpde
