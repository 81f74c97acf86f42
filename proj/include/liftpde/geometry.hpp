#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace liftpde {

using NodeId = std::int64_t;

enum class NodeLabel : std::uint8_t { interior, strip, exterior };

const char* label_name(NodeLabel label);

// Open domain Omega: an axis-aligned open box or an open ball. Membership and
// distance are evaluated against the exact shape, never against the lattice.
struct DomainShape {
  enum class Kind { box, ball };

  Kind kind = Kind::box;
  int dim = 0;
  Eigen::VectorXd lower;   // box
  Eigen::VectorXd upper;   // box
  Eigen::VectorXd center;  // ball
  double radius = 0.0;     // ball

  static DomainShape box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  static DomainShape make_ball(Eigen::VectorXd center, double radius);

  bool contains(const Eigen::VectorXd& x) const;
  // Euclidean distance to the closure of Omega (0 inside).
  double distance(const Eigen::VectorXd& x) const;
  // Distance from an interior point to the boundary of Omega.
  double boundary_distance(const Eigen::VectorXd& x) const;
  double diameter() const;
  // Extent of Omega along coordinate axis 0; the exit-time block length is
  // defined against this direction.
  double axis_extent() const;
  void bounding_box(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const;
};

// One integer lattice offset of the closed eps-ball stencil shared by every
// node. id_delta is the node-id shift of the offset inside the grid block, so
// neighbor lookup from an interior node is a single add.
struct StencilOffset {
  Eigen::VectorXi dk;
  std::int64_t sq;        // |dk|^2, exact
  std::int64_t id_delta;  // dot(dk, strides)
  double dist;            // h * sqrt(sq)
  double tilt;            // sqrt(max(0, eps^2 - h^2 sq))
  bool open;              // h^2 sq < eps^2 strictly
};

// Uniform lattice of spacing h anchored at the shape (box corner / ball
// center), restricted to the bounding box of Omega inflated by at least
// eps + h per side. Nodes are ordered lexicographically in their integer
// lattice coordinates; ids are dense in [0, num_nodes).
class GridDomain {
 public:
  GridDomain(DomainShape shape, double h, double eps);

  const DomainShape& shape() const { return shape_; }
  int dim() const { return shape_.dim; }
  double spacing() const { return h_; }
  double eps() const { return eps_; }

  NodeId num_nodes() const { return static_cast<NodeId>(labels_.size()); }
  NodeLabel label(NodeId id) const { return labels_[static_cast<std::size_t>(id)]; }
  Eigen::VectorXd coords(NodeId id) const;
  Eigen::VectorXi lattice_coords(NodeId id) const;
  // Node id of integer coordinates k, or -1 if k lies outside the block.
  NodeId node_at(const Eigen::VectorXi& k) const;

  const std::vector<NodeId>& interior_nodes() const { return interior_; }
  const std::vector<NodeId>& strip_nodes() const { return strip_; }
  // Interior nodes whose distance to the boundary of Omega exceeds collar.
  std::vector<NodeId> core_nodes(double collar) const;

  // Closed-ball stencil offsets, ascending in id_delta (equivalently,
  // lexicographic in dk), center included.
  const std::vector<StencilOffset>& stencil_offsets() const { return offsets_; }

  // Nearest lattice node to a point (per-axis rounding, clamped to the block).
  NodeId snap(const Eigen::VectorXd& x) const;
  // Nearest non-exterior node. Rounding can land in the exterior shell just
  // past the strip when the point sits near distance eps from Omega; the
  // search widens over a bounded cube, which always contains a strip node for
  // points of the eps-neighborhood of Omega.
  NodeId snap_inside(const Eigen::VectorXd& x) const;

  const Eigen::VectorXi& block_min() const { return kmin_; }
  const Eigen::VectorXi& block_max() const { return kmax_; }
  // Physical coordinates of lattice index 0 (box corner / ball center).
  const Eigen::VectorXd& origin() const { return origin_; }

  // Tilt sqrt(eps^2 - |to - from|^2) when `to` lies in the closed eps-ball of
  // `from` (decided on exact integer offsets), -1 otherwise.
  double tilt_between(NodeId from, NodeId to) const;

 private:
  DomainShape shape_;
  double h_ = 0.0;
  double eps_ = 0.0;
  Eigen::VectorXd origin_;
  Eigen::VectorXi kmin_, kmax_, dims_;
  std::vector<std::int64_t> strides_;
  std::vector<NodeLabel> labels_;
  std::vector<NodeId> interior_;
  std::vector<NodeId> strip_;
  std::vector<StencilOffset> offsets_;
};

GridDomain build_grid(const DomainShape& shape, double h, double eps);

// Per-node view of the stencil: (node id, physical offset) for every lattice
// point within the closed eps-ball of the center, ascending in node id.
// Precondition: center is an interior node, so the whole ball is interior or
// strip and lies inside the grid block.
std::vector<std::pair<NodeId, Eigen::VectorXd>> ball_stencil(const GridDomain& grid,
                                                             NodeId center);

}  // namespace liftpde
