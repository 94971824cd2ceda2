#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pvbs {

/// Point of Z^d in lattice units.
struct LatticePoint {
  std::vector<int> coords;

  int dim() const noexcept { return static_cast<int>(coords.size()); }
  auto operator<=>(const LatticePoint&) const = default;
  bool operator==(const LatticePoint&) const = default;
};

/// Edge oriented along +e_axis. Axis 0 is the vertical (stick) direction e_1.
struct OrientedEdge {
  LatticePoint tail;
  int axis = 0;

  auto operator<=>(const OrientedEdge&) const = default;
  bool operator==(const OrientedEdge&) const = default;
};

/// Edge stored by vertex index inside its region.
struct Edge {
  std::size_t tail = 0;
  std::size_t head = 0;
  int axis = 0;
};

enum class RegionKind { torus, box, stick, box_on_stick, custom };

std::string to_string(RegionKind kind);

struct RegionLimits {
  std::size_t max_sites = 64;
};

/// Finite oriented subgraph of Z^d, optionally embedded in the periodic torus
/// ((-L, L] cap Z)^d. Vertices are kept in lexicographic order, edges sorted by
/// (tail vertex, axis). Immutable after construction.
class Region {
 public:
  RegionKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  int box_side() const noexcept { return m_; }
  int stick_length() const noexcept { return n_; }
  bool periodic() const noexcept { return torus_half_side_.has_value(); }
  std::optional<int> torus_half_side() const noexcept { return torus_half_side_; }

  std::size_t num_sites() const noexcept { return vertices_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<LatticePoint>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  OrientedEdge oriented(const Edge& e) const { return {vertices_[e.tail], e.axis}; }
  std::optional<std::size_t> index_of(const LatticePoint& p) const;
  bool contains(const OrientedEdge& e) const;

  /// Induced subgraph on `points`: every nearest-neighbour pair with both
  /// endpoints present becomes an edge oriented along +e_k.
  static Region induced(int dim, std::vector<LatticePoint> points,
                        RegionLimits limits = {});
  /// Arbitrary vertex and edge lists; edges refer to points by index.
  static Region custom(int dim, std::vector<LatticePoint> points,
                       const std::vector<OrientedEdge>& edges,
                       RegionLimits limits = {});

 private:
  friend Region build_torus(int, int, RegionLimits);
  friend Region build_box(int, int, RegionLimits);
  friend Region build_stick(int, int, RegionLimits);
  friend Region build_box_on_stick(int, int, int, RegionLimits);
  friend Region translate_region(const Region&, const LatticePoint&, int);

  Region() = default;
  void finalize(std::vector<OrientedEdge> oriented_edges);

  RegionKind kind_ = RegionKind::custom;
  int dim_ = 0;
  int m_ = 0;
  int n_ = 0;
  std::optional<int> torus_half_side_;
  std::vector<LatticePoint> vertices_;
  std::vector<Edge> edges_;
};

/// Reduce a coordinate into the torus window (-L, L].
int reduce_coordinate(long long x, int half_side) noexcept;
LatticePoint reduce(LatticePoint p, int half_side);

/// Periodic box ((-L, L] cap Z)^d; every vertex emits one edge per direction.
Region build_torus(int half_side, int dim, RegionLimits limits = {});
/// Box {0..m}^d with free boundary.
Region build_box(int m, int dim, RegionLimits limits = {});
/// Stick {0, e_1, ..., (n-1) e_1}.
Region build_stick(int n, int dim, RegionLimits limits = {});
/// Box of side m sitting on a stick of n sites along e_1.
Region build_box_on_stick(int m, int n, int dim, RegionLimits limits = {});

/// Shift by x inside the torus of half side L (periodic reduction). Edge
/// directions are preserved.
Region translate_region(const Region& region, const LatticePoint& shift, int half_side);

/// Number of torus translates x + C_m (x over ((-L, L] cap Z)^d) that contain
/// the edge `e`, by brute-force enumeration. Requires L >= 2m + 1.
std::uint64_t edge_cover_count(const OrientedEdge& e, int m, int n, int dim, int half_side);

/// Adjacent edge pair classes used in the counting argument. Axis 0 is vertical.
enum class PairShape {
  colinear_nonvertical,
  corner_nonvertical,
  vertical_head_head,       // horizontal and vertical edge share their heads
  horizontal_into_vertical, // head of the horizontal edge is the tail of the vertical one
  vertical_tail_tail,       // both edges start at the shared vertex
  vertical_into_horizontal, // head of the vertical edge is the tail of the horizontal one
  colinear_vertical,
};

std::string to_string(PairShape shape);
PairShape pair_shape_from_string(const std::string& name);
std::span<const PairShape> all_pair_shapes() noexcept;

/// Representative pair of edges for a shape class, anchored near the origin.
std::pair<OrientedEdge, OrientedEdge> representative_pair(PairShape shape, int dim);

/// Number of torus translates of C_m containing both edges of the
/// representative pair of `shape`. Requires L >= 2m + 1.
std::uint64_t pair_cover_count(PairShape shape, int m, int n, int dim, int half_side);

}  // namespace pvbs
