#include "pvbs/lattice.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include "pvbs/errors.hpp"

namespace pvbs {

namespace {

LatticePoint unit(int dim, int axis, int scale = 1) {
  LatticePoint p{std::vector<int>(static_cast<std::size_t>(dim), 0)};
  p.coords[static_cast<std::size_t>(axis)] = scale;
  return p;
}

LatticePoint add(const LatticePoint& a, const LatticePoint& b) {
  LatticePoint r = a;
  for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] += b.coords[i];
  return r;
}

LatticePoint sub(const LatticePoint& a, const LatticePoint& b) {
  LatticePoint r = a;
  for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] -= b.coords[i];
  return r;
}

void check_capacity(std::size_t sites, const RegionLimits& limits) {
  if (sites > limits.max_sites) {
    throw CapacityError("region has " + std::to_string(sites) + " sites, limit is " +
                        std::to_string(limits.max_sites));
  }
}

// Visits every point of the integer box prod_k [lo_k, hi_k] in lexicographic order.
template <class F>
void for_each_point(const std::vector<int>& lo, const std::vector<int>& hi, F&& f) {
  const std::size_t d = lo.size();
  for (std::size_t k = 0; k < d; ++k)
    if (hi[k] < lo[k]) return;
  LatticePoint p{lo};
  while (true) {
    f(p);
    std::size_t k = d;
    while (k > 0 && p.coords[k - 1] == hi[k - 1]) {
      p.coords[k - 1] = lo[k - 1];
      --k;
    }
    if (k == 0) return;
    ++p.coords[k - 1];
  }
}

std::vector<OrientedEdge> nearest_neighbour_edges(int dim, const std::vector<LatticePoint>& sorted) {
  std::vector<OrientedEdge> out;
  for (const auto& p : sorted) {
    for (int k = 0; k < dim; ++k) {
      LatticePoint q = p;
      ++q.coords[static_cast<std::size_t>(k)];
      if (std::binary_search(sorted.begin(), sorted.end(), q)) out.push_back({p, k});
    }
  }
  return out;
}

void check_dims(int dim, const std::vector<LatticePoint>& points) {
  if (dim < 1) throw UsageError("dimension must be >= 1");
  for (const auto& p : points)
    if (p.dim() != dim) throw UsageError("lattice point has wrong dimension");
}

}  // namespace

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::torus: return "torus";
    case RegionKind::box: return "box";
    case RegionKind::stick: return "stick";
    case RegionKind::box_on_stick: return "box_on_stick";
    case RegionKind::custom: return "custom";
  }
  return "custom";
}

int reduce_coordinate(long long x, int half_side) noexcept {
  const long long period = 2LL * half_side;
  long long r = ((x + half_side - 1) % period + period) % period;  // in [0, 2L)
  return static_cast<int>(r - half_side + 1);                       // in (-L, L]
}

LatticePoint reduce(LatticePoint p, int half_side) {
  for (auto& c : p.coords) c = reduce_coordinate(c, half_side);
  return p;
}

std::optional<std::size_t> Region::index_of(const LatticePoint& p) const {
  const LatticePoint key = torus_half_side_ ? reduce(p, *torus_half_side_) : p;
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), key);
  if (it == vertices_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - vertices_.begin());
}

bool Region::contains(const OrientedEdge& e) const {
  auto tail = index_of(e.tail);
  if (!tail) return false;
  for (const auto& edge : edges_) {
    if (edge.tail == *tail && edge.axis == e.axis) return true;
  }
  return false;
}

void Region::finalize(std::vector<OrientedEdge> oriented_edges) {
  std::sort(vertices_.begin(), vertices_.end());
  if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end())
    throw UsageError("region has duplicate vertices");
  std::sort(oriented_edges.begin(), oriented_edges.end(), [this](const auto& a, const auto& b) {
    auto ta = index_of(a.tail), tb = index_of(b.tail);
    if (ta != tb) return ta < tb;
    return a.axis < b.axis;
  });
  if (std::adjacent_find(oriented_edges.begin(), oriented_edges.end()) != oriented_edges.end())
    throw UsageError("region has duplicate edges");
  edges_.clear();
  edges_.reserve(oriented_edges.size());
  for (const auto& e : oriented_edges) {
    if (e.axis < 0 || e.axis >= dim_) throw UsageError("edge axis out of range");
    auto tail = index_of(e.tail);
    auto head = index_of(add(e.tail, unit(dim_, e.axis)));
    if (!tail || !head) throw UsageError("edge endpoint is not a region vertex");
    edges_.push_back({*tail, *head, e.axis});
  }
}

Region Region::induced(int dim, std::vector<LatticePoint> points, RegionLimits limits) {
  check_dims(dim, points);
  check_capacity(points.size(), limits);
  Region r;
  r.dim_ = dim;
  r.vertices_ = std::move(points);
  std::sort(r.vertices_.begin(), r.vertices_.end());
  r.finalize(nearest_neighbour_edges(dim, r.vertices_));
  return r;
}

Region Region::custom(int dim, std::vector<LatticePoint> points,
                      const std::vector<OrientedEdge>& edges, RegionLimits limits) {
  check_dims(dim, points);
  check_capacity(points.size(), limits);
  Region r;
  r.dim_ = dim;
  r.vertices_ = std::move(points);
  r.finalize(edges);
  return r;
}

Region build_torus(int half_side, int dim, RegionLimits limits) {
  if (half_side < 1 || dim < 1) throw UsageError("torus needs L >= 1 and d >= 1");
  const auto side = 2u * static_cast<std::size_t>(half_side);
  std::size_t sites = 1;
  for (int k = 0; k < dim; ++k) {
    if (sites > limits.max_sites / side)
      throw CapacityError("torus vertex count exceeds the site limit of " +
                          std::to_string(limits.max_sites));
    sites *= side;
  }
  Region r;
  r.kind_ = RegionKind::torus;
  r.dim_ = dim;
  r.m_ = half_side;
  r.torus_half_side_ = half_side;
  for_each_point(std::vector<int>(static_cast<std::size_t>(dim), -half_side + 1),
                 std::vector<int>(static_cast<std::size_t>(dim), half_side),
                 [&](const LatticePoint& p) { r.vertices_.push_back(p); });
  std::vector<OrientedEdge> edges;
  for (const auto& p : r.vertices_)
    for (int k = 0; k < dim; ++k) edges.push_back({p, k});
  r.finalize(std::move(edges));
  return r;
}

Region build_box(int m, int dim, RegionLimits limits) {
  if (m < 1 || dim < 1) throw UsageError("box needs m >= 1 and d >= 1");
  std::vector<LatticePoint> pts;
  for_each_point(std::vector<int>(static_cast<std::size_t>(dim), 0),
                 std::vector<int>(static_cast<std::size_t>(dim), m),
                 [&](const LatticePoint& p) { pts.push_back(p); });
  Region r = Region::induced(dim, std::move(pts), limits);
  r.kind_ = RegionKind::box;
  r.m_ = m;
  return r;
}

Region build_stick(int n, int dim, RegionLimits limits) {
  if (n < 1 || dim < 1) throw UsageError("stick needs n >= 1 and d >= 1");
  std::vector<LatticePoint> pts;
  for (int l = 0; l < n; ++l) pts.push_back(unit(dim, 0, l));
  Region r = Region::induced(dim, std::move(pts), limits);
  r.kind_ = RegionKind::stick;
  r.n_ = n;
  return r;
}

Region build_box_on_stick(int m, int n, int dim, RegionLimits limits) {
  if (m < 1 || n < 1 || dim < 2) throw UsageError("box on a stick needs m, n >= 1 and d >= 2");
  std::vector<LatticePoint> pts;
  for (int l = 0; l < n; ++l) pts.push_back(unit(dim, 0, l));
  std::vector<int> lo(static_cast<std::size_t>(dim), 0), hi(static_cast<std::size_t>(dim), m);
  lo[0] = n;
  hi[0] = m + n;
  for_each_point(lo, hi, [&](const LatticePoint& p) { pts.push_back(p); });
  Region r = Region::induced(dim, std::move(pts), limits);
  r.kind_ = RegionKind::box_on_stick;
  r.m_ = m;
  r.n_ = n;
  return r;
}

Region translate_region(const Region& region, const LatticePoint& shift, int half_side) {
  if (half_side < 1) throw UsageError("torus half side must be >= 1");
  if (shift.dim() != region.dim()) throw UsageError("shift has wrong dimension");
  if (region.periodic() && *region.torus_half_side() != half_side)
    throw GeometryError("region is embedded in a different torus");
  if (!region.periodic() && region.num_sites() > 0) {
    for (int k = 0; k < region.dim(); ++k) {
      int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
      for (const auto& v : region.vertices()) {
        lo = std::min(lo, v.coords[static_cast<std::size_t>(k)]);
        hi = std::max(hi, v.coords[static_cast<std::size_t>(k)]);
      }
      if (hi - lo >= 2 * half_side)
        throw GeometryError("region does not fit into the torus of half side " +
                            std::to_string(half_side));
    }
  }
  Region r;
  r.kind_ = region.kind_;
  r.dim_ = region.dim_;
  r.m_ = region.m_;
  r.n_ = region.n_;
  r.torus_half_side_ = half_side;
  for (const auto& v : region.vertices()) r.vertices_.push_back(reduce(add(v, shift), half_side));
  std::vector<OrientedEdge> edges;
  for (const auto& e : region.edges())
    edges.push_back({reduce(add(region.vertices()[e.tail], shift), half_side), e.axis});
  std::sort(r.vertices_.begin(), r.vertices_.end());
  if (std::adjacent_find(r.vertices_.begin(), r.vertices_.end()) != r.vertices_.end())
    throw GeometryError("translated region overlaps itself");
  r.finalize(std::move(edges));
  return r;
}

namespace {

// Canonical torus keys of the edges of C_m, sorted for binary search.
std::vector<OrientedEdge> reduced_edge_keys(const Region& c, int half_side) {
  std::vector<OrientedEdge> keys;
  keys.reserve(c.num_edges());
  for (const auto& e : c.edges()) keys.push_back({reduce(c.vertices()[e.tail], half_side), e.axis});
  std::sort(keys.begin(), keys.end());
  return keys;
}

void check_cover_args(int m, int n, int dim, int half_side) {
  if (m < 1 || n < 1 || dim < 2) throw UsageError("cover counts need m, n >= 1 and d >= 2");
  if (half_side < 2 * m + 1) throw UsageError("cover counts need L >= 2m + 1");
  if (m + n >= 2 * half_side) throw GeometryError("box on a stick does not fit into the torus");
}

template <class Pred>
std::uint64_t count_translates(int dim, int half_side, Pred&& contains_all) {
  std::uint64_t count = 0;
  for_each_point(std::vector<int>(static_cast<std::size_t>(dim), -half_side + 1),
                 std::vector<int>(static_cast<std::size_t>(dim), half_side),
                 [&](const LatticePoint& x) {
                   if (contains_all(x)) ++count;
                 });
  return count;
}

bool has_key(const std::vector<OrientedEdge>& keys, const OrientedEdge& e, const LatticePoint& x,
             int half_side) {
  OrientedEdge key{reduce(sub(e.tail, x), half_side), e.axis};
  return std::binary_search(keys.begin(), keys.end(), key);
}

}  // namespace

std::uint64_t edge_cover_count(const OrientedEdge& e, int m, int n, int dim, int half_side) {
  check_cover_args(m, n, dim, half_side);
  if (e.tail.dim() != dim || e.axis < 0 || e.axis >= dim) throw UsageError("edge is not a torus edge");
  const Region c = build_box_on_stick(m, n, dim, {std::numeric_limits<std::size_t>::max()});
  const auto keys = reduced_edge_keys(c, half_side);
  return count_translates(dim, half_side, [&](const LatticePoint& x) {
    return has_key(keys, e, x, half_side);
  });
}

std::string to_string(PairShape shape) {
  switch (shape) {
    case PairShape::colinear_nonvertical: return "colinear_nonvertical";
    case PairShape::corner_nonvertical: return "corner_nonvertical";
    case PairShape::vertical_head_head: return "vertical_head_head";
    case PairShape::horizontal_into_vertical: return "horizontal_into_vertical";
    case PairShape::vertical_tail_tail: return "vertical_tail_tail";
    case PairShape::vertical_into_horizontal: return "vertical_into_horizontal";
    case PairShape::colinear_vertical: return "colinear_vertical";
  }
  return "?";
}

std::span<const PairShape> all_pair_shapes() noexcept {
  static constexpr std::array shapes{
      PairShape::colinear_nonvertical,     PairShape::corner_nonvertical,
      PairShape::vertical_head_head,       PairShape::horizontal_into_vertical,
      PairShape::vertical_tail_tail,       PairShape::vertical_into_horizontal,
      PairShape::colinear_vertical,
  };
  return shapes;
}

PairShape pair_shape_from_string(const std::string& name) {
  for (auto s : all_pair_shapes())
    if (to_string(s) == name) return s;
  throw UsageError("unknown pair shape class: " + name);
}

std::pair<OrientedEdge, OrientedEdge> representative_pair(PairShape shape, int dim) {
  if (dim < 2) throw UsageError("pair shapes need d >= 2");
  const LatticePoint s{std::vector<int>(static_cast<std::size_t>(dim), 0)};
  auto minus = [&](int axis) { return sub(s, unit(dim, axis)); };
  switch (shape) {
    case PairShape::colinear_nonvertical: return {{minus(1), 1}, {s, 1}};
    case PairShape::corner_nonvertical:
      if (dim < 3) throw UsageError("corner_nonvertical needs two non-vertical axes (d >= 3)");
      return {{minus(1), 1}, {s, 2}};
    case PairShape::vertical_head_head: return {{minus(0), 0}, {minus(1), 1}};
    case PairShape::horizontal_into_vertical: return {{minus(1), 1}, {s, 0}};
    case PairShape::vertical_tail_tail: return {{s, 0}, {s, 1}};
    case PairShape::vertical_into_horizontal: return {{minus(0), 0}, {s, 1}};
    case PairShape::colinear_vertical: return {{minus(0), 0}, {s, 0}};
  }
  throw UsageError("unknown pair shape class");
}

std::uint64_t pair_cover_count(PairShape shape, int m, int n, int dim, int half_side) {
  check_cover_args(m, n, dim, half_side);
  const auto [e1, e2] = representative_pair(shape, dim);
  const Region c = build_box_on_stick(m, n, dim, {std::numeric_limits<std::size_t>::max()});
  const auto keys = reduced_edge_keys(c, half_side);
  const OrientedEdge a{reduce(e1.tail, half_side), e1.axis};
  const OrientedEdge b{reduce(e2.tail, half_side), e2.axis};
  return count_translates(dim, half_side, [&](const LatticePoint& x) {
    return has_key(keys, a, x, half_side) && has_key(keys, b, x, half_side);
  });
}

}  // namespace pvbs
