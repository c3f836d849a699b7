#include "ffgap/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "ffgap/error.hpp"

namespace ffgap {

// ---------------------------------------------------------------- Region

Region::Region(std::initializer_list<VertexId> ids) : Region(std::vector<VertexId>(ids)) {}

Region::Region(std::vector<VertexId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

Region Region::range(VertexId first, VertexId last_inclusive) {
  std::vector<VertexId> ids;
  for (VertexId v = first; v <= last_inclusive; ++v) ids.push_back(v);
  return Region(std::move(ids));
}

bool Region::contains(VertexId v) const { return std::binary_search(ids_.begin(), ids_.end(), v); }

bool Region::contains(const Region& other) const {
  return std::includes(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end());
}

bool Region::intersects(const Region& other) const {
  auto a = ids_.begin();
  auto b = other.ids_.begin();
  while (a != ids_.end() && b != other.ids_.end()) {
    if (*a == *b) return true;
    if (*a < *b) ++a; else ++b;
  }
  return false;
}

std::optional<std::size_t> Region::position_of(VertexId v) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
  if (it == ids_.end() || *it != v) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

Region Region::united(const Region& other) const {
  std::vector<VertexId> out;
  std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(), std::back_inserter(out));
  return Region(std::move(out));
}

Region Region::intersected(const Region& other) const {
  std::vector<VertexId> out;
  std::set_intersection(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                        std::back_inserter(out));
  return Region(std::move(out));
}

Region Region::minus(const Region& other) const {
  std::vector<VertexId> out;
  std::set_difference(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                      std::back_inserter(out));
  return Region(std::move(out));
}

std::string Region::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < ids_.size(); ++i) os << (i ? "," : "") << ids_[i];
  os << '}';
  return os.str();
}

// --------------------------------------------------------- EmbeddedGraph

EmbeddedGraph::EmbeddedGraph(int dimension, std::vector<std::vector<double>> coordinates,
                             std::vector<std::pair<VertexId, VertexId>> edges, double c_gamma)
    : dimension_(dimension), num_vertices_(coordinates.size()), c_gamma_(c_gamma) {
  if (dimension < 1) fail(ErrorCode::kInvalidArgument, "embedding dimension must be >= 1");
  if (c_gamma < 1.0) fail(ErrorCode::kInvalidArgument, "C_gamma must be >= 1");
  coords_.reserve(num_vertices_ * dimension_);
  for (const auto& c : coordinates) {
    if (static_cast<int>(c.size()) != dimension)
      fail(ErrorCode::kInvalidArgument, "vertex coordinate has wrong dimension");
    coords_.insert(coords_.end(), c.begin(), c.end());
  }
  adjacency_.resize(num_vertices_);
  std::set<std::pair<VertexId, VertexId>> seen;
  for (auto [a, b] : edges) {
    if (a >= num_vertices_ || b >= num_vertices_)
      fail(ErrorCode::kInvalidArgument, "edge references unknown vertex");
    if (a == b) fail(ErrorCode::kInvalidArgument, "self loops are not allowed");
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) continue;
    edges_.emplace_back(a, b);
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

EmbeddedGraph EmbeddedGraph::with_c_gamma(double c_gamma) const {
  EmbeddedGraph copy = *this;
  if (c_gamma < 1.0) fail(ErrorCode::kInvalidArgument, "C_gamma must be >= 1");
  copy.c_gamma_ = c_gamma;
  return copy;
}

std::span<const double> EmbeddedGraph::coordinates(VertexId v) const {
  return {coords_.data() + v * dimension_, static_cast<std::size_t>(dimension_)};
}

double EmbeddedGraph::euclidean_distance(VertexId a, VertexId b) const {
  double sum = 0.0;
  for (int k = 0; k < dimension_; ++k) {
    const double diff = coordinate(a, k) - coordinate(b, k);
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

Region EmbeddedGraph::all_vertices() const {
  std::vector<VertexId> ids(num_vertices_);
  std::iota(ids.begin(), ids.end(), VertexId{0});
  return Region(std::move(ids));
}

EmbeddedGraph make_chain(std::size_t n, double origin) {
  std::vector<std::vector<double>> coords;
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    coords.push_back({origin + static_cast<double>(i)});
    if (i > 0) edges.emplace_back(i - 1, i);
  }
  return EmbeddedGraph(1, std::move(coords), std::move(edges), 1.0);
}

EmbeddedGraph make_grid(const std::vector<std::size_t>& extents) {
  if (extents.empty()) fail(ErrorCode::kInvalidArgument, "grid needs at least one extent");
  const int dim = static_cast<int>(extents.size());
  std::size_t total = 1;
  for (auto e : extents) total *= e;
  // Row-major ids: the last axis varies fastest.
  std::vector<std::size_t> strides(dim, 1);
  for (int a = dim - 2; a >= 0; --a) strides[a] = strides[a + 1] * extents[a + 1];
  std::vector<std::vector<double>> coords(total, std::vector<double>(dim));
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (std::size_t id = 0; id < total; ++id) {
    std::size_t rest = id;
    for (int a = 0; a < dim; ++a) {
      coords[id][a] = static_cast<double>(rest / strides[a]);
      rest %= strides[a];
    }
    for (int a = 0; a < dim; ++a) {
      if (static_cast<std::size_t>(coords[id][a]) + 1 < extents[a]) edges.emplace_back(id, id + strides[a]);
    }
  }
  // Hop distance is the l1 distance, which is within sqrt(D) of Euclidean.
  return EmbeddedGraph(dim, std::move(coords), std::move(edges), std::sqrt(static_cast<double>(dim)));
}

EmbeddedGraph make_honeycomb(std::size_t rows, std::size_t cols) {
  // Brick-wall patch: lines y = 0..rows, sites x = 0..2 cols + 1, vertical bonds
  // where x + y is even. Only sites on a complete brick (hexagon) are kept.
  // Site (x, y) sits at (x sqrt3/2, 1.5 y +- 1/4), which makes every bond unit length.
  const double s3 = std::sqrt(3.0);
  const std::size_t width = 2 * cols + 2;
  std::vector<std::vector<char>> keep(rows + 1, std::vector<char>(width, 0));
  for (std::size_t y = 0; y < rows; ++y)
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t x0 = y % 2 + 2 * c;
      for (std::size_t x = x0; x <= x0 + 2; ++x) keep[y][x] = keep[y + 1][x] = 1;
    }
  std::vector<std::vector<std::size_t>> id(rows + 1, std::vector<std::size_t>(width, 0));
  std::vector<std::vector<double>> coords;
  for (std::size_t y = 0; y <= rows; ++y)
    for (std::size_t x = 0; x < width; ++x)
      if (keep[y][x]) {
        id[y][x] = coords.size();
        const double offset = (x + y) % 2 == 0 ? 0.25 : -0.25;
        coords.push_back({0.5 * s3 * static_cast<double>(x), 1.5 * static_cast<double>(y) + offset});
      }
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (std::size_t y = 0; y <= rows; ++y)
    for (std::size_t x = 0; x < width; ++x) {
      if (!keep[y][x]) continue;
      if (x + 1 < width && keep[y][x + 1]) edges.emplace_back(id[y][x], id[y][x + 1]);
      if (y < rows && (x + y) % 2 == 0 && keep[y + 1][x]) edges.emplace_back(id[y][x], id[y + 1][x]);
    }
  return EmbeddedGraph(2, std::move(coords), std::move(edges), 2.0);
}

double side_length(int k, int dimension) {
  if (k < 0 || dimension < 1) fail(ErrorCode::kInvalidArgument, "side_length needs k >= 0 and D >= 1");
  return std::pow(1.5, static_cast<double>(k) / static_cast<double>(dimension));
}

// ------------------------------------------------------------- distances

std::vector<std::optional<std::size_t>> bfs_distances(const EmbeddedGraph& g, VertexId source) {
  std::vector<std::optional<std::size_t>> dist(g.num_vertices());
  std::deque<VertexId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    for (VertexId w : g.neighbors(v)) {
      if (!dist[w]) {
        dist[w] = *dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

std::optional<std::size_t> graph_distance(const EmbeddedGraph& g, VertexId i, VertexId j) {
  if (i >= g.num_vertices() || j >= g.num_vertices())
    fail(ErrorCode::kInvalidArgument, "vertex not in graph");
  if (i == j) return 0;
  return bfs_distances(g, i)[j];
}

std::optional<std::size_t> set_distance(const EmbeddedGraph& g, const Region& a, const Region& b) {
  if (a.empty() || b.empty()) return std::nullopt;
  // Multi-source BFS from A.
  std::vector<std::optional<std::size_t>> dist(g.num_vertices());
  std::deque<VertexId> queue;
  for (VertexId v : a) {
    dist[v] = 0;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    if (b.contains(v)) return dist[v];
    for (VertexId w : g.neighbors(v)) {
      if (!dist[w]) {
        dist[w] = *dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return std::nullopt;
}

double euclidean_set_distance(const EmbeddedGraph& g, const Region& a, const Region& b) {
  double best = std::numeric_limits<double>::infinity();
  for (VertexId u : a)
    for (VertexId v : b) best = std::min(best, g.euclidean_distance(u, v));
  return best;
}

std::optional<std::size_t> graph_diameter(const EmbeddedGraph& g, const Region& region) {
  std::size_t best = 0;
  for (VertexId u : region) {
    const auto dist = bfs_distances(g, u);
    for (VertexId v : region) {
      if (!dist[v]) return std::nullopt;
      best = std::max(best, *dist[v]);
    }
  }
  return best;
}

EmbeddingReport check_embedding(const EmbeddedGraph& g) {
  const std::size_t n = g.num_vertices();
  for (VertexId i = 0; i < n; ++i)
    for (VertexId j = i + 1; j < n; ++j)
      if (g.euclidean_distance(i, j) <= kCoordinateTolerance)
        fail(ErrorCode::kDuplicateCoordinates,
             "vertices " + std::to_string(i) + " and " + std::to_string(j) + " share coordinates");

  EmbeddingReport report;
  report.valid = true;
  double c = 1.0;
  for (VertexId i = 0; i < n; ++i) {
    const auto dist = bfs_distances(g, i);
    for (VertexId j = i + 1; j < n; ++j) {
      if (!dist[j]) {
        report.valid = false;
        report.violation = std::make_pair(i, j);
        report.message = "vertices " + std::to_string(i) + " and " + std::to_string(j) +
                         " are unreachable; the upper inequality fails for every C";
        report.fitted_c_gamma = std::numeric_limits<double>::infinity();
        return report;
      }
      const double hops = static_cast<double>(*dist[j]);
      const double euclid = g.euclidean_distance(i, j);
      c = std::max({c, hops / euclid, euclid / hops});
    }
  }
  report.fitted_c_gamma = c;
  report.stored_constant_holds = c <= g.c_gamma() * (1.0 + 1e-12);
  report.message = "embedding valid";
  return report;
}

// ------------------------------------------------------------ rectangles

std::vector<double> RectangleFamily::sides() const {
  std::vector<int> perm = axis_permutation;
  if (perm.empty()) {
    perm.resize(dimension);
    std::iota(perm.begin(), perm.end(), 0);
  }
  if (static_cast<int>(perm.size()) != dimension)
    fail(ErrorCode::kInvalidArgument, "axis permutation has wrong length");
  std::vector<double> out(dimension, 0.0);
  std::vector<bool> used(dimension, false);
  for (int i = 0; i < dimension; ++i) {
    const int axis = perm[i];
    if (axis < 0 || axis >= dimension || used[axis])
      fail(ErrorCode::kInvalidArgument, "axis permutation is not a permutation");
    used[axis] = true;
    out[axis] = side_length(k + 1 + i, dimension);
  }
  return out;
}

Region box_members(const EmbeddedGraph& g, const std::vector<double>& lo, const std::vector<double>& hi) {
  const int dim = g.dimension();
  if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim)
    fail(ErrorCode::kInvalidArgument, "box has wrong dimension");
  std::vector<VertexId> ids;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    bool inside = true;
    for (int a = 0; a < dim && inside; ++a) {
      const double x = g.coordinate(v, a);
      inside = x >= lo[a] - kCoordinateTolerance && x <= hi[a] + kCoordinateTolerance;
    }
    if (inside) ids.push_back(v);
  }
  return Region(std::move(ids));
}

Region rectangle_members(const EmbeddedGraph& g, const RectangleFamily& family) {
  if (family.dimension != g.dimension()) fail(ErrorCode::kInvalidArgument, "family dimension mismatch");
  const auto sides = family.sides();
  std::vector<double> lo(family.dimension, 0.0);
  if (!family.translate.empty()) {
    if (static_cast<int>(family.translate.size()) != family.dimension)
      fail(ErrorCode::kInvalidArgument, "translate has wrong dimension");
    lo = family.translate;
  }
  std::vector<double> hi(family.dimension);
  for (int a = 0; a < family.dimension; ++a) hi[a] = lo[a] + sides[a];
  return box_members(g, lo, hi);
}

std::vector<Region> family_members(const EmbeddedGraph& g, int k, const std::vector<double>& window_lo,
                                   const std::vector<double>& window_hi, bool include_sub_boxes) {
  const int dim = g.dimension();
  std::vector<int> perm(dim);
  std::iota(perm.begin(), perm.end(), 0);
  std::set<Region> seen;
  std::vector<Region> out;
  auto add = [&](Region r) {
    if (!r.empty() && seen.insert(r).second) out.push_back(std::move(r));
  };
  do {
    RectangleFamily fam{k, dim, {}, perm};
    const auto sides = fam.sides();
    // Integer translate counts along each axis.
    std::vector<long> counts(dim);
    for (int a = 0; a < dim; ++a) {
      const double slack = window_hi[a] - window_lo[a] - sides[a];
      counts[a] = slack < 0 ? 1 : static_cast<long>(std::floor(slack + kCoordinateTolerance)) + 1;
    }
    std::vector<long> idx(dim, 0);
    while (true) {
      std::vector<double> lo(dim), hi(dim);
      for (int a = 0; a < dim; ++a) {
        lo[a] = window_lo[a] + static_cast<double>(idx[a]);
        hi[a] = std::min(lo[a] + sides[a], window_hi[a]);
      }
      if (!include_sub_boxes) {
        add(box_members(g, lo, hi));
      } else {
        // Integer-offset sub-boxes [lo + o, lo + o + w] with w <= side.
        std::vector<long> max_off(dim);
        for (int a = 0; a < dim; ++a) max_off[a] = static_cast<long>(std::floor(hi[a] - lo[a] + kCoordinateTolerance));
        std::vector<long> off(dim, 0), width(dim, 0);
        std::function<void(int)> rec = [&](int axis) {
          if (axis == dim) {
            std::vector<double> slo(dim), shi(dim);
            for (int a = 0; a < dim; ++a) {
              slo[a] = lo[a] + static_cast<double>(off[a]);
              shi[a] = slo[a] + static_cast<double>(width[a]);
            }
            add(box_members(g, slo, shi));
            return;
          }
          for (off[axis] = 0; off[axis] <= max_off[axis]; ++off[axis])
            for (width[axis] = 0; off[axis] + width[axis] <= max_off[axis]; ++width[axis]) rec(axis + 1);
        };
        rec(0);
      }
      int a = 0;
      while (a < dim && ++idx[a] >= counts[a]) idx[a++] = 0;
      if (a == dim) break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::sort(out.begin(), out.end(), [](const Region& x, const Region& y) {
    return x.size() != y.size() ? x.size() > y.size() : x < y;
  });
  return out;
}

// ------------------------------------------------------------ split pairs

bool projections_match(const EmbeddedGraph& g, const Region& a, const Region& b, int alpha) {
  auto project = [&](const Region& r) {
    std::set<std::vector<long long>> pts;
    for (VertexId v : r) {
      std::vector<long long> key;
      for (int ax = 0; ax < g.dimension(); ++ax)
        key.push_back(ax == alpha ? 0 : std::llround(g.coordinate(v, ax) / kCoordinateTolerance));
      pts.insert(std::move(key));
    }
    return pts;
  };
  return project(a) == project(b);
}

double separation_requirement(int k, int s, const EmbeddedGraph& g) {
  return (side_length(k, g.dimension()) / (8.0 * s) - 2.0) / g.c_gamma();
}

SplitPair make_split_pair(const EmbeddedGraph& g, Region a, Region b, int alpha) {
  SplitPair pair;
  pair.y = a.united(b);
  pair.a = std::move(a);
  pair.b = std::move(b);
  pair.alpha = alpha;
  if (pair.a_only().empty() || pair.b_only().empty())
    fail(ErrorCode::kInvalidArgument, "A\\B and B\\A must both be nonempty");
  const auto sep = set_distance(g, pair.a_only(), pair.b_only());
  if (!sep) fail(ErrorCode::kUnsupportedRegion, "A\\B and B\\A are disconnected");
  pair.separation = *sep;
  pair.euclidean_gap = euclidean_set_distance(g, pair.a_only(), pair.b_only());
  return pair;
}

std::vector<SplitPair> split_pairs(const Region& y, int k, int s, const EmbeddedGraph& g) {
  if (s < 0) fail(ErrorCode::kInvalidArgument, "s must be >= 0");
  if (s == 0) return {};
  if (y.empty()) fail(ErrorCode::kUnsupportedRegion, "empty region");
  const int dim = g.dimension();
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (VertexId v : y)
    for (int a = 0; a < dim; ++a) {
      lo[a] = std::min(lo[a], g.coordinate(v, a));
      hi[a] = std::max(hi[a], g.coordinate(v, a));
    }
  if (box_members(g, lo, hi) != y)
    fail(ErrorCode::kUnsupportedRegion, "region is not the vertex set of its bounding box");

  int alpha = 0;
  for (int a = 1; a < dim; ++a)
    if (hi[a] - lo[a] > hi[alpha] - lo[alpha] + kCoordinateTolerance) alpha = a;
  const double width = hi[alpha] - lo[alpha];
  const double third = width / 3.0;
  const double cell = third / static_cast<double>(s);
  const double required = separation_requirement(k, s, g);

  std::vector<SplitPair> pairs;
  for (int i = 0; i < s; ++i) {
    const double slab_lo = lo[alpha] + third + cell * i;
    const double slab_hi = slab_lo + cell;
    const bool last = i + 1 == s;
    std::vector<VertexId> a_ids, b_ids, slab;
    for (VertexId v : y) {
      const double x = g.coordinate(v, alpha);
      const bool below_hi = last ? x <= slab_hi + kCoordinateTolerance : x < slab_hi - kCoordinateTolerance;
      const bool above_lo = x >= slab_lo - kCoordinateTolerance;
      if (below_hi) a_ids.push_back(v);
      if (above_lo) b_ids.push_back(v);
      if (below_hi && above_lo) slab.push_back(v);
    }
    SplitPair pair;
    pair.a = Region(std::move(a_ids));
    pair.b = Region(std::move(b_ids));
    pair.y = y;
    pair.alpha = alpha;
    if (slab.empty() || pair.a_only().empty() || pair.b_only().empty())
      fail(ErrorCode::kInsufficientWidth,
           "overlap slab " + std::to_string(i) + " of " + std::to_string(s) + " cannot be realised in " +
               y.to_string());
    const auto sep = set_distance(g, pair.a_only(), pair.b_only());
    if (!sep) fail(ErrorCode::kUnsupportedRegion, "A\\B and B\\A are disconnected");
    pair.separation = *sep;
    pair.euclidean_gap = euclidean_set_distance(g, pair.a_only(), pair.b_only());
    if (static_cast<double>(pair.separation) < required - kCoordinateTolerance)
      fail(ErrorCode::kInsufficientWidth, "separation " + std::to_string(pair.separation) +
                                              " below C^-1 (l_k/(8s) - 2) = " + std::to_string(required));
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

Region ball(const EmbeddedGraph& g, VertexId i, double r) {
  const auto dist = bfs_distances(g, i);
  std::vector<VertexId> ids;
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    if (dist[v] && static_cast<double>(*dist[v]) <= r + kCoordinateTolerance) ids.push_back(v);
  return Region(std::move(ids));
}

}  // namespace ffgap
