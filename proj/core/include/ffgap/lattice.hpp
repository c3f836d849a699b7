#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ffgap {

using VertexId = std::size_t;

// Coordinate membership tolerance for closed boxes.
inline constexpr double kCoordinateTolerance = 1e-9;

// Ordered vertex set. Ids are kept sorted and unique so that the position of a
// vertex inside the region fixes its tensor factor.
class Region {
 public:
  Region() = default;
  Region(std::initializer_list<VertexId> ids);
  explicit Region(std::vector<VertexId> ids);

  static Region range(VertexId first, VertexId last_inclusive);

  const std::vector<VertexId>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  VertexId operator[](std::size_t i) const { return ids_[i]; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  bool contains(VertexId v) const;
  bool contains(const Region& other) const;
  bool intersects(const Region& other) const;
  // Position of v within the region; nullopt if absent.
  std::optional<std::size_t> position_of(VertexId v) const;

  Region united(const Region& other) const;
  Region intersected(const Region& other) const;
  Region minus(const Region& other) const;

  std::string to_string() const;

  friend bool operator==(const Region&, const Region&) = default;
  friend auto operator<=>(const Region&, const Region&) = default;

 private:
  std::vector<VertexId> ids_;
};

// Finite graph with a Euclidean embedding iota : V -> R^D and a bi-Lipschitz
// constant C_gamma relating hop distance and Euclidean distance.
class EmbeddedGraph {
 public:
  EmbeddedGraph(int dimension, std::vector<std::vector<double>> coordinates,
                std::vector<std::pair<VertexId, VertexId>> edges, double c_gamma = 1.0);

  int dimension() const { return dimension_; }
  std::size_t num_vertices() const { return num_vertices_; }
  double c_gamma() const { return c_gamma_; }
  EmbeddedGraph with_c_gamma(double c_gamma) const;

  std::span<const double> coordinates(VertexId v) const;
  double coordinate(VertexId v, int axis) const { return coords_[v * dimension_ + axis]; }
  double euclidean_distance(VertexId a, VertexId b) const;

  const std::vector<VertexId>& neighbors(VertexId v) const { return adjacency_[v]; }
  const std::vector<std::pair<VertexId, VertexId>>& edges() const { return edges_; }

  Region all_vertices() const;

 private:
  int dimension_;
  std::size_t num_vertices_;
  std::vector<double> coords_;
  std::vector<std::pair<VertexId, VertexId>> edges_;
  std::vector<std::vector<VertexId>> adjacency_;
  double c_gamma_;
};

// Builtin geometries. Coordinates are integer lattice points unless noted.
EmbeddedGraph make_chain(std::size_t n, double origin = 0.0);
EmbeddedGraph make_grid(const std::vector<std::size_t>& extents);
// Honeycomb patch with unit bond length; rows x cols hexagon cells.
EmbeddedGraph make_honeycomb(std::size_t rows, std::size_t cols);

// l_k = (3/2)^(k/D).
double side_length(int k, int dimension);

// Hop distance; nullopt when i and j lie in different components.
std::optional<std::size_t> graph_distance(const EmbeddedGraph& g, VertexId i, VertexId j);
std::vector<std::optional<std::size_t>> bfs_distances(const EmbeddedGraph& g, VertexId source);
// min over a in A, b in B of the hop distance; nullopt if no pair is connected
// or either set is empty.
std::optional<std::size_t> set_distance(const EmbeddedGraph& g, const Region& a, const Region& b);
double euclidean_set_distance(const EmbeddedGraph& g, const Region& a, const Region& b);
// Largest hop distance between two vertices of the region (graph metric of the
// whole graph); nullopt if some pair is disconnected.
std::optional<std::size_t> graph_diameter(const EmbeddedGraph& g, const Region& region);

struct EmbeddingReport {
  bool valid = false;
  double fitted_c_gamma = 1.0;  // smallest C >= 1 satisfying both inequalities
  bool stored_constant_holds = false;
  std::optional<std::pair<VertexId, VertexId>> violation;  // e.g. unreachable pair
  std::string message;
};

// Exhaustive pair check of the bi-Lipschitz embedding condition.
// Throws kDuplicateCoordinates if iota is not injective.
EmbeddingReport check_embedding(const EmbeddedGraph& g);

struct RectangleFamily {
  int k = 0;
  int dimension = 1;
  std::vector<double> translate;      // empty means the origin
  std::vector<int> axis_permutation;  // side l_{k+1+i} lies along axis_permutation[i]; empty = identity

  // Side length along each coordinate axis after the permutation.
  std::vector<double> sides() const;
};

// All vertices inside the closed box [lo, hi] (with kCoordinateTolerance).
Region box_members(const EmbeddedGraph& g, const std::vector<double>& lo,
                   const std::vector<double>& hi);
Region rectangle_members(const EmbeddedGraph& g, const RectangleFamily& family);

// Enumerates every distinct nonempty member of F_k obtainable by integer
// translates and axis permutations of R(k) lying inside the window box.
// With include_sub_boxes, all integer-sided sub-boxes of each translate are
// included as well.
std::vector<Region> family_members(const EmbeddedGraph& g, int k, const std::vector<double>& window_lo,
                                   const std::vector<double>& window_hi, bool include_sub_boxes);

struct SplitPair {
  Region a;
  Region b;
  Region y;
  int alpha = 0;               // 0-based split axis
  std::size_t separation = 0;  // hop distance between A\B and B\A
  double euclidean_gap = 0.0;  // Euclidean distance between A\B and B\A

  Region overlap() const { return a.intersected(b); }
  Region a_only() const { return a.minus(b); }
  Region b_only() const { return b.minus(a); }
};

// Pi_alpha(A) == Pi_alpha(B) as point sets.
bool projections_match(const EmbeddedGraph& g, const Region& a, const Region& b, int alpha);

// s overlapping pairs (A_i, B_i) cut along the longest side of Y. Overlap slabs
// are the s equal cells of the middle third of that side.
// Throws kUnsupportedRegion when Y is not the full vertex set of its bounding
// box and kInsufficientWidth when the slabs cannot be realised.
std::vector<SplitPair> split_pairs(const Region& y, int k, int s, const EmbeddedGraph& g);

// Pair with the separation fields filled in; A u B must be connected across
// A\B and B\A.
SplitPair make_split_pair(const EmbeddedGraph& g, Region a, Region b, int alpha);

// Lower bound on the separation of a split: C_gamma^{-1} (l_k / (8 s) - 2).
double separation_requirement(int k, int s, const EmbeddedGraph& g);

// { j : d(i, j) <= r }.
Region ball(const EmbeddedGraph& g, VertexId i, double r);

}  // namespace ffgap
