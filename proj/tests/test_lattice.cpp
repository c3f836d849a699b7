#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ffgap/error.hpp"
#include "ffgap/lattice.hpp"
#include "oracle.hpp"

using namespace ffgap;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

std::set<double> projection(const EmbeddedGraph& g, const Region& r, int alpha) {
  std::set<double> out;
  for (auto v : r) {
    std::vector<double> c;
    for (int a = 0; a < g.dimension(); ++a)
      if (a != alpha) c.push_back(g.coordinate(v, a));
    // encode the remaining coordinates into one key; grid coordinates are small integers
    double key = 0;
    for (double x : c) key = key * 1000 + x;
    out.insert(key);
  }
  return out;
}

// Every structural property of one split_pairs call, checked with oracles.
void check_pairs(const EmbeddedGraph& g, const Region& y, int k, int s, const std::vector<SplitPair>& pairs) {
  const auto dist = oracle::floyd_warshall(g);
  ASSERT_EQ(pairs.size(), static_cast<std::size_t>(s));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    EXPECT_EQ(p.a.united(p.b), y);
    EXPECT_EQ(projection(g, p.a, p.alpha), projection(g, p.b, p.alpha));
    const long sep = oracle::set_distance(dist, p.a_only(), p.b_only());
    EXPECT_EQ(static_cast<long>(p.separation), sep);
    EXPECT_GE(static_cast<double>(sep), (side_length(k, g.dimension()) / (8.0 * s) - 2.0) / g.c_gamma() - 1e-9);
    for (std::size_t j = i + 1; j < pairs.size(); ++j) EXPECT_FALSE(p.overlap().intersects(pairs[j].overlap()));
  }
}

}  // namespace

TEST(SideLength, Examples) {
  EXPECT_EQ(side_length(0, 3), 1.0);
  EXPECT_DOUBLE_EQ(side_length(2, 2), 1.5);
  EXPECT_DOUBLE_EQ(side_length(2, 1), 2.25);
  for (int d = 1; d <= 3; ++d)
    for (int k = 0; k < 40; ++k) EXPECT_LT(side_length(k, d), side_length(k + 1, d));
}

TEST(GraphDistance, Examples) {
  const auto chain = make_chain(4);
  EXPECT_EQ(graph_distance(chain, 0, 3), 3u);
  EXPECT_EQ(graph_distance(chain, 2, 2), 0u);
  const auto grid = make_grid({3, 3});
  const auto d = oracle::floyd_warshall(grid);
  EXPECT_EQ(graph_distance(grid, 0, 8), 4u);
  for (VertexId i = 0; i < 9; ++i)
    for (VertexId j = 0; j < 9; ++j) EXPECT_EQ(static_cast<long>(*graph_distance(grid, i, j)), d[i][j]);
}

TEST(GraphDistance, Unreachable) {
  EmbeddedGraph g(1, {{0.0}, {1.0}}, {});
  EXPECT_FALSE(graph_distance(g, 0, 1).has_value());
}

TEST(Embedding, ChainHasUnitConstant) {
  const auto r = check_embedding(make_chain(9));
  EXPECT_TRUE(r.valid);
  EXPECT_DOUBLE_EQ(r.fitted_c_gamma, 1.0);
  EXPECT_TRUE(r.stored_constant_holds);
}

TEST(Embedding, UnreachablePairReported) {
  EmbeddedGraph g(1, {{0.0}, {1.0}}, {});
  const auto r = check_embedding(g);
  EXPECT_FALSE(r.valid);
  ASSERT_TRUE(r.violation.has_value());
}

TEST(Embedding, DuplicateCoordinates) {
  EmbeddedGraph g(1, {{0.0}, {0.0}}, {{0, 1}});
  EXPECT_EQ(code_of([&] { check_embedding(g); }), ErrorCode::kDuplicateCoordinates);
}

TEST(Embedding, HoneycombBelowTwo) {
  const auto g = make_honeycomb(2, 3);
  const auto r = check_embedding(g);
  EXPECT_TRUE(r.valid);
  EXPECT_LE(r.fitted_c_gamma, 2.0);
  EXPECT_GE(r.fitted_c_gamma, 1.0);
  // Both inequalities with the fitted constant, by Floyd-Warshall.
  const auto d = oracle::floyd_warshall(g);
  const double c = r.fitted_c_gamma;
  for (VertexId i = 0; i < g.num_vertices(); ++i)
    for (VertexId j = 0; j < g.num_vertices(); ++j) {
      const double e = g.euclidean_distance(i, j);
      EXPECT_LE(e, c * d[i][j] + 1e-9);
      EXPECT_LE(static_cast<double>(d[i][j]), c * e + 1e-9);
    }
}

TEST(Rectangle, Examples) {
  const auto chain = make_chain(6);
  // l_{k+1} = 1.5 for D = 1 at k = 0.
  EXPECT_EQ(rectangle_members(chain, {0, 1, {}, {}}), Region({0, 1}));
  EXPECT_TRUE(rectangle_members(chain, {0, 1, {100.0}, {}}).empty());
  const auto grid = make_grid({5, 5});
  const auto r = rectangle_members(grid, {2, 2, {}, {}});
  EXPECT_EQ(r.size(), 6u);
  std::set<double> xs, ys;
  for (auto v : r) {
    xs.insert(grid.coordinate(v, 0));
    ys.insert(grid.coordinate(v, 1));
  }
  EXPECT_EQ(xs.size(), 2u);
  EXPECT_EQ(ys.size(), 3u);
}

TEST(Rectangle, MonotoneUnderEnlargement) {
  const auto grid = make_grid({6, 6});
  oracle::Gen gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> lo{gen.real(-1, 5), gen.real(-1, 5)};
    std::vector<double> hi{lo[0] + gen.real(0, 4), lo[1] + gen.real(0, 4)};
    std::vector<double> lo2{lo[0] - gen.real(0, 2), lo[1] - gen.real(0, 2)};
    std::vector<double> hi2{hi[0] + gen.real(0, 2), hi[1] + gen.real(0, 2)};
    EXPECT_TRUE(box_members(grid, lo2, hi2).contains(box_members(grid, lo, hi)));
  }
}

TEST(SplitPairs, OneDimensionalExamples) {
  const auto chain = make_chain(12);
  const Region y = Region::range(0, 11);
  const auto one = split_pairs(y, 2, 1, chain);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].a, Region::range(0, 7));
  EXPECT_EQ(one[0].b, Region::range(4, 11));
  EXPECT_GE(one[0].separation, 1u);
  check_pairs(chain, y, 2, 1, one);

  EXPECT_TRUE(split_pairs(y, 2, 0, chain).empty());

  const auto two = split_pairs(y, 2, 2, chain);
  check_pairs(chain, y, 2, 2, two);
}

TEST(SplitPairs, Errors) {
  const auto chain = make_chain(12);
  EXPECT_EQ(code_of([&] { split_pairs(Region::range(0, 11), 2, 9, chain); }), ErrorCode::kInsufficientWidth);
  EXPECT_EQ(code_of([&] { split_pairs(Region({0, 1, 5, 6}), 2, 1, chain); }), ErrorCode::kUnsupportedRegion);
}

// Randomised 1D and 2D windows: every produced pair passes the oracle checks,
// and failures only ever use the two documented signals.
TEST(SplitPairs, PropertyRandomWindows) {
  oracle::Gen gen(11);
  int produced = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const bool two_d = trial % 2 == 1;
    const std::size_t nx = gen.integer(3, two_d ? 9 : 30);
    const std::size_t ny = two_d ? gen.integer(1, 6) : 1;
    const auto g = two_d ? make_grid({nx, ny}) : make_chain(nx);
    const int k = static_cast<int>(gen.integer(0, 10));
    const int s = static_cast<int>(gen.integer(1, 4));
    try {
      const auto pairs = split_pairs(g.all_vertices(), k, s, g);
      check_pairs(g, g.all_vertices(), k, s, pairs);
      ++produced;
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::kInsufficientWidth) << e.what();
    }
  }
  EXPECT_GT(produced, 40);
}

TEST(Ball, Examples) {
  const auto chain = make_chain(7);
  EXPECT_EQ(ball(chain, 3, 0), Region({3}));
  EXPECT_EQ(ball(chain, 3, 1), Region({2, 3, 4}));
  const auto grid = make_grid({7, 7});
  EXPECT_EQ(ball(grid, 24, 2).size(), 13u);
}

TEST(Region, SetAlgebra) {
  oracle::Gen gen(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Region a = gen.subset(20, 0.4), b = gen.subset(20, 0.4);
    const Region u = a.united(b), i = a.intersected(b);
    EXPECT_EQ(u.size() + i.size(), a.size() + b.size());
    EXPECT_EQ(a.minus(b).united(i), a);
    EXPECT_EQ(i.empty(), !a.intersects(b));
    EXPECT_TRUE(std::is_sorted(u.begin(), u.end()));
  }
}

TEST(FamilyMembers, ChainWindowIntervals) {
  const auto chain = make_chain(10);
  // k = 2, D = 1: sides l_3 = 3.375 covers four integer points.
  const auto members = family_members(chain, 2, {0.0}, {9.0}, false);
  ASSERT_FALSE(members.empty());
  for (const auto& m : members) {
    EXPECT_EQ(m.size(), 4u);
    EXPECT_EQ(m[3] - m[0], 3u);
  }
}
