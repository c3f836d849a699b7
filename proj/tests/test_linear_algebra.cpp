#include <gtest/gtest.h>

#include <atomic>

#include "ffgap/eigensolvers.hpp"
#include "ffgap/hilbert.hpp"
#include "ffgap/linear_map.hpp"
#include "ffgap/parallel.hpp"
#include "ffgap/random.hpp"
#include "oracle.hpp"

using namespace ffgap;

TEST(SiteAction, MatchesDigitEmbedding) {
  oracle::Gen gen(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = static_cast<int>(gen.integer(2, 3));
    const std::size_t n = d == 2 ? 5 : 3;
    HilbertLayout layout(Region::range(0, n - 1), d);
    std::vector<VertexId> ids;
    for (std::size_t i = 0; i < n; ++i)
      if (gen.real(0, 1) < 0.5) ids.push_back(i);
    if (ids.empty()) ids.push_back(n - 1);
    const Region support(ids);
    const long local = oracle::ipow(d, static_cast<long>(ids.size()));
    const oracle::Mat m = gen.gaussian(local, local);
    std::vector<long> pos(ids.begin(), ids.end());
    const oracle::Mat expected = oracle::embed(m, pos, static_cast<long>(n), d);
    SiteAction act(layout, support);
    EXPECT_LT((DenseMatrix(act.embed(m)) - expected).norm(), 1e-12);
    const Vector v = gen.gaussian(layout.dim(), 1);
    Vector w = v;
    act.apply(m, w);
    EXPECT_LT((w - expected * v).norm(), 1e-10);
  }
}

TEST(SiteAction, GatherScatterRoundTrip) {
  HilbertLayout layout(Region::range(0, 4), 2);
  SiteAction act(layout, Region({1, 3}));
  oracle::Gen gen(4);
  const Vector v = gen.gaussian(32, 1);
  Vector w = Vector::Zero(32);
  act.scatter(act.gather(v), w);
  EXPECT_EQ((v - w).norm(), 0.0);
}

TEST(Lanczos, LowestMatchesDense) {
  oracle::Gen gen(8);
  const oracle::Mat h = gen.psd(200, 200) / 200.0;
  const auto ev = oracle::eigenvalues(h);
  const auto res = lowest_eigenpairs([&](const Vector& v) { return Vector(h * v); }, 200, 4, DenseMatrix(200, 0),
                                     KrylovOptions{.dense_threshold = 0});
  ASSERT_TRUE(res.converged);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(res.values(i), ev(i), 1e-8);
  const auto hi = highest_eigenpairs([&](const Vector& v) { return Vector(h * v); }, 200, 2, DenseMatrix(200, 0),
                                     KrylovOptions{.dense_threshold = 0});
  EXPECT_NEAR(hi.values.maxCoeff(), ev(199), 1e-8);
}

TEST(Lanczos, DeflationSkipsKernel) {
  oracle::Gen gen(9);
  const oracle::Mat q = gen.projector(120, 5);
  const oracle::Mat h = (oracle::Mat::Identity(120, 120) - q) * gen.psd(120, 120) * (oracle::Mat::Identity(120, 120) - q) / 120.0;
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(q);
  const DenseMatrix kernel = es.eigenvectors().rightCols(5);
  const auto ev = oracle::eigenvalues(h);
  const auto res = lowest_eigenpairs([&](const Vector& v) { return Vector(h * v); }, 120, 1, kernel,
                                     KrylovOptions{.dense_threshold = 0});
  EXPECT_NEAR(res.values(0), ev(5), 1e-8);
}

TEST(Norm, DenseAndKrylovAgreeWithSvd) {
  oracle::Gen gen(10);
  for (Eigen::Index dim : {50, 1500}) {
    // separated top singular value so the Krylov route converges quickly
    const oracle::Mat a = gen.gaussian(dim, dim) / std::sqrt(double(dim)) + 4.0 * gen.gaussian(dim, 1) * gen.gaussian(1, dim) / double(dim);
    const double expected = oracle::opnorm(a);
    const auto est = estimate_norm(LinearMap::from_dense(a));
    EXPECT_NEAR(est.value, expected, 1e-8 * expected);
    EXPECT_EQ(est.dense, dim <= 256);
  }
  EXPECT_EQ(estimate_norm(LinearMap::zero(2000)).value, 0.0);
  EXPECT_NEAR(estimate_norm(LinearMap::identity(3000)).value, 1.0, 1e-12);
}

TEST(LinearMap, CompositionAndAdjoint) {
  oracle::Gen gen(12);
  const oracle::Mat a = gen.gaussian(6, 6), b = gen.gaussian(6, 6);
  const auto ma = LinearMap::from_dense(a), mb = LinearMap::from_dense(b);
  EXPECT_LT(((ma * mb).to_dense() - a * b).norm(), 1e-12);
  EXPECT_LT(((ma - mb).to_dense() - (a - b)).norm(), 1e-12);
  EXPECT_LT(((ma * mb).adjoint().to_dense() - (a * b).adjoint()).norm(), 1e-12);
  EXPECT_LT((ma.scaled(Complex(0, 2)).to_dense() - Complex(0, 2) * a).norm(), 1e-12);
}

TEST(Random, SeededStreamsReproduce) {
  GaussianSource a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.normal(), b.normal());
  GaussianSource r(1);
  const auto u = haar_unitary(5, r);
  EXPECT_LT((u.adjoint() * u - Eigen::MatrixXcd::Identity(5, 5)).norm(), 1e-12);
}

TEST(Parallel, EveryIndexOnceAndErrorsPropagate) {
  std::vector<std::atomic<int>> hits(97);
  parallel_for(97, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 7) throw std::runtime_error("x");
               }),
               std::runtime_error);
}
