#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "ffgap/certification.hpp"
#include "ffgap/error.hpp"
#include "ffgap/models.hpp"
#include "oracle.hpp"

using namespace ffgap;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kUnreachable;
}

GapSequence synthetic(int k0, int k1, double base, const std::function<double(int)>& delta,
                      const std::function<double(int)>& s) {
  GapSequence g;
  for (int k = k0; k <= k1; ++k) {
    g.k.push_back(k);
    g.l.push_back(side_length(k, 1));
    g.lambda.push_back(base);
    g.s.push_back(s(k));
    g.delta.push_back(delta(k));
  }
  return g;
}

// prod_{k0}^{k1} (1 - 2^-k) / (1 + 1/k^2) in 50 digits.
Big big_product(int k0, int k1) {
  Big p = 1;
  Big half = pow(Big(2), -k0);
  for (int k = k0; k <= k1; ++k, half /= 2) {
    const Big kk = k;
    p *= (1 - half) / (1 + 1 / (kk * kk));
  }
  return p;
}

}  // namespace

TEST(Recursion, Examples) {
  EXPECT_NEAR(recursion_step(0.7, 0.0, 1e9), 0.7, 1e-9);
  EXPECT_EQ(recursion_step(0.7, 1.0, 3), 0.0);
  EXPECT_DOUBLE_EQ(recursion_step(0.8, 0.5, 1), 0.2);
  EXPECT_EQ(recursion_step(0.8, 0.0, kInf), 0.8);
  EXPECT_EQ(code_of([] { recursion_step(1, 1.5, 2); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { recursion_step(1, 0.5, 0.5); }), ErrorCode::kInvalidArgument);
}

TEST(Recursion, PropertyMonotone) {
  oracle::Gen gen(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const double g = gen.real(0, 2), d = gen.real(0, 1), s = gen.real(1, 100);
    const double base = recursion_step(g, d, s);
    EXPECT_LE(base, recursion_step(g + gen.real(0, 1), d, s));
    EXPECT_LE(base, recursion_step(g, d, s + gen.real(0, 50)));
    EXPECT_GE(base, recursion_step(g, std::min(1.0, d + gen.real(0, 0.5)), s));
  }
}

TEST(Certify, ZeroDeltaInfiniteS) {
  const auto g = synthetic(1, 6, 0.6, [](int) { return 0.0; }, [](int) { return kInf; });
  CertifyOptions opts;
  opts.s_rule.kind = SRule::Kind::kInfinite;
  const auto c = certify(g, 0.5, 6, opts);
  EXPECT_TRUE(c.certifiable);
  EXPECT_NEAR(c.lower_bound, 0.3, 1e-15);
  EXPECT_EQ(c.k0, 1);
}

TEST(Certify, SyntheticProductAgainstHighPrecision) {
  const auto g = synthetic(2, 60, 1.0, [](int k) { return std::ldexp(1.0, -k); }, [](int k) { return double(k) * k; });
  CertifyOptions finite;
  finite.tail = false;
  for (int k_max : {5, 20, 60}) {
    const auto c = certify(g, 1.0, k_max, finite);
    const double expected = big_product(2, k_max).convert_to<double>();
    EXPECT_NEAR(c.finite_product, expected, 1e-10) << k_max;
    EXPECT_NEAR(c.lower_bound, expected, 1e-15);
    ASSERT_EQ(c.factors.size(), static_cast<std::size_t>(k_max - 1));
    for (double f : c.factors) {
      EXPECT_GT(f, 0.0);
      EXPECT_LE(f, 1.0);
    }
  }
  // Tail-adjusted bound never exceeds the infinite product.
  CertifyOptions tail;
  tail.s_rule = parse_s_rule("power:1:2", 1);
  const int n = 200000;
  const double infinite_lower = (big_product(2, n) * exp(Big(-1.0 / n))).convert_to<double>();
  for (int k_max : {8, 20}) {
    const auto c = certify(g, 1.0, k_max, tail);
    EXPECT_TRUE(c.certifiable);
    EXPECT_NEAR(c.root_ratio, 0.5, 1e-12);
    EXPECT_LE(c.lower_bound, infinite_lower);
    EXPECT_GT(c.lower_bound, 0.9 * infinite_lower);
    EXPECT_NEAR(c.lower_bound, c.finite_lower_bound * (1 - c.tail_estimate), 1e-15);
  }
}

TEST(Certify, ConstantHalfNotCertifiable) {
  const auto g = synthetic(1, 30, 1.0, [](int) { return 0.5; }, [](int k) { return double(k) * k; });
  CertifyOptions opts;
  opts.s_rule = parse_s_rule("power:1:2", 1);
  const auto c = certify(g, 1.0, 30, opts);
  EXPECT_FALSE(c.certifiable);
  EXPECT_EQ(c.lower_bound, 0.0);
  EXPECT_LT(c.finite_product, 1e-8);
}

TEST(Certify, DivergentSTail) {
  const auto g = synthetic(1, 10, 1.0, [](int k) { return std::ldexp(1.0, -k); }, [](int) { return 4.0; });
  CertifyOptions opts;
  opts.s_rule = parse_s_rule("const:4", 1);
  EXPECT_FALSE(certify(g, 1.0, 10, opts).certifiable);
}

TEST(Certify, KZeroSkipsLargeDeltas) {
  const auto g = synthetic(1, 8, 0.5, [](int k) { return k <= 3 ? 1.0 : std::ldexp(1.0, -k); },
                           [](int k) { return double(k) * k; });
  CertifyOptions opts;
  opts.s_rule = parse_s_rule("power:1:2", 1);
  const auto c = certify(g, 1.0, 8, opts);
  EXPECT_EQ(c.k0, 4);
  EXPECT_EQ(c.factors.size(), 5u);
}

TEST(Certify, InconsistentSequence) {
  auto g = synthetic(1, 5, 1.0, [](int) { return 0.1; }, [](int) { return 2.0; });
  g.delta.pop_back();
  EXPECT_EQ(code_of([&] { certify(g, 1.0, 5); }), ErrorCode::kInconsistentSequence);
  auto gap = synthetic(1, 5, 1.0, [](int) { return 0.1; }, [](int) { return 2.0; });
  gap.k[2] = 7;
  EXPECT_EQ(code_of([&] { certify(gap, 1.0, 5); }), ErrorCode::kInconsistentSequence);
}

TEST(SRule, ParseAndTails) {
  const auto p = parse_s_rule("power:1:2", 1);
  EXPECT_EQ(p(7), 49.0);
  double exact = M_PI * M_PI / 6;
  for (int k = 1; k <= 10; ++k) exact -= 1.0 / (k * k);
  EXPECT_GE(p.reciprocal_tail(10), exact - 1e-15);
  EXPECT_LE(p.reciprocal_tail(10), exact + 1e-6);
  EXPECT_EQ(parse_s_rule("power:1:1", 1).reciprocal_tail(3), kInf);

  const auto f = parse_s_rule("fraction:0.125", 1);
  EXPECT_EQ(f(1), 1.0);
  double brute = 0;
  for (int k = 6; k < 400; ++k) brute += 1.0 / f(k);
  EXPECT_GE(f.reciprocal_tail(5), brute);
  EXPECT_LE(f.reciprocal_tail(5), 2 * brute + 1);

  EXPECT_EQ(parse_s_rule("inf", 1).reciprocal_tail(1), 0.0);
  EXPECT_EQ(parse_s_rule("const:3", 1).reciprocal_tail(1), kInf);
  for (const char* bad : {"", "power:1", "fraction:-1", "const:x", "square"})
    EXPECT_EQ(code_of([&] { parse_s_rule(bad, 1); }), ErrorCode::kConfig) << bad;
}

TEST(Threshold, HypothesisIsExactlyConstant) {
  for (int dim : {1, 2, 3})
    for (double c : {0.1, 1.0, 7.5})
      for (double eps : {0.1, 0.5, 2.0}) {
        const auto r = threshold_test(ScalingHypothesis{c, eps}, dim, 1, 200);
        ASSERT_EQ(r.v.size(), 200u);
        EXPECT_LE(*r.max_relative_deviation, 1e-12);
        for (double v : r.v) EXPECT_NEAR(v, std::sqrt(c), 1e-12 * std::sqrt(c));
        EXPECT_TRUE(r.passes);
        EXPECT_LT(root_test_quantity(1.0, r.liminf_estimate), 1.0);
      }
}

TEST(Threshold, PassingAndFailingSequences) {
  std::vector<int> k;
  std::vector<double> constant, cubic, s;
  for (int j = 1; j <= 200; ++j) {
    k.push_back(j);
    constant.push_back(0.3);
    cubic.push_back(std::pow(side_length(j, 1), -3.0));
    s.push_back(double(j) * j);
  }
  const auto up = threshold_test(k, constant, s, 1);
  EXPECT_TRUE(up.passes);
  EXPECT_GT(up.v.back(), up.v.front());
  const auto down = threshold_test(k, cubic, s, 1);
  EXPECT_FALSE(down.passes);
  EXPECT_LT(down.v.back(), 1e-10);
  EXPECT_EQ(root_test_quantity(1.0, down.liminf_estimate), 1.0);
}

TEST(Threshold, RootQuantityBelowOneIffPasses) {
  oracle::Gen gen(8);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = gen.real(-1, 1), b = gen.real(0.5, 2.5);
    std::vector<int> k;
    std::vector<double> lambda, s;
    for (int j = 1; j <= 60; ++j) {
      k.push_back(j);
      lambda.push_back(std::exp(a * j) / std::pow(side_length(j, 1), 2.0));
      s.push_back(std::pow(j, b));
    }
    const auto r = threshold_test(k, lambda, s, 1);
    EXPECT_EQ(root_test_quantity(1.0, r.liminf_estimate) < 1.0, r.passes);
  }
}

TEST(DeltaBound, TheoreticalAndFit) {
  EXPECT_EQ(delta_bound_theoretical(0.0, 3.0, 1.0, 2.5, 1.0), 2.5);
  std::vector<double> x, d;
  for (int i = 0; i < 12; ++i) {
    x.push_back(0.5 + 0.4 * i);
    d.push_back(3.0 * std::exp(-0.7 * x.back()));
  }
  d.push_back(0.0);
  x.push_back(9.0);
  const auto fit = fit_delta_bound(x, d);
  EXPECT_NEAR(fit.c1, 3.0, 0.03);
  EXPECT_NEAR(fit.c2, 0.7, 0.007);
  EXPECT_EQ(fit.dropped, 1u);
  EXPECT_EQ(code_of([] { fit_delta_bound({1, 2}, {0.1, 0.05}); }), ErrorCode::kInsufficientData);
}

TEST(ScalingFit, Examples) {
  std::vector<double> sizes, inv_sq, flat;
  for (int n = 4; n <= 12; ++n) {
    sizes.push_back(n);
    inv_sq.push_back(1.0 / (n * n));
    flat.push_back(0.4);
  }
  const auto a = scaling_fit(sizes, inv_sq);
  EXPECT_NEAR(a.exponent, -2.0, 1e-9);
  EXPECT_EQ(a.classification, ScalingClass::kInverseSquareCompatible);
  const auto b = scaling_fit(sizes, flat);
  EXPECT_NEAR(b.exponent, 0.0, 1e-12);
  EXPECT_EQ(b.classification, ScalingClass::kGapped);
  std::vector<double> inv;
  for (double n : sizes) inv.push_back(1.0 / n);
  EXPECT_EQ(scaling_fit(sizes, inv).classification, ScalingClass::kSlowerThanInverseSquare);
  EXPECT_EQ(code_of([] { scaling_fit({4}, {0.1}); }), ErrorCode::kInsufficientData);
  EXPECT_EQ(code_of([] { scaling_fit({4, 5, 6}, {0.1, 0.0, 0.1}); }), ErrorCode::kGaplessAtFiniteSize);
}

TEST(ScalingFit, FerromagnetSweep) {
  std::vector<double> sizes, gaps;
  for (int n = 4; n <= 12; ++n) {
    const auto g = make_chain(n);
    sizes.push_back(n);
    gaps.push_back(*region_spectrum(heisenberg_fm(g), g.all_vertices(), true).gap);
  }
  const auto f = scaling_fit(sizes, gaps);
  EXPECT_GE(f.exponent, -2.3);
  EXPECT_LE(f.exponent, -1.7);
}

TEST(MeasureDelta, ProductFamilyVanishes) {
  const auto g = make_chain(16);
  std::vector<InteractionTerm> terms;
  for (VertexId i = 0; i < 16; ++i) terms.push_back({Region({i}), DenseMatrix(Eigen::Vector2cd(0, 1).asDiagonal())});
  const Interaction phi(2, 1.0, terms);
  const auto m = measure_delta_k(phi, g, 3, 1, {0.0}, {15.0});
  ASSERT_TRUE(m.delta.has_value());
  EXPECT_LE(*m.delta, 1e-12);
  EXPECT_GT(m.pairs_tested, 0u);
}

TEST(MeasureDelta, FerromagnetMatchesDenseOracle) {
  const auto g = make_chain(10);
  const auto phi = heisenberg_fm(g);
  for (int k : {3, 4}) {
    const auto m = measure_delta_k(phi, g, k, 1, {0.0}, {9.0});
    ASSERT_TRUE(m.delta.has_value());
    double expected = 0;
    for (const auto& y : family_members(g, k, {0.0}, {9.0}, false))
      for (const auto& p : split_pairs(y, k, 1, g)) {
        std::vector<long> pa, pb;
        for (auto v : p.a) pa.push_back(static_cast<long>(*p.y.position_of(v)));
        for (auto v : p.b) pb.push_back(static_cast<long>(*p.y.position_of(v)));
        const long n = static_cast<long>(p.y.size());
        const auto a = oracle::embed(oracle::kernel_projector(oracle::hamiltonian(phi, p.a)), pa, n, 2);
        const auto b = oracle::embed(oracle::kernel_projector(oracle::hamiltonian(phi, p.b)), pb, n, 2);
        const auto ab = oracle::kernel_projector(oracle::hamiltonian(phi, p.y));
        expected = std::max(expected, oracle::opnorm(a * b - ab));
      }
    EXPECT_GT(*m.delta, 0.0);
    EXPECT_LT(*m.delta, 1.0);
    EXPECT_NEAR(*m.delta, expected, 1e-8) << k;
  }
}

TEST(MeasureDelta, SamplingIsSeededAndFlagged) {
  const auto g = make_chain(14);
  const auto phi = heisenberg_fm(g);
  DeltaOptions opts;
  opts.max_pairs = 2;
  opts.seed = 9;
  const auto a = measure_delta_k(phi, g, 3, 1, {0.0}, {13.0}, opts);
  const auto b = measure_delta_k(phi, g, 3, 1, {0.0}, {13.0}, opts);
  EXPECT_TRUE(a.sampled);
  EXPECT_EQ(a.pairs_tested, 2u);
  EXPECT_EQ(*a.delta, *b.delta);
  const auto full = measure_delta_k(phi, g, 3, 1, {0.0}, {13.0});
  EXPECT_LE(*a.delta, *full.delta);
}

TEST(Certify, SoundOnCommutingToy) {
  const auto g = make_chain(30);
  const auto phi = commuting_toy(g, ToyVariant::kPolarizing);
  const SRule rule = parse_s_rule("fraction:0.125", 1);
  GapSequence seq;
  std::vector<double> min_gaps;
  for (int k = 1; k <= 4; ++k) {
    const auto row = measure_level(phi, g, k, rule, {0.0}, {29.0});
    ASSERT_TRUE(row.gap && row.delta.delta);
    seq.k.push_back(k);
    seq.l.push_back(row.l);
    seq.lambda.push_back(*row.gap);
    seq.s.push_back(row.s);
    seq.delta.push_back(*row.delta.delta);
    min_gaps.push_back(*row.gap);
    EXPECT_LE(*row.delta.delta, 1e-12);
    EXPECT_NEAR(*row.gap, 1.0, 1e-10);
  }
  CertifyOptions opts;
  opts.s_rule = rule;
  const auto c = certify(seq, phi_bounds(phi).min, 4, opts);
  EXPECT_TRUE(c.certifiable);
  EXPECT_GT(c.lower_bound, 0.0);
  for (double gap : min_gaps) EXPECT_LE(c.lower_bound, gap + 1e-9);
}
