#include "ffgap/certification.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <sstream>

#include "ffgap/detectability.hpp"
#include "ffgap/error.hpp"
#include "ffgap/parallel.hpp"
#include "ffgap/random.hpp"

namespace ffgap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

}  // namespace

double recursion_factor(double delta, double s) {
  if (!(delta >= 0.0 && delta <= 1.0)) fail(ErrorCode::kInvalidArgument, "delta must lie in [0, 1]");
  if (!(s >= 1.0)) fail(ErrorCode::kInvalidArgument, "s must be >= 1");
  return (1.0 - delta) / (1.0 + 1.0 / s);
}

double recursion_step(double gap_f, double delta, double s) { return recursion_factor(delta, s) * gap_f; }

// ------------------------------------------------------------ s rules

double SRule::operator()(int k) const {
  switch (kind) {
    case Kind::kConstant:
      return std::max(1.0, value);
    case Kind::kPower:
      return std::max(1.0, std::ceil(value * std::pow(static_cast<double>(k), exponent) - 1e-12));
    case Kind::kLengthFraction:
      return std::max(1.0, std::floor(value * side_length(std::max(k, 0), dimension) + 1e-12));
    case Kind::kInfinite:
      return kInf;
  }
  return kInf;
}

double SRule::reciprocal_tail(int k_max) const {
  switch (kind) {
    case Kind::kInfinite:
      return 0.0;
    case Kind::kConstant:
      return std::isinf(value) ? 0.0 : kInf;
    case Kind::kPower: {
      if (exponent <= 1.0 || value <= 0.0) return kInf;
      constexpr int kExplicit = 1000;
      double sum = 0.0;
      for (int k = k_max + 1; k <= k_max + kExplicit; ++k) sum += 1.0 / (*this)(k);
      // 1 / ceil(c k^p) <= 1 / (c k^p), integrated from the last explicit term.
      const double x = static_cast<double>(k_max + kExplicit);
      return sum + std::pow(x, 1.0 - exponent) / (value * (exponent - 1.0));
    }
    case Kind::kLengthFraction: {
      if (value <= 0.0) return kInf;
      const double r = std::pow(1.5, -1.0 / dimension);
      double sum = 0.0;
      int k = k_max + 1;
      // Explicit while floor(f l_k) may be far from f l_k, then
      // 1 / floor(f l_k) <= 2 / (f l_k) summed geometrically.
      while (value * side_length(k, dimension) < 64.0) sum += 1.0 / (*this)(k++);
      return sum + 2.0 / (value * side_length(k, dimension)) / (1.0 - r);
    }
  }
  return kInf;
}

std::string SRule::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::kConstant:
      os << "const:" << value;
      break;
    case Kind::kPower:
      os << "power:" << value << ":" << exponent;
      break;
    case Kind::kLengthFraction:
      os << "fraction:" << value;
      break;
    case Kind::kInfinite:
      os << "inf";
      break;
  }
  return os.str();
}

SRule parse_s_rule(const std::string& text, int dimension) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto number = [&](std::size_t i) {
    try {
      std::size_t used = 0;
      const double v = std::stod(parts.at(i), &used);
      if (used != parts[i].size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      fail(ErrorCode::kConfig, "bad number in s rule '" + text + "'");
    }
  };
  SRule rule;
  rule.dimension = dimension;
  if (parts.size() == 1 && parts[0] == "inf") {
    rule.kind = SRule::Kind::kInfinite;
  } else if (parts.size() == 2 && parts[0] == "const") {
    rule.kind = SRule::Kind::kConstant;
    rule.value = number(1);
  } else if (parts.size() == 3 && parts[0] == "power") {
    rule.kind = SRule::Kind::kPower;
    rule.value = number(1);
    rule.exponent = number(2);
  } else if (parts.size() == 2 && parts[0] == "fraction") {
    rule.kind = SRule::Kind::kLengthFraction;
    rule.value = number(1);
  } else {
    fail(ErrorCode::kConfig, "s rule must be inf, const:S, power:C:P or fraction:F, got '" + text + "'");
  }
  if (rule.kind != SRule::Kind::kInfinite && !(rule.value > 0.0))
    fail(ErrorCode::kConfig, "s rule parameter must be positive");
  return rule;
}

// ------------------------------------------------------------ certificate

void GapSequence::validate() const {
  const std::size_t n = k.size();
  if (l.size() != n || lambda.size() != n || s.size() != n || delta.size() != n)
    fail(ErrorCode::kInconsistentSequence, "gap sequence columns have different lengths");
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && k[i] != k[i - 1] + 1) fail(ErrorCode::kInconsistentSequence, "k must be consecutive");
    if (!(lambda[i] >= 0.0)) fail(ErrorCode::kInconsistentSequence, "lambda_k must be >= 0");
    if (!(s[i] >= 1.0)) fail(ErrorCode::kInconsistentSequence, "s_k must be >= 1");
    if (!(delta[i] >= 0.0 && delta[i] <= 1.0 + 1e-12))
      fail(ErrorCode::kInconsistentSequence, "delta_k must lie in [0, 1]");
  }
}

Certificate certify(const GapSequence& gaps, double phi_min, int k_max, const CertifyOptions& options) {
  gaps.validate();
  Certificate c;
  c.phi_min = phi_min;
  c.k_max = k_max;
  std::ptrdiff_t end = -1;
  for (std::size_t i = 0; i < gaps.size(); ++i)
    if (gaps.k[i] <= k_max) end = static_cast<std::ptrdiff_t>(i);
  if (end < 0) fail(ErrorCode::kInvalidArgument, "no data at or below K_max");

  std::ptrdiff_t start = end + 1;
  for (std::ptrdiff_t i = end; i >= 0 && gaps.delta[i] < 1.0; --i) start = i;
  if (start > end) {
    c.k0 = k_max + 1;
    c.reason = "delta_k >= 1 persists up to K_max";
    return c;
  }
  c.k0 = gaps.k[start];
  c.base_gap = gaps.lambda[start];
  double running = phi_min * c.base_gap;
  c.finite_product = 1.0;
  for (std::ptrdiff_t i = start; i <= end; ++i) {
    const double f = recursion_factor(std::min(gaps.delta[i], 1.0), gaps.s[i]);
    c.factors.push_back(f);
    c.finite_product *= f;
    running *= f;
    c.running.push_back(running);
  }
  c.finite_lower_bound = phi_min * c.base_gap * c.finite_product;

  if (!options.tail) {
    c.lower_bound = c.finite_lower_bound;
    c.certifiable = c.lower_bound > 0.0;
    c.reason = c.certifiable ? "finite product only (tail disabled)" : "finite product vanishes";
    return c;
  }

  c.s_tail = options.s_rule.reciprocal_tail(k_max);
  if (!std::isfinite(c.s_tail)) {
    c.reason = "sum of 1/s_k diverges under " + options.s_rule.describe();
    return c;
  }

  // Root-test geometric majorant delta_k <= M rho^k fitted on the last window.
  const std::ptrdiff_t w0 =
      std::max(start, end + 1 - static_cast<std::ptrdiff_t>(std::max<std::size_t>(options.root_window, 1)));
  std::vector<double> ks, logs;
  for (std::ptrdiff_t i = w0; i <= end; ++i)
    if (gaps.delta[i] > 1e-14) {
      ks.push_back(gaps.k[i]);
      logs.push_back(std::log(gaps.delta[i]));
    }
  if (ks.empty()) {
    c.root_ratio = 0.0;
    c.delta_tail = 0.0;
  } else {
    double rho;
    if (ks.size() == 1)
      rho = ks[0] >= 1 ? std::exp(logs[0] / ks[0]) : 1.0;
    else
      rho = std::exp(least_squares(ks, logs).slope);
    c.root_ratio = rho;
    if (rho >= 1.0 - 1e-12) {
      c.reason = "root-test ratio of delta_k is not below 1";
      return c;
    }
    double log_m = -kInf;
    for (std::size_t i = 0; i < ks.size(); ++i) log_m = std::max(log_m, logs[i] - ks[i] * std::log(rho));
    const double next = std::exp(log_m + (k_max + 1) * std::log(rho));
    if (next >= 1.0) {
      c.reason = "extrapolated delta_k reaches 1";
      return c;
    }
    // -log(1 - d) <= d / (1 - d) and d_k <= next for k > K_max.
    c.delta_tail = next / (1.0 - rho) / (1.0 - next);
  }
  const double total = c.delta_tail + c.s_tail;
  c.tail_estimate = -std::expm1(-total);
  c.lower_bound = c.finite_lower_bound * std::exp(-total);
  c.certifiable = c.lower_bound > 0.0;
  c.reason = c.certifiable ? "certified" : "finite product vanishes";
  if (!c.certifiable) c.lower_bound = 0.0;
  return c;
}

// ------------------------------------------------------------ threshold test

double ScalingHypothesis::lambda(int k, int dimension) const {
  const double l = side_length(k, dimension);
  return c * std::pow(static_cast<double>(k), 4.0 + epsilon) / (l * l);
}

double ScalingHypothesis::s(int k) const { return std::pow(static_cast<double>(k), 1.0 + epsilon / 2.0); }

ThresholdReport threshold_test(const std::vector<int>& k, const std::vector<double>& lambda,
                               const std::vector<double>& s, int dimension) {
  if (k.size() != lambda.size() || k.size() != s.size())
    fail(ErrorCode::kInconsistentSequence, "threshold sequences have different lengths");
  if (k.empty()) fail(ErrorCode::kInsufficientData, "empty k range");
  ThresholdReport r;
  r.k = k;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] < 1 || !(lambda[i] > 0.0) || !(s[i] > 0.0))
      fail(ErrorCode::kInvalidArgument, "threshold test needs k >= 1 and positive sequences");
    r.v.push_back(std::sqrt(lambda[i]) * side_length(k[i], dimension) / (k[i] * s[i]));
  }
  const std::size_t n = k.size();
  const std::size_t window = std::min(n, std::max<std::size_t>(2, n / 4));
  std::vector<double> xs, ys;
  r.tail_min = kInf;
  for (std::size_t i = n - window; i < n; ++i) {
    r.tail_min = std::min(r.tail_min, r.v[i]);
    xs.push_back(k[i]);
    ys.push_back(std::log(r.v[i]));
  }
  r.log_slope = xs.size() >= 2 ? least_squares(xs, ys).slope : 0.0;
  r.liminf_estimate = r.log_slope >= -1e-3 ? r.tail_min : 0.0;
  r.passes = r.liminf_estimate > 0.0;
  return r;
}

ThresholdReport threshold_test(const ScalingHypothesis& hyp, int dimension, int k_lo, int k_hi) {
  if (k_lo < 1 || k_hi < k_lo) fail(ErrorCode::kInvalidArgument, "k range must satisfy 1 <= k_lo <= k_hi");
  if (!(hyp.c > 0.0 && hyp.epsilon > 0.0)) fail(ErrorCode::kInvalidArgument, "c and epsilon must be positive");
  std::vector<int> k;
  std::vector<double> lambda, s;
  for (int j = k_lo; j <= k_hi; ++j) {
    k.push_back(j);
    lambda.push_back(hyp.lambda(j, dimension));
    s.push_back(hyp.s(j));
  }
  ThresholdReport r = threshold_test(k, lambda, s, dimension);
  const double target = std::sqrt(hyp.c);
  double dev = 0.0;
  for (double v : r.v) dev = std::max(dev, std::abs(v - target) / target);
  r.max_relative_deviation = dev;
  return r;
}

double root_test_quantity(double c, double liminf) { return std::exp(-c * liminf); }

double delta_bound_theoretical(double lambda, double l, double s, double c1, double c2) {
  if (!(lambda >= 0.0 && l > 0.0 && s > 0.0)) fail(ErrorCode::kInvalidArgument, "inputs must be positive");
  return c1 * std::exp(-c2 * std::sqrt(lambda) * l / s);
}

DeltaFit fit_delta_bound(const std::vector<double>& x, const std::vector<double>& delta) {
  if (x.size() != delta.size()) fail(ErrorCode::kInconsistentSequence, "fit inputs have different lengths");
  DeltaFit fit;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (delta[i] > 0.0) {
      xs.push_back(x[i]);
      ys.push_back(std::log(delta[i]));
    } else {
      ++fit.dropped;
    }
  }
  fit.used = xs.size();
  if (xs.size() < 3) fail(ErrorCode::kInsufficientData, "insufficient data to fit");
  const LineFit lf = least_squares(xs, ys);
  fit.c1 = std::exp(lf.intercept);
  fit.c2 = -lf.slope;
  return fit;
}

// ------------------------------------------------------------ scaling

const char* to_string(ScalingClass c) {
  switch (c) {
    case ScalingClass::kGapped:
      return "gapped";
    case ScalingClass::kInverseSquareCompatible:
      return "inverse-square-compatible";
    case ScalingClass::kSlowerThanInverseSquare:
      return "slower-than-inverse-square (excluded regime)";
    case ScalingClass::kFasterThanInverseSquare:
      return "faster-than-inverse-square";
    case ScalingClass::kIndeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

ScalingFit scaling_fit(const std::vector<double>& sizes, const std::vector<double>& gaps, double gapped_threshold) {
  if (sizes.size() != gaps.size()) fail(ErrorCode::kInconsistentSequence, "sizes and gaps differ in length");
  if (sizes.size() < 3) fail(ErrorCode::kInsufficientData, "insufficient data: need at least 3 points");
  std::vector<double> x, y;
  ScalingFit fit;
  fit.min_gap = kInf;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(sizes[i] > 0.0)) fail(ErrorCode::kInvalidArgument, "sizes must be positive");
    if (!(gaps[i] > 0.0)) fail(ErrorCode::kGaplessAtFiniteSize, "gapless at finite size");
    x.push_back(std::log(sizes[i]));
    y.push_back(std::log(gaps[i]));
    fit.min_gap = std::min(fit.min_gap, gaps[i]);
  }
  const LineFit lf = least_squares(x, y);
  fit.exponent = lf.slope;
  fit.intercept = lf.intercept;
  fit.r_squared = lf.r_squared;
  const double e = fit.exponent;
  if (std::abs(e) < 0.25)
    fit.classification = fit.min_gap > gapped_threshold ? ScalingClass::kGapped : ScalingClass::kIndeterminate;
  else if (e >= -2.5 && e <= -1.5)
    fit.classification = ScalingClass::kInverseSquareCompatible;
  else if (e > -1.5 && e <= -0.25)
    fit.classification = ScalingClass::kSlowerThanInverseSquare;
  else if (e < -2.5)
    fit.classification = ScalingClass::kFasterThanInverseSquare;
  else
    fit.classification = ScalingClass::kIndeterminate;
  return fit;
}

// ------------------------------------------------------------ measurement

DeltaMeasurement measure_delta_k(const Interaction& phi, const EmbeddedGraph& g, int k, int s,
                                 const std::vector<double>& window_lo, const std::vector<double>& window_hi,
                                 const DeltaOptions& options) {
  if (s < 1) fail(ErrorCode::kInvalidArgument, "s must be >= 1");
  DeltaMeasurement out;
  out.k = k;
  out.s = s;
  const auto members = family_members(g, k, window_lo, window_hi, false);
  out.regions = members.size();
  std::vector<SplitPair> pairs;
  for (const Region& y : members) {
    try {
      auto p = split_pairs(y, k, s, g);
      pairs.insert(pairs.end(), p.begin(), p.end());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInsufficientWidth && e.code() != ErrorCode::kUnsupportedRegion) throw;
      ++out.skipped_regions;
    }
  }
  out.pairs_total = pairs.size();

  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (options.max_pairs > 0 && pairs.size() > options.max_pairs) {
    // Partial Fisher-Yates with the fixed-algorithm source, then index order.
    GaussianSource rng(options.seed);
    for (std::size_t i = 0; i < options.max_pairs; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(order.size() - i));
      std::swap(order[i], order[std::min(j, order.size() - 1)]);
    }
    order.resize(options.max_pairs);
    std::sort(order.begin(), order.end());
    out.sampled = true;
  }
  out.pairs_tested = order.size();
  if (order.empty()) return out;

  std::vector<double> values(order.size(), 0.0);
  std::vector<std::optional<double>> dl(order.size());
  parallel_for(order.size(), options.threads, [&](std::size_t i) {
    const SplitPair& pair = pairs[order[i]];
    const HilbertLayout host(pair.y, phi.local_dim());
    const KernelBasis ka = ground_space(phi, pair.a, options.cache, options.caps);
    const KernelBasis kb = ground_space(phi, pair.b, options.cache, options.caps);
    const KernelBasis ky = ground_space(phi, pair.y, options.cache, options.caps);
    values[i] = estimate_norm(projector_map(ka, host) * projector_map(kb, host) - projector_map(ky, host),
                              options.norms)
                    .value;
    if (options.t) {
      ColumnOptions co;
      co.cache = options.cache;
      co.caps = options.caps;
      try {
        const auto decomp = column_decomposition(phi, g, pair.y, *options.t, pair.alpha, co);
        dl[i] = estimate_norm(dl_operator(decomp).map * complement_map(ky, host), options.norms).value;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kInvalidArgument) throw;
      }
    }
  });
  out.delta = *std::max_element(values.begin(), values.end());
  for (const auto& v : dl) {
    if (!v) {
      if (options.t) ++out.dl_skipped;
      continue;
    }
    out.dl_perp_max = std::max(out.dl_perp_max.value_or(0.0), *v);
  }
  return out;
}

LevelRow measure_level(const Interaction& phi, const EmbeddedGraph& g, int k, const SRule& rule,
                       const std::vector<double>& window_lo, const std::vector<double>& window_hi,
                       const LevelOptions& options) {
  LevelRow row;
  row.k = k;
  row.l = side_length(k, g.dimension());
  row.s = rule(k);
  const auto members = family_members(g, k, window_lo, window_hi, false);
  for (const Region& y : members) {
    if (y.size() > row.region_size) {
      row.region_size = y.size();
      row.hilbert_dim = hilbert_dimension(y.size(), phi.local_dim());
    }
    const SpectralData sd = region_spectrum(phi, y, true, options.solver, options.delta.cache);
    if (sd.gap) row.gap = std::min(row.gap.value_or(kInf), *sd.gap);
  }
  const int s_measure = std::isfinite(row.s) ? static_cast<int>(std::min<double>(row.s, INT_MAX)) : 1;
  row.delta = measure_delta_k(phi, g, k, s_measure, window_lo, window_hi, options.delta);
  return row;
}

}  // namespace ffgap
