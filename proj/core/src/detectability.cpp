#include "ffgap/detectability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "ffgap/error.hpp"
#include "ffgap/parallel.hpp"

namespace ffgap {

namespace {

constexpr double kIdentityTolerance = 1e-10;

std::vector<double> progression(double t, double offset, double lo, double hi) {
  // Column of m is [m - 2t + 1, m + 2t - 1]; it meets [lo, hi] iff
  // m - 2t + 1 <= hi and m + 2t - 1 >= lo.
  const double m_min = lo - 2 * t + 1 - kCoordinateTolerance;
  const double m_max = hi + 2 * t - 1 + kCoordinateTolerance;
  const double step = 6 * t;
  std::vector<double> out;
  const long long j0 = static_cast<long long>(std::ceil((m_min - offset * t) / step - 1e-12));
  for (long long j = j0;; ++j) {
    const double m = (offset + 6.0 * static_cast<double>(j)) * t;
    if (m > m_max) break;
    if (m >= m_min) out.push_back(m);
  }
  return out;
}

LinearMap product_of(const std::vector<const Column*>& columns, const HilbertLayout& host) {
  std::vector<LinearMap> maps;
  maps.reserve(columns.size());
  for (const Column* c : columns) maps.push_back(projector_map(c->q, host));
  auto shared = std::make_shared<const std::vector<LinearMap>>(std::move(maps));
  // Leftmost factor acts last.
  LinearMap::Action forward = [shared](const Vector& v) {
    Vector out = v;
    for (auto it = shared->rbegin(); it != shared->rend(); ++it) out = it->apply(out);
    return out;
  };
  LinearMap::Action adjoint = [shared](const Vector& v) {
    Vector out = v;
    for (const auto& m : *shared) out = m.apply(out);
    return out;
  };
  return LinearMap(host.dim(), forward, adjoint);
}

std::vector<const Column*> pointers(const std::vector<Column>& columns) {
  std::vector<const Column*> out;
  for (const auto& c : columns) out.push_back(&c);
  return out;
}

double norm_of(const LinearMap& m, const NormOptions& options) { return estimate_norm(m, options).value; }

double extremum(const std::function<double(double)>& f, double eps, bool want_min) {
  if (!(eps >= 0.0 && eps <= 1.0)) fail(ErrorCode::kInvalidArgument, "eps must lie in [0, 1]");
  const double a = 1.0 - eps;
  if (eps == 0.0) return std::abs(f(1.0));
  constexpr int kGrid = 10000;
  std::vector<double> xs(kGrid + 1), vs(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) {
    xs[i] = i == kGrid ? 1.0 : a + eps * static_cast<double>(i) / kGrid;
    vs[i] = f(xs[i]);
  }
  auto better = [want_min](double x, double y) { return want_min ? x < y : x > y; };
  int best_i = 0;
  for (int i = 1; i <= kGrid; ++i)
    if (better(std::abs(vs[i]), std::abs(vs[best_i]))) best_i = i;
  double best = std::abs(vs[best_i]);

  if (want_min) {
    for (int i = 0; i < kGrid; ++i) {
      if (!((vs[i] < 0 && vs[i + 1] > 0) || (vs[i] > 0 && vs[i + 1] < 0))) continue;
      double lo = xs[i], hi = xs[i + 1], flo = vs[i];
      for (int iter = 0; iter < 200 && hi - lo > 0; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      best = std::min({best, std::abs(f(lo)), std::abs(f(hi))});
    }
  }

  // Golden-section search of |f| on the bracket around the grid extremum.
  double lo = xs[std::max(best_i - 1, 0)], hi = xs[std::min(best_i + 1, kGrid)];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = std::abs(f(x1)), f2 = std::abs(f(x2));
  for (int iter = 0; iter < 100; ++iter) {
    if (better(f1, f2)) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = std::abs(f(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = std::abs(f(x2));
    }
  }
  for (double v : {f1, f2})
    if (better(v, best)) best = v;
  return best;
}

}  // namespace

IndexSets index_sets(double t, double lo, double hi) {
  if (!(t > 0.0)) fail(ErrorCode::kInvalidArgument, "t must be positive");
  if (lo > hi) return {};
  return {progression(t, 2.0, lo, hi), progression(t, 5.0, lo, hi)};
}

double coarse_graining_threshold(const EmbeddedGraph& g, const Interaction& phi) {
  return std::max(2.0, g.c_gamma() * phi.range());
}

ColumnDecomposition column_decomposition(const Interaction& phi, const EmbeddedGraph& g, const Region& region,
                                         double t, int alpha, const ColumnOptions& options) {
  if (alpha < 0 || alpha >= g.dimension()) fail(ErrorCode::kInvalidArgument, "axis out of range");
  if (!(t > 0.0)) fail(ErrorCode::kInvalidArgument, "t must be positive");
  const double threshold = coarse_graining_threshold(g, phi);
  if (options.enforce_threshold && t < threshold - 1e-12)
    fail(ErrorCode::kInvalidArgument,
         "t = " + std::to_string(t) + " is below max(2, C_gamma R) = " + std::to_string(threshold));

  ColumnDecomposition out;
  out.t = t;
  out.alpha = alpha;
  out.region = region;
  out.local_dim = phi.local_dim();
  if (region.empty()) return out;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (VertexId v : region) {
    lo = std::min(lo, g.coordinate(v, alpha));
    hi = std::max(hi, g.coordinate(v, alpha));
  }
  out.indices = index_sets(t, lo, hi);

  struct Pending {
    double center;
    bool even;
    Region sites;
  };
  std::vector<Pending> pending;
  for (int parity = 0; parity < 2; ++parity) {
    for (double m : parity == 0 ? out.indices.even : out.indices.odd) {
      std::vector<VertexId> ids;
      for (VertexId v : region) {
        const double x = g.coordinate(v, alpha);
        if (x >= m - 2 * t + 1 - kCoordinateTolerance && x <= m + 2 * t - 1 + kCoordinateTolerance) ids.push_back(v);
      }
      Region sites(std::move(ids));
      if (sites.empty() || phi.terms_within(sites).empty()) {
        ++out.pruned;
        continue;
      }
      pending.push_back({m, parity == 0, std::move(sites)});
    }
  }
  std::vector<KernelBasis> kernels(pending.size());
  parallel_for(pending.size(), options.threads, [&](std::size_t i) {
    kernels[i] = ground_space(phi, pending[i].sites, options.cache, options.caps);
  });
  for (std::size_t i = 0; i < pending.size(); ++i) {
    Column c{pending[i].center, std::move(pending[i].sites), std::move(kernels[i])};
    (pending[i].even ? out.even : out.odd).push_back(std::move(c));
  }
  return out;
}

CommutingReport check_commuting(const ColumnDecomposition& decomp, const NormOptions& options) {
  CommutingReport out;
  for (int parity = 0; parity < 2; ++parity) {
    const auto& cols = parity == 0 ? decomp.even : decomp.odd;
    double& worst = parity == 0 ? out.max_even : out.max_odd;
    for (std::size_t i = 0; i < cols.size(); ++i)
      for (std::size_t j = i + 1; j < cols.size(); ++j) {
        const HilbertLayout joint(cols[i].sites.united(cols[j].sites), decomp.local_dim);
        const LinearMap p = projector_map(cols[i].q, joint);
        const LinearMap q = projector_map(cols[j].q, joint);
        worst = std::max(worst, norm_of(p * q - q * p, options));
        ++out.pairs;
      }
  }
  return out;
}

DLOperator dl_operator(const ColumnDecomposition& decomp) {
  HilbertLayout host(decomp.region, decomp.local_dim);
  LinearMap even = product_of(pointers(decomp.even), host);
  LinearMap odd = product_of(pointers(decomp.odd), host);
  DLOperator out{host, {}, {}, even, odd, even * odd, decomp.t};
  for (const auto& c : decomp.even) out.even_indices.push_back(c.center);
  for (const auto& c : decomp.odd) out.odd_indices.push_back(c.center);
  return out;
}

LayerProduct layer_product(const Interaction& phi, const Region& region, const LayerColoring& coloring) {
  if (coloring.layer_of_term.size() != phi.size())
    fail(ErrorCode::kInvalidArgument, "coloring does not match the interaction");
  const HilbertLayout layout(region, phi.local_dim());
  const Eigen::Index dim = layout.dim();
  struct Factor {
    std::vector<std::pair<SiteAction, DenseMatrix>> terms;
  };
  std::vector<std::shared_ptr<Factor>> factors(coloring.num_layers);
  for (auto& f : factors) f = std::make_shared<Factor>();
  for (std::size_t idx : phi.terms_within(region)) {
    const auto& term = phi.terms()[idx];
    DenseMatrix h = range_projector(term.matrix);
    if (h.isZero(0.0)) continue;
    factors[coloring.layer_of_term[idx]]->terms.emplace_back(SiteAction(layout, term.support), std::move(h));
  }
  LayerProduct out{coloring, {}, LinearMap::identity(dim)};
  for (const auto& f : factors) {
    const std::shared_ptr<const Factor> shared = f;
    out.factors.push_back(LinearMap::hermitian(dim, [shared](const Vector& v) {
      Vector w = v;
      for (const auto& [action, h] : shared->terms) action.apply_complement(h, w);
      return w;
    }));
  }
  for (const auto& f : out.factors) out.product = f * out.product;
  return out;
}

StandardDlReport standard_dl_check(const LayerProduct& t, const LinearMap& p_perp, double lambda, int g,
                                   const NormOptions& options) {
  if (g < 0) fail(ErrorCode::kInvalidArgument, "g must be >= 0");
  StandardDlReport out;
  out.g_flagged = g == 0;
  out.g_used = std::max(g, 1);
  const double n = norm_of(t.product * p_perp, options);
  out.norm_sq = n * n;
  out.bound = 1.0 / (1.0 + std::max(lambda, 0.0) / (static_cast<double>(out.g_used) * out.g_used));
  out.slack = out.bound - out.norm_sq;
  out.holds = out.slack >= -1e-10;
  return out;
}

double chebyshev_t(int q, double y) {
  if (q < 0) fail(ErrorCode::kInvalidArgument, "degree must be >= 0");
  if (q == 0) return 1.0;
  if (std::abs(y) <= 1.0) {
    double prev = 1.0, cur = y;
    for (int k = 1; k < q; ++k) {
      const double next = 2.0 * y * cur - prev;
      prev = cur;
      cur = next;
    }
    return cur;
  }
  const double value = std::cosh(q * std::acosh(std::abs(y)));
  return (y < 0 && q % 2 == 1) ? -value : value;
}

double chebyshev_step(const ChebyshevStep& p, double x) {
  if (p.q < 1) fail(ErrorCode::kInvalidArgument, "q must be >= 1");
  if (!(p.gamma > 0.0 && p.gamma < 1.0)) fail(ErrorCode::kInvalidArgument, "gamma must lie in (0, 1)");
  const double y0 = 2.0 / (1.0 - p.gamma) - 1.0;
  const double y = 2.0 * (1.0 - x) / (1.0 - p.gamma) - 1.0;
  const double a0 = std::acosh(y0);
  const double q = p.q;
  if (y == y0) return 1.0;
  // 1 / cosh(q a0) = 2 e^{-q a0} / (1 + e^{-2 q a0}).
  const double inv_denominator = 2.0 * std::exp(-q * a0) / (1.0 + std::exp(-2.0 * q * a0));
  if (std::abs(y) <= 1.0) return chebyshev_t(p.q, y) * inv_denominator;
  const double a = std::acosh(std::abs(y));
  // cosh(q a) / cosh(q a0) = e^{q (a - a0)} (1 + e^{-2 q a}) / (1 + e^{-2 q a0}).
  const double ratio = std::exp(q * (a - a0)) * (1.0 + std::exp(-2.0 * q * a)) / (1.0 + std::exp(-2.0 * q * a0));
  return (y < 0 && p.q % 2 == 1) ? -ratio : ratio;
}

SmuggledPolynomial SmuggledPolynomial::step(ChebyshevStep p) {
  chebyshev_step(p, 0.0);  // parameter validation
  SmuggledPolynomial out;
  out.form_ = p;
  return out;
}

SmuggledPolynomial SmuggledPolynomial::coefficients(std::vector<double> c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  if (c.empty()) c.push_back(0.0);
  SmuggledPolynomial out;
  out.form_ = std::move(c);
  return out;
}

int SmuggledPolynomial::degree() const {
  if (const auto* s = std::get_if<ChebyshevStep>(&form_)) return s->q;
  return static_cast<int>(std::get<std::vector<double>>(form_).size()) - 1;
}

double SmuggledPolynomial::operator()(double x) const {
  if (const auto* s = std::get_if<ChebyshevStep>(&form_)) return chebyshev_step(*s, x);
  const auto& c = std::get<std::vector<double>>(form_);
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Vector SmuggledPolynomial::apply(const LinearMap& gram, const Vector& v) const {
  if (const auto* s = std::get_if<ChebyshevStep>(&form_)) {
    // Step(1 - G) = T_q(Z) / T_q(y0) with Z = (2 / (1 - gamma)) G - 1.
    const double scale = 2.0 / (1.0 - s->gamma);
    auto z = [&](const Vector& u) -> Vector { return scale * gram.apply(u) - u; };
    Vector prev = v, cur = z(v);
    for (int k = 1; k < s->q; ++k) {
      Vector next = 2.0 * z(cur) - prev;
      prev = std::move(cur);
      cur = std::move(next);
    }
    return cur / chebyshev_t(s->q, 2.0 / (1.0 - s->gamma) - 1.0);
  }
  // Horner in X = 1 - G.
  const auto& c = std::get<std::vector<double>>(form_);
  Vector acc = c.back() * v;
  for (std::size_t k = c.size() - 1; k-- > 0;) acc = (acc - gram.apply(acc)).eval() + c[k] * v;
  return acc;
}

double f_star(const std::function<double(double)>& f, double eps) { return extremum(f, eps, true); }

double f_sup(const std::function<double(double)>& f, double eps) { return extremum(f, eps, false); }

int smuggling_degree_budget(double t, double c_gamma, int layers, double range) {
  if (layers < 2) fail(ErrorCode::kSingleLayer, "single layer: the smuggling budget is unbounded");
  if (!(t > 0.0 && c_gamma > 0.0 && range > 0.0)) fail(ErrorCode::kInvalidArgument, "t, C and R must be positive");
  const double x = t / (2.0 * c_gamma * (layers - 1) * range) - 1.0;
  return static_cast<int>(std::ceil(x - 1e-12));
}

int safe_smuggling_degree_budget(double t, double c_gamma, int layers, double range) {
  if (layers < 2) fail(ErrorCode::kSingleLayer, "single layer: the smuggling budget is unbounded");
  if (!(t > 0.0 && c_gamma > 0.0 && range > 0.0)) fail(ErrorCode::kInvalidArgument, "t, C and R must be positive");
  const double x = (t / (c_gamma * range) - 1.0) / (2.0 * (layers - 1));
  return std::max(0, static_cast<int>(std::ceil(x - 1e-12)) - 1);
}

SmuggleReport smuggle_check(const DLOperator& dl, const LayerProduct& t, const SmuggledPolynomial& f,
                            double c_gamma, int layers, double range, const NormOptions& options) {
  if (std::abs(f(0.0) - 1.0) > 1e-12) fail(ErrorCode::kInvalidArgument, "F(0) must equal 1");
  if (t.product.dim() != dl.host.dim()) fail(ErrorCode::kInvalidArgument, "layer product and DL live on different spaces");
  SmuggleReport out;
  out.degree = f.degree();
  out.budget = smuggling_degree_budget(dl.t, c_gamma, layers, range);
  out.safe_budget = safe_smuggling_degree_budget(dl.t, c_gamma, layers, range);
  if (out.degree > out.budget)
    fail(ErrorCode::kDegreeExceedsBudget,
         "degree " + std::to_string(out.degree) + " exceeds budget " + std::to_string(out.budget));
  const LinearMap gram = t.product.adjoint() * t.product;
  auto poly = std::make_shared<const SmuggledPolynomial>(f);
  // Real coefficients and Hermitian G make F(1 - G) Hermitian.
  const LinearMap smuggled =
      LinearMap::hermitian(gram.dim(), [poly, gram](const Vector& v) { return poly->apply(gram, v); });
  out.residual = norm_of(dl.map - dl.even_product * smuggled * dl.odd_product, options);
  return out;
}

double refined_dl_bound(double t, double lambda, int layers, int g, double c_gamma, double range) {
  if (layers < 2) fail(ErrorCode::kSingleLayer, "single layer: the refined bound is undefined");
  if (g < 0) fail(ErrorCode::kInvalidArgument, "g must be >= 0");
  const double lam = std::clamp(lambda, 0.0, 1.0);
  const double exponent = (t / (c_gamma * (layers - 1) * range) - 2.0) * std::sqrt(lam / (1.0 + double(g) * g));
  return 2.0 * std::exp(-exponent);
}

MaMbSplit ma_mb_split(const ColumnDecomposition& decomp, const DLOperator& dl, const SplitPair& pair,
                      const NormOptions& options) {
  if (!(pair.euclidean_gap > 8.0 * decomp.t + kCoordinateTolerance))
    fail(ErrorCode::kSplitNotAdmissible, "Euclidean distance between A\\B and B\\A is at most 8t");
  const Region a_only = pair.a_only();
  std::vector<const Column*> ea, oa, eb, ob;
  Region support_a, support_b;
  for (const auto& c : decomp.even) {
    if (c.sites.intersects(a_only)) {
      ea.push_back(&c);
      support_a = support_a.united(c.sites);
    } else {
      eb.push_back(&c);
      support_b = support_b.united(c.sites);
    }
  }
  const Region even_a_sites = support_a;
  for (const auto& c : decomp.odd) {
    if (c.sites.intersects(even_a_sites)) {
      oa.push_back(&c);
      support_a = support_a.united(c.sites);
    } else {
      ob.push_back(&c);
      support_b = support_b.united(c.sites);
    }
  }
  if (!pair.a.contains(support_a) || !pair.b.contains(support_b))
    fail(ErrorCode::kSplitNotAdmissible, "M_A or M_B is not supported inside A or B");

  auto centers = [](const std::vector<const Column*>& cs) {
    std::vector<double> out;
    for (const Column* c : cs) out.push_back(c->center);
    return out;
  };
  const HilbertLayout& host = dl.host;
  LinearMap m_a = product_of(ea, host) * product_of(oa, host);
  LinearMap m_b = product_of(eb, host) * product_of(ob, host);
  MaMbSplit out{centers(ea), centers(oa), centers(eb), centers(ob), support_a, support_b, m_a, m_b};
  out.residual_ab = norm_of(m_a * m_b - dl.map, options);
  out.residual_ba = norm_of(m_b * m_a - dl.map, options);
  return out;
}

OverlapReport overlap_bound_check(const Interaction& phi, const EmbeddedGraph& g, const SplitPair& pair,
                                  const OverlapInputs& inputs, const ColumnOptions& columns,
                                  const NormOptions& norms) {
  OverlapReport out;
  const HilbertLayout host(pair.y, phi.local_dim());
  const KernelBasis ka = ground_space(phi, pair.a, columns.cache, columns.caps);
  const KernelBasis kb = ground_space(phi, pair.b, columns.cache, columns.caps);
  const KernelBasis kab = ground_space(phi, pair.y, columns.cache, columns.caps);
  const LinearMap pa = projector_map(ka, host);
  const LinearMap pb = projector_map(kb, host);
  const LinearMap pab = projector_map(kab, host);
  const LinearMap pab_perp = complement_map(kab, host);
  out.lhs = norm_of(pa * pb - pab, norms);

  const ColumnDecomposition decomp = column_decomposition(phi, g, pair.y, inputs.t, pair.alpha, columns);
  const DLOperator dl = dl_operator(decomp);
  out.dl_perp = norm_of(dl.map * pab_perp, norms);
  out.mid = 3.0 * out.dl_perp;
  out.bound = refined_dl_bound(inputs.t, inputs.lambda, inputs.layers, inputs.g, g.c_gamma(), phi.range());
  out.rhs = 3.0 * out.bound;
  out.bound_active = out.bound < 1.0;
  out.lhs_le_mid = out.lhs <= out.mid + 1e-9;
  out.dl_le_bound = !out.bound_active || out.dl_perp <= out.bound + 1e-9;
  out.admissible = pair.euclidean_gap > 8.0 * inputs.t + kCoordinateTolerance;
  bool absorbed = true;
  if (out.admissible) {
    const MaMbSplit split = ma_mb_split(decomp, dl, pair, norms);
    out.absorb_a = norm_of(pa - pa * split.m_a, norms);
    out.absorb_b = norm_of(pb - pb * split.m_b, norms);
    out.absorb_cross_b = norm_of(pb * split.m_a - pb * dl.map, norms);
    out.absorb_cross_a = norm_of(pa * split.m_b - pa * dl.map, norms);
    out.residual_ab = split.residual_ab;
    out.residual_ba = split.residual_ba;
    absorbed = std::max({out.absorb_a, out.absorb_b, out.absorb_cross_b}) <= 1e-10;
  }
  out.holds = out.lhs_le_mid && out.dl_le_bound && absorbed;
  return out;
}

}  // namespace ffgap
