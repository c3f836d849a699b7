#include "ffgap/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ffgap/error.hpp"
#include "ffgap/projector_cache.hpp"

namespace ffgap {

namespace {

constexpr Eigen::Index kMaxLockedKernel = 512;

using Triplet = Eigen::Triplet<Complex, Eigen::Index>;

void append_embedded(const SiteAction& action, const DenseMatrix& local, std::vector<Triplet>& out) {
  const SparseMatrix m = action.embed(local);
  for (Eigen::Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) out.emplace_back(it.row(), it.col(), it.value());
}

double max_abs(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : std::max(std::abs(v.minCoeff()), std::abs(v.maxCoeff()));
}

SpectralData summarize(Eigen::Index dim, const Eigen::VectorXd& values, double tol, int num_eigs) {
  SpectralData out;
  out.dim = dim;
  out.tolerance = tol;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (values(i) <= tol) ++out.kernel_dim;
  const Eigen::Index keep = std::min<Eigen::Index>(values.size(), std::max<Eigen::Index>(num_eigs, out.kernel_dim + 1));
  out.lowest.assign(values.data(), values.data() + keep);
  if (out.kernel_dim < values.size())
    out.gap = values(out.kernel_dim);
  else
    out.gapless_trivial = true;
  return out;
}

void require_converged(const EigenResult& r, const std::string& what) {
  if (r.converged) return;
  const double worst = r.residuals.empty() ? 0.0 : *std::max_element(r.residuals.begin(), r.residuals.end());
  fail(ErrorCode::kEigensolverFailed,
       what + " did not converge after " + std::to_string(r.restarts) + " restarts, residual " + std::to_string(worst));
}

double max_residual(const EigenResult& r) {
  return r.residuals.empty() ? 0.0 : *std::max_element(r.residuals.begin(), r.residuals.end());
}

}  // namespace

double kernel_tolerance(double norm) { return 1e-9 * std::max(1.0, norm); }

GlobalOperator::GlobalOperator(Region region, int local_dim, SparseMatrix matrix)
    : region_(std::move(region)), local_dim_(local_dim), storage_(std::move(matrix)) {
  const Eigen::Index expected = hilbert_dimension(region_.size(), local_dim_);
  if (sparse().rows() != expected || sparse().cols() != expected)
    fail(ErrorCode::kInvalidArgument, "operator dimension does not match d^|region|");
}

GlobalOperator::GlobalOperator(Region region, int local_dim, DenseMatrix matrix)
    : region_(std::move(region)), local_dim_(local_dim), storage_(std::move(matrix)) {
  const Eigen::Index expected = hilbert_dimension(region_.size(), local_dim_);
  if (dense().rows() != expected || dense().cols() != expected)
    fail(ErrorCode::kInvalidArgument, "operator dimension does not match d^|region|");
}

Eigen::Index GlobalOperator::dim() const { return is_dense() ? dense().rows() : sparse().rows(); }

const DenseMatrix& GlobalOperator::dense() const {
  if (!is_dense()) fail(ErrorCode::kInvalidArgument, "operator is stored sparsely");
  return std::get<DenseMatrix>(storage_);
}

const SparseMatrix& GlobalOperator::sparse() const {
  if (is_dense()) fail(ErrorCode::kInvalidArgument, "operator is stored densely");
  return std::get<SparseMatrix>(storage_);
}

DenseMatrix GlobalOperator::to_dense() const { return is_dense() ? dense() : DenseMatrix(sparse()); }

bool GlobalOperator::is_real() const {
  if (is_dense()) return dense().imag().isZero(0.0);
  const SparseMatrix& m = sparse();
  for (Eigen::Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it)
      if (it.value().imag() != 0.0) return false;
  return true;
}

double GlobalOperator::norm_bound() const {
  if (is_dense()) return dim() == 0 ? 0.0 : dense().cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(dim());
  const SparseMatrix& m = sparse();
  for (Eigen::Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) rows(it.row()) += std::abs(it.value());
  return dim() == 0 ? 0.0 : rows.maxCoeff();
}

LinearMap GlobalOperator::as_map() const {
  return is_dense() ? LinearMap::from_dense(dense()) : LinearMap::from_sparse(sparse());
}

GlobalOperator embed(const InteractionTerm& term, const Region& region, int local_dim) {
  const HilbertLayout layout(region, local_dim);
  const SiteAction action(layout, term.support);
  if (term.matrix.rows() != action.local_dim())
    fail(ErrorCode::kInvalidArgument, "term matrix does not match its support");
  return GlobalOperator(region, local_dim, action.embed(term.matrix));
}

GlobalOperator hamiltonian(const Interaction& phi, const Region& region, bool projector_form,
                           const OperatorCaps& caps) {
  if (region.empty()) fail(ErrorCode::kInvalidArgument, "empty region");
  const Eigen::Index dim = hilbert_dimension(region.size(), phi.local_dim());
  if (dim == 0 || dim > caps.sparse_max)
    fail(ErrorCode::kRegionTooLarge, "d^|region| exceeds the cap of " + std::to_string(caps.sparse_max));
  const HilbertLayout layout(region, phi.local_dim());
  std::vector<Triplet> triplets;
  for (std::size_t idx : phi.terms_within(region)) {
    const auto& term = phi.terms()[idx];
    const DenseMatrix local = projector_form ? range_projector(term.matrix) : term.matrix;
    append_embedded(SiteAction(layout, term.support), local, triplets);
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune(Complex(0.0, 0.0));
  return GlobalOperator(region, phi.local_dim(), std::move(m));
}

SpectralData spectral_data(const GlobalOperator& h, const SolverOptions& options) {
  const Eigen::Index dim = h.dim();
  if (!h.is_dense() && h.sparse().nonZeros() == 0) {
    SpectralData out = summarize(dim, Eigen::VectorXd::Zero(std::min<Eigen::Index>(dim, options.num_eigs)),
                                 kernel_tolerance(0.0), options.num_eigs);
    out.kernel_dim = dim;
    out.gap.reset();
    out.gapless_trivial = true;
    out.solver = "trivial";
    return out;
  }
  if (dim <= options.caps.dense_max) {
    Eigen::VectorXd values;
    std::string solver;
    if (h.is_real()) {
      const Eigen::MatrixXd m = h.to_dense().real();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success) fail(ErrorCode::kEigensolverFailed, "dense real eigensolver failed");
      values = es.eigenvalues();
      solver = "dense-real";
    } else {
      Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h.to_dense(), Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success) fail(ErrorCode::kEigensolverFailed, "dense complex eigensolver failed");
      values = es.eigenvalues();
      solver = "dense-complex";
    }
    SpectralData out = summarize(dim, values, kernel_tolerance(max_abs(values)), options.num_eigs);
    out.solver = solver;
    return out;
  }
  if (dim > options.caps.sparse_max)
    fail(ErrorCode::kRegionTooLarge, "dimension " + std::to_string(dim) + " exceeds the cap");

  const LinearMap map = h.as_map();
  const HermitianAction op = [&map](const Vector& v) { return map.apply(v); };
  const double tol = kernel_tolerance(h.norm_bound());
  DenseMatrix locked(dim, 0);
  SpectralData out;
  out.dim = dim;
  out.tolerance = tol;
  out.solver = "lanczos";
  KrylovOptions krylov = options.krylov;
  for (int round = 0;; ++round) {
    krylov.seed = options.krylov.seed + static_cast<std::uint64_t>(round);
    const EigenResult r = lowest_eigenpairs(op, dim, 1, locked, krylov);
    require_converged(r, "Lanczos kernel search");
    out.max_residual = std::max(out.max_residual, max_residual(r));
    if (r.values.size() == 0 || r.values(0) > tol) break;
    if (locked.cols() >= kMaxLockedKernel)
      fail(ErrorCode::kEigensolverFailed, "kernel larger than the Lanczos locking limit");
    locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
    locked.col(locked.cols() - 1) = r.vectors.col(0);
    out.lowest.push_back(r.values(0));
  }
  out.kernel_dim = locked.cols();
  const Eigen::Index extra = std::min<Eigen::Index>(
      dim - out.kernel_dim, std::max<Eigen::Index>(options.num_eigs, out.kernel_dim + 1) - out.kernel_dim);
  if (extra <= 0) {
    out.gapless_trivial = true;
    return out;
  }
  krylov.seed = options.krylov.seed;
  const EigenResult r = lowest_eigenpairs(op, dim, static_cast<int>(extra), locked, krylov);
  require_converged(r, "Lanczos");
  out.max_residual = std::max(out.max_residual, max_residual(r));
  for (Eigen::Index i = 0; i < r.values.size(); ++i) out.lowest.push_back(r.values(i));
  std::sort(out.lowest.begin(), out.lowest.end());
  out.gap = r.values(0);
  return out;
}

GlobalOperator ground_projector(const GlobalOperator& h, const SolverOptions& options) {
  const Eigen::Index dim = h.dim();
  if (dim > options.caps.dense_max)
    fail(ErrorCode::kRegionTooLarge, "dense ground projector above the dense cap; use ground_space");
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h.to_dense());
  if (es.info() != Eigen::Success) fail(ErrorCode::kEigensolverFailed, "dense eigensolver failed");
  const double tol = kernel_tolerance(max_abs(es.eigenvalues()));
  Eigen::Index k = 0;
  while (k < dim && es.eigenvalues()(k) <= tol) ++k;
  if (k == 0)
    fail(ErrorCode::kNotFrustrationFree,
         "smallest eigenvalue " + std::to_string(es.eigenvalues()(0)) + " above tolerance " + std::to_string(tol));
  const DenseMatrix v = es.eigenvectors().leftCols(k);
  DenseMatrix p = v * v.adjoint();
  p = 0.5 * (p + p.adjoint()).eval();
  return GlobalOperator(h.region(), h.local_dim(), std::move(p));
}

bool check_frustration_free(const GlobalOperator& h, const SolverOptions& options) {
  SolverOptions one = options;
  one.num_eigs = 1;
  const Eigen::Index dim = h.dim();
  if (dim <= options.caps.dense_max) return spectral_data(h, one).kernel_dim > 0;
  const LinearMap map = h.as_map();
  const HermitianAction op = [&map](const Vector& v) { return map.apply(v); };
  const EigenResult r = lowest_eigenpairs(op, dim, 1, DenseMatrix(dim, 0), options.krylov);
  require_converged(r, "Lanczos");
  return r.values(0) <= kernel_tolerance(h.norm_bound());
}

double operator_norm(const GlobalOperator& m, bool hermitian, const NormOptions& options) {
  if (m.dim() == 0) return 0.0;
  if (m.dim() <= std::max<Eigen::Index>(options.dense_threshold, 4096)) {
    const DenseMatrix a = m.to_dense();
    if (hermitian) {
      Eigen::SelfAdjointEigenSolver<DenseMatrix> es(a, Eigen::EigenvaluesOnly);
      return max_abs(es.eigenvalues());
    }
    Eigen::BDCSVD<DenseMatrix> svd(a);
    return svd.singularValues()(0);
  }
  if (hermitian) {
    const LinearMap map = m.as_map();
    const HermitianAction op = [&map](const Vector& v) { return map.apply(v); };
    KrylovOptions krylov;
    krylov.tolerance = options.tolerance;
    krylov.seed = options.seed;
    krylov.relative_only = true;
    const EigenResult lo = lowest_eigenpairs(op, m.dim(), 1, DenseMatrix(m.dim(), 0), krylov);
    const EigenResult hi = highest_eigenpairs(op, m.dim(), 1, DenseMatrix(m.dim(), 0), krylov);
    require_converged(lo, "norm estimate");
    require_converged(hi, "norm estimate");
    return std::max(std::abs(lo.values(0)), std::abs(hi.values(0)));
  }
  const NormEstimate e = estimate_norm(m.as_map(), options);
  if (!e.converged) fail(ErrorCode::kEigensolverFailed, "norm estimate did not converge");
  return e.value;
}

KernelBasis kernel_intersection(const Interaction& phi, const Region& region, ProjectorCache* cache,
                                const OperatorCaps& caps) {
  const int d = phi.local_dim();
  KernelBasis out{region, d, DenseMatrix::Identity(1, 1)};
  if (region.empty()) return out;
  const Eigen::Index full_dim = hilbert_dimension(region.size(), d);
  if (full_dim == 0 || full_dim > caps.sparse_max)
    fail(ErrorCode::kRegionTooLarge, "d^|region| exceeds the cap of " + std::to_string(caps.sparse_max));

  std::uint64_t key = 0;
  if (cache != nullptr) {
    key = ground_space_key(phi, region);
    if (auto hit = cache->load(key, full_dim)) {
      out.basis = std::move(*hit);
      return out;
    }
  }

  // Terms grouped by the position of their last site within the region.
  std::vector<std::vector<DenseMatrix>> local_terms(region.size());
  std::vector<std::vector<Region>> supports(region.size());
  for (std::size_t idx : phi.terms_within(region)) {
    const auto& term = phi.terms()[idx];
    const std::size_t last = *region.position_of(term.support.ids().back());
    DenseMatrix h = range_projector(term.matrix);
    if (h.isZero(0.0)) continue;
    local_terms[last].push_back(std::move(h));
    supports[last].push_back(term.support);
  }

  DenseMatrix v = DenseMatrix::Identity(1, 1);
  std::vector<VertexId> prefix;
  for (std::size_t p = 0; p < region.size(); ++p) {
    prefix.push_back(region[p]);
    const Eigen::Index rows = v.rows();
    const Eigen::Index k = v.cols();
    const Eigen::Index width = k * d;
    if (local_terms[p].empty()) {
      // No constraint: V (x) I.
      DenseMatrix next = DenseMatrix::Zero(rows * d, width);
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index c = 0; c < k; ++c)
          for (int a = 0; a < d; ++a) next(i * d + a, c * d + a) = v(i, c);
      v = std::move(next);
      continue;
    }
    const HilbertLayout layout{Region(prefix), d};
    std::vector<SiteAction> actions;
    for (const Region& s : supports[p]) actions.emplace_back(layout, s);

    DenseMatrix m(width, width);
    Vector w(rows * d);
    for (Eigen::Index c = 0; c < k; ++c) {
      for (int a = 0; a < d; ++a) {
        w.setZero();
        for (Eigen::Index i = 0; i < rows; ++i) w(i * d + a) = v(i, c);
        Vector y = Vector::Zero(rows * d);
        for (std::size_t t = 0; t < actions.size(); ++t) actions[t].apply_add(local_terms[p][t], w, y);
        // (W^dagger y)[(c', a')] = sum_i conj(V(i, c')) y(i d + a').
        const Eigen::Map<const DenseMatrix> ymat(y.data(), d, rows);
        const DenseMatrix z = ymat * v.conjugate();  // d x k
        for (Eigen::Index c2 = 0; c2 < k; ++c2)
          for (int a2 = 0; a2 < d; ++a2) m(c2 * d + a2, c * d + a) = z(a2, c2);
      }
    }
    m = 0.5 * (m + m.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m);
    if (es.info() != Eigen::Success) fail(ErrorCode::kEigensolverFailed, "kernel step eigensolver failed");
    const double tol = kernel_tolerance(max_abs(es.eigenvalues()));
    Eigen::Index kept = 0;
    while (kept < width && es.eigenvalues()(kept) <= tol) ++kept;
    if (kept == 0) {
      out.basis = DenseMatrix(full_dim, 0);
      return out;
    }
    const DenseMatrix coeff = es.eigenvectors().leftCols(kept);
    DenseMatrix next(rows * d, kept);
    for (int a = 0; a < d; ++a) {
      DenseMatrix ca(k, kept);
      for (Eigen::Index c = 0; c < k; ++c) ca.row(c) = coeff.row(c * d + a);
      const DenseMatrix block = v * ca;
      for (Eigen::Index i = 0; i < rows; ++i) next.row(i * d + a) = block.row(i);
    }
    v = std::move(next);
  }
  out.basis = std::move(v);
  if (cache != nullptr) cache->store(key, out.basis);
  return out;
}

KernelBasis ground_space(const Interaction& phi, const Region& region, ProjectorCache* cache,
                         const OperatorCaps& caps) {
  KernelBasis k = kernel_intersection(phi, region, cache, caps);
  if (k.rank() == 0) fail(ErrorCode::kNotFrustrationFree, "empty kernel on " + region.to_string());
  return k;
}

LocalHamiltonian::LocalHamiltonian(const Interaction& phi, HilbertLayout layout, bool projector_form) {
  auto impl = std::make_shared<Impl>(Impl{std::move(layout), {}, 0.0});
  for (std::size_t idx : phi.terms_within(impl->layout.region())) {
    const auto& term = phi.terms()[idx];
    DenseMatrix local = projector_form ? range_projector(term.matrix) : term.matrix;
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(local, Eigen::EigenvaluesOnly);
    const double norm = max_abs(es.eigenvalues());
    if (norm == 0.0) continue;
    impl->norm_bound += norm;
    impl->terms.emplace_back(SiteAction(impl->layout, term.support), std::move(local));
  }
  impl_ = std::move(impl);
}

Vector LocalHamiltonian::apply(const Vector& v) const {
  Vector out = Vector::Zero(v.size());
  for (const auto& [action, local] : impl_->terms) action.apply_add(local, v, out);
  return out;
}

LinearMap LocalHamiltonian::as_map() const {
  const LocalHamiltonian self = *this;
  return LinearMap::hermitian(dim(), [self](const Vector& v) { return self.apply(v); });
}

SpectralData region_spectrum(const Interaction& phi, const Region& region, bool projector_form,
                             const SolverOptions& options, ProjectorCache* cache) {
  const KernelBasis kernel = kernel_intersection(phi, region, cache, options.caps);
  const LocalHamiltonian h(phi, HilbertLayout(region, phi.local_dim()), projector_form);
  SpectralData out;
  out.dim = h.dim();
  out.tolerance = kernel_tolerance(h.norm_bound());
  out.kernel_dim = kernel.rank();
  out.solver = "kernel-intersection+lanczos";
  out.lowest.assign(static_cast<std::size_t>(kernel.rank()), 0.0);
  const Eigen::Index extra = std::min<Eigen::Index>(
      out.dim - out.kernel_dim, std::max<Eigen::Index>(options.num_eigs, out.kernel_dim + 1) - out.kernel_dim);
  if (extra <= 0) {
    out.gapless_trivial = true;
    return out;
  }
  const HermitianAction op = [&h](const Vector& v) { return h.apply(v); };
  const EigenResult r = lowest_eigenpairs(op, out.dim, static_cast<int>(extra), kernel.basis, options.krylov);
  require_converged(r, "deflated Lanczos");
  out.max_residual = max_residual(r);
  for (Eigen::Index i = 0; i < r.values.size(); ++i) {
    out.lowest.push_back(r.values(i));
    if (r.values(i) <= out.tolerance) ++out.kernel_dim;
  }
  std::sort(out.lowest.begin(), out.lowest.end());
  if (out.kernel_dim < static_cast<Eigen::Index>(out.lowest.size()))
    out.gap = out.lowest[static_cast<std::size_t>(out.kernel_dim)];
  else
    out.gapless_trivial = true;
  return out;
}

LinearMap projector_map(const KernelBasis& kernel, const HilbertLayout& host) {
  auto action = std::make_shared<const SiteAction>(host, kernel.region);
  auto basis = std::make_shared<const DenseMatrix>(kernel.basis);
  return LinearMap::hermitian(host.dim(), [action, basis](const Vector& v) {
    Vector out = v;
    action->apply_projector(*basis, out);
    return out;
  });
}

LinearMap complement_map(const KernelBasis& kernel, const HilbertLayout& host) {
  const LinearMap p = projector_map(kernel, host);
  return LinearMap::hermitian(host.dim(), [p](const Vector& v) -> Vector { return v - p.apply(v); });
}

SandwichReport sandwich_check(const Interaction& phi, const Region& region, const SolverOptions& options) {
  SandwichReport out;
  const PhiBounds bounds = phi_bounds(phi.restricted_to(region));
  out.phi_min = bounds.min;
  out.phi_max = bounds.max;
  out.gap_h = region_spectrum(phi, region, false, options).gap;
  out.gap_tilde = region_spectrum(phi, region, true, options).gap;
  if (out.gap_h && out.gap_tilde) {
    out.lower_slack = *out.gap_h - out.phi_min * *out.gap_tilde;
    out.upper_slack = out.phi_max * *out.gap_tilde - *out.gap_h;
    out.holds = out.lower_slack >= -1e-9 && out.upper_slack >= -1e-9;
  } else {
    out.holds = !out.gap_h && !out.gap_tilde;
  }
  return out;
}

}  // namespace ffgap
