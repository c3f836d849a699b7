#include "ffgap/eigensolvers.hpp"

#include <algorithm>
#include <cmath>

#include "ffgap/error.hpp"
#include "ffgap/random.hpp"

namespace ffgap {

namespace {

void project_out(const DenseMatrix& d, Vector& w) {
  if (d.cols() == 0) return;
  w.noalias() -= d * (d.adjoint() * w);
}

// Two passes of classical Gram-Schmidt against the first `count` columns.
Vector orthogonalize(const DenseMatrix& v, Eigen::Index count, const DenseMatrix& d, Vector& w) {
  project_out(d, w);
  Vector coeff = Vector::Zero(count);
  for (int pass = 0; pass < 2; ++pass) {
    const Vector c = v.leftCols(count).adjoint() * w;
    w.noalias() -= v.leftCols(count) * c;
    coeff += c;
    project_out(d, w);
  }
  return coeff;
}

EigenResult dense_lowest(const HermitianAction& op, Eigen::Index dim, int nev, const DenseMatrix& deflation) {
  const DenseMatrix basis = orthogonal_complement(deflation, dim);
  const Eigen::Index n = basis.cols();
  DenseMatrix applied(dim, n);
  for (Eigen::Index c = 0; c < n; ++c) applied.col(c) = op(basis.col(c));
  DenseMatrix m = basis.adjoint() * applied;
  m = 0.5 * (m + m.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m);
  if (es.info() != Eigen::Success) fail(ErrorCode::kEigensolverFailed, "dense Hermitian eigensolver failed");
  const Eigen::Index k = std::min<Eigen::Index>(nev, n);
  EigenResult out;
  out.values = es.eigenvalues().head(k);
  out.vectors = basis * es.eigenvectors().leftCols(k);
  out.residuals.assign(k, 0.0);
  out.converged = true;
  out.applications = static_cast<int>(n);
  return out;
}

}  // namespace

DenseMatrix orthogonal_complement(const DenseMatrix& d, Eigen::Index dim) {
  if (d.cols() == 0) return DenseMatrix::Identity(dim, dim);
  Eigen::HouseholderQR<DenseMatrix> qr(d);
  const DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(dim, dim);
  return q.rightCols(dim - d.cols());
}

EigenResult lowest_eigenpairs(const HermitianAction& op, Eigen::Index dim, int nev, const DenseMatrix& deflation,
                              const KrylovOptions& options) {
  if (nev < 1) fail(ErrorCode::kInvalidArgument, "nev must be >= 1");
  if (deflation.rows() != dim && deflation.cols() > 0)
    fail(ErrorCode::kInvalidArgument, "deflation basis has wrong row count");
  const Eigen::Index effective = dim - deflation.cols();
  if (effective <= 0) {
    EigenResult empty;
    empty.vectors = DenseMatrix(dim, 0);
    empty.converged = true;
    return empty;
  }
  nev = static_cast<int>(std::min<Eigen::Index>(nev, effective));
  if (dim <= options.dense_threshold) return dense_lowest(op, dim, nev, deflation);

  const Eigen::Index m = std::min<Eigen::Index>(effective, std::max<Eigen::Index>(options.basis_size, 2 * nev + 10));
  GaussianSource rng(options.seed);
  DenseMatrix v = DenseMatrix::Zero(dim, m + 1);
  DenseMatrix h = DenseMatrix::Zero(m + 1, m + 1);

  auto fresh_vector = [&](Eigen::Index count) -> bool {
    for (int attempt = 0; attempt < 3; ++attempt) {
      Vector w = rng.complex_vector(dim);
      orthogonalize(v, count, deflation, w);
      const double norm = w.norm();
      if (norm > 1e-8 * std::sqrt(static_cast<double>(dim))) {
        v.col(count) = w / norm;
        return true;
      }
    }
    return false;
  };
  if (!fresh_vector(0)) fail(ErrorCode::kEigensolverFailed, "cannot build a start vector");

  EigenResult out;
  Eigen::Index kept = 0;
  double scale = 0.0;
  for (int restart = 0;; ++restart) {
    Eigen::Index size = m;
    double beta_last = 0.0;
    for (Eigen::Index j = kept; j < m; ++j) {
      Vector w = op(v.col(j));
      ++out.applications;
      const Vector coeff = orthogonalize(v, j + 1, deflation, w);
      for (Eigen::Index i = 0; i <= j; ++i) h(i, j) = coeff(i);
      const double beta = w.norm();
      scale = std::max(scale, std::abs(coeff(j).real()) + beta);
      if (j + 1 == m) {
        beta_last = beta;
        if (beta > 0.0) v.col(m) = w / beta;
        break;
      }
      if (beta > 1e-13 * std::max(scale, 1e-300)) {
        v.col(j + 1) = w / beta;
        h(j + 1, j) = beta;
      } else {
        h(j + 1, j) = 0.0;
        if (!fresh_vector(j + 1)) {
          size = j + 1;
          break;
        }
      }
    }

    // Hermitian part assembled from the upper triangle.
    DenseMatrix hm = h.topLeftCorner(size, size).triangularView<Eigen::Upper>();
    hm += DenseMatrix(h.topLeftCorner(size, size).triangularView<Eigen::StrictlyUpper>()).adjoint();
    for (Eigen::Index i = 0; i < size; ++i) hm(i, i) = hm(i, i).real();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hm);
    if (es.info() != Eigen::Success) fail(ErrorCode::kEigensolverFailed, "projected eigenproblem failed");
    const Eigen::VectorXd& theta = es.eigenvalues();
    const DenseMatrix& y = es.eigenvectors();
    scale = std::max({scale, std::abs(theta(0)), std::abs(theta(size - 1))});
    const double threshold = std::max(
        options.absolute_floor, options.tolerance * (options.relative_only ? scale : std::max(1.0, scale)));

    const int want = static_cast<int>(std::min<Eigen::Index>(nev, size));
    std::vector<double> residuals(want);
    bool converged = true;
    for (int i = 0; i < want; ++i) {
      residuals[i] = size == m ? std::abs(beta_last * y(size - 1, i)) : 0.0;
      if (residuals[i] > threshold) converged = false;
    }
    if (converged || restart >= options.max_restarts || size < m) {
      out.values = theta.head(want);
      out.vectors = v.leftCols(size) * y.leftCols(want);
      out.residuals = residuals;
      out.converged = converged;
      out.restarts = restart;
      return out;
    }

    // Thick restart: keep the lowest Ritz vectors plus the residual direction.
    kept = std::min<Eigen::Index>(m - 1, std::max<Eigen::Index>(want + 1, want + (m - want) / 2));
    const DenseMatrix ritz = v.leftCols(m) * y.leftCols(kept);
    v.leftCols(kept) = ritz;
    v.col(kept) = v.col(m);
    h.setZero();
    for (Eigen::Index i = 0; i < kept; ++i) {
      h(i, i) = theta(i);
      h(i, kept) = std::conj(beta_last * y(m - 1, i));
      h(kept, i) = beta_last * y(m - 1, i);
    }
  }
}

EigenResult highest_eigenpairs(const HermitianAction& op, Eigen::Index dim, int nev, const DenseMatrix& deflation,
                               const KrylovOptions& options) {
  const HermitianAction negated = [&op](const Vector& x) -> Vector { return -op(x); };
  EigenResult out = lowest_eigenpairs(negated, dim, nev, deflation, options);
  out.values = -out.values;
  return out;
}

}  // namespace ffgap
