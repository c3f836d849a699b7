#include "ffgap/linear_map.hpp"

#include <cmath>
#include <memory>

#include "ffgap/eigensolvers.hpp"
#include "ffgap/error.hpp"

namespace ffgap {

LinearMap::LinearMap(Eigen::Index dim, Action forward, Action adjoint)
    : dim_(dim), forward_(std::move(forward)), adjoint_(std::move(adjoint)) {
  if (dim < 0) fail(ErrorCode::kInvalidArgument, "negative dimension");
}

LinearMap LinearMap::identity(Eigen::Index dim) {
  Action id = [](const Vector& v) { return v; };
  return LinearMap(dim, id, id);
}

LinearMap LinearMap::zero(Eigen::Index dim) {
  Action z = [dim](const Vector&) -> Vector { return Vector::Zero(dim); };
  return LinearMap(dim, z, z);
}

LinearMap LinearMap::hermitian(Eigen::Index dim, Action action) { return LinearMap(dim, action, action); }

LinearMap LinearMap::from_dense(DenseMatrix m) {
  if (m.rows() != m.cols()) fail(ErrorCode::kInvalidArgument, "linear maps are square");
  const Eigen::Index dim = m.rows();
  auto shared = std::make_shared<const DenseMatrix>(std::move(m));
  return LinearMap(
      dim, [shared](const Vector& v) -> Vector { return *shared * v; },
      [shared](const Vector& v) -> Vector { return shared->adjoint() * v; });
}

LinearMap LinearMap::from_sparse(SparseMatrix m) {
  if (m.rows() != m.cols()) fail(ErrorCode::kInvalidArgument, "linear maps are square");
  const Eigen::Index dim = m.rows();
  auto shared = std::make_shared<const SparseMatrix>(std::move(m));
  return LinearMap(
      dim, [shared](const Vector& v) -> Vector { return *shared * v; },
      [shared](const Vector& v) -> Vector { return shared->adjoint() * v; });
}

Vector LinearMap::apply(const Vector& v) const {
  if (v.size() != dim_) fail(ErrorCode::kInvalidArgument, "vector size does not match the map");
  return forward_(v);
}

Vector LinearMap::apply_adjoint(const Vector& v) const {
  if (v.size() != dim_) fail(ErrorCode::kInvalidArgument, "vector size does not match the map");
  return adjoint_(v);
}

LinearMap LinearMap::scaled(Complex c) const {
  Action f = forward_, a = adjoint_;
  return LinearMap(
      dim_, [f, c](const Vector& v) -> Vector { return c * f(v); },
      [a, c](const Vector& v) -> Vector { return std::conj(c) * a(v); });
}

DenseMatrix LinearMap::to_dense() const {
  DenseMatrix m(dim_, dim_);
  Vector e = Vector::Zero(dim_);
  for (Eigen::Index c = 0; c < dim_; ++c) {
    e(c) = 1.0;
    m.col(c) = forward_(e);
    e(c) = 0.0;
  }
  return m;
}

LinearMap operator*(const LinearMap& a, const LinearMap& b) {
  if (a.dim_ != b.dim_) fail(ErrorCode::kInvalidArgument, "dimension mismatch in product");
  LinearMap::Action af = a.forward_, aa = a.adjoint_, bf = b.forward_, ba = b.adjoint_;
  return LinearMap(
      a.dim_, [af, bf](const Vector& v) -> Vector { return af(bf(v)); },
      [aa, ba](const Vector& v) -> Vector { return ba(aa(v)); });
}

LinearMap operator+(const LinearMap& a, const LinearMap& b) {
  if (a.dim_ != b.dim_) fail(ErrorCode::kInvalidArgument, "dimension mismatch in sum");
  LinearMap::Action af = a.forward_, aa = a.adjoint_, bf = b.forward_, ba = b.adjoint_;
  return LinearMap(
      a.dim_, [af, bf](const Vector& v) -> Vector { return af(v) + bf(v); },
      [aa, ba](const Vector& v) -> Vector { return aa(v) + ba(v); });
}

LinearMap operator-(const LinearMap& a, const LinearMap& b) {
  if (a.dim_ != b.dim_) fail(ErrorCode::kInvalidArgument, "dimension mismatch in difference");
  LinearMap::Action af = a.forward_, aa = a.adjoint_, bf = b.forward_, ba = b.adjoint_;
  return LinearMap(
      a.dim_, [af, bf](const Vector& v) -> Vector { return af(v) - bf(v); },
      [aa, ba](const Vector& v) -> Vector { return aa(v) - ba(v); });
}

NormEstimate estimate_norm(const LinearMap& a, const NormOptions& options) {
  NormEstimate out;
  if (a.dim() == 0) {
    out.converged = true;
    return out;
  }
  if (a.dim() <= options.dense_threshold) {
    const DenseMatrix m = a.to_dense();
    Eigen::BDCSVD<DenseMatrix> svd(m);
    out.value = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    out.converged = true;
    out.dense = true;
    return out;
  }
  KrylovOptions krylov;
  krylov.basis_size = options.basis_size;
  krylov.max_restarts = options.max_restarts;
  krylov.tolerance = options.tolerance;
  krylov.seed = options.seed;
  krylov.relative_only = true;
  krylov.absolute_floor = options.absolute_floor;
  krylov.dense_threshold = 0;
  const HermitianAction gram = [&a](const Vector& v) -> Vector { return a.apply_adjoint(a.apply(v)); };
  const EigenResult r = highest_eigenpairs(gram, a.dim(), 1, DenseMatrix(a.dim(), 0), krylov);
  out.value = std::sqrt(std::max(0.0, r.values(0)));
  out.residual = r.residuals.empty() ? 0.0 : r.residuals[0];
  out.converged = r.converged;
  return out;
}

}  // namespace ffgap
