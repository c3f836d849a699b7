#pragma once

#include <cstdint>
#include <functional>

#include "ffgap/hilbert.hpp"
#include "ffgap/interaction.hpp"

namespace ffgap {

// Square operator known only through its action and the action of its adjoint.
class LinearMap {
 public:
  using Action = std::function<Vector(const Vector&)>;

  LinearMap(Eigen::Index dim, Action forward, Action adjoint);

  static LinearMap identity(Eigen::Index dim);
  static LinearMap zero(Eigen::Index dim);
  static LinearMap hermitian(Eigen::Index dim, Action action);
  static LinearMap from_dense(DenseMatrix m);
  static LinearMap from_sparse(SparseMatrix m);

  Eigen::Index dim() const { return dim_; }
  Vector apply(const Vector& v) const;
  Vector apply_adjoint(const Vector& v) const;
  LinearMap adjoint() const { return LinearMap(dim_, adjoint_, forward_); }
  LinearMap scaled(Complex c) const;

  // Column-by-column materialisation; meant for small dimensions.
  DenseMatrix to_dense() const;

  friend LinearMap operator*(const LinearMap& a, const LinearMap& b);
  friend LinearMap operator+(const LinearMap& a, const LinearMap& b);
  friend LinearMap operator-(const LinearMap& a, const LinearMap& b);

 private:
  Eigen::Index dim_;
  Action forward_;
  Action adjoint_;
};

struct NormOptions {
  Eigen::Index dense_threshold = 256;  // materialise at or below this dimension
  int basis_size = 40;
  int max_restarts = 60;
  double tolerance = 1e-10;  // relative residual on the largest eigenvalue of A^dagger A
  double absolute_floor = 1e-26;  // residual accepted outright; resolves norms to about 1e-13
  std::uint64_t seed = 0x5eed;
};

struct NormEstimate {
  double value = 0.0;
  double residual = 0.0;
  bool converged = false;
  bool dense = false;
};

// Largest singular value. The Krylov route returns a Ritz value; it never
// exceeds the true norm by more than rounding.
NormEstimate estimate_norm(const LinearMap& a, const NormOptions& options = {});

}  // namespace ffgap
