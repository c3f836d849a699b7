#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ffgap/interaction.hpp"

namespace ffgap {

using HermitianAction = std::function<Vector(const Vector&)>;

struct KrylovOptions {
  int basis_size = 40;
  int max_restarts = 400;
  double tolerance = 1e-10;
  std::uint64_t seed = 0x5eed;
  // Residuals are compared against tolerance * max(1, |theta|max) by default;
  // with relative_only the floor of 1 is dropped (used for tiny norms).
  bool relative_only = false;
  // Residuals at or below this are always accepted.
  double absolute_floor = 0.0;
  // At or below this effective dimension the projected operator is
  // materialised and diagonalised densely.
  Eigen::Index dense_threshold = 256;
};

struct EigenResult {
  Eigen::VectorXd values;  // ascending
  DenseMatrix vectors;     // dim x nev, orthonormal
  std::vector<double> residuals;
  bool converged = false;
  int restarts = 0;
  int applications = 0;
};

// Lowest nev eigenpairs of a Hermitian operator restricted to the orthogonal
// complement of the columns of deflation (orthonormal, may have zero columns).
// Thick-restart Lanczos with full reorthogonalisation. Never throws on
// non-convergence; callers inspect the converged flag.
EigenResult lowest_eigenpairs(const HermitianAction& op, Eigen::Index dim, int nev, const DenseMatrix& deflation,
                              const KrylovOptions& options = {});

// Same as above for the largest eigenpairs.
EigenResult highest_eigenpairs(const HermitianAction& op, Eigen::Index dim, int nev, const DenseMatrix& deflation,
                               const KrylovOptions& options = {});

// Orthonormal basis of the complement of the (orthonormal) columns of d.
DenseMatrix orthogonal_complement(const DenseMatrix& d, Eigen::Index dim);

}  // namespace ffgap
