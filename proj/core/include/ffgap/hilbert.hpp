#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ffgap/interaction.hpp"
#include "ffgap/lattice.hpp"

namespace ffgap {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor, Eigen::Index>;

// Tensor-product space over a region: the site at position p has stride
// d^(n-1-p), so the first site of the region is the most significant factor.
class HilbertLayout {
 public:
  HilbertLayout(Region region, int local_dim);

  const Region& region() const { return region_; }
  int local_dim() const { return local_dim_; }
  std::size_t num_sites() const { return region_.size(); }
  Eigen::Index dim() const { return dim_; }
  Eigen::Index stride(std::size_t position) const { return strides_[position]; }

 private:
  Region region_;
  int local_dim_;
  Eigen::Index dim_;
  std::vector<Eigen::Index> strides_;
};

// d^n, or 0 when it does not fit in 62 bits.
Eigen::Index hilbert_dimension(std::size_t sites, int local_dim);

// Index tables for acting with an operator on a sub-support of a layout. The
// global amplitude of (local a, environment b) lives at local[a] + env[b].
class SiteAction {
 public:
  SiteAction(const HilbertLayout& layout, const Region& support);

  Eigen::Index local_dim() const { return static_cast<Eigen::Index>(local_.size()); }
  Eigen::Index env_dim() const { return static_cast<Eigen::Index>(env_.size()); }
  Eigen::Index dim() const { return local_dim() * env_dim(); }

  // local_dim x env_dim view of v.
  DenseMatrix gather(const Vector& v) const;
  void scatter(const DenseMatrix& x, Vector& v) const;

  // v <- (M (x) Id) v.
  void apply(const DenseMatrix& local, Vector& v) const;
  // out += (M (x) Id) v.
  void apply_add(const DenseMatrix& local, const Vector& v, Vector& out) const;
  // v <- (B B^dagger (x) Id) v for an isometry B (local_dim x r).
  void apply_projector(const DenseMatrix& basis, Vector& v) const;
  // v <- ((Id - M) (x) Id) v, used for 1 - h_X.
  void apply_complement(const DenseMatrix& local, Vector& v) const;

  // Explicit sparse embedding M (x) Id.
  SparseMatrix embed(const DenseMatrix& local) const;

 private:
  std::vector<Eigen::Index> local_;
  std::vector<Eigen::Index> env_;
};

}  // namespace ffgap
