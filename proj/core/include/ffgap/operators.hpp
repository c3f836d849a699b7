#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ffgap/eigensolvers.hpp"
#include "ffgap/hilbert.hpp"
#include "ffgap/interaction.hpp"
#include "ffgap/linear_map.hpp"

namespace ffgap {

class ProjectorCache;

struct OperatorCaps {
  Eigen::Index dense_max = 4096;                   // dense diagonalisation / dense storage
  Eigen::Index sparse_max = Eigen::Index{1} << 24;  // sparse or matrix-free vectors
};

// Eigenvalues at or below 1e-9 max(1, norm) count as zero.
double kernel_tolerance(double norm);

// Matrix on the tensor-product space of a region, stored densely or sparsely.
class GlobalOperator {
 public:
  GlobalOperator(Region region, int local_dim, SparseMatrix matrix);
  GlobalOperator(Region region, int local_dim, DenseMatrix matrix);

  const Region& region() const { return region_; }
  int local_dim() const { return local_dim_; }
  Eigen::Index dim() const;
  bool is_dense() const { return std::holds_alternative<DenseMatrix>(storage_); }
  const DenseMatrix& dense() const;
  const SparseMatrix& sparse() const;
  DenseMatrix to_dense() const;
  bool is_real() const;
  // Max absolute row sum, an upper bound on the spectral norm.
  double norm_bound() const;
  LinearMap as_map() const;

 private:
  Region region_;
  int local_dim_;
  std::variant<SparseMatrix, DenseMatrix> storage_;
};

// term (x) Id on the region, factors in region order.
GlobalOperator embed(const InteractionTerm& term, const Region& region, int local_dim);

// Sum of the terms with support inside the region; with projector_form each
// term is first replaced by its range projector. Throws kRegionTooLarge above
// caps.sparse_max.
GlobalOperator hamiltonian(const Interaction& phi, const Region& region, bool projector_form,
                           const OperatorCaps& caps = {});

struct SolverOptions {
  OperatorCaps caps;
  KrylovOptions krylov;
  int num_eigs = 6;
};

struct SpectralData {
  Eigen::Index dim = 0;
  std::vector<double> lowest;  // ascending, kernel included
  Eigen::Index kernel_dim = 0;
  std::optional<double> gap;   // smallest eigenvalue above the tolerance
  bool gapless_trivial = false;  // nothing above the kernel (e.g. the zero operator)
  double tolerance = 0.0;
  double max_residual = 0.0;
  std::string solver;
};

// Dense solver (real arithmetic when H is real) up to caps.dense_max,
// Lanczos with kernel locking above.
SpectralData spectral_data(const GlobalOperator& h, const SolverOptions& options = {});

// Orthogonal projector onto the kernel. Throws kNotFrustrationFree when the
// smallest eigenvalue exceeds the tolerance and kRegionTooLarge above the
// dense cap.
GlobalOperator ground_projector(const GlobalOperator& h, const SolverOptions& options = {});
bool check_frustration_free(const GlobalOperator& h, const SolverOptions& options = {});

// Largest singular value; largest |eigenvalue| when hermitian is set.
double operator_norm(const GlobalOperator& m, bool hermitian, const NormOptions& options = {});

// Orthonormal basis of ker H~ on a region (columns), in the region layout.
struct KernelBasis {
  Region region;
  int local_dim = 2;
  DenseMatrix basis;

  Eigen::Index dim() const { return basis.rows(); }
  Eigen::Index rank() const { return basis.cols(); }
  DenseMatrix projector() const { return basis * basis.adjoint(); }
};

// Kernel of sum_{X in region} h_X, built site by site: with V the kernel on the
// first p sites, the kernel on p+1 sites lies in V (x) C^d and equals the kernel
// of (V (x) I)^dagger (new terms) (V (x) I). The result may have rank 0.
KernelBasis kernel_intersection(const Interaction& phi, const Region& region, ProjectorCache* cache = nullptr,
                                const OperatorCaps& caps = {});
// As above but throws kNotFrustrationFree for an empty kernel.
KernelBasis ground_space(const Interaction& phi, const Region& region, ProjectorCache* cache = nullptr,
                         const OperatorCaps& caps = {});

// Matrix-free sum of embedded terms on a layout.
class LocalHamiltonian {
 public:
  LocalHamiltonian(const Interaction& phi, HilbertLayout layout, bool projector_form);

  const HilbertLayout& layout() const { return impl_->layout; }
  Eigen::Index dim() const { return impl_->layout.dim(); }
  std::size_t num_terms() const { return impl_->terms.size(); }
  // Sum of term norms.
  double norm_bound() const { return impl_->norm_bound; }
  Vector apply(const Vector& v) const;
  LinearMap as_map() const;

 private:
  struct Impl {
    HilbertLayout layout;
    std::vector<std::pair<SiteAction, DenseMatrix>> terms;
    double norm_bound = 0.0;
  };
  std::shared_ptr<const Impl> impl_;
};

// Spectrum of H (or H~) on a region from the intersected kernel plus a
// deflated Krylov solve above it. Scales to caps.sparse_max.
SpectralData region_spectrum(const Interaction& phi, const Region& region, bool projector_form,
                             const SolverOptions& options = {}, ProjectorCache* cache = nullptr);

// (P (x) Id) and (1 - P) (x) Id on a host layout containing the kernel's region.
LinearMap projector_map(const KernelBasis& kernel, const HilbertLayout& host);
LinearMap complement_map(const KernelBasis& kernel, const HilbertLayout& host);

struct SandwichReport {
  std::optional<double> gap_h;
  std::optional<double> gap_tilde;
  double phi_min = 0.0;
  double phi_max = 0.0;
  double lower_slack = 0.0;  // gap(H) - phi_min gap(H~)
  double upper_slack = 0.0;  // phi_max gap(H~) - gap(H)
  bool holds = false;
};

// phi_min / phi_max are taken over the terms inside the region.
SandwichReport sandwich_check(const Interaction& phi, const Region& region, const SolverOptions& options = {});

}  // namespace ffgap
