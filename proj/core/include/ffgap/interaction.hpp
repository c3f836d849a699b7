#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ffgap/lattice.hpp"

namespace ffgap {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Phi(X): a PSD Hermitian matrix on the d^|X| dimensional space of its support.
// Tensor factors follow the sorted order of the support ids, first id most
// significant.
struct InteractionTerm {
  Region support;
  DenseMatrix matrix;
};

class Interaction {
 public:
  Interaction(int local_dim, double range, std::vector<InteractionTerm> terms);

  int local_dim() const { return local_dim_; }
  double range() const { return range_; }
  const std::vector<InteractionTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  // Indices of the terms whose support lies inside the region.
  std::vector<std::size_t> terms_within(const Region& region) const;
  Interaction restricted_to(const Region& region) const;
  // All matrices real (imaginary parts exactly zero).
  bool is_real() const;

 private:
  int local_dim_;
  double range_;
  std::vector<InteractionTerm> terms_;
};

// Hermiticity to 1e-12, PSD to -1e-10 ||Phi||, matrix sizes, and support
// diameter <= R in the graph metric. Throws on the first violation.
void validate(const Interaction& phi, const EmbeddedGraph& g);

// Orthogonal projector onto the range of a PSD matrix; eigenvalues at or below
// 1e-9 ||m|| are kernel. Throws kNegativeEigenvalue for non-PSD input.
DenseMatrix range_projector(const DenseMatrix& m);

// Terms replaced by their range projectors h_X; zero terms dropped.
Interaction reduce_to_projectors(const Interaction& phi);

struct PhiBounds {
  double max = 0.0;  // sup ||Phi(X)||
  double min = 0.0;  // inf over nonzero terms of the smallest nonzero eigenvalue
};

// Bounds over the materialised terms only. Throws kEmptyInteraction if every
// term vanishes.
PhiBounds phi_bounds(const Interaction& phi);

struct LayerColoring {
  int num_layers = 0;
  std::vector<int> layer_of_term;  // 0-based layer per term index

  std::vector<std::vector<std::size_t>> layers() const;
};

// Greedy first-fit over terms ordered by (min vertex id, support size, support).
LayerColoring layer_coloring(const Interaction& phi);

// Max number of terms meeting at one vertex (hypergraph degree Delta).
int hypergraph_degree(const Interaction& phi);
// Max number of other terms whose support meets a given term's support.
int overlap_degree(const Interaction& phi);

enum class CommutationMode {
  kCommutator,      // count only [Phi(X), Phi(Y)] != 0 (norm > 1e-10)
  kSupportOverlap,  // count every overlapping support
};

struct CommutationDegree {
  int g = 0;
  std::vector<int> per_term;
};

CommutationDegree commutation_degree(const Interaction& phi,
                                     CommutationMode mode = CommutationMode::kCommutator);

// || [A_X, B_Y] || computed on the joint support X u Y.
double commutator_norm(const InteractionTerm& x, const InteractionTerm& y, int local_dim);

}  // namespace ffgap
