#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ffgap/interaction.hpp"
#include "ffgap/lattice.hpp"

namespace ffgap {

// Spin-1/2, one singlet projector per edge.
Interaction heisenberg_fm(const EmbeddedGraph& g);

// Spin-1, projector onto total spin 2 per edge.
Interaction aklt(const EmbeddedGraph& g);
DenseMatrix aklt_edge_projector();
DenseMatrix singlet_projector();

enum class ToyVariant {
  kExclusion,   // |11><11| per edge
  kPolarizing,  // 1 - |00><00| per edge, unique ground state
};

Interaction commuting_toy(const EmbeddedGraph& g, ToyVariant variant = ToyVariant::kExclusion);

struct LowRankInstance {
  Interaction phi;
  std::size_t resamples = 0;  // rejected draws before this one
};

// Haar-random rank-r projector per edge; instances whose kernel on the whole
// graph is empty are redrawn. Throws kResampleBudgetExhausted.
LowRankInstance random_low_rank(const EmbeddedGraph& g, int local_dim, int rank, std::uint64_t seed,
                                std::size_t budget = 64);

// Each term replaced by U diag(mu) U^dagger on its range, mu uniform in [lo, hi]
// and U Haar on the range. Kernels are unchanged.
Interaction randomize_spectra(const Interaction& phi, std::uint64_t seed, double lo, double hi);

// One-magnon standing wave cos(pi (j + 1/2) / n) on the open FM chain,
// projected off the ground space. Rayleigh quotient, an upper bound on the gap.
double spin_wave_upper_bound(int n);

struct ModelSpec {
  std::string name = "heisenberg_fm";  // heisenberg_fm | aklt | commuting_toy | low_rank
  std::string geometry = "chain";      // chain | grid | honeycomb
  std::vector<std::size_t> extents{8};
  int rank = 1;
  std::string toy = "exclusion";  // exclusion | polarizing
  std::uint64_t seed = 1;
  std::size_t resample_budget = 64;
};

struct Model {
  EmbeddedGraph graph;
  Interaction phi;
  std::size_t resamples = 0;
};

EmbeddedGraph make_geometry(const ModelSpec& spec);
Model make_model(const ModelSpec& spec);

}  // namespace ffgap
