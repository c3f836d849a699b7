#include "ffgap/models.hpp"

#include <cmath>
#include <numbers>

#include "ffgap/error.hpp"
#include "ffgap/operators.hpp"
#include "ffgap/random.hpp"

namespace ffgap {

namespace {

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

template <class Term>
Interaction per_edge(const EmbeddedGraph& g, int d, Term term) {
  std::vector<InteractionTerm> terms;
  for (const auto& [a, b] : g.edges()) terms.push_back({Region{a, b}, term()});
  return Interaction(d, 1.0, std::move(terms));
}

}  // namespace

DenseMatrix singlet_projector() {
  Vector s = Vector::Zero(4);
  s(1) = 1.0 / std::sqrt(2.0);
  s(2) = -1.0 / std::sqrt(2.0);
  return s * s.adjoint();
}

DenseMatrix aklt_edge_projector() {
  DenseMatrix sz = DenseMatrix::Zero(3, 3), sp = DenseMatrix::Zero(3, 3);
  sz(0, 0) = 1.0;
  sz(2, 2) = -1.0;
  sp(0, 1) = std::sqrt(2.0);
  sp(1, 2) = std::sqrt(2.0);
  const DenseMatrix sm = sp.adjoint();
  const DenseMatrix sx = (sp + sm) / 2.0;
  const DenseMatrix sy = (sp - sm) / Complex(0.0, 2.0);
  const DenseMatrix ss = kron(sx, sx) + kron(sy, sy) + kron(sz, sz);
  DenseMatrix p = 0.5 * ss + (ss * ss) / 6.0 + DenseMatrix::Identity(9, 9) / 3.0;
  return (p + p.adjoint()) / 2.0;
}

Interaction heisenberg_fm(const EmbeddedGraph& g) { return per_edge(g, 2, singlet_projector); }

Interaction aklt(const EmbeddedGraph& g) { return per_edge(g, 3, aklt_edge_projector); }

Interaction commuting_toy(const EmbeddedGraph& g, ToyVariant variant) {
  return per_edge(g, 2, [variant] {
    DenseMatrix m = DenseMatrix::Zero(4, 4);
    if (variant == ToyVariant::kExclusion) {
      m(3, 3) = 1.0;
    } else {
      m = DenseMatrix::Identity(4, 4);
      m(0, 0) = 0.0;
    }
    return m;
  });
}

LowRankInstance random_low_rank(const EmbeddedGraph& g, int local_dim, int rank, std::uint64_t seed,
                                std::size_t budget) {
  const int d2 = local_dim * local_dim;
  if (local_dim < 1 || rank < 0 || rank > d2) fail(ErrorCode::kInvalidArgument, "rank must lie in [0, d^2]");
  GaussianSource rng(seed);
  const Region all = g.all_vertices();
  for (std::size_t attempt = 0; attempt <= budget; ++attempt) {
    std::vector<InteractionTerm> terms;
    for (const auto& [a, b] : g.edges()) {
      DenseMatrix p = DenseMatrix::Zero(d2, d2);
      if (rank > 0) {
        const DenseMatrix u = haar_unitary(d2, rng).leftCols(rank);
        p = u * u.adjoint();
        p = (p + p.adjoint()) / 2.0;
      }
      terms.push_back({Region{a, b}, p});
    }
    Interaction phi(local_dim, 1.0, std::move(terms));
    if (kernel_intersection(phi, all).rank() > 0) return {std::move(phi), attempt};
  }
  fail(ErrorCode::kResampleBudgetExhausted,
       "no frustration-free instance after " + std::to_string(budget + 1) + " draws (rank " +
           std::to_string(rank) + ", d " + std::to_string(local_dim) + ")");
}

Interaction randomize_spectra(const Interaction& phi, std::uint64_t seed, double lo, double hi) {
  if (!(lo > 0.0 && hi >= lo)) fail(ErrorCode::kInvalidArgument, "need 0 < lo <= hi");
  GaussianSource rng(seed);
  std::vector<InteractionTerm> terms;
  for (const auto& term : phi.terms()) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(range_projector(term.matrix));
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) > 0.5) cols.push_back(i);
    const auto r = static_cast<Eigen::Index>(cols.size());
    DenseMatrix m = DenseMatrix::Zero(term.matrix.rows(), term.matrix.cols());
    if (r > 0) {
      DenseMatrix basis(term.matrix.rows(), r);
      for (Eigen::Index c = 0; c < r; ++c) basis.col(c) = es.eigenvectors().col(cols[c]);
      const DenseMatrix v = basis * haar_unitary(r, rng);
      Eigen::VectorXd mu(r);
      for (Eigen::Index c = 0; c < r; ++c) mu(c) = lo + (hi - lo) * rng.uniform();
      m = v * mu.cast<Complex>().asDiagonal() * v.adjoint();
      m = (m + m.adjoint()) / 2.0;
    }
    terms.push_back({term.support, m});
  }
  return Interaction(phi.local_dim(), phi.range(), std::move(terms));
}

double spin_wave_upper_bound(int n) {
  if (n < 2) fail(ErrorCode::kInvalidArgument, "chain length must be >= 2");
  // In the one-magnon sector a singlet projector on (i, i+1) acts as
  // (1/2)(e_i - e_{i+1})(e_i - e_{i+1})^T.
  Eigen::VectorXd c(n);
  for (int j = 0; j < n; ++j) c(j) = std::cos(std::numbers::pi * (j + 0.5) / n);
  c.array() -= c.mean();  // orthogonal to the uniform (ground) magnon
  double num = 0.0;
  for (int j = 0; j + 1 < n; ++j) num += 0.5 * (c(j) - c(j + 1)) * (c(j) - c(j + 1));
  return num / c.squaredNorm();
}

EmbeddedGraph make_geometry(const ModelSpec& spec) {
  if (spec.extents.empty()) fail(ErrorCode::kConfig, "geometry needs at least one extent");
  for (auto e : spec.extents)
    if (e == 0) fail(ErrorCode::kConfig, "extents must be positive");
  if (spec.geometry == "chain") {
    if (spec.extents.size() != 1) fail(ErrorCode::kConfig, "chain takes one extent");
    return make_chain(spec.extents[0]);
  }
  if (spec.geometry == "grid") return make_grid(spec.extents);
  if (spec.geometry == "honeycomb") {
    if (spec.extents.size() != 2) fail(ErrorCode::kConfig, "honeycomb takes two extents");
    return make_honeycomb(spec.extents[0], spec.extents[1]);
  }
  fail(ErrorCode::kConfig, "unknown geometry '" + spec.geometry + "'");
}

Model make_model(const ModelSpec& spec) {
  EmbeddedGraph g = make_geometry(spec);
  if (spec.name == "heisenberg_fm") return {g, heisenberg_fm(g), 0};
  if (spec.name == "aklt") return {g, aklt(g), 0};
  if (spec.name == "commuting_toy") {
    ToyVariant v;
    if (spec.toy == "exclusion")
      v = ToyVariant::kExclusion;
    else if (spec.toy == "polarizing")
      v = ToyVariant::kPolarizing;
    else
      fail(ErrorCode::kConfig, "unknown toy variant '" + spec.toy + "'");
    return {g, commuting_toy(g, v), 0};
  }
  if (spec.name == "low_rank") {
    auto inst = random_low_rank(g, 2, spec.rank, spec.seed, spec.resample_budget);
    return {g, std::move(inst.phi), inst.resamples};
  }
  fail(ErrorCode::kConfig, "unknown model '" + spec.name + "'");
}

}  // namespace ffgap
