#include "ffgap/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ffgap/error.hpp"
#include "ffgap/hilbert.hpp"

namespace ffgap {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kPsdTolerance = 1e-10;
constexpr double kRangeTolerance = 1e-9;
constexpr double kCommutatorTolerance = 1e-10;

double max_abs_eigenvalue(const Eigen::VectorXd& evals) {
  return evals.size() == 0 ? 0.0 : std::max(std::abs(evals.minCoeff()), std::abs(evals.maxCoeff()));
}

}  // namespace

Interaction::Interaction(int local_dim, double range, std::vector<InteractionTerm> terms)
    : local_dim_(local_dim), range_(range), terms_(std::move(terms)) {
  if (local_dim < 1) fail(ErrorCode::kInvalidArgument, "local dimension must be >= 1");
  if (!(range > 0.0)) fail(ErrorCode::kInvalidArgument, "interaction range must be > 0");
  for (const auto& term : terms_) {
    const Eigen::Index expected = hilbert_dimension(term.support.size(), local_dim);
    if (term.support.empty()) fail(ErrorCode::kInvalidArgument, "term with empty support");
    if (term.matrix.rows() != expected || term.matrix.cols() != expected)
      fail(ErrorCode::kInvalidArgument, "term on " + term.support.to_string() + " has dimension " +
                                            std::to_string(term.matrix.rows()) + ", expected " +
                                            std::to_string(expected));
  }
}

std::vector<std::size_t> Interaction::terms_within(const Region& region) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (region.contains(terms_[i].support)) out.push_back(i);
  return out;
}

Interaction Interaction::restricted_to(const Region& region) const {
  std::vector<InteractionTerm> kept;
  for (std::size_t i : terms_within(region)) kept.push_back(terms_[i]);
  return Interaction(local_dim_, range_, std::move(kept));
}

bool Interaction::is_real() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const InteractionTerm& t) { return t.matrix.imag().isZero(0.0); });
}

void validate(const Interaction& phi, const EmbeddedGraph& g) {
  for (const auto& term : phi.terms()) {
    for (VertexId v : term.support)
      if (v >= g.num_vertices()) fail(ErrorCode::kInvalidArgument, "term support outside graph");
    const double scale = std::max(1.0, term.matrix.cwiseAbs().maxCoeff());
    if ((term.matrix - term.matrix.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance * scale)
      fail(ErrorCode::kNotHermitian, "term on " + term.support.to_string());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(term.matrix, Eigen::EigenvaluesOnly);
    const double norm = max_abs_eigenvalue(es.eigenvalues());
    if (es.eigenvalues().minCoeff() < -kPsdTolerance * std::max(norm, 1e-300))
      fail(ErrorCode::kNegativeEigenvalue, "term on " + term.support.to_string());
    const auto diam = graph_diameter(g, term.support);
    if (!diam || static_cast<double>(*diam) > phi.range() + kCoordinateTolerance)
      fail(ErrorCode::kInvalidArgument,
           "term on " + term.support.to_string() + " exceeds the interaction range");
  }
}

DenseMatrix range_projector(const DenseMatrix& m) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m);
  const Eigen::VectorXd& evals = es.eigenvalues();
  const double norm = max_abs_eigenvalue(evals);
  if (norm == 0.0) return DenseMatrix::Zero(m.rows(), m.cols());
  if (evals.minCoeff() < -kPsdTolerance * norm)
    fail(ErrorCode::kNegativeEigenvalue, "smallest eigenvalue " + std::to_string(evals.minCoeff()));
  DenseMatrix p = DenseMatrix::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals(i) > kRangeTolerance * norm) p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  return 0.5 * (p + p.adjoint());
}

Interaction reduce_to_projectors(const Interaction& phi) {
  std::vector<InteractionTerm> out;
  for (const auto& term : phi.terms()) {
    DenseMatrix p = range_projector(term.matrix);
    if (p.isZero(0.0)) continue;
    out.push_back({term.support, std::move(p)});
  }
  return Interaction(phi.local_dim(), phi.range(), std::move(out));
}

PhiBounds phi_bounds(const Interaction& phi) {
  PhiBounds bounds{0.0, std::numeric_limits<double>::infinity()};
  bool any = false;
  for (const auto& term : phi.terms()) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(term.matrix, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& evals = es.eigenvalues();
    const double norm = max_abs_eigenvalue(evals);
    if (norm == 0.0) continue;
    if (evals.minCoeff() < -kPsdTolerance * norm)
      fail(ErrorCode::kNegativeEigenvalue, "term on " + term.support.to_string());
    any = true;
    bounds.max = std::max(bounds.max, norm);
    for (Eigen::Index i = 0; i < evals.size(); ++i)
      if (evals(i) > kRangeTolerance * norm) bounds.min = std::min(bounds.min, evals(i));
  }
  if (!any) fail(ErrorCode::kEmptyInteraction, "all terms vanish");
  return bounds;
}

std::vector<std::vector<std::size_t>> LayerColoring::layers() const {
  std::vector<std::vector<std::size_t>> out(num_layers);
  for (std::size_t i = 0; i < layer_of_term.size(); ++i) out[layer_of_term[i]].push_back(i);
  return out;
}

LayerColoring layer_coloring(const Interaction& phi) {
  const auto& terms = phi.terms();
  std::vector<std::size_t> order(terms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Region& sa = terms[a].support;
    const Region& sb = terms[b].support;
    if (sa[0] != sb[0]) return sa[0] < sb[0];
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    return sa < sb;
  });
  LayerColoring coloring;
  coloring.layer_of_term.assign(terms.size(), -1);
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t idx : order) {
    int chosen = -1;
    for (int layer = 0; layer < static_cast<int>(members.size()) && chosen < 0; ++layer) {
      const bool clash = std::any_of(members[layer].begin(), members[layer].end(), [&](std::size_t other) {
        return terms[other].support.intersects(terms[idx].support);
      });
      if (!clash) chosen = layer;
    }
    if (chosen < 0) {
      chosen = static_cast<int>(members.size());
      members.emplace_back();
    }
    members[chosen].push_back(idx);
    coloring.layer_of_term[idx] = chosen;
  }
  coloring.num_layers = static_cast<int>(members.size());
  return coloring;
}

int hypergraph_degree(const Interaction& phi) {
  std::vector<int> count;
  for (const auto& term : phi.terms())
    for (VertexId v : term.support) {
      if (v >= count.size()) count.resize(v + 1, 0);
      ++count[v];
    }
  return count.empty() ? 0 : *std::max_element(count.begin(), count.end());
}

int overlap_degree(const Interaction& phi) {
  int best = 0;
  const auto& terms = phi.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    int c = 0;
    for (std::size_t j = 0; j < terms.size(); ++j)
      if (i != j && terms[i].support.intersects(terms[j].support)) ++c;
    best = std::max(best, c);
  }
  return best;
}

double commutator_norm(const InteractionTerm& x, const InteractionTerm& y, int local_dim) {
  const Region joint = x.support.united(y.support);
  const HilbertLayout layout(joint, local_dim);
  const DenseMatrix a = DenseMatrix(SiteAction(layout, x.support).embed(x.matrix));
  const DenseMatrix b = DenseMatrix(SiteAction(layout, y.support).embed(y.matrix));
  const DenseMatrix c = a * b - b * a;
  // c is anti-Hermitian; i c is Hermitian with the same norm.
  const DenseMatrix h = Complex(0.0, 1.0) * c;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return max_abs_eigenvalue(es.eigenvalues());
}

CommutationDegree commutation_degree(const Interaction& phi, CommutationMode mode) {
  const auto& terms = phi.terms();
  CommutationDegree out;
  out.per_term.assign(terms.size(), 0);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (!terms[i].support.intersects(terms[j].support)) continue;
      const bool counts =
          mode == CommutationMode::kSupportOverlap ||
          commutator_norm(terms[i], terms[j], phi.local_dim()) > kCommutatorTolerance;
      if (counts) {
        ++out.per_term[i];
        ++out.per_term[j];
      }
    }
  }
  out.g = out.per_term.empty() ? 0 : *std::max_element(out.per_term.begin(), out.per_term.end());
  return out;
}

}  // namespace ffgap
