#include "ffgap/hilbert.hpp"

#include "ffgap/error.hpp"

namespace ffgap {

Eigen::Index hilbert_dimension(std::size_t sites, int local_dim) {
  Eigen::Index dim = 1;
  for (std::size_t i = 0; i < sites; ++i) {
    if (dim > (Eigen::Index{1} << 62) / local_dim) return 0;
    dim *= local_dim;
  }
  return dim;
}

HilbertLayout::HilbertLayout(Region region, int local_dim)
    : region_(std::move(region)), local_dim_(local_dim) {
  if (local_dim < 1) fail(ErrorCode::kInvalidArgument, "local dimension must be >= 1");
  dim_ = hilbert_dimension(region_.size(), local_dim);
  if (dim_ == 0) fail(ErrorCode::kRegionTooLarge, "Hilbert space dimension overflows");
  strides_.assign(region_.size(), 1);
  for (std::size_t p = region_.size(); p-- > 1;) strides_[p - 1] = strides_[p] * local_dim;
}

namespace {

std::vector<Eigen::Index> offsets_for(const std::vector<Eigen::Index>& strides, int d) {
  std::vector<Eigen::Index> out{0};
  // First listed position is the most significant digit.
  for (Eigen::Index stride : strides) {
    std::vector<Eigen::Index> next;
    next.reserve(out.size() * d);
    for (Eigen::Index base : out)
      for (int digit = 0; digit < d; ++digit) next.push_back(base + digit * stride);
    out = std::move(next);
  }
  return out;
}

}  // namespace

SiteAction::SiteAction(const HilbertLayout& layout, const Region& support) {
  std::vector<Eigen::Index> local_strides, env_strides;
  for (std::size_t p = 0; p < layout.num_sites(); ++p) {
    (support.contains(layout.region()[p]) ? local_strides : env_strides).push_back(layout.stride(p));
  }
  if (local_strides.size() != support.size())
    fail(ErrorCode::kSupportOutsideRegion,
         support.to_string() + " is not inside " + layout.region().to_string());
  local_ = offsets_for(local_strides, layout.local_dim());
  env_ = offsets_for(env_strides, layout.local_dim());
}

DenseMatrix SiteAction::gather(const Vector& v) const {
  DenseMatrix x(local_dim(), env_dim());
  for (Eigen::Index b = 0; b < env_dim(); ++b) {
    const Eigen::Index base = env_[b];
    for (Eigen::Index a = 0; a < local_dim(); ++a) x(a, b) = v[base + local_[a]];
  }
  return x;
}

void SiteAction::scatter(const DenseMatrix& x, Vector& v) const {
  for (Eigen::Index b = 0; b < env_dim(); ++b) {
    const Eigen::Index base = env_[b];
    for (Eigen::Index a = 0; a < local_dim(); ++a) v[base + local_[a]] = x(a, b);
  }
}

void SiteAction::apply(const DenseMatrix& local, Vector& v) const {
  if (local.rows() != local_dim() || local.cols() != local_dim())
    fail(ErrorCode::kInvalidArgument, "local operator has wrong dimension");
  const DenseMatrix x = gather(v);
  const DenseMatrix y = local * x;
  scatter(y, v);
}

void SiteAction::apply_add(const DenseMatrix& local, const Vector& v, Vector& out) const {
  if (local.rows() != local_dim() || local.cols() != local_dim())
    fail(ErrorCode::kInvalidArgument, "local operator has wrong dimension");
  const DenseMatrix y = local * gather(v);
  for (Eigen::Index b = 0; b < env_dim(); ++b) {
    const Eigen::Index base = env_[b];
    for (Eigen::Index a = 0; a < local_dim(); ++a) out[base + local_[a]] += y(a, b);
  }
}

void SiteAction::apply_projector(const DenseMatrix& basis, Vector& v) const {
  if (basis.rows() != local_dim()) fail(ErrorCode::kInvalidArgument, "projector basis has wrong dimension");
  const DenseMatrix x = gather(v);
  const DenseMatrix coeff = basis.adjoint() * x;
  const DenseMatrix y = basis * coeff;
  scatter(y, v);
}

void SiteAction::apply_complement(const DenseMatrix& local, Vector& v) const {
  const DenseMatrix x = gather(v);
  const DenseMatrix y = x - local * x;
  scatter(y, v);
}

SparseMatrix SiteAction::embed(const DenseMatrix& local) const {
  std::vector<Eigen::Triplet<Complex, Eigen::Index>> triplets;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> nonzeros;
  for (Eigen::Index a = 0; a < local_dim(); ++a)
    for (Eigen::Index c = 0; c < local_dim(); ++c)
      if (local(a, c) != Complex{}) nonzeros.emplace_back(a, c);
  triplets.reserve(nonzeros.size() * env_.size());
  for (Eigen::Index b = 0; b < env_dim(); ++b)
    for (auto [a, c] : nonzeros) triplets.emplace_back(env_[b] + local_[a], env_[b] + local_[c], local(a, c));
  SparseMatrix m(dim(), dim());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace ffgap
