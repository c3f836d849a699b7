#pragma once

// Independent reference constructions. Nothing here calls into the library
// beyond reading plain data (coordinates, edges, term matrices).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ffgap/interaction.hpp"
#include "ffgap/lattice.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using cd = std::complex<double>;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline long ipow(long d, long n) {
  long r = 1;
  while (n-- > 0) r *= d;
  return r;
}

// Digit p (0 = most significant) of basis index x in base d with n digits.
inline long digit(long x, long p, long n, long d) { return (x / ipow(d, n - 1 - p)) % d; }

// term acting on the given site positions (in order) of an n-site register,
// computed element by element from basis digits.
inline Mat embed(const Mat& term, const std::vector<long>& positions, long n, long d) {
  const long dim = ipow(d, n);
  const long k = static_cast<long>(positions.size());
  Mat out = Mat::Zero(dim, dim);
  for (long r = 0; r < dim; ++r)
    for (long c = 0; c < dim; ++c) {
      bool same_env = true;
      for (long p = 0; p < n && same_env; ++p)
        if (std::find(positions.begin(), positions.end(), p) == positions.end())
          same_env = digit(r, p, n, d) == digit(c, p, n, d);
      if (!same_env) continue;
      long lr = 0, lc = 0;
      for (long q = 0; q < k; ++q) {
        lr = lr * d + digit(r, positions[q], n, d);
        lc = lc * d + digit(c, positions[q], n, d);
      }
      out(r, c) = term(lr, lc);
    }
  return out;
}

// Dense sum of the terms supported inside the region.
inline Mat hamiltonian(const ffgap::Interaction& phi, const ffgap::Region& region) {
  const long n = static_cast<long>(region.size());
  const long d = phi.local_dim();
  Mat h = Mat::Zero(ipow(d, n), ipow(d, n));
  for (const auto& t : phi.terms()) {
    std::vector<long> pos;
    bool inside = true;
    for (auto v : t.support) {
      auto it = std::find(region.begin(), region.end(), v);
      if (it == region.end()) {
        inside = false;
        break;
      }
      pos.push_back(it - region.begin());
    }
    if (inside) h += embed(t.matrix, pos, n, d);
  }
  return h;
}

inline Mat pauli(char which) {
  Mat m = Mat::Zero(2, 2);
  if (which == 'x') m << 0, 1, 1, 0;
  if (which == 'y') m << 0, cd(0, -1), cd(0, 1), 0;
  if (which == 'z') m << 1, 0, 0, -1;
  if (which == 'i') m = Mat::Identity(2, 2);
  return m;
}

// Open Heisenberg FM chain sum_i (1 - sigma_i . sigma_{i+1}) / 4 from Pauli strings.
inline Mat heisenberg_chain(long n) {
  const long dim = ipow(2, n);
  Mat h = Mat::Zero(dim, dim);
  for (long i = 0; i + 1 < n; ++i) {
    h += 0.25 * Mat::Identity(dim, dim);
    for (char a : {'x', 'y', 'z'}) {
      Mat op = Mat::Identity(1, 1);
      for (long p = 0; p < n; ++p) op = kron(op, (p == i || p == i + 1) ? pauli(a) : pauli('i'));
      h -= 0.25 * op;
    }
  }
  return h;
}

// FM chain spectrum assembled sector by sector in the computational basis:
// a singlet projector is (1 - SWAP) / 2 on each bond.
inline std::vector<double> heisenberg_sector_spectrum(long n) {
  std::vector<double> all;
  for (long down = 0; down <= n; ++down) {
    std::vector<long> states;
    for (long x = 0; x < (1L << n); ++x)
      if (__builtin_popcountl(static_cast<unsigned long>(x)) == down) states.push_back(x);
    const long m = static_cast<long>(states.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
    for (long a = 0; a < m; ++a) {
      const long x = states[a];
      for (long i = 0; i + 1 < n; ++i) {
        const long bi = (x >> i) & 1, bj = (x >> (i + 1)) & 1;
        if (bi == bj) continue;
        h(a, a) += 0.5;
        const long y = x ^ (1L << i) ^ (1L << (i + 1));
        const long b = std::lower_bound(states.begin(), states.end(), y) - states.begin();
        h(a, b) -= 0.5;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    for (long i = 0; i < m; ++i) all.push_back(es.eigenvalues()(i));
  }
  std::sort(all.begin(), all.end());
  return all;
}

inline Eigen::VectorXd eigenvalues(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double gap_of(const Eigen::VectorXd& ev, double tol = 1e-8) {
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > tol) return ev(i);
  return std::numeric_limits<double>::quiet_NaN();
}

inline Mat kernel_projector(const Mat& h, double tol = 1e-8) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Mat p = Mat::Zero(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    if (es.eigenvalues()(i) <= tol) p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  return p;
}

inline double opnorm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() > 256) {
    // Jacobi sweeps are too slow here; largest eigenvalue of m^dagger m instead.
    Eigen::SelfAdjointEigenSolver<Mat> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

inline std::vector<std::vector<long>> floyd_warshall(const ffgap::EmbeddedGraph& g) {
  const long n = static_cast<long>(g.num_vertices());
  const long inf = std::numeric_limits<long>::max() / 4;
  std::vector<std::vector<long>> d(n, std::vector<long>(n, inf));
  for (long i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& [a, b] : g.edges()) d[a][b] = d[b][a] = 1;
  for (long k = 0; k < n; ++k)
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

inline long set_distance(const std::vector<std::vector<long>>& d, const ffgap::Region& a, const ffgap::Region& b) {
  long best = std::numeric_limits<long>::max();
  for (auto i : a)
    for (auto j : b) best = std::min(best, d[i][j]);
  return best;
}

// Hand-rolled generators for property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  Mat gaussian(long r, long c) {
    std::normal_distribution<double> n;
    Mat m(r, c);
    for (long i = 0; i < r; ++i)
      for (long j = 0; j < c; ++j) m(i, j) = cd(n(rng), n(rng));
    return m;
  }
  Mat psd(long dim, long rank) {
    const Mat a = gaussian(dim, rank);
    Mat m = a * a.adjoint();
    return (m + m.adjoint()) / 2.0;
  }
  Mat projector(long dim, long rank) {
    Eigen::HouseholderQR<Mat> qr(gaussian(dim, rank));
    const Mat q = qr.householderQ() * Mat::Identity(dim, rank);
    return q * q.adjoint();
  }
  ffgap::Region subset(long n, double p) {
    std::vector<ffgap::VertexId> ids;
    for (long i = 0; i < n; ++i)
      if (real(0, 1) < p) ids.push_back(static_cast<ffgap::VertexId>(i));
    return ffgap::Region(ids);
  }
};

}  // namespace oracle
