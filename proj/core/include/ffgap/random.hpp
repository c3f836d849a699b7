#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace ffgap {

// Seeded Gaussian source with a fixed algorithm (mt19937_64 words, 53-bit
// uniforms, Box-Muller). std::normal_distribution is implementation-defined,
// so it is not used anywhere a reproducible instance is needed.
class GaussianSource {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/box-muller/v1";

  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // in [0, 1)
  double normal();
  std::complex<double> complex_normal();  // E|z|^2 = 1

  Eigen::VectorXcd complex_vector(Eigen::Index n);
  Eigen::MatrixXcd complex_matrix(Eigen::Index rows, Eigen::Index cols);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Haar-distributed unitary via QR of a Ginibre matrix with the phase fix.
Eigen::MatrixXcd haar_unitary(Eigen::Index n, GaussianSource& rng);

}  // namespace ffgap
