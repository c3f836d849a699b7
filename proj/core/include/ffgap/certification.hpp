#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ffgap/interaction.hpp"
#include "ffgap/lattice.hpp"
#include "ffgap/linear_map.hpp"
#include "ffgap/operators.hpp"

namespace ffgap {

// (1 - delta) / (1 + 1/s) gap_f. s may be +infinity.
double recursion_step(double gap_f, double delta, double s);
double recursion_factor(double delta, double s);

// How s_k is chosen, and how its reciprocal sum is continued past the data.
struct SRule {
  enum class Kind { kConstant, kPower, kLengthFraction, kInfinite };
  Kind kind = Kind::kPower;
  double value = 1.0;     // constant s, power prefactor c, or length fraction
  double exponent = 2.0;  // power rule only: s_k = ceil(c k^p)
  int dimension = 1;      // length fraction only: s_k = max(1, floor(f l_k))

  double operator()(int k) const;
  // sum_{k > k_max} 1/s_k, +infinity when divergent.
  double reciprocal_tail(int k_max) const;
  std::string describe() const;
};

SRule parse_s_rule(const std::string& text, int dimension);

struct GapSequence {
  std::vector<int> k;
  std::vector<double> l;
  std::vector<double> lambda;
  std::vector<double> s;
  std::vector<double> delta;

  std::size_t size() const { return k.size(); }
  // Throws kInconsistentSequence for mismatched lengths, non-consecutive k
  // or entries outside their ranges.
  void validate() const;
};

struct CertifyOptions {
  bool tail = true;
  SRule s_rule;            // continues 1/s_k beyond the data
  std::size_t root_window = 6;
};

struct Certificate {
  bool certifiable = false;
  std::string reason;
  int k0 = 0;
  int k_max = 0;
  double base_gap = 0.0;
  double phi_min = 0.0;
  std::vector<double> factors;  // k = k0 .. k_max
  std::vector<double> running;  // phi_min base_gap prod_{j <= k} factors
  double finite_product = 0.0;
  double finite_lower_bound = 0.0;
  double root_ratio = 0.0;      // geometric majorant ratio of delta_k
  double delta_tail = 0.0;      // bound on sum -log(1 - delta_k), k > k_max
  double s_tail = 0.0;          // sum 1/s_k, k > k_max
  double tail_estimate = 0.0;   // 1 - exp(-(delta_tail + s_tail))
  double lower_bound = 0.0;
};

Certificate certify(const GapSequence& gaps, double phi_min, int k_max, const CertifyOptions& options = {});

struct ScalingHypothesis {
  double c = 1.0;
  double epsilon = 0.5;

  double lambda(int k, int dimension) const;  // c k^{4+eps} / l_k^2
  double s(int k) const;                      // k^{1+eps/2}
};

struct ThresholdReport {
  std::vector<int> k;
  std::vector<double> v;
  double tail_min = 0.0;
  double log_slope = 0.0;       // d log v / dk over the tail window
  double liminf_estimate = 0.0;
  bool passes = false;
  std::optional<double> max_relative_deviation;  // |v_k - sqrt(c)| / sqrt(c)
};

// v_k = sqrt(lambda_k) l_k / (k s_k). The tail window is the last quarter.
ThresholdReport threshold_test(const std::vector<int>& k, const std::vector<double>& lambda,
                               const std::vector<double>& s, int dimension);
ThresholdReport threshold_test(const ScalingHypothesis& hyp, int dimension, int k_lo, int k_hi);

// exp(-C liminf v_k); below 1 exactly when the liminf is positive.
double root_test_quantity(double c, double liminf);

double delta_bound_theoretical(double lambda, double l, double s, double c1, double c2);

struct DeltaFit {
  double c1 = 0.0;
  double c2 = 0.0;
  std::size_t used = 0;
  std::size_t dropped = 0;  // non-positive deltas
};

// Least squares of log(delta) on x = sqrt(lambda) l / s.
DeltaFit fit_delta_bound(const std::vector<double>& x, const std::vector<double>& delta);

enum class ScalingClass {
  kGapped,
  kInverseSquareCompatible,
  kSlowerThanInverseSquare,
  kFasterThanInverseSquare,
  kIndeterminate,
};

const char* to_string(ScalingClass c);

struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double min_gap = 0.0;
  ScalingClass classification = ScalingClass::kIndeterminate;
};

// Bands 0.25 / 1.5 / 2.5 are conventions for finite-size classification.
ScalingFit scaling_fit(const std::vector<double>& sizes, const std::vector<double>& gaps,
                       double gapped_threshold = 1e-2);

struct DeltaOptions {
  std::size_t max_pairs = 0;  // 0 keeps every pair
  std::uint64_t seed = 0x5eed;
  unsigned threads = 1;
  ProjectorCache* cache = nullptr;
  OperatorCaps caps;
  NormOptions norms;
  std::optional<double> t;  // also measure ||DL(t) P_Y^perp||
};

struct DeltaMeasurement {
  int k = 0;
  int s = 1;
  std::optional<double> delta;  // nullopt when no pair could be formed
  std::size_t regions = 0;
  std::size_t skipped_regions = 0;  // split geometry not realisable
  std::size_t pairs_total = 0;
  std::size_t pairs_tested = 0;
  bool sampled = false;  // lower estimate of the sup
  std::optional<double> dl_perp_max;
  std::size_t dl_skipped = 0;  // pairs where t violated the column threshold
};

// max ||P_A P_B - P_{A u B}|| over split pairs of the F_k members inside the window.
DeltaMeasurement measure_delta_k(const Interaction& phi, const EmbeddedGraph& g, int k, int s,
                                 const std::vector<double>& window_lo, const std::vector<double>& window_hi,
                                 const DeltaOptions& options = {});

struct LevelRow {
  int k = 0;
  double l = 0.0;
  std::size_t region_size = 0;
  Eigen::Index hilbert_dim = 0;
  std::optional<double> gap;  // min over members of gap(H~)
  DeltaMeasurement delta;
  double s = 1.0;
};

struct LevelOptions {
  DeltaOptions delta;
  SolverOptions solver;
};

LevelRow measure_level(const Interaction& phi, const EmbeddedGraph& g, int k, const SRule& rule,
                       const std::vector<double>& window_lo, const std::vector<double>& window_hi,
                       const LevelOptions& options = {});

}  // namespace ffgap
