#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "ffgap/interaction.hpp"
#include "ffgap/lattice.hpp"
#include "ffgap/linear_map.hpp"
#include "ffgap/operators.hpp"

namespace ffgap {

struct IndexSets {
  std::vector<double> even;  // (2 + 6j) t
  std::vector<double> odd;   // (5 + 6j) t
};

// Members of both progressions whose column [m - 2t + 1, m + 2t - 1] meets
// the closed extent [lo, hi].
IndexSets index_sets(double t, double lo, double hi);

// max(2, C_gamma R).
double coarse_graining_threshold(const EmbeddedGraph& g, const Interaction& phi);

struct Column {
  double center = 0.0;
  Region sites;
  KernelBasis q;  // ground space of the column Hamiltonian
};

struct ColumnDecomposition {
  double t = 0.0;
  int alpha = 0;
  Region region;
  int local_dim = 2;
  IndexSets indices;          // every index whose column meets the extent
  std::vector<Column> even;   // columns with at least one term, in index order
  std::vector<Column> odd;
  std::size_t pruned = 0;     // empty or term-free columns (Q = identity)
};

struct ColumnOptions {
  bool enforce_threshold = true;  // reject t < max(2, C_gamma R)
  unsigned threads = 1;
  ProjectorCache* cache = nullptr;
  OperatorCaps caps;
};

ColumnDecomposition column_decomposition(const Interaction& phi, const EmbeddedGraph& g, const Region& region,
                                         double t, int alpha, const ColumnOptions& options = {});

struct CommutingReport {
  double max_even = 0.0;
  double max_odd = 0.0;
  std::size_t pairs = 0;
};

// max || [Q_m, Q_n] || over same-parity pairs, evaluated on C_m u C_n.
CommutingReport check_commuting(const ColumnDecomposition& decomp, const NormOptions& options = {});

struct DLOperator {
  HilbertLayout host;
  std::vector<double> even_indices;
  std::vector<double> odd_indices;
  LinearMap even_product;  // prod over even columns
  LinearMap odd_product;   // prod over odd columns
  LinearMap map;           // even_product * odd_product
  double t = 0.0;
};

DLOperator dl_operator(const ColumnDecomposition& decomp);

struct LayerProduct {
  LayerColoring coloring;
  std::vector<LinearMap> factors;  // T_1, ..., T_L on the region
  LinearMap product;               // T_L ... T_1
};

// Layers restricted to terms inside the region. An empty region gives the
// identity on the one-dimensional space.
LayerProduct layer_product(const Interaction& phi, const Region& region, const LayerColoring& coloring);

struct StandardDlReport {
  double norm_sq = 0.0;  // || T P_perp ||^2
  double bound = 1.0;    // 1 / (1 + lambda / g^2)
  double slack = 0.0;
  int g_used = 1;
  bool g_flagged = false;  // g = 0 replaced by 1
  bool holds = false;
};

StandardDlReport standard_dl_check(const LayerProduct& t, const LinearMap& p_perp, double lambda, int g,
                                   const NormOptions& options = {});

struct ChebyshevStep {
  int q = 1;
  double gamma = 0.5;
};

// Degree-q Chebyshev polynomial of the first kind.
double chebyshev_t(int q, double y);
// T_q(2(1-x)/(1-gamma) - 1) / T_q(2/(1-gamma) - 1), evaluated without overflow.
double chebyshev_step(const ChebyshevStep& p, double x);

// F with F(0) = 1: either a Chebyshev step or coefficients c_0 + c_1 x + ...
class SmuggledPolynomial {
 public:
  static SmuggledPolynomial step(ChebyshevStep p);
  static SmuggledPolynomial coefficients(std::vector<double> c);

  int degree() const;
  double operator()(double x) const;
  // F(1 - G) v for a Hermitian G with spectrum in [0, 1] (G = T^dagger T).
  Vector apply(const LinearMap& gram, const Vector& v) const;

 private:
  std::variant<ChebyshevStep, std::vector<double>> form_;
};

// inf over [1 - eps, 1] of |F(x)|: 10^4-point grid, bisection at sign changes
// and golden-section refinement around the grid minimum.
double f_star(const std::function<double(double)>& f, double eps);
// sup over [1 - eps, 1] of |F(x)|, same grid and refinement.
double f_sup(const std::function<double(double)>& f, double eps);

// ceil(t / (2 C (L - 1) R) - 1); throws kSingleLayer for L < 2.
int smuggling_degree_budget(double t, double c_gamma, int layers, double range);
// ceil((t / (C R) - 1) / (2 (L - 1))) - 1: the outermost layer of (T^dagger T)^q
// reaches graph distance (q (2L - 2) + 1) R from the even complement, which
// must stay below t / C. Never exceeds the budget above; equal for even t
// when C = R = 1 and L = 2.
int safe_smuggling_degree_budget(double t, double c_gamma, int layers, double range);

struct SmuggleReport {
  double residual = 0.0;
  int degree = 0;
  int budget = 0;
  int safe_budget = 0;
};

// || DL - prod_e Q F(1 - T^dagger T) prod_o Q ||. Throws kDegreeExceedsBudget
// for an inadmissible degree and kInvalidArgument when F(0) != 1.
SmuggleReport smuggle_check(const DLOperator& dl, const LayerProduct& t, const SmuggledPolynomial& f,
                            double c_gamma, int layers, double range, const NormOptions& options = {});

// 2 exp(-(t / (C (L - 1) R) - 2) sqrt(lambda / (1 + g^2))) with lambda capped
// at 1. Throws kSingleLayer for L < 2.
double refined_dl_bound(double t, double lambda, int layers, int g, double c_gamma, double range);

struct MaMbSplit {
  std::vector<double> a_even, a_odd, b_even, b_odd;
  Region support_a;
  Region support_b;
  LinearMap m_a;  // (even Q meeting A\B) (odd Q overlapping those)
  LinearMap m_b;  // remaining Q in DL order
  double residual_ab = 0.0;  // || M_A M_B - DL ||
  double residual_ba = 0.0;  // || M_B M_A - DL ||
};

// Throws kSplitNotAdmissible when the Euclidean distance between A\B and B\A
// is at most 8t or when the supports do not fall inside A and B.
MaMbSplit ma_mb_split(const ColumnDecomposition& decomp, const DLOperator& dl, const SplitPair& pair,
                      const NormOptions& options = {});

struct OverlapInputs {
  double t = 2.0;
  double lambda = 1.0;  // gap lower bound over the tested family
  int layers = 2;
  int g = 1;
};

struct OverlapReport {
  bool admissible = false;
  double lhs = 0.0;       // || P_A P_B - P_AB ||
  double dl_perp = 0.0;   // || DL(t) P_AB^perp ||
  double mid = 0.0;       // 3 dl_perp
  double bound = 0.0;     // refined DL bound
  double rhs = 0.0;       // 3 bound
  bool bound_active = false;  // bound < 1
  bool lhs_le_mid = false;
  bool dl_le_bound = true;    // only meaningful when bound_active
  // Absorption residuals (admissible splits only).
  double absorb_a = 0.0;        // || P_A - P_A M_A ||
  double absorb_b = 0.0;        // || P_B - P_B M_B ||
  double absorb_cross_b = 0.0;  // || P_B M_A - P_B DL ||
  double absorb_cross_a = 0.0;  // || P_A M_B - P_A DL ||
  double residual_ab = 0.0;
  double residual_ba = 0.0;
  bool holds = false;
};

OverlapReport overlap_bound_check(const Interaction& phi, const EmbeddedGraph& g, const SplitPair& pair,
                                  const OverlapInputs& inputs, const ColumnOptions& columns = {},
                                  const NormOptions& norms = {});

}  // namespace ffgap
