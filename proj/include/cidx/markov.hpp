#pragma once

// Markov traces from inclusion matrices, closed forms for C inside a
// multi-matrix algebra, and the dimension bound pipeline.

#include <optional>
#include <string>
#include <vector>

#include "cidx/basic_construction.hpp"
#include "cidx/rational.hpp"

namespace cidx {

struct MarkovData {
  InclusionMatrixData lambda;
  double alpha = 0.0;            ///< Perron value of Lambda^T Lambda
  Eigen::VectorXd t_sub, t_sup;  ///< trace weights, sum of dims * t = 1 on each side
  Rational alpha_exact;          ///< continued-fraction reading of alpha
  std::vector<Rational> t_sup_exact;
  double eigen_residual = 0.0;   ///< || Lambda^T Lambda t - alpha t ||
};

/// DegeneratePerron when the top eigenvalue is not simple.
MarkovData markov_trace(const InclusionMatrixData& lambda);

struct ScalarMarkov {
  std::vector<Rational> weights;
  Rational alpha;
};

ScalarMarkov scalar_markov_closed_form(const DimensionVector& n);

/// min_j t_j.
Rational pp_constant_closed_form(const std::vector<Rational>& t);
double pp_constant_closed_form(const std::vector<double>& t);

/// Exact 9^k as a decimal string, k <= 32.
std::string nine_power(int k);

struct ChainLink {
  std::string name;
  bool checked = false;     ///< false: could not be evaluated, see reason
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string reason;
  bool hypotheses = true;   ///< the instance satisfies the assumptions behind the link
};

struct BoundReport {
  DimensionVector commutant_dims;  ///< of B' cap A_1
  int dim_total = 0;
  int min_block = 0;
  Rational ratio;
  double minimal_index = 0.0;
  std::string minimal_regime;
  std::optional<double> markov_index;  ///< alpha of the inclusion matrix
  std::string markov_note;
  double pp_e1 = 0.0;   ///< lambda of E_1 on A in A_1
  double pp_f = 0.0;    ///< lambda of E_1 restricted to B' cap A_1
  double pp_tau = 0.0;  ///< closed form for C in B' cap A_1 with its Markov trace
  bool irreducible = false;
  double f_trace_defect = 0.0;
  bool f_tracial = false;
  int exponent = 0;           ///< ceil(ratio)
  double bound_log10 = 0.0;   ///< minimal_index * log10 9
  double exponent_log10 = 0.0;
  std::string nine_power;     ///< 9^exponent when exponent <= 32, empty otherwise
  std::vector<ChainLink> chain;

  bool all_checked_hold() const;
  /// Links that were evaluated under their hypotheses and failed.
  std::vector<std::string> violations() const;
};

BoundReport bound_pipeline(const UnitalInclusion& inc, const TraceFunctional& tau, std::uint64_t seed = kDefaultSeed);
/// Same, reusing an existing basic construction of inc over tau.
BoundReport bound_pipeline(const BasicConstruction& bc, std::uint64_t seed = kDefaultSeed);

}  // namespace cidx
