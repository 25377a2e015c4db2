#pragma once

// Conditional expectations, quasi-bases, Watatani index, Pimsner-Popa
// constants and the minimal-index search.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cidx/algebra.hpp"

namespace cidx {

/// A linear map from source onto target, stored as the matrix taking source
/// coordinates to target coordinates.
struct ConditionalExpectation {
  ConcreteAlgebra source;
  ConcreteAlgebra target;
  Mat map;
  std::optional<TraceFunctional> trace;

  Mat operator()(const Mat& x) const;
};

/// Tabulates f on the basis of source; f must land in target.
ConditionalExpectation expectation_from_function(const ConcreteAlgebra& source, const ConcreteAlgebra& target,
                                                 const std::function<Mat(const Mat&)>& f);

/// G_kl = tau(a_k* a_l) over the basis of a; TraceNotFaithful if singular.
Mat trace_gram(const ConcreteAlgebra& a, const TraceFunctional& tau);

/// The tau-orthogonal projection of a onto s.
ConditionalExpectation trace_preserving_expectation(const ConcreteAlgebra& a, const ConcreteAlgebra& s,
                                                    const TraceFunctional& tau);

struct ExpectationDefects {
  double idempotent = 0.0;
  double unital = 0.0;
  double bimodular = 0.0;
  double positivity = 0.0;  ///< max(0, -min eigenvalue of E(a* a)) over samples
  double max() const;
};

ExpectationDefects expectation_defects(const ConditionalExpectation& e, int samples = 8,
                                       std::uint64_t seed = kDefaultSeed);

struct QuasiBasis {
  std::vector<Mat> elements;
};

/// B-valued Gram-Schmidt over the source basis. A nonzero mixing_seed
/// replaces the basis by a seeded random unitary mixture of it, which gives
/// an independently pivoted quasi-basis.
QuasiBasis quasi_basis(const ConditionalExpectation& e, std::uint64_t mixing_seed = 0);

/// max over the source basis of both reconstruction residuals.
double reconstruction_residual(const ConditionalExpectation& e, const QuasiBasis& qb);

struct IndexValue {
  Mat element;
  bool scalar = false;
  double value = 0.0;  ///< operator norm; the scalar when scalar is set
  double min_eigenvalue = 0.0;
  double centrality_defect = 0.0;
  double independence_defect = 0.0;  ///< distance to the index of a second quasi-basis
};

/// Sum of l l* over the quasi-basis, with centrality, positivity and
/// invertibility asserted (NotCentral otherwise).
IndexValue watatani_index(const ConditionalExpectation& e, const QuasiBasis& qb);
/// Same, recomputed from two independently pivoted quasi-bases.
IndexValue watatani_index(const ConditionalExpectation& e);

/// Values of a central element on the blocks of a block structure.
std::vector<double> block_values(const Mat& central, const BlockStructure& blocks);

struct PPConstant {
  double value = 0.0;
  std::size_t block = 0;  ///< source block of the certificate projection
  Vec vector;             ///< the certificate p = v v* (x) 1 in that block
  bool exhaustive = false;
};

/// Largest lambda with E(x) >= lambda x on the positive cone, as the
/// infimum over minimal projections p of 1 / lambda_max(p E(p)^+ p).
PPConstant pp_constant(const ConditionalExpectation& e, std::uint64_t seed = kDefaultSeed, int samples = 10000,
                       int refine_iterations = 200);
PPConstant pp_constant(const ConditionalExpectation& e, const BlockStructure& source_blocks,
                       const BlockStructure& target_blocks, std::uint64_t seed = kDefaultSeed, int samples = 10000,
                       int refine_iterations = 200);

/// 1 / pp_constant; infinity when the constant vanishes.
double probabilistic_index(const PPConstant& pp);

struct MinimalIndexResult {
  IndexValue index;
  TraceFunctional trace;
  std::vector<double> weights;  ///< sup block weights of the optimal trace
  std::string regime;           ///< closed_form_scalar, exact_factor, numeric, heuristic
  int restarts_agreeing = 0;
};

/// Minimizes the norm of the Watatani index over trace-preserving
/// expectations, traces ranging over faithful block-weight traces on sup.
MinimalIndexResult minimal_index_search(const UnitalInclusion& inc, std::uint64_t seed = kDefaultSeed,
                                        int restarts = 10);

/// Watatani index of the expectation preserving the block-weight trace.
IndexValue index_for_weights(const UnitalInclusion& inc, const BlockStructure& sup_blocks,
                             const std::vector<double>& weights);

}  // namespace cidx
