#pragma once

// A-valued inner product on A_1, angles between intermediate subalgebras,
// meets of Jones projections.

#include <string>
#include <vector>

#include "cidx/basic_construction.hpp"

namespace cidx {

/// E_1(x* y) as an element of A. x and y must commute with right
/// multiplication by B (NotInBasicConstruction otherwise).
Mat a_valued_inner(const BasicConstruction& bc, const Mat& x, const Mat& y);
double a_norm(const BasicConstruction& bc, const Mat& x);

/// Same over an explicit expectation onto L_A; membership is checked
/// against its source.
Mat a_valued_inner(const ConditionalExpectation& e1, const Mat& x, const Mat& y);
double a_norm(const ConditionalExpectation& e1, const Mat& x);

struct AngleReport {
  double cos_value = 0.0;  ///< clamped to [0, 1]
  double raw_cos = 0.0;
  double angle = 0.0;      ///< radians
  double numerator = 0.0;
  double denom_c = 0.0;
  double denom_d = 0.0;
  TraceFunctional trace_used;
};

/// NotIntermediate unless B <= C, D <= A; DegenerateIntermediate when
/// C or D equals B.
AngleReport angle(const UnitalInclusion& inc, const ConcreteAlgebra& c, const ConcreteAlgebra& d,
                  const TraceFunctional& tau);
AngleReport angle(const BasicConstruction& bc, const ConcreteAlgebra& c, const ConcreteAlgebra& d);

/// max over seeded pairs of ||E(x* y)|| - ||x||_E ||y||_E.
double cauchy_schwarz_check(const ConditionalExpectation& e, int samples = 1000, std::uint64_t seed = kDefaultSeed);

struct MeetCheck {
  double difference = 0.0;  ///< || e_C ^ e_D - e_{C cap D} ||
  bool pass = false;
  Index meet_rank = 0;
  int iterations = -1;      ///< first n with ||(e_C e_D e_C)^n - meet|| < 1e-6, -1 if none up to 200
  bool monotone = true;
  double final_residual = 0.0;
};

MeetCheck meet_projection_check(const UnitalInclusion& inc, const ConcreteAlgebra& c, const ConcreteAlgebra& d,
                                const TraceFunctional& tau);
MeetCheck meet_projection_check(const BasicConstruction& bc, const ConcreteAlgebra& c, const ConcreteAlgebra& d);

struct NamedAlgebra {
  std::string name;
  ConcreteAlgebra algebra;
};

struct PairAngle {
  std::size_t first = 0, second = 0;  ///< indices into the intermediate list
  double angle = 0.0;
  bool above_threshold = false;       ///< angle > pi/3
};

struct RigidityReport {
  std::vector<std::size_t> minimal;  ///< indices of the minimal intermediates
  std::vector<PairAngle> pairs;
  bool hypotheses_met = false;       ///< B' cap A = C and A simple
  std::string note;
};

/// Pairwise angles among the minimal members of the family (members equal
/// to B are skipped). The pi/3 comparison is a diagnostic.
RigidityReport rigidity_report(const BasicConstruction& bc, const std::vector<NamedAlgebra>& intermediates);

}  // namespace cidx
