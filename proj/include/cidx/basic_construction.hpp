#pragma once

// GNS realization of (A, tau), Jones projections and the basic construction
// A_1 = span{x e_B y} together with its dual expectation.

#include <optional>
#include <vector>

#include "cidx/expectation.hpp"

namespace cidx {

/// L^2(A, tau) with a fixed orthonormal basis o_i; vectors are coordinate
/// columns xi_i = tau(o_i* x).
class GNSRealization {
 public:
  GNSRealization() = default;
  /// Loewdin-orthonormalized frame of a.
  GNSRealization(ConcreteAlgebra a, TraceFunctional tau);
  /// Uses the given tau-orthonormal basis of a.
  GNSRealization(ConcreteAlgebra a, TraceFunctional tau, std::vector<Mat> ons);

  const ConcreteAlgebra& algebra() const noexcept { return algebra_; }
  const TraceFunctional& trace() const noexcept { return trace_; }
  Index dim() const noexcept { return static_cast<Index>(ons_.size()); }
  const std::vector<Mat>& ons() const noexcept { return ons_; }

  Vec vector(const Mat& x) const;
  Mat element(const Vec& xi) const;
  /// Left multiplication L_a.
  Mat left(const Mat& a) const;
  /// Right multiplication R_b : x^ -> (x b)^.
  Mat right(const Mat& b) const;
  /// Largest deviation of <o_i, o_j> from the identity.
  double orthonormality_defect() const;

 private:
  void build();

  ConcreteAlgebra algebra_;
  TraceFunctional trace_;
  std::vector<Mat> ons_;
  Mat coeff_;  // rows vec(o_i h)^*
  Mat basis_;  // columns vec(o_i)
};

struct JonesProjection {
  Mat matrix;
  ConcreteAlgebra target;
};

JonesProjection jones_projection(const GNSRealization& g, const ConcreteAlgebra& s);

struct BasicConstructionOptions {
  bool build_a1 = true;        ///< false: only the pushdown form of E_1 is available
  bool structural_check = true;
  std::uint64_t seed = kDefaultSeed;
};

struct BasicConstructionChecks {
  double unit_residual = 0.0;        ///< || sum L_l e L_l* - 1 ||
  double span_dimension_gap = 0.0;   ///< dim a1 - dim span{L_x e L_y}
  double jones_commutation = 0.0;    ///< max || e L_b - L_b e || over B
  double jones_compression = 0.0;    ///< max || e L_a e - L_E(a) e ||
  double structural_distance = -1.0; ///< distance(a1, R_B'), -1 if not run
  double pushdown = 0.0;             ///< max || e z e - L_E(w(z)) e || over a1
};

/// Basic construction of B subset A over the tau-preserving expectation.
class BasicConstruction {
 public:
  BasicConstruction(const UnitalInclusion& inc, const TraceFunctional& tau, BasicConstructionOptions opt = {});

  const UnitalInclusion& inclusion() const noexcept { return inc_; }
  const GNSRealization& gns() const noexcept { return gns_; }
  const ConditionalExpectation& expectation() const noexcept { return e_; }
  const QuasiBasis& quasi() const noexcept { return qb_; }
  const IndexValue& index() const noexcept { return index_; }
  const Mat& jones() const noexcept { return jones_; }
  bool has_a1() const noexcept { return a1_.has_value(); }
  /// The basic construction as operators on the GNS space.
  const ConcreteAlgebra& a1() const;
  /// L_A inside the GNS operator space.
  const ConcreteAlgebra& left_a() const;
  const BasicConstructionChecks& checks() const noexcept { return checks_; }

  /// Max || [z, R_b] || over the generators of B, relative to ||z||.
  double a1_membership_defect(const Mat& z) const;
  /// E_1(z) as an element of A: Ind^-1 sum_i w_i l_i* with w_i = z(l_i^).
  Mat dual_element(const Mat& z) const;
  Mat dual(const Mat& z) const { return gns_.left(dual_element(z)); }

 private:
  UnitalInclusion inc_;
  GNSRealization gns_;
  ConditionalExpectation e_;
  QuasiBasis qb_;
  IndexValue index_;
  Mat index_inverse_;
  Mat jones_;
  std::vector<Mat> right_b_;
  std::optional<ConcreteAlgebra> a1_;
  std::optional<ConcreteAlgebra> left_a_;
  BasicConstructionChecks checks_;
};

struct DualExpectation {
  ConditionalExpectation map;  ///< a1 -> L_A
  double residual = 0.0;       ///< least-squares consistency residual
};

/// E_1 determined by E_1(L_x e L_y) = L_{Ind^-1 x y} and E_1 = id on L_A,
/// solved by least squares over that spanning set (InconsistentExtension
/// when the residual exceeds 1e-8).
DualExpectation dual_expectation(const BasicConstruction& bc);

struct DualIndexCheck {
  IndexValue original;
  IndexValue dual;
  double explicit_residual = 0.0;  ///< reconstruction residual of {L_l e Ind^1/2}
  double difference = 0.0;
  bool equal = false;
};

/// Ind_w(E_1) from a quasi-basis of the least-squares E_1, compared with
/// Ind_w(E). Requires a scalar index (IndexNotScalar otherwise).
DualIndexCheck dual_index_check(const BasicConstruction& bc, const DualExpectation& e1);

struct HigherCommutant {
  ConcreteAlgebra algebra;
  BlockStructure blocks;
};

/// B' cap A_1 with its Wedderburn data.
HigherCommutant higher_commutant(const BasicConstruction& bc);

}  // namespace cidx
