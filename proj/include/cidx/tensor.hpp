#pragma once

// Tensoring an inclusion by M_m, the de-tensoring correspondence for
// intermediates, and stability of basic constructions and angles.

#include "cidx/angle.hpp"

namespace cidx {

inline constexpr Index kTensorGnsCap = 4096;      ///< largest tensored GNS dimension
inline constexpr Index kTensorBasicGnsCap = 36;   ///< same, for building the tensored A_1

struct TensorInstance {
  UnitalInclusion base;
  TraceFunctional base_trace;
  Index m = 0;
  UnitalInclusion tensored;  ///< B (x) M_m inside A (x) M_m
  TraceFunctional trace;     ///< tau (x) tr_m
  IndexValue base_index;
  IndexValue tensored_index;
  double quasi_basis_residual = 0.0;  ///< reconstruction residual of {l_i (x) 1}
  double index_residual = 0.0;        ///< || sum over that family - Ind (x) 1 ||
};

/// x (x) M_m as a subalgebra of M_{nm}.
ConcreteAlgebra tensor_with_matrices(const ConcreteAlgebra& c, Index m);

/// m >= 2; SizeCapExceeded beyond kTensorGnsCap.
TensorInstance tensor_inclusion(const UnitalInclusion& inc, const TraceFunctional& tau, Index m);

/// C = {a in A : a (x) e_00 in M}; CorrespondenceViolation unless M = C (x) M_m.
ConcreteAlgebra detensor(const ConcreteAlgebra& m, const TensorInstance& ti);

struct TensorBasicCheck {
  double distance = 0.0;        ///< tensored A_1 against A_1 (x) M_m
  double jones_difference = 0.0;
  double unitary_defect = 0.0;  ///< of the identification L^2(A (x) M_m) = L^2(A) (x) L^2(M_m)
  bool pass = false;
};

/// SizeCapExceeded beyond kTensorBasicGnsCap.
TensorBasicCheck tensor_basic_check(const TensorInstance& ti);

struct StabilityCheck {
  AngleReport base;
  AngleReport tensored;
  double difference = 0.0;
};

StabilityCheck stability_check(const UnitalInclusion& inc, const ConcreteAlgebra& c, const ConcreteAlgebra& d,
                               const TraceFunctional& tau, Index m);
StabilityCheck stability_check(const TensorInstance& ti, const ConcreteAlgebra& c, const ConcreteAlgebra& d);

/// Both basic constructions (without A_1), built once and shared across pairs.
struct StabilitySetup {
  BasicConstruction base;
  BasicConstruction tensored;
  Index m = 0;
};

StabilitySetup stability_setup(const TensorInstance& ti);
StabilityCheck stability_check(const StabilitySetup& s, const ConcreteAlgebra& c, const ConcreteAlgebra& d);

}  // namespace cidx
