#pragma once

// Instance generators: C inside multi-matrix algebras, factor tensors,
// direct sums from inclusion matrices, diagonal masas and group-subgroup
// pairs, plus subgroup lattices of small finite groups.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cidx/angle.hpp"
#include "cidx/markov.hpp"

namespace cidx {

inline constexpr int kMaxGroupOrder = 24;

/// A finite group as a multiplication table on {0, ..., order-1}.
class FiniteGroupTable {
 public:
  FiniteGroupTable() = default;
  /// Checks closure, identity, inverses and associativity (every triple up
  /// to kMaxGroupOrder, a seeded sample beyond); InvalidArgument otherwise.
  static FiniteGroupTable from_table(std::string name, std::vector<std::vector<int>> mult);

  const std::string& name() const noexcept { return name_; }
  int order() const noexcept { return static_cast<int>(mult_.size()); }
  int identity() const noexcept { return identity_; }
  int mul(int a, int b) const { return mult_[a][b]; }
  int inverse(int a) const { return inverse_[a]; }
  const std::vector<std::vector<int>>& table() const noexcept { return mult_; }

 private:
  std::string name_;
  std::vector<std::vector<int>> mult_;
  std::vector<int> inverse_;
  int identity_ = 0;
};

FiniteGroupTable cyclic_group(int n);  ///< 1 <= n <= 12
/// Permutations of {0,1,2} composed right to left, ordered
/// e, (01), (02), (12), (012), (021).
FiniteGroupTable symmetric_group_3();
/// Permutations of {0,..,3} in lexicographic order, identity first.
FiniteGroupTable symmetric_group_4();
/// r^i s^j at index i + 4j.
FiniteGroupTable dihedral_group_4();
/// +-1, +-i, +-j, +-k at index unit + 4 * (sign < 0), units ordered 1, i, j, k.
FiniteGroupTable quaternion_group();
/// (a, b) at index a + 2b.
FiniteGroupTable klein_four_group();

/// Z1..Z12, S3, S4, D4, Q8, Z2xZ2; InvalidArgument for anything else.
FiniteGroupTable group_by_name(const std::string& name);
std::vector<std::string> builtin_group_names();

/// Sorted element indices.
using Subgroup = std::vector<int>;

bool is_subgroup(const FiniteGroupTable& g, const Subgroup& h);
Subgroup subgroup_generated(const FiniteGroupTable& g, const std::vector<int>& gens);
Subgroup subgroup_intersection(const Subgroup& k, const Subgroup& l);
std::string subgroup_label(const Subgroup& k);

struct SubgroupLattice {
  std::vector<Subgroup> members;      ///< ordered by size, then lexicographically
  std::vector<std::vector<bool>> leq; ///< leq[a][b]: members[a] inside members[b]
};

/// Every K with H <= K <= G. NotASubgroup if H is not one.
SubgroupLattice intermediate_subgroup_lattice(const FiniteGroupTable& g, const Subgroup& h);

/// Left-regular permutation matrices u_g e_h = e_{gh}.
std::vector<Mat> regular_representation(const FiniteGroupTable& g);
/// span{u_k : k in K} inside M_|G|, recorded with those generators.
ConcreteAlgebra group_algebra(const FiniteGroupTable& g, const Subgroup& k);

enum class InstanceKind { scalar, factor_tensor, direct_sum, diagonal, group_pair };

const char* to_string(InstanceKind kind) noexcept;
InstanceKind instance_kind_from_string(const std::string& s);

struct InstanceDescriptor {
  InstanceKind kind = InstanceKind::scalar;
  std::string label;
  DimensionVector dims;                 ///< scalar: sup blocks; direct_sum: sub blocks
  std::vector<std::vector<int>> lambda; ///< direct_sum: rows sub blocks, columns sup blocks
  int k = 1, m = 1;                     ///< factor_tensor
  int n = 1;                            ///< diagonal
  std::string group;                    ///< group_pair
  Subgroup subgroup;
  std::optional<double> expected_index; ///< closed-form scalar index, when known
};

struct Instance {
  InstanceDescriptor descriptor;
  UnitalInclusion inclusion;
  TraceFunctional trace;
  /// Named intermediates strictly above B (A itself included).
  std::vector<NamedAlgebra> intermediates;
};

/// C inside the sum of M_{n_j} with the Markov trace t_j = n_j / sum n_i^2.
Instance scalar_inclusion(const DimensionVector& n);
/// M_k (x) 1 inside M_k (x) M_m with the normalized trace; k, m >= 1, km <= 8.
Instance factor_tensor_inclusion(int k, int m);
/// sum_i M_{b_i} embedded with multiplicities lambda into sum_j M_{a_j},
/// a_j = sum_i lambda_ij b_i, with the Markov trace of lambda.
Instance direct_sum_inclusion(const DimensionVector& sub, const std::vector<std::vector<int>>& lambda);
/// Diagonal masa D_n inside M_n with the normalized trace.
Instance diagonal_inclusion(int n);
/// C[H] inside C[G] with tau(u_g) = delta_{g,e}; intermediates are the
/// group algebras of the subgroup lattice.
Instance group_algebra_inclusion(const FiniteGroupTable& g, const Subgroup& h);

Instance build_instance(const InstanceDescriptor& d);

/// The fixed suite of scalar, factor-tensor, direct-sum, diagonal and
/// group instances used by the property and acceptance runs.
std::vector<InstanceDescriptor> standard_suite();

}  // namespace cidx
