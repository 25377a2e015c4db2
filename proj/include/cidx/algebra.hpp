#pragma once

// Concrete unital *-subalgebras of M_N, the lattice operations on them,
// relative commutants, Wedderburn block structure and inclusion matrices.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cidx/linalg.hpp"
#include "cidx/multimatrix.hpp"

namespace cidx {

inline constexpr std::uint64_t kDefaultSeed = 0x5eed'2024ULL;

/// A *-closed subspace of M_N stored as an orthonormal frame of
/// vectorized matrices (N^2 x d, Frobenius-orthonormal columns). The
/// element basis is the same frame scaled by sqrt(N), i.e. orthonormal for
/// the normalized Hilbert-Schmidt product tr(x* y) / N.
class ConcreteAlgebra {
 public:
  ConcreteAlgebra() = default;
  ConcreteAlgebra(Index n, Mat frame, std::vector<Mat> generators = {});

  /// Orthonormalized linear span; no closure is performed.
  static ConcreteAlgebra span(Index n, const std::vector<Mat>& elements, std::vector<Mat> generators = {});

  Index size() const noexcept { return n_; }
  Index dim() const noexcept { return frame_.cols(); }
  const Mat& frame() const noexcept { return frame_; }

  Mat element(Index k) const;
  std::vector<Mat> elements() const;
  Vec coords(const Mat& x) const;
  Mat from_coords(const Vec& c) const;
  Mat project(const Mat& x) const;
  /// ||x - P x||_F / max(1, ||x||_F).
  double residual(const Mat& x) const;
  bool contains(const Mat& x, double tol = 1e-9) const;
  bool contains(const ConcreteAlgebra& other, double tol = 1e-9) const;
  bool has_unit(double tol = 1e-9) const;

  /// Explicit generating set recorded at construction (may be empty).
  const std::vector<Mat>& generators() const noexcept { return generators_; }
  /// Recorded generators, or the full basis when none were recorded.
  std::vector<Mat> generating_set() const;

  Mat random_element(std::mt19937_64& rng) const;

  /// Largest residual of projecting products of basis pairs back onto the
  /// span; all pairs when dim^2 <= max_pairs, otherwise a seeded sample.
  double closure_residual(std::size_t max_pairs = 4096, std::uint64_t seed = kDefaultSeed) const;
  double adjoint_residual() const;

 private:
  Index n_ = 0;
  Mat frame_;
  std::vector<Mat> generators_;
};

ConcreteAlgebra full_algebra(const AmbientAlgebra& ambient);
ConcreteAlgebra full_matrix_algebra(Index n);
ConcreteAlgebra scalar_algebra(Index n);

/// Smallest unital *-subalgebra containing the generators.
ConcreteAlgebra subalgebra_from_generators(Index n, const std::vector<Mat>& generators);
ConcreteAlgebra intersect(const ConcreteAlgebra& c, const ConcreteAlgebra& d);
/// C v D = C*(C, D).
ConcreteAlgebra join(const ConcreteAlgebra& c, const ConcreteAlgebra& d);
/// {x in T : xs = sx for all s in S}.
ConcreteAlgebra relative_commutant(const ConcreteAlgebra& s, const ConcreteAlgebra& t);
ConcreteAlgebra center(const ConcreteAlgebra& s);

/// Largest principal-angle sine between the two subspaces (1 if dims differ).
double subspace_distance(const ConcreteAlgebra& a, const ConcreteAlgebra& b);

/// Artin-Wedderburn data: S = U (sum_j M_{n_j} (x) 1_{m_j}) U*.
///
/// Columns of `unitary` are grouped by block; inside block j the column
/// index is offset_j + i * m_j + a, so U_j* s U_j = kron(s_j, 1_{m_j}).
struct BlockStructure {
  DimensionVector dims;
  std::vector<int> multiplicities;
  Mat unitary;
  std::vector<Mat> central_projections;
  std::vector<Index> offsets;

  std::size_t blocks() const noexcept { return dims.size(); }
  Mat block_columns(std::size_t j) const;
  /// U_j (e_ab (x) 1) U_j*.
  Mat matrix_unit(std::size_t j, Index a, Index b) const;
  Mat minimal_projection(std::size_t j) const { return matrix_unit(j, 0, 0); }
  /// The n_j x n_j factor of x in block j.
  Mat compress(std::size_t j, const Mat& x) const;
  /// Inverse of compress over all blocks.
  Mat assemble(const std::vector<Mat>& factors) const;
};

BlockStructure block_structure(const ConcreteAlgebra& s, std::uint64_t seed = kDefaultSeed);

/// Trace with value weights[j] on a minimal projection of block j.
TraceFunctional trace_from_block_weights(const BlockStructure& blocks, const std::vector<double>& weights);
/// tau(minimal projection of block j) for each block.
std::vector<double> block_weights(const TraceFunctional& tau, const BlockStructure& blocks);

/// B subset A with a common unit.
struct UnitalInclusion {
  ConcreteAlgebra sub;
  ConcreteAlgebra sup;
  std::string label;

  static UnitalInclusion make(ConcreteAlgebra sub, ConcreteAlgebra sup, std::string label = {});
};

struct InclusionMatrixData {
  Eigen::MatrixXi lambda;  ///< rows: sub blocks, columns: sup blocks
  DimensionVector sub_dims;
  DimensionVector sup_dims;
};

InclusionMatrixData inclusion_matrix(const UnitalInclusion& inc);
InclusionMatrixData inclusion_matrix(const BlockStructure& sub, const BlockStructure& sup);

}  // namespace cidx
