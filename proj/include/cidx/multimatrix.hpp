#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cidx/linalg.hpp"
#include "cidx/rational.hpp"

namespace cidx {

/// Block sizes (n_1, ..., n_k) of a multi-matrix algebra.
class DimensionVector {
 public:
  DimensionVector() = default;
  DimensionVector(std::initializer_list<int> dims);
  explicit DimensionVector(std::vector<int> dims);

  std::size_t size() const noexcept { return dims_.size(); }
  int operator[](std::size_t j) const { return dims_[j]; }
  auto begin() const noexcept { return dims_.begin(); }
  auto end() const noexcept { return dims_.end(); }
  const std::vector<int>& values() const noexcept { return dims_; }

  /// Ambient matrix size, sum of n_j.
  int total() const noexcept;
  /// Linear dimension, sum of n_j^2.
  int linear_dim() const noexcept;
  int min() const noexcept;
  std::string to_string() const;

  friend bool operator==(const DimensionVector&, const DimensionVector&) = default;

 private:
  std::vector<int> dims_;
};

/// The block-diagonal algebra of direct-sum matrices, realized inside M_N.
class AmbientAlgebra {
 public:
  explicit AmbientAlgebra(DimensionVector dims);

  const DimensionVector& dims() const noexcept { return dims_; }
  Index size() const noexcept { return size_; }
  Index offset(std::size_t block) const { return offsets_.at(block); }

  Mat identity() const { return Mat::Identity(size_, size_); }
  Mat matrix_unit(std::size_t block, Index i, Index j) const;
  /// Places x into the given block, zeros elsewhere.
  Mat embed(std::size_t block, const Mat& x) const;
  Mat block(const Mat& a, std::size_t block) const;
  bool supports(const Mat& a, double tol = 1e-12) const;

 private:
  DimensionVector dims_;
  std::vector<Index> offsets_;
  Index size_ = 0;
};

/// Faithful tracial state tau(x) = Tr(density * x).
///
/// Block weights are the values on minimal projections of each block of the
/// algebra the trace was built for; they are kept for reporting only.
class TraceFunctional {
 public:
  TraceFunctional() = default;
  explicit TraceFunctional(Mat density, std::vector<double> weights = {},
                           std::vector<Rational> exact_weights = {});

  /// Trace on the ambient block-diagonal algebra with value t_j on each
  /// minimal projection of block j. Requires faithfulness and sum n_j t_j = 1.
  static TraceFunctional from_block_weights(const AmbientAlgebra& ambient, const std::vector<double>& weights);
  static TraceFunctional from_block_weights(const AmbientAlgebra& ambient, const std::vector<Rational>& weights);
  /// Normalized matrix trace on M_n.
  static TraceFunctional normalized(Index n);

  Complex operator()(const Mat& a) const;
  const Mat& density() const noexcept { return density_; }
  Index size() const noexcept { return density_.rows(); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<Rational>& exact_weights() const noexcept { return exact_; }

 private:
  Mat density_;
  std::vector<double> weights_;
  std::vector<Rational> exact_;
};

Mat product(const Mat& a, const Mat& b);
/// Product inside a block-diagonal ambient; checks block support.
Mat product(const AmbientAlgebra& ambient, const Mat& a, const Mat& b);
Mat adjoint(const Mat& a);
double operator_norm(const Mat& a);
bool is_positive(const Mat& a, double tol = 1e-10);
Complex apply_trace(const TraceFunctional& tau, const Mat& a);

}  // namespace cidx
