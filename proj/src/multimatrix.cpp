#include "cidx/multimatrix.hpp"

#include <numeric>
#include <sstream>

#include "cidx/errors.hpp"

namespace cidx {

DimensionVector::DimensionVector(std::initializer_list<int> dims) : DimensionVector(std::vector<int>(dims)) {}

DimensionVector::DimensionVector(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw Error(Errc::InvalidArgument, "dimension vector must be non-empty");
  for (int d : dims_)
    if (d < 1) throw Error(Errc::InvalidArgument, "block sizes must be positive, got " + std::to_string(d));
}

int DimensionVector::total() const noexcept { return std::accumulate(dims_.begin(), dims_.end(), 0); }

int DimensionVector::linear_dim() const noexcept {
  int s = 0;
  for (int d : dims_) s += d * d;
  return s;
}

int DimensionVector::min() const noexcept { return dims_.empty() ? 0 : *std::min_element(dims_.begin(), dims_.end()); }

std::string DimensionVector::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t j = 0; j < dims_.size(); ++j) os << (j ? "," : "") << dims_[j];
  os << ')';
  return os.str();
}

AmbientAlgebra::AmbientAlgebra(DimensionVector dims) : dims_(std::move(dims)) {
  for (int d : dims_) {
    offsets_.push_back(size_);
    size_ += d;
  }
}

Mat AmbientAlgebra::matrix_unit(std::size_t block, Index i, Index j) const {
  const Index n = dims_[block];
  if (i < 0 || j < 0 || i >= n || j >= n) throw Error(Errc::InvalidArgument, "matrix unit index out of range");
  Mat m = Mat::Zero(size_, size_);
  m(offsets_[block] + i, offsets_[block] + j) = 1.0;
  return m;
}

Mat AmbientAlgebra::embed(std::size_t block, const Mat& x) const {
  const Index n = dims_[block];
  if (x.rows() != n || x.cols() != n) throw Error(Errc::ShapeMismatch, "block embed size");
  Mat m = Mat::Zero(size_, size_);
  m.block(offsets_[block], offsets_[block], n, n) = x;
  return m;
}

Mat AmbientAlgebra::block(const Mat& a, std::size_t block) const {
  if (a.rows() != size_ || a.cols() != size_) throw Error(Errc::ShapeMismatch, "element size");
  const Index n = dims_[block];
  return a.block(offsets_[block], offsets_[block], n, n);
}

bool AmbientAlgebra::supports(const Mat& a, double tol) const {
  if (a.rows() != size_ || a.cols() != size_) return false;
  Mat off = a;
  for (std::size_t j = 0; j < dims_.size(); ++j) {
    const Index n = dims_[j];
    off.block(offsets_[j], offsets_[j], n, n).setZero();
  }
  return off.cwiseAbs().maxCoeff() <= tol * std::max(1.0, a.cwiseAbs().maxCoeff());
}

TraceFunctional::TraceFunctional(Mat density, std::vector<double> weights, std::vector<Rational> exact_weights)
    : density_(std::move(density)), weights_(std::move(weights)), exact_(std::move(exact_weights)) {
  if (density_.rows() != density_.cols()) throw Error(Errc::ShapeMismatch, "trace density must be square");
  if (hermitian_defect(density_) > 1e-12) throw Error(Errc::InvalidArgument, "trace density must be Hermitian");
}

TraceFunctional TraceFunctional::from_block_weights(const AmbientAlgebra& ambient, const std::vector<double>& weights) {
  const auto& dims = ambient.dims();
  if (weights.size() != dims.size()) throw Error(Errc::BlockMismatch, "one weight per block required");
  double total = 0.0;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    if (!(weights[j] > 0.0)) throw Error(Errc::TraceNotFaithful, "block weights must be positive");
    total += dims[j] * weights[j];
  }
  if (std::abs(total - 1.0) > 1e-10) throw Error(Errc::InvalidArgument, "weights must satisfy sum n_j t_j = 1");
  Mat h = Mat::Zero(ambient.size(), ambient.size());
  for (std::size_t j = 0; j < dims.size(); ++j)
    h.block(ambient.offset(j), ambient.offset(j), dims[j], dims[j]).diagonal().setConstant(weights[j]);
  return TraceFunctional(std::move(h), weights);
}

TraceFunctional TraceFunctional::from_block_weights(const AmbientAlgebra& ambient,
                                                    const std::vector<Rational>& weights) {
  const auto& dims = ambient.dims();
  if (weights.size() != dims.size()) throw Error(Errc::BlockMismatch, "one weight per block required");
  Rational total(0);
  std::vector<double> approx;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    total = total + Rational(dims[j]) * weights[j];
    approx.push_back(weights[j].to_double());
  }
  if (!(total == Rational(1))) throw Error(Errc::InvalidArgument, "weights must satisfy sum n_j t_j = 1 exactly");
  TraceFunctional t = from_block_weights(ambient, approx);
  t.exact_ = weights;
  return t;
}

TraceFunctional TraceFunctional::normalized(Index n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "trace size");
  return TraceFunctional(Mat::Identity(n, n) / static_cast<double>(n));
}

Complex TraceFunctional::operator()(const Mat& a) const {
  if (a.rows() != density_.rows() || a.cols() != density_.cols())
    throw Error(Errc::BlockMismatch, "element does not match trace size");
  return (density_.transpose().cwiseProduct(a)).sum();
}

Mat product(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows() || a.rows() != a.cols() || b.rows() != b.cols())
    throw Error(Errc::ShapeMismatch, "product of incompatible elements");
  return a * b;
}

Mat product(const AmbientAlgebra& ambient, const Mat& a, const Mat& b) {
  if (!ambient.supports(a) || !ambient.supports(b)) throw Error(Errc::BlockMismatch, "element outside ambient blocks");
  return product(a, b);
}

Mat adjoint(const Mat& a) { return a.adjoint(); }

double operator_norm(const Mat& a) { return spectral_norm(a); }

bool is_positive(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = std::max(1.0, spectral_norm(a));
  if (spectral_norm(a - a.adjoint()) > tol * scale) return false;
  Mat h = (a + a.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

Complex apply_trace(const TraceFunctional& tau, const Mat& a) { return tau(a); }

}  // namespace cidx
