#pragma once

// Dense linear-algebra helpers shared by every module. All routines are
// templated on the Eigen expression type so they work for real and complex
// scalars alike; the algebra code itself only instantiates complex<double>.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace cidx {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Column-stacking vectorization.
template <typename Derived>
VectorX<typename Derived::Scalar> vectorize(const Eigen::MatrixBase<Derived>& m) {
  MatrixX<typename Derived::Scalar> tmp = m;
  return Eigen::Map<const VectorX<typename Derived::Scalar>>(tmp.data(), tmp.size());
}

template <typename Derived>
MatrixX<typename Derived::Scalar> unvectorize(const Eigen::MatrixBase<Derived>& v, Index rows) {
  VectorX<typename Derived::Scalar> tmp = v;
  return Eigen::Map<const MatrixX<typename Derived::Scalar>>(tmp.data(), rows, tmp.size() / rows);
}

/// Largest singular value.
template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  using M = MatrixX<typename Derived::Scalar>;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  // For tall/wide inputs work with the smaller Gram matrix.
  M g = m.rows() >= m.cols() ? M(m.adjoint() * m) : M(m * m.adjoint());
  g = (g + g.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<M> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// ||a - a*|| relative to max(1, ||a||).
template <typename Derived>
double hermitian_defect(const Eigen::MatrixBase<Derived>& a) {
  const double scale = std::max(1.0, spectral_norm(a));
  return spectral_norm(a - a.adjoint()) / scale;
}

/// Orthonormal basis of the null space. Singular values at or below
/// max(rel_tol * largest, abs_tol) count as zero.
template <typename Derived>
MatrixX<typename Derived::Scalar> null_space(const Eigen::MatrixBase<Derived>& m, double rel_tol = 1e-8,
                                             double abs_tol = 0.0) {
  using M = MatrixX<typename Derived::Scalar>;
  const Index cols = m.cols();
  if (cols == 0) return M(0, 0);
  M r;
  if (m.rows() > cols) {
    Eigen::HouseholderQR<M> qr(m);
    r = qr.matrixQR().topRows(cols).template triangularView<Eigen::Upper>();
  } else {
    r = m;
  }
  if (r.rows() == 0) return M::Identity(cols, cols);
  double cut = abs_tol;
  const auto pick = [&](const auto& svd) -> M {
    const auto& s = svd.singularValues();
    cut = std::max(abs_tol, rel_tol * (s.size() > 0 ? s(0) : 0.0));
    Index rank = 0;
    for (Index i = 0; i < s.size(); ++i)
      if (s(i) > cut) ++rank;
    return svd.matrixV().rightCols(cols - rank);
  };
  // Eigen 3.4.0's divide-and-conquer SVD can misorder V under heavy
  // deflation (many equal singular values); verify and redo with Jacobi.
  M ns = pick(Eigen::BDCSVD<M>(r, Eigen::ComputeFullV));
  if (ns.cols() > 0 && (r * ns).norm() > 10.0 * std::max(cut, 1e-300) * std::sqrt(double(ns.cols())))
    ns = pick(Eigen::JacobiSVD<M>(r, Eigen::ComputeFullV));
  return ns;
}

/// Incrementally grown orthonormal frame (Gram-Schmidt with one full
/// re-orthogonalization pass).
template <typename Scalar>
class OrthonormalSpan {
 public:
  using Vector = VectorX<Scalar>;
  using Matrix = MatrixX<Scalar>;

  explicit OrthonormalSpan(Index ambient_dim, Index capacity = 8)
      : q_(ambient_dim, std::max<Index>(capacity, 1)) {}

  Index ambient_dim() const noexcept { return q_.rows(); }
  Index size() const noexcept { return size_; }
  auto basis() const { return q_.leftCols(size_); }

  Vector residual(const Vector& v) const {
    Vector r = v;
    if (size_ == 0) return r;
    for (int pass = 0; pass < 2; ++pass) {
      const Vector c = q_.leftCols(size_).adjoint() * r;
      r.noalias() -= q_.leftCols(size_) * c;
    }
    return r;
  }

  /// Adds v if its residual exceeds rel_tol * max(|v|, scale). Returns
  /// whether a new direction was appended.
  bool add(const Vector& v, double rel_tol = 1e-8, double scale = 0.0) {
    const double vn = v.norm();
    const double ref = std::max(vn, scale);
    if (ref == 0.0 || size_ >= q_.rows()) return false;
    Vector r = residual(v);
    const double rn = r.norm();
    if (rn <= rel_tol * ref) return false;
    if (size_ == q_.cols()) {
      q_.conservativeResize(Eigen::NoChange, std::min<Index>(q_.rows(), 2 * q_.cols()));
    }
    q_.col(size_++) = r / rn;
    return true;
  }

  Matrix matrix() const { return q_.leftCols(size_); }

 private:
  Matrix q_;
  Index size_ = 0;
};

/// Orthonormal basis for the column span of m.
template <typename Derived>
MatrixX<typename Derived::Scalar> orthonormal_columns(const Eigen::MatrixBase<Derived>& m, double rel_tol = 1e-8) {
  OrthonormalSpan<typename Derived::Scalar> span(m.rows(), std::max<Index>(1, std::min(m.rows(), m.cols())));
  double scale = 0.0;
  for (Index j = 0; j < m.cols(); ++j) scale = std::max(scale, m.col(j).norm());
  for (Index j = 0; j < m.cols(); ++j) span.add(m.col(j), rel_tol, scale);
  return span.matrix();
}

/// Largest principal-angle sine between the column spans of two
/// orthonormal frames; 1 when the dimensions differ.
template <typename DA, typename DB>
double frame_distance(const Eigen::MatrixBase<DA>& qa, const Eigen::MatrixBase<DB>& qb) {
  if (qa.cols() != qb.cols()) return 1.0;
  if (qa.cols() == 0) return 0.0;
  using M = MatrixX<typename DA::Scalar>;
  const M ra = qb - qa * (qa.adjoint() * qb);
  const M rb = qa - qb * (qb.adjoint() * qa);
  return std::max(spectral_norm(ra), spectral_norm(rb));
}

/// f(h) for Hermitian h via its eigendecomposition; eigenvalues at or below
/// cut * max|eigenvalue| are treated as zero and mapped to zero.
template <typename Derived, typename F>
MatrixX<typename Derived::Scalar> hermitian_function(const Eigen::MatrixBase<Derived>& h, F&& f, double cut = 1e-12) {
  using M = MatrixX<typename Derived::Scalar>;
  M herm = (h + h.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<M> es(herm);
  const auto& ev = es.eigenvalues();
  const double emax = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  Eigen::VectorXd fv(ev.size());
  for (Index i = 0; i < ev.size(); ++i) fv(i) = ev(i) > cut * emax ? f(ev(i)) : 0.0;
  return es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().adjoint();
}

/// Groups sorted values into clusters separated by gaps larger than tol.
inline std::vector<std::vector<Index>> cluster_sorted(const Eigen::VectorXd& sorted, double tol) {
  std::vector<std::vector<Index>> clusters;
  for (Index i = 0; i < sorted.size(); ++i) {
    if (clusters.empty() || sorted(i) - sorted(clusters.back().back()) > tol) clusters.emplace_back();
    clusters.back().push_back(i);
  }
  return clusters;
}

/// Kronecker product a (x) b.
template <typename DA, typename DB>
MatrixX<typename DA::Scalar> kron(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  MatrixX<typename DA::Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Matrix with i.i.d. standard complex Gaussian entries.
template <typename Rng>
Mat random_complex(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

}  // namespace cidx
