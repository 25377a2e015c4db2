#include "cidx/basic_construction.hpp"

#include <algorithm>

#include "cidx/errors.hpp"

namespace cidx {

GNSRealization::GNSRealization(ConcreteAlgebra a, TraceFunctional tau)
    : algebra_(std::move(a)), trace_(std::move(tau)) {
  const Mat gram = trace_gram(algebra_, trace_);
  const Mat w = hermitian_function(gram, [](double x) { return 1.0 / std::sqrt(x); }, 0.0);
  for (Index i = 0; i < algebra_.dim(); ++i) ons_.push_back(algebra_.from_coords(w.col(i)));
  build();
}

GNSRealization::GNSRealization(ConcreteAlgebra a, TraceFunctional tau, std::vector<Mat> ons)
    : algebra_(std::move(a)), trace_(std::move(tau)), ons_(std::move(ons)) {
  if (static_cast<Index>(ons_.size()) != algebra_.dim()) throw Error(Errc::InvalidArgument, "basis size differs from dimension");
  build();
  if (orthonormality_defect() > 1e-10) throw Error(Errc::InvalidArgument, "basis is not orthonormal for the trace");
}

void GNSRealization::build() {
  if (trace_.size() != algebra_.size()) throw Error(Errc::BlockMismatch, "trace does not match the algebra");
  const Index n2 = algebra_.size() * algebra_.size();
  coeff_.resize(dim(), n2);
  basis_.resize(n2, dim());
  for (Index i = 0; i < dim(); ++i) {
    coeff_.row(i) = vectorize(Mat(ons_[i] * trace_.density())).adjoint();
    basis_.col(i) = vectorize(ons_[i]);
  }
}

Vec GNSRealization::vector(const Mat& x) const { return coeff_ * vectorize(x); }

Mat GNSRealization::element(const Vec& xi) const { return unvectorize(Vec(basis_ * xi), algebra_.size()); }

Mat GNSRealization::left(const Mat& a) const {
  Mat cols(basis_.rows(), dim());
  for (Index i = 0; i < dim(); ++i) cols.col(i) = vectorize(Mat(a * ons_[i]));
  return coeff_ * cols;
}

Mat GNSRealization::right(const Mat& b) const {
  Mat cols(basis_.rows(), dim());
  for (Index i = 0; i < dim(); ++i) cols.col(i) = vectorize(Mat(ons_[i] * b));
  return coeff_ * cols;
}

double GNSRealization::orthonormality_defect() const {
  return (coeff_ * basis_ - Mat::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

JonesProjection jones_projection(const GNSRealization& g, const ConcreteAlgebra& s) {
  if (!g.algebra().contains(s, 1e-8)) throw Error(Errc::NotSubalgebra, "Jones projection target is not in the algebra");
  Mat cols(g.dim(), s.dim());
  for (Index k = 0; k < s.dim(); ++k) cols.col(k) = g.vector(s.element(k));
  const Mat q = orthonormal_columns(cols);
  return JonesProjection{q * q.adjoint(), s};
}

namespace {

ConcreteAlgebra generated_by(Index n, std::vector<Mat> gens) { return ConcreteAlgebra(n, Mat(n * n, 0), std::move(gens)); }

}  // namespace

BasicConstruction::BasicConstruction(const UnitalInclusion& inc, const TraceFunctional& tau, BasicConstructionOptions opt)
    : inc_(inc), gns_(inc.sup, tau) {
  e_ = trace_preserving_expectation(inc.sup, inc.sub, tau);
  qb_ = quasi_basis(e_);
  index_ = watatani_index(e_);
  index_inverse_ = index_.element.llt().solve(Mat::Identity(inc.sup.size(), inc.sup.size()));
  jones_ = jones_projection(gns_, inc.sub).matrix;
  for (const auto& b : inc.sub.generating_set()) right_b_.push_back(gns_.right(b));

  const Index ng = gns_.dim();
  Mat unit = Mat::Zero(ng, ng);
  for (const auto& l : qb_.elements) {
    const Mat ll = gns_.left(l);
    unit += ll * jones_ * ll.adjoint();
  }
  checks_.unit_residual = spectral_norm(Mat(unit - Mat::Identity(ng, ng)));
  for (Index k = 0; k < inc.sub.dim(); ++k) {
    const Mat lb = gns_.left(inc.sub.element(k));
    checks_.jones_commutation = std::max(checks_.jones_commutation, spectral_norm(Mat(jones_ * lb - lb * jones_)));
  }
  for (Index k = 0; k < inc.sup.dim(); ++k) {
    const Mat a = inc.sup.element(k);
    const Mat d = jones_ * gns_.left(a) * jones_ - gns_.left(e_(a)) * jones_;
    checks_.jones_compression = std::max(checks_.jones_compression, spectral_norm(d));
  }
  if (!opt.build_a1) return;

  std::vector<Mat> lefts;
  for (Index k = 0; k < inc.sup.dim(); ++k) lefts.push_back(gns_.left(inc.sup.element(k)));
  left_a_ = ConcreteAlgebra::span(ng, lefts);
  // A random element of A and e_B generate A_1 generically; fall back to
  // the full set of left multiplications when they do not.
  std::mt19937_64 rng(opt.seed);
  ConcreteAlgebra a1 = subalgebra_from_generators(ng, {gns_.left(inc.sup.random_element(rng)), jones_});
  if (!a1.contains(*left_a_, 1e-8)) {
    auto gens = lefts;
    gens.push_back(jones_);
    a1 = subalgebra_from_generators(ng, gens);
  }
  a1_ = std::move(a1);

  OrthonormalSpan<Complex> span(ng * ng, a1_->dim());
  for (std::size_t x = 0; x < lefts.size() && span.size() < a1_->dim(); ++x)
    for (std::size_t y = 0; y < lefts.size() && span.size() < a1_->dim(); ++y)
      span.add(vectorize(Mat(lefts[x] * jones_ * lefts[y])), 1e-8, 1.0);
  checks_.span_dimension_gap = static_cast<double>(a1_->dim() - span.size());

  if (opt.structural_check) {
    const auto comm = relative_commutant(generated_by(ng, right_b_), full_matrix_algebra(ng));
    checks_.structural_distance = subspace_distance(*a1_, comm);
  }
  const Vec one = gns_.vector(Mat::Identity(inc.sup.size(), inc.sup.size()));
  for (Index k = 0; k < a1_->dim(); ++k) {
    const Mat z = a1_->element(k);
    const Mat w = gns_.element(z * one);
    const Mat d = jones_ * z * jones_ - gns_.left(e_(w)) * jones_;
    checks_.pushdown = std::max(checks_.pushdown, spectral_norm(d) / std::max(1.0, spectral_norm(z)));
  }
}

const ConcreteAlgebra& BasicConstruction::a1() const {
  if (!a1_) throw Error(Errc::InvalidArgument, "basic construction was built without A_1");
  return *a1_;
}

const ConcreteAlgebra& BasicConstruction::left_a() const {
  if (!left_a_) throw Error(Errc::InvalidArgument, "basic construction was built without A_1");
  return *left_a_;
}

double BasicConstruction::a1_membership_defect(const Mat& z) const {
  const double zn = std::max(1e-300, spectral_norm(z));
  double worst = 0.0;
  for (const auto& r : right_b_) worst = std::max(worst, spectral_norm(Mat(z * r - r * z)) / (zn * std::max(1.0, spectral_norm(r))));
  return worst;
}

Mat BasicConstruction::dual_element(const Mat& z) const {
  const Index n = inc_.sup.size();
  Mat acc = Mat::Zero(n, n);
  for (const auto& l : qb_.elements) acc += gns_.element(z * gns_.vector(l)) * l.adjoint();
  return index_inverse_ * acc;
}

DualExpectation dual_expectation(const BasicConstruction& bc) {
  const auto& a1 = bc.a1();
  const auto& la = bc.left_a();
  const auto& g = bc.gns();
  const auto basis = bc.inclusion().sup.elements();
  std::vector<Mat> lefts;
  for (const auto& x : basis) lefts.push_back(g.left(x));
  const auto k = static_cast<Index>(basis.size() * basis.size() + basis.size());
  Mat c(a1.dim(), k), r(la.dim(), k);
  Index col = 0;
  const Mat ind_inv = bc.index().element.llt().solve(Mat::Identity(basis[0].rows(), basis[0].cols()));
  for (std::size_t x = 0; x < basis.size(); ++x)
    for (std::size_t y = 0; y < basis.size(); ++y, ++col) {
      c.col(col) = a1.coords(Mat(lefts[x] * bc.jones() * lefts[y]));
      r.col(col) = la.coords(g.left(Mat(ind_inv * basis[x] * basis[y])));
    }
  for (std::size_t x = 0; x < basis.size(); ++x, ++col) {
    c.col(col) = a1.coords(lefts[x]);
    r.col(col) = la.coords(lefts[x]);
  }
  // M C = R in the least-squares sense, solved as C* M* = R*.
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(c.adjoint());
  cod.setThreshold(1e-10);
  const Mat mt = cod.solve(r.adjoint());
  Mat m = mt.adjoint();
  DualExpectation out;
  out.residual = (m * c - r).norm() / std::max(1.0, r.norm());
  if (out.residual > 1e-8) throw Error(Errc::InconsistentExtension, "dual expectation is not well defined");
  out.map = ConditionalExpectation{a1, la, std::move(m), std::nullopt};
  return out;
}

DualIndexCheck dual_index_check(const BasicConstruction& bc, const DualExpectation& e1) {
  DualIndexCheck out;
  out.original = bc.index();
  if (!out.original.scalar) throw Error(Errc::IndexNotScalar, "dual index check needs a scalar index");
  out.dual = watatani_index(e1.map);
  QuasiBasis fam;
  const double root = std::sqrt(out.original.value);
  for (const auto& l : bc.quasi().elements) fam.elements.push_back(bc.gns().left(l) * bc.jones() * root);
  out.explicit_residual = reconstruction_residual(e1.map, fam);
  out.difference = std::abs(out.dual.value - out.original.value);
  out.equal = out.dual.scalar && out.difference <= 1e-7;
  return out;
}

HigherCommutant higher_commutant(const BasicConstruction& bc) {
  std::vector<Mat> gens;
  for (const auto& b : bc.inclusion().sub.generating_set()) gens.push_back(bc.gns().left(b));
  const Index ng = bc.gns().dim();
  auto alg = relative_commutant(ConcreteAlgebra(ng, Mat(ng * ng, 0), gens), bc.a1());
  auto blocks = block_structure(alg);
  return HigherCommutant{std::move(alg), std::move(blocks)};
}

}  // namespace cidx
