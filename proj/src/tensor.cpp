#include "cidx/tensor.hpp"

#include <cmath>

#include "cidx/errors.hpp"

namespace cidx {

namespace {

Mat matrix_unit(Index m, Index a, Index b) {
  Mat e = Mat::Zero(m, m);
  e(a, b) = 1.0;
  return e;
}

// e_00 and the cyclic shift generate M_m.
std::vector<Mat> matrix_generators(Index m) {
  Mat shift = Mat::Zero(m, m);
  for (Index k = 0; k < m; ++k) shift((k + 1) % m, k) = 1.0;
  return {matrix_unit(m, 0, 0), shift, shift.adjoint()};
}

}  // namespace

ConcreteAlgebra tensor_with_matrices(const ConcreteAlgebra& c, Index m) {
  const Index n = c.size();
  std::vector<Mat> elems;
  for (const auto& x : c.elements())
    for (Index a = 0; a < m; ++a)
      for (Index b = 0; b < m; ++b) elems.push_back(kron(x, matrix_unit(m, a, b)));
  std::vector<Mat> gens;
  for (const auto& g : c.generating_set()) gens.push_back(kron(g, Mat::Identity(m, m)));
  for (const auto& g : matrix_generators(m)) gens.push_back(kron(Mat::Identity(n, n), g));
  return ConcreteAlgebra::span(n * m, elems, std::move(gens));
}

TensorInstance tensor_inclusion(const UnitalInclusion& inc, const TraceFunctional& tau, Index m) {
  if (m < 2) throw Error(Errc::InvalidArgument, "tensoring needs m >= 2");
  if (inc.sup.dim() * m * m > kTensorGnsCap) throw Error(Errc::SizeCapExceeded, "tensored GNS space is too large");
  TensorInstance ti;
  ti.base = inc;
  ti.base_trace = tau;
  ti.m = m;
  ti.tensored = UnitalInclusion::make(tensor_with_matrices(inc.sub, m), tensor_with_matrices(inc.sup, m),
                                      inc.label.empty() ? std::string() : inc.label + " (x) M" + std::to_string(m));
  ti.trace = TraceFunctional(kron(tau.density(), Mat::Identity(m, m) / static_cast<double>(m)));

  const auto e = trace_preserving_expectation(inc.sup, inc.sub, tau);
  const auto et = trace_preserving_expectation(ti.tensored.sup, ti.tensored.sub, ti.trace);
  ti.base_index = watatani_index(e);
  ti.tensored_index = watatani_index(et);

  QuasiBasis fam;
  for (const auto& l : quasi_basis(e).elements) fam.elements.push_back(kron(l, Mat::Identity(m, m)));
  ti.quasi_basis_residual = reconstruction_residual(et, fam);
  Mat sum = Mat::Zero(inc.sup.size() * m, inc.sup.size() * m);
  for (const auto& f : fam.elements) sum += f * f.adjoint();
  ti.index_residual = spectral_norm(Mat(sum - kron(ti.base_index.element, Mat::Identity(m, m))));
  return ti;
}

ConcreteAlgebra detensor(const ConcreteAlgebra& mid, const TensorInstance& ti) {
  const auto& sup = ti.base.sup;
  const Index n = sup.size();
  const Index m = ti.m;
  if (mid.size() != n * m || !ti.tensored.sup.contains(mid, 1e-8) || !mid.contains(ti.tensored.sub, 1e-8))
    throw Error(Errc::NotIntermediate, "algebra is not between the tensored subalgebra and algebra");

  const Mat p = matrix_unit(m, 0, 0);
  const Mat& f = mid.frame();
  Mat outside(f.rows(), sup.dim());
  for (Index k = 0; k < sup.dim(); ++k) {
    const Vec v = vectorize(kron(sup.element(k), p));
    outside.col(k) = v - f * (f.adjoint() * v);
  }
  const Mat ns = null_space(outside, 1e-8, 1e-8 * std::sqrt(static_cast<double>(n)));
  std::vector<Mat> elems;
  for (Index j = 0; j < ns.cols(); ++j) elems.push_back(sup.from_coords(ns.col(j)));
  ConcreteAlgebra c = ConcreteAlgebra::span(n, elems);

  if (subspace_distance(tensor_with_matrices(c, m), mid) > 1e-8)
    throw Error(Errc::CorrespondenceViolation, "intermediate is not of the form C (x) M_m");
  return c;
}

TensorBasicCheck tensor_basic_check(const TensorInstance& ti) {
  const Index m = ti.m;
  const Index m2 = m * m;
  if (ti.base.sup.dim() * m2 > kTensorBasicGnsCap)
    throw Error(Errc::SizeCapExceeded, "tensored basic construction is too large");
  BasicConstructionOptions opt;
  opt.structural_check = false;
  const BasicConstruction bc(ti.base, ti.base_trace, opt);
  const BasicConstruction bt(ti.tensored, ti.trace, opt);

  // L^2(A (x) M_m) against L^2(A) (x) L^2(M_m): o_i (x) sqrt(m) e_kl sits at
  // position i m^2 + k m + l of the product basis.
  const Index ng = bc.gns().dim();
  const double root = std::sqrt(static_cast<double>(m));
  Mat u(bt.gns().dim(), ng * m2);
  for (Index i = 0; i < ng; ++i)
    for (Index k = 0; k < m; ++k)
      for (Index l = 0; l < m; ++l)
        u.col(i * m2 + k * m + l) = bt.gns().vector(kron(bc.gns().ons()[i], matrix_unit(m, k, l)) * root);

  TensorBasicCheck out;
  out.unitary_defect = (u.adjoint() * u - Mat::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();

  // M_m acts on L^2(M_m) by left multiplication: e_ab -> e_ab (x) 1_m.
  std::vector<Mat> prod;
  for (const auto& z : bc.a1().elements())
    for (Index a = 0; a < m; ++a)
      for (Index b = 0; b < m; ++b)
        prod.push_back(u * kron(z, kron(matrix_unit(m, a, b), Mat::Identity(m, m))) * u.adjoint());
  out.distance = subspace_distance(ConcreteAlgebra::span(bt.gns().dim(), prod), bt.a1());
  out.jones_difference =
      spectral_norm(Mat(bt.jones() - u * kron(bc.jones(), Mat::Identity(m2, m2)) * u.adjoint()));
  out.pass = out.distance <= 1e-7 && out.jones_difference <= 1e-7 && out.unitary_defect <= 1e-10;
  return out;
}

StabilityCheck stability_check(const UnitalInclusion& inc, const ConcreteAlgebra& c, const ConcreteAlgebra& d,
                               const TraceFunctional& tau, Index m) {
  return stability_check(tensor_inclusion(inc, tau, m), c, d);
}

StabilityCheck stability_check(const TensorInstance& ti, const ConcreteAlgebra& c, const ConcreteAlgebra& d) {
  return stability_check(stability_setup(ti), c, d);
}

StabilitySetup stability_setup(const TensorInstance& ti) {
  BasicConstructionOptions opt;
  opt.build_a1 = false;
  return {BasicConstruction(ti.base, ti.base_trace, opt), BasicConstruction(ti.tensored, ti.trace, opt), ti.m};
}

StabilityCheck stability_check(const StabilitySetup& s, const ConcreteAlgebra& c, const ConcreteAlgebra& d) {
  StabilityCheck out;
  out.base = angle(s.base, c, d);
  out.tensored = angle(s.tensored, tensor_with_matrices(c, s.m), tensor_with_matrices(d, s.m));
  out.difference = std::abs(out.base.angle - out.tensored.angle);
  return out;
}

}  // namespace cidx
