#include "cidx/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cidx/errors.hpp"

namespace cidx {

MarkovData markov_trace(const InclusionMatrixData& lambda) {
  const Eigen::MatrixXi& l = lambda.lambda;
  if (l.size() == 0) throw Error(Errc::InvalidArgument, "empty inclusion matrix");
  if (l.minCoeff() < 0) throw Error(Errc::InvalidArgument, "negative inclusion multiplicity");
  for (Index i = 0; i < l.rows(); ++i)
    if (l.row(i).sum() == 0) throw Error(Errc::InvalidArgument, "inclusion matrix has a zero row");
  for (Index j = 0; j < l.cols(); ++j)
    if (l.col(j).sum() == 0) throw Error(Errc::InvalidArgument, "inclusion matrix has a zero column");

  const Eigen::MatrixXd ld = l.cast<double>();
  const Eigen::MatrixXd k = ld.transpose() * ld;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  const auto& ev = es.eigenvalues();
  const Index top = ev.size() - 1;
  MarkovData out;
  out.lambda = lambda;
  out.alpha = ev(top);
  if (top > 0 && out.alpha - ev(top - 1) <= 1e-9 * std::max(1.0, out.alpha))
    throw Error(Errc::DegeneratePerron, "top eigenvalue of the inclusion matrix is not simple");
  Eigen::VectorXd v = es.eigenvectors().col(top);
  if (v.sum() < 0) v = -v;
  if (v.minCoeff() <= 0.0) throw Error(Errc::DegeneratePerron, "Perron vector is not strictly positive");

  double norm = 0.0;
  for (Index j = 0; j < v.size(); ++j) norm += lambda.sup_dims[static_cast<std::size_t>(j)] * v(j);
  out.t_sup = v / norm;
  out.t_sub = ld * out.t_sup;
  out.eigen_residual = (k * out.t_sup - out.alpha * out.t_sup).norm();
  out.alpha_exact = Rational::approximate(out.alpha);
  for (Index j = 0; j < out.t_sup.size(); ++j) out.t_sup_exact.push_back(Rational::approximate(out.t_sup(j)));
  return out;
}

ScalarMarkov scalar_markov_closed_form(const DimensionVector& n) {
  ScalarMarkov out;
  const std::int64_t sq = n.linear_dim();
  for (int d : n) out.weights.emplace_back(d, sq);
  out.alpha = Rational(sq);
  return out;
}

Rational pp_constant_closed_form(const std::vector<Rational>& t) {
  if (t.empty()) throw Error(Errc::InvalidArgument, "empty weight vector");
  return *std::min_element(t.begin(), t.end());
}

double pp_constant_closed_form(const std::vector<double>& t) {
  if (t.empty()) throw Error(Errc::InvalidArgument, "empty weight vector");
  return *std::min_element(t.begin(), t.end());
}

std::string nine_power(int k) {
  if (k < 0 || k > 32) throw Error(Errc::InvalidArgument, "exact powers of 9 are limited to exponents up to 32");
  unsigned __int128 v = 1;
  for (int i = 0; i < k; ++i) v *= 9;
  std::string s;
  do {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  } while (v != 0);
  std::reverse(s.begin(), s.end());
  return s;
}

bool BoundReport::all_checked_hold() const {
  return std::all_of(chain.begin(), chain.end(), [](const ChainLink& c) { return !c.checked || c.holds; });
}

std::vector<std::string> BoundReport::violations() const {
  std::vector<std::string> out;
  for (const auto& c : chain)
    if (c.checked && c.hypotheses && !c.holds) out.push_back(c.name);
  return out;
}

BoundReport bound_pipeline(const UnitalInclusion& inc, const TraceFunctional& tau, std::uint64_t seed) {
  BasicConstructionOptions opt;
  opt.seed = seed;
  opt.structural_check = false;
  return bound_pipeline(BasicConstruction(inc, tau, opt), seed);
}

BoundReport bound_pipeline(const BasicConstruction& bc, std::uint64_t seed) {
  if (!bc.has_a1()) throw Error(Errc::InvalidArgument, "bound pipeline needs the basic construction algebra");
  const auto& inc = bc.inclusion();
  BoundReport out;

  const HigherCommutant hc = higher_commutant(bc);
  out.commutant_dims = hc.blocks.dims;
  out.dim_total = static_cast<int>(hc.algebra.dim());
  out.min_block = out.commutant_dims.min();
  out.ratio = Rational(out.dim_total, out.min_block);
  out.exponent = static_cast<int>((out.ratio.num() + out.ratio.den() - 1) / out.ratio.den());
  out.exponent_log10 = out.exponent * std::log10(9.0);
  if (out.exponent <= 32) out.nine_power = nine_power(out.exponent);

  ChainLink ratio_link{"ratio_le_minimal_index", false, false, out.ratio.to_double(), 0.0, {}};
  try {
    const auto mi = minimal_index_search(inc, seed);
    out.minimal_index = mi.index.value;
    out.minimal_regime = mi.regime;
    out.bound_log10 = out.minimal_index * std::log10(9.0);
    ratio_link.checked = true;
    ratio_link.rhs = out.minimal_index;
    ratio_link.holds = ratio_link.lhs <= ratio_link.rhs + 1e-6;
  } catch (const Error& e) {
    out.minimal_index = std::numeric_limits<double>::quiet_NaN();
    ratio_link.reason = e.what();
  }

  try {
    out.markov_index = markov_trace(inclusion_matrix(inc)).alpha;
  } catch (const Error& e) {
    out.markov_note = e.what();
  }

  const auto dual = [&bc](const Mat& z) { return bc.dual(z); };
  const auto e1 = expectation_from_function(bc.a1(), bc.left_a(), dual);
  out.pp_e1 = pp_constant(e1, seed).value;

  const ConcreteAlgebra rc = relative_commutant(inc.sub, inc.sup);
  out.irreducible = rc.dim() == 1;
  std::vector<Mat> lefts;
  for (const auto& x : rc.elements()) lefts.push_back(bc.gns().left(x));
  const auto lrc = ConcreteAlgebra::span(bc.gns().dim(), lefts);
  const auto f = expectation_from_function(hc.algebra, lrc, dual);
  out.pp_f = pp_constant(f, seed).value;

  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  for (int s = 0; s < 24; ++s) {
    const Mat x = hc.algebra.random_element(rng);
    const Mat y = hc.algebra.random_element(rng);
    const double scale = std::max(1e-300, spectral_norm(x) * spectral_norm(y));
    out.f_trace_defect = std::max(out.f_trace_defect, spectral_norm(Mat(f(x * y) - f(y * x))) / scale);
  }
  out.f_tracial = out.f_trace_defect <= 1e-8;

  std::vector<double> t;
  for (int n : out.commutant_dims) t.push_back(static_cast<double>(n) / out.commutant_dims.linear_dim());
  out.pp_tau = pp_constant_closed_form(t);

  out.chain.push_back({"restriction", true, out.pp_e1 <= out.pp_f + 1e-8, out.pp_e1, out.pp_f, {}});
  ChainLink popa{"trace_constant", false, false, out.pp_f, out.pp_tau, {}, out.irreducible && out.f_tracial};
  if (!out.irreducible)
    popa.reason = "B' cap A is not trivial; the codomain of F is not scalar";
  else if (!out.f_tracial)
    popa.reason = "F is not tracial";
  else {
    popa.checked = true;
    popa.holds = out.pp_f <= out.pp_tau + 1e-8;
  }
  out.chain.push_back(popa);
  if (!out.irreducible) {
    ratio_link.hypotheses = false;
    if (ratio_link.reason.empty()) ratio_link.reason = "inclusion is not irreducible";
  }
  out.chain.push_back(ratio_link);
  ChainLink unit_block{"min_block_is_one", out.irreducible, out.min_block == 1, double(out.min_block), 1.0, {},
                       out.irreducible};
  if (!out.irreducible) unit_block.reason = "inclusion is not irreducible";
  out.chain.push_back(unit_block);
  return out;
}

}  // namespace cidx
