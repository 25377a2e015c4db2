#include "cidx/angle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cidx/errors.hpp"

namespace cidx {

namespace {

constexpr double kMembershipTol = 1e-8;

void require_member(const BasicConstruction& bc, const Mat& x) {
  if (x.rows() != bc.gns().dim() || x.cols() != bc.gns().dim())
    throw Error(Errc::ShapeMismatch, "operator does not act on the GNS space");
  if (bc.a1_membership_defect(x) > kMembershipTol)
    throw Error(Errc::NotInBasicConstruction, "operator does not commute with right multiplication by B");
}

void require_intermediate(const UnitalInclusion& inc, const ConcreteAlgebra& c) {
  if (c.size() != inc.sup.size() || !inc.sup.contains(c, 1e-8) || !c.contains(inc.sub, 1e-8))
    throw Error(Errc::NotIntermediate, "algebra is not between B and A");
}

}  // namespace

Mat a_valued_inner(const BasicConstruction& bc, const Mat& x, const Mat& y) {
  require_member(bc, x);
  require_member(bc, y);
  return bc.dual_element(x.adjoint() * y);
}

double a_norm(const BasicConstruction& bc, const Mat& x) {
  return std::sqrt(spectral_norm(a_valued_inner(bc, x, x)));
}

Mat a_valued_inner(const ConditionalExpectation& e1, const Mat& x, const Mat& y) {
  if (e1.source.residual(x) > kMembershipTol || e1.source.residual(y) > kMembershipTol)
    throw Error(Errc::NotInBasicConstruction, "element is outside the source of E_1");
  return e1(x.adjoint() * y);
}

double a_norm(const ConditionalExpectation& e1, const Mat& x) {
  return std::sqrt(spectral_norm(a_valued_inner(e1, x, x)));
}

AngleReport angle(const UnitalInclusion& inc, const ConcreteAlgebra& c, const ConcreteAlgebra& d,
                  const TraceFunctional& tau) {
  require_intermediate(inc, c);
  require_intermediate(inc, d);
  BasicConstructionOptions opt;
  opt.build_a1 = false;
  return angle(BasicConstruction(inc, tau, opt), c, d);
}

AngleReport angle(const BasicConstruction& bc, const ConcreteAlgebra& c, const ConcreteAlgebra& d) {
  require_intermediate(bc.inclusion(), c);
  require_intermediate(bc.inclusion(), d);
  const Mat& eb = bc.jones();
  const Mat x = jones_projection(bc.gns(), c).matrix - eb;
  const Mat y = jones_projection(bc.gns(), d).matrix - eb;

  AngleReport r;
  r.trace_used = bc.gns().trace();
  r.denom_c = a_norm(bc, x);
  r.denom_d = a_norm(bc, y);
  if (r.denom_c <= 1e-10 || r.denom_d <= 1e-10)
    throw Error(Errc::DegenerateIntermediate, "intermediate coincides with B");
  r.numerator = spectral_norm(a_valued_inner(bc, x, y));
  r.raw_cos = r.numerator / (r.denom_c * r.denom_d);
  if (r.raw_cos > 1.0 + 1e-9) throw Error(Errc::VerificationFailed, "Cauchy-Schwarz violated at level A_1");
  // Rounding at cos = 1 would otherwise surface as angles near 1e-8.
  r.cos_value = r.raw_cos >= 1.0 - 1e-12 ? 1.0 : std::max(0.0, r.raw_cos);
  r.angle = std::acos(r.cos_value);
  return r;
}

double cauchy_schwarz_check(const ConditionalExpectation& e, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const Mat x = e.source.random_element(rng);
    const Mat y = e.source.random_element(rng);
    const double lhs = spectral_norm(e(Mat(x.adjoint() * y)));
    const double rhs = std::sqrt(spectral_norm(e(Mat(x.adjoint() * x))) * spectral_norm(e(Mat(y.adjoint() * y))));
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

MeetCheck meet_projection_check(const UnitalInclusion& inc, const ConcreteAlgebra& c, const ConcreteAlgebra& d,
                                const TraceFunctional& tau) {
  require_intermediate(inc, c);
  require_intermediate(inc, d);
  BasicConstructionOptions opt;
  opt.build_a1 = false;
  return meet_projection_check(BasicConstruction(inc, tau, opt), c, d);
}

MeetCheck meet_projection_check(const BasicConstruction& bc, const ConcreteAlgebra& c, const ConcreteAlgebra& d) {
  require_intermediate(bc.inclusion(), c);
  require_intermediate(bc.inclusion(), d);
  const Mat ec = jones_projection(bc.gns(), c).matrix;
  const Mat ed = jones_projection(bc.gns(), d).matrix;
  const Index n = ec.rows();

  Eigen::SelfAdjointEigenSolver<Mat> es(Mat((ec + ed + (ec + ed).adjoint()) * 0.5));
  Index k = 0;
  while (k < n && es.eigenvalues()(n - 1 - k) >= 2.0 - 1e-9) ++k;
  const Mat q = es.eigenvectors().rightCols(k);
  const Mat meet = q * q.adjoint();

  MeetCheck out;
  out.meet_rank = k;
  out.difference = spectral_norm(Mat(meet - jones_projection(bc.gns(), intersect(c, d)).matrix));
  out.pass = out.difference <= 1e-8;

  const Mat p = ec * ed * ec;
  Mat pn = p;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= 200; ++it) {
    const double r = spectral_norm(Mat(pn - meet));
    if (r > prev + 1e-12) out.monotone = false;
    prev = r;
    out.final_residual = r;
    if (r < 1e-6) {
      out.iterations = it;
      break;
    }
    pn = pn * p;
  }
  return out;
}

RigidityReport rigidity_report(const BasicConstruction& bc, const std::vector<NamedAlgebra>& intermediates) {
  const auto& inc = bc.inclusion();
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < intermediates.size(); ++i) {
    require_intermediate(inc, intermediates[i].algebra);
    if (intermediates[i].algebra.dim() > inc.sub.dim()) cand.push_back(i);
  }

  RigidityReport out;
  for (std::size_t i : cand) {
    const auto& ci = intermediates[i].algebra;
    bool minimal = true;
    for (std::size_t j : cand) {
      if (j == i) continue;
      const auto& cj = intermediates[j].algebra;
      if (!ci.contains(cj, 1e-8)) continue;
      // a strictly smaller member, or an equal one listed earlier
      if (cj.dim() < ci.dim() || j < i) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.minimal.push_back(i);
  }

  for (std::size_t a = 0; a < out.minimal.size(); ++a)
    for (std::size_t b = a + 1; b < out.minimal.size(); ++b) {
      const auto r = angle(bc, intermediates[out.minimal[a]].algebra, intermediates[out.minimal[b]].algebra);
      out.pairs.push_back({out.minimal[a], out.minimal[b], r.angle, r.angle > std::numbers::pi / 3.0});
    }

  const bool irreducible = relative_commutant(inc.sub, inc.sup).dim() == 1;
  const bool simple = center(inc.sup).dim() == 1;
  out.hypotheses_met = irreducible && simple;
  if (!irreducible) out.note = "hypotheses not met: B' cap A is not trivial";
  else if (!simple) out.note = "hypotheses not met: A is not simple";
  return out;
}

}  // namespace cidx
