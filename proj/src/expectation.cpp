#include "cidx/expectation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cidx/errors.hpp"

namespace cidx {

Mat ConditionalExpectation::operator()(const Mat& x) const { return target.from_coords(map * source.coords(x)); }

ConditionalExpectation expectation_from_function(const ConcreteAlgebra& source, const ConcreteAlgebra& target,
                                                 const std::function<Mat(const Mat&)>& f) {
  Mat map(target.dim(), source.dim());
  for (Index k = 0; k < source.dim(); ++k) {
    const Mat y = f(source.element(k));
    if (target.residual(y) > 1e-7) throw Error(Errc::NotSubalgebra, "map leaves its target");
    map.col(k) = target.coords(y);
  }
  return ConditionalExpectation{source, target, std::move(map), std::nullopt};
}

Mat trace_gram(const ConcreteAlgebra& a, const TraceFunctional& tau) {
  if (tau.size() != a.size()) throw Error(Errc::BlockMismatch, "trace does not match the algebra");
  const Index n = a.size();
  // G_kl = tau(a_k* a_l) = <a_k, a_l h>_F
  Mat weighted(n * n, a.dim());
  for (Index l = 0; l < a.dim(); ++l) weighted.col(l) = vectorize(Mat(a.element(l) * tau.density()));
  Mat gram = std::sqrt(static_cast<double>(n)) * (a.frame().adjoint() * weighted);
  gram = (gram + gram.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (ev.size() > 0 && ev.minCoeff() <= 1e-12 * std::max(1.0, ev.maxCoeff()))
    throw Error(Errc::TraceNotFaithful, "trace Gram matrix is singular");
  return gram;
}

ConditionalExpectation trace_preserving_expectation(const ConcreteAlgebra& a, const ConcreteAlgebra& s,
                                                    const TraceFunctional& tau) {
  if (tau.size() != a.size()) throw Error(Errc::BlockMismatch, "trace does not match the algebra");
  if (!a.contains(s, 1e-8)) throw Error(Errc::NotSubalgebra, "target is not contained in source");
  const Mat gram = trace_gram(a, tau);
  const Mat p = a.frame().adjoint() * s.frame();
  const Mat pg = p.adjoint() * gram;
  const Mat small = pg * p;
  Mat map = small.ldlt().solve(pg);
  return ConditionalExpectation{a, s, std::move(map), tau};
}

double ExpectationDefects::max() const { return std::max({idempotent, unital, bimodular, positivity}); }

ExpectationDefects expectation_defects(const ConditionalExpectation& e, int samples, std::uint64_t seed) {
  ExpectationDefects d;
  const Index n = e.source.size();
  for (Index i = 0; i < e.target.dim(); ++i) {
    const Mat t = e.target.element(i);
    d.idempotent = std::max(d.idempotent, (e(t) - t).norm() / std::max(1.0, t.norm()));
  }
  d.unital = spectral_norm(Mat(e(Mat::Identity(n, n)) - Mat::Identity(n, n)));
  std::mt19937_64 rng(seed);
  for (int k = 0; k < samples; ++k) {
    const Mat a = e.source.random_element(rng);
    const Mat s1 = e.target.random_element(rng);
    const Mat s2 = e.target.random_element(rng);
    const double scale = a.norm() * s1.norm() * s2.norm();
    d.bimodular = std::max(d.bimodular, (e(Mat(s1 * a * s2)) - s1 * e(a) * s2).norm() / scale);
    const Mat q = e(Mat(a.adjoint() * a));
    const Mat h = (q + q.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    d.positivity = std::max(d.positivity, -es.eigenvalues().minCoeff() / std::max(1.0, a.squaredNorm()));
    d.positivity = std::max(d.positivity, spectral_norm(Mat(q - q.adjoint())) / std::max(1.0, a.squaredNorm()));
  }
  return d;
}

QuasiBasis quasi_basis(const ConditionalExpectation& e, std::uint64_t mixing_seed) {
  std::vector<Mat> candidates = e.source.elements();
  if (mixing_seed != 0) {
    std::mt19937_64 rng(mixing_seed);
    const Index d = e.source.dim();
    const Mat q = Eigen::HouseholderQR<Mat>(random_complex(d, d, rng)).householderQ();
    std::vector<Mat> mixed;
    for (Index l = 0; l < d; ++l) {
      Mat m = Mat::Zero(e.source.size(), e.source.size());
      for (Index k = 0; k < d; ++k) m += q(k, l) * candidates[k];
      mixed.push_back(std::move(m));
    }
    candidates = std::move(mixed);
  } else {
    // the unit first, so that E = id yields {1}
    candidates.insert(candidates.begin(), Mat::Identity(e.source.size(), e.source.size()));
  }
  QuasiBasis qb;
  for (const auto& v : candidates) {
    Mat r = v;
    for (int pass = 0; pass < 2; ++pass) {
      Mat sum = Mat::Zero(r.rows(), r.cols());
      for (const auto& eta : qb.elements) sum += eta * e(Mat(eta.adjoint() * r));
      r -= sum;
    }
    if (r.norm() <= 1e-9 * v.norm()) continue;
    const Mat g = e(Mat(r.adjoint() * r));
    const Mat root = hermitian_function(g, [](double x) { return 1.0 / std::sqrt(x); }, 1e-9);
    if (root.norm() == 0.0) continue;
    qb.elements.push_back(r * root);
  }
  if (reconstruction_residual(e, qb) > 1e-8)
    throw Error(Errc::DegenerateModule, "quasi-basis does not reconstruct the source");
  return qb;
}

double reconstruction_residual(const ConditionalExpectation& e, const QuasiBasis& qb) {
  double worst = 0.0;
  for (Index k = 0; k < e.source.dim(); ++k) {
    const Mat x = e.source.element(k);
    Mat left = Mat::Zero(x.rows(), x.cols());
    Mat right = Mat::Zero(x.rows(), x.cols());
    for (const auto& l : qb.elements) {
      left += e(Mat(x * l)) * l.adjoint();
      right += l * e(Mat(l.adjoint() * x));
    }
    const double scale = std::max(1.0, x.norm());
    worst = std::max({worst, (x - left).norm() / scale, (x - right).norm() / scale});
  }
  return worst;
}

IndexValue watatani_index(const ConditionalExpectation& e, const QuasiBasis& qb) {
  const Index n = e.source.size();
  Mat ind = Mat::Zero(n, n);
  for (const auto& l : qb.elements) ind += l * l.adjoint();
  ind = (ind + ind.adjoint()) * 0.5;
  IndexValue out;
  out.element = ind;
  const double norm = spectral_norm(ind);
  for (const auto& g : e.source.generating_set())
    out.centrality_defect =
        std::max(out.centrality_defect, spectral_norm(Mat(ind * g - g * ind)) / std::max(1e-300, norm * spectral_norm(g)));
  if (out.centrality_defect > 1e-8) throw Error(Errc::NotCentral, "index is not central");
  Eigen::SelfAdjointEigenSolver<Mat> es(ind, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  if (out.min_eigenvalue <= 1e-10) throw Error(Errc::NotCentral, "index is not positive invertible");
  const double mean = ind.trace().real() / static_cast<double>(n);
  out.scalar = spectral_norm(Mat(ind - mean * Mat::Identity(n, n))) <= 1e-8 * std::max(1.0, norm);
  out.value = out.scalar ? mean : norm;
  return out;
}

IndexValue watatani_index(const ConditionalExpectation& e) {
  IndexValue a = watatani_index(e, quasi_basis(e, 0));
  const IndexValue b = watatani_index(e, quasi_basis(e, kDefaultSeed ^ 0x9e37));
  a.independence_defect = spectral_norm(Mat(a.element - b.element)) / std::max(1.0, a.value);
  return a;
}

std::vector<double> block_values(const Mat& central, const BlockStructure& blocks) {
  std::vector<double> v;
  for (const auto& z : blocks.central_projections) v.push_back((central * z).trace().real() / z.trace().real());
  return v;
}

namespace {

// Evaluates lambda(p) for p = v v* (x) 1 in one source block.
class PPBlock {
 public:
  PPBlock(const ConditionalExpectation& e, const BlockStructure& src, std::size_t j, const BlockStructure& tgt)
      : n_(src.dims[j]), m_(src.multiplicities[j]), tgt_(tgt) {
    const Mat uj = src.block_columns(j);
    for (std::size_t k = 0; k < tgt.blocks(); ++k) {
      std::vector<Mat> y;
      for (Index a = 0; a < n_; ++a)
        for (Index b = 0; b < n_; ++b) y.push_back(tgt.compress(k, e(src.matrix_unit(j, a, b))));
      y_.push_back(std::move(y));
      t_.push_back(tgt.block_columns(k).adjoint() * uj);
    }
  }

  Index n() const { return n_; }

  double operator()(Vec v) const {
    v.normalize();
    const Index m = m_;
    std::vector<Mat> pinv;
    std::vector<Mat> range;
    double emax = 0.0;
    std::vector<Eigen::SelfAdjointEigenSolver<Mat>> solvers;
    for (std::size_t k = 0; k < tgt_.blocks(); ++k) {
      const Index nk = tgt_.dims[k];
      Mat f = Mat::Zero(nk, nk);
      for (Index a = 0; a < n_; ++a)
        for (Index b = 0; b < n_; ++b) f += v(a) * std::conj(v(b)) * y_[k][a * n_ + b];
      solvers.emplace_back(Mat((f + f.adjoint()) * 0.5));
      emax = std::max(emax, solvers.back().eigenvalues().cwiseAbs().maxCoeff());
    }
    Mat q = Mat::Zero(m, m);
    for (std::size_t k = 0; k < tgt_.blocks(); ++k) {
      const Index nk = tgt_.dims[k];
      const Index mk = tgt_.multiplicities[k];
      const auto& es = solvers[k];
      Eigen::VectorXd inv(nk), supp(nk);
      for (Index i = 0; i < nk; ++i) {
        const bool on = es.eigenvalues()(i) > 1e-10 * emax;
        inv(i) = on ? 1.0 / es.eigenvalues()(i) : 0.0;
        supp(i) = on ? 1.0 : 0.0;
      }
      const Mat fp = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
      const Mat sp = es.eigenvectors() * supp.asDiagonal() * es.eigenvectors().adjoint();
      Mat w = Mat::Zero(nk * mk, m);
      for (Index i = 0; i < n_; ++i) w += v(i) * t_[k].middleCols(i * m, m);
      // Column c of w, indexed r * mk + s, reshaped to the nk x mk matrix S_c,
      // so kron(F^+, 1) acts as F^+ S_c.
      std::vector<Mat> s;
      for (Index c = 0; c < m; ++c) {
        const Mat z = Eigen::Map<const Mat>(w.col(c).data(), mk, nk);
        s.push_back(z.transpose());
      }
      for (Index c = 0; c < m; ++c) {
        // columns of w have unit norm over all target blocks together
        if ((s[c] - sp * s[c]).norm() > 1e-7) return 0.0;
        const Mat ks = fp * s[c];
        for (Index c2 = 0; c2 < m; ++c2) q(c2, c) += (s[c2].conjugate().cwiseProduct(ks)).sum();
      }
    }
    q = (q + q.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Mat> es(q, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    return top > 0.0 ? 1.0 / top : 0.0;
  }

 private:
  Index n_;
  Index m_;
  const BlockStructure& tgt_;
  std::vector<std::vector<Mat>> y_;
  std::vector<Mat> t_;
};

Vec refine(const PPBlock& f, Vec v, double& value, int iterations) {
  const Index n = v.size();
  double step = 0.1;
  const double h = 1e-6;
  for (int it = 0; it < iterations && step > 1e-14; ++it) {
    Vec g(n);
    for (Index i = 0; i < n; ++i) {
      Vec dp = v, dm = v;
      dp(i) += h;
      dm(i) -= h;
      const double re = (f(dp) - f(dm)) / (2 * h);
      dp = v;
      dm = v;
      dp(i) += Complex(0, h);
      dm(i) -= Complex(0, h);
      const double im = (f(dp) - f(dm)) / (2 * h);
      g(i) = Complex(re, im);
    }
    // project onto the tangent space of the sphere
    g -= v * (v.adjoint() * g)(0).real();
    if (g.norm() < 1e-14) break;
    while (step > 1e-14) {
      Vec trial = (v - step * g / g.norm()).normalized();
      const double tv = f(trial);
      if (tv < value) {
        v = trial;
        value = tv;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
  }
  return v;
}

}  // namespace

PPConstant pp_constant(const ConditionalExpectation& e, std::uint64_t seed, int samples, int refine_iterations) {
  return pp_constant(e, block_structure(e.source, seed), block_structure(e.target, seed), seed, samples,
                     refine_iterations);
}

PPConstant pp_constant(const ConditionalExpectation& e, const BlockStructure& src, const BlockStructure& tgt,
                       std::uint64_t seed, int samples, int refine_iterations) {
  PPConstant best;
  best.value = std::numeric_limits<double>::infinity();
  best.exhaustive = true;
  std::size_t sampled_blocks = 0;
  for (std::size_t j = 0; j < src.blocks(); ++j)
    if (src.dims[j] > 1) ++sampled_blocks;
  std::mt19937_64 rng(seed);
  for (std::size_t j = 0; j < src.blocks(); ++j) {
    const PPBlock f(e, src, j, tgt);
    const Index n = f.n();
    if (n == 1) {
      const Vec v = Vec::Ones(1);
      const double val = f(v);
      if (val < best.value) best = PPConstant{val, j, v, best.exhaustive};
      continue;
    }
    best.exhaustive = false;
    std::vector<Vec> seeds;
    for (Index a = 0; a < n; ++a) seeds.push_back(Vec::Unit(n, a));
    for (Index a = 0; a < n; ++a)
      for (Index b = a + 1; b < n; ++b) {
        Vec u = Vec::Unit(n, a) + Vec::Unit(n, b);
        seeds.push_back(u.normalized());
        u = Vec::Unit(n, a) + Complex(0, 1) * Vec::Unit(n, b);
        seeds.push_back(u.normalized());
      }
    const auto budget = static_cast<std::size_t>(samples) / sampled_blocks;
    while (seeds.size() < budget) seeds.push_back(random_complex(n, 1, rng).col(0).normalized());
    Vec arg = seeds.front();
    double low = std::numeric_limits<double>::infinity();
    for (const auto& v : seeds) {
      const double val = f(v);
      if (val < low) {
        low = val;
        arg = v;
      }
    }
    if (low > 0.0) arg = refine(f, arg, low, refine_iterations);
    if (low < best.value) best = PPConstant{low, j, arg, false};
  }
  return best;
}

double probabilistic_index(const PPConstant& pp) {
  return pp.value > 0.0 ? 1.0 / pp.value : std::numeric_limits<double>::infinity();
}

IndexValue index_for_weights(const UnitalInclusion& inc, const BlockStructure& sup_blocks,
                             const std::vector<double>& weights) {
  const auto tau = trace_from_block_weights(sup_blocks, weights);
  const auto e = trace_preserving_expectation(inc.sup, inc.sub, tau);
  return watatani_index(e, quasi_basis(e));
}

namespace {

std::vector<double> normalize_weights(std::vector<double> t, const DimensionVector& dims) {
  double s = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) s += dims[j] * t[j];
  for (auto& x : t) x /= s;
  return t;
}

bool is_abelian(const ConcreteAlgebra& a) {
  const auto basis = a.elements();
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t k = i + 1; k < basis.size(); ++k)
      if ((basis[i] * basis[k] - basis[k] * basis[i]).norm() > 1e-8) return false;
  return true;
}

}  // namespace

MinimalIndexResult minimal_index_search(const UnitalInclusion& inc, std::uint64_t seed, int restarts) {
  const BlockStructure sup = block_structure(inc.sup, seed);
  const auto& dims = sup.dims;
  MinimalIndexResult out;
  auto finish = [&](std::vector<double> w, std::string regime, int agreeing) {
    out.trace = trace_from_block_weights(sup, w);
    out.index = watatani_index(trace_preserving_expectation(inc.sup, inc.sub, out.trace));
    out.weights = std::move(w);
    out.regime = std::move(regime);
    out.restarts_agreeing = agreeing;
    return out;
  };
  if (inc.sub.dim() == 1) {
    std::vector<double> w;
    for (int n : dims) w.push_back(static_cast<double>(n) / dims.linear_dim());
    return finish(w, "closed_form_scalar", restarts);
  }
  if (sup.blocks() == 1) return finish({1.0 / dims[0]}, "exact_factor", restarts);

  // Multiplicative equalization: scale each weight by the index value on its
  // block; the norm of the index does not increase along the iteration.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> best_w;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> finals;
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> t(sup.blocks());
    for (auto& x : t) x = r == 0 ? 1.0 : std::exp(gauss(rng));
    t = normalize_weights(t, dims);
    double obj = std::numeric_limits<double>::infinity();
    std::vector<double> run_best = t;
    for (int it = 0; it < 400; ++it) {
      const auto c = block_values(index_for_weights(inc, sup, t).element, sup);
      const double now = *std::max_element(c.begin(), c.end());
      if (now < obj) run_best = t;
      const bool stalled = std::abs(obj - now) <= 1e-13 * now;
      obj = std::min(obj, now);
      if (stalled) break;
      for (std::size_t j = 0; j < t.size(); ++j) t[j] *= c[j];
      t = normalize_weights(t, dims);
    }
    finals.push_back(obj);
    if (obj < best) {
      best = obj;
      best_w = run_best;
    }
  }
  int agreeing = 0;
  for (double f : finals)
    if (std::abs(f - best) <= 1e-8 * best) ++agreeing;
  if (agreeing < 2) throw Error(Errc::SearchDidNotConverge, "restarts disagree on the minimal index");
  return finish(best_w, is_abelian(relative_commutant(inc.sub, inc.sup)) ? "numeric" : "heuristic", agreeing);
}

}  // namespace cidx
