#include "cidx/algebra.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "cidx/errors.hpp"

namespace cidx {

namespace {

constexpr double kRankTol = 1e-8;

Vec vec_of(const Mat& m) { return vectorize(m); }

void require_size(const Mat& x, Index n, const char* what) {
  if (x.rows() != n || x.cols() != n) throw Error(Errc::ShapeMismatch, what);
}

}  // namespace

ConcreteAlgebra::ConcreteAlgebra(Index n, Mat frame, std::vector<Mat> generators)
    : n_(n), frame_(std::move(frame)), generators_(std::move(generators)) {
  if (frame_.rows() != n * n) throw Error(Errc::ShapeMismatch, "frame rows must equal N^2");
  for (const auto& g : generators_) require_size(g, n, "generator size");
}

ConcreteAlgebra ConcreteAlgebra::span(Index n, const std::vector<Mat>& elements, std::vector<Mat> generators) {
  OrthonormalSpan<Complex> frame(n * n, std::max<std::size_t>(1, elements.size()));
  double scale = 0.0;
  for (const auto& e : elements) {
    require_size(e, n, "span element size");
    scale = std::max(scale, e.norm());
  }
  for (const auto& e : elements) frame.add(vec_of(e), kRankTol, scale);
  return ConcreteAlgebra(n, frame.matrix(), std::move(generators));
}

Mat ConcreteAlgebra::element(Index k) const {
  return unvectorize(frame_.col(k), n_) * std::sqrt(static_cast<double>(n_));
}

std::vector<Mat> ConcreteAlgebra::elements() const {
  std::vector<Mat> out;
  out.reserve(dim());
  for (Index k = 0; k < dim(); ++k) out.push_back(element(k));
  return out;
}

Vec ConcreteAlgebra::coords(const Mat& x) const {
  require_size(x, n_, "element size");
  return frame_.adjoint() * vec_of(x) / std::sqrt(static_cast<double>(n_));
}

Mat ConcreteAlgebra::from_coords(const Vec& c) const {
  if (c.size() != dim()) throw Error(Errc::ShapeMismatch, "coordinate length");
  return unvectorize(frame_ * c, n_) * std::sqrt(static_cast<double>(n_));
}

Mat ConcreteAlgebra::project(const Mat& x) const {
  require_size(x, n_, "element size");
  return unvectorize(frame_ * (frame_.adjoint() * vec_of(x)), n_);
}

double ConcreteAlgebra::residual(const Mat& x) const {
  return (x - project(x)).norm() / std::max(1.0, x.norm());
}

bool ConcreteAlgebra::contains(const Mat& x, double tol) const {
  if (x.rows() != n_ || x.cols() != n_) return false;
  return residual(x) <= tol;
}

bool ConcreteAlgebra::contains(const ConcreteAlgebra& other, double tol) const {
  if (other.n_ != n_) return false;
  if (other.dim() == 0) return true;
  const Mat r = other.frame_ - frame_ * (frame_.adjoint() * other.frame_);
  return spectral_norm(r) <= tol;
}

bool ConcreteAlgebra::has_unit(double tol) const { return contains(Mat::Identity(n_, n_), tol); }

std::vector<Mat> ConcreteAlgebra::generating_set() const {
  return generators_.empty() ? elements() : generators_;
}

Mat ConcreteAlgebra::random_element(std::mt19937_64& rng) const {
  return from_coords(random_complex(dim(), 1, rng).col(0));
}

double ConcreteAlgebra::closure_residual(std::size_t max_pairs, std::uint64_t seed) const {
  const auto basis = elements();
  double worst = 0.0;
  const auto d = static_cast<std::size_t>(dim());
  if (d * d <= max_pairs) {
    for (const auto& a : basis)
      for (const auto& b : basis) worst = std::max(worst, residual(a * b));
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, d - 1);
    for (std::size_t s = 0; s < max_pairs; ++s) worst = std::max(worst, residual(basis[pick(rng)] * basis[pick(rng)]));
  }
  return worst;
}

double ConcreteAlgebra::adjoint_residual() const {
  double worst = 0.0;
  for (Index k = 0; k < dim(); ++k) worst = std::max(worst, residual(element(k).adjoint()));
  return worst;
}

ConcreteAlgebra full_algebra(const AmbientAlgebra& ambient) {
  std::vector<Mat> units;
  for (std::size_t j = 0; j < ambient.dims().size(); ++j)
    for (Index a = 0; a < ambient.dims()[j]; ++a)
      for (Index b = 0; b < ambient.dims()[j]; ++b) units.push_back(ambient.matrix_unit(j, a, b));
  return ConcreteAlgebra::span(ambient.size(), units);
}

ConcreteAlgebra full_matrix_algebra(Index n) { return full_algebra(AmbientAlgebra(DimensionVector({static_cast<int>(n)}))); }

ConcreteAlgebra scalar_algebra(Index n) {
  return ConcreteAlgebra::span(n, {Mat::Identity(n, n)}, {Mat::Identity(n, n)});
}

ConcreteAlgebra subalgebra_from_generators(Index n, const std::vector<Mat>& generators) {
  std::vector<Mat> gens;
  for (const auto& g : generators) {
    require_size(g, n, "generator size");
    if (g.norm() == 0.0) continue;
    gens.push_back(g);
    if (spectral_norm(g - g.adjoint()) > 1e-14 * std::max(1.0, g.norm())) gens.push_back(g.adjoint());
  }
  std::vector<double> scales;
  for (const auto& g : gens) scales.push_back(spectral_norm(g));

  // Breadth-first closure: span of all words, grown by right multiplication.
  OrthonormalSpan<Complex> span(n * n, 16);
  span.add(vec_of(Mat::Identity(n, n)));
  for (Index next = 0; next < span.size(); ++next) {
    const Mat q = unvectorize(Vec(span.basis().col(next)), n);
    for (std::size_t g = 0; g < gens.size(); ++g) span.add(vec_of(q * gens[g]), kRankTol, scales[g]);
  }
  if (gens.empty()) gens.push_back(Mat::Identity(n, n));
  return ConcreteAlgebra(n, span.matrix(), std::move(gens));
}

ConcreteAlgebra intersect(const ConcreteAlgebra& c, const ConcreteAlgebra& d) {
  if (c.size() != d.size()) throw Error(Errc::ShapeMismatch, "intersect: different ambient sizes");
  const Index dc = c.dim();
  Mat stacked(c.frame().rows(), dc + d.dim());
  stacked << c.frame(), -d.frame();
  const Mat ns = null_space(stacked, kRankTol);
  const Mat frame = orthonormal_columns(Mat(c.frame() * ns.topRows(dc)));
  return ConcreteAlgebra(c.size(), frame);
}

ConcreteAlgebra join(const ConcreteAlgebra& c, const ConcreteAlgebra& d) {
  auto gens = c.generating_set();
  const auto more = d.generating_set();
  gens.insert(gens.end(), more.begin(), more.end());
  return subalgebra_from_generators(c.size(), gens);
}

namespace {

ConcreteAlgebra commutant_with(const std::vector<Mat>& gens, const ConcreteAlgebra& t) {
  const Index n = t.size();
  const auto basis = t.elements();
  std::vector<Mat> nontrivial;
  for (const auto& s : gens) {
    require_size(s, n, "commutant generator size");
    if (spectral_norm(s - Complex(s.trace() / static_cast<double>(n)) * Mat::Identity(n, n)) > 1e-14) nontrivial.push_back(s);
  }
  if (nontrivial.empty() || t.dim() == 0) return t;
  Mat stacked(static_cast<Index>(nontrivial.size()) * n * n, t.dim());
  double gen_scale = 0.0;
  for (std::size_t g = 0; g < nontrivial.size(); ++g) {
    const auto& s = nontrivial[g];
    gen_scale = std::max(gen_scale, spectral_norm(s));
    for (Index k = 0; k < t.dim(); ++k)
      stacked.block(static_cast<Index>(g) * n * n, k, n * n, 1) = vec_of(basis[k] * s - s * basis[k]);
  }
  // Basis elements have Frobenius norm sqrt(n); commutators that are pure
  // rounding must not register as rank.
  const double floor = kRankTol * 2.0 * std::sqrt(static_cast<double>(n)) * gen_scale;
  const Mat ns = null_space(stacked, kRankTol, floor);
  return ConcreteAlgebra(n, t.frame() * ns);
}

}  // namespace

ConcreteAlgebra relative_commutant(const ConcreteAlgebra& s, const ConcreteAlgebra& t) {
  if (s.size() != t.size()) throw Error(Errc::ShapeMismatch, "relative_commutant: different ambient sizes");
  return commutant_with(s.generating_set(), t);
}

ConcreteAlgebra center(const ConcreteAlgebra& s) {
  if (!s.generators().empty() || s.dim() <= 64) return commutant_with(s.generating_set(), s);
  // A random element and its adjoint generate s generically; confirm with
  // independent random elements and fall back to the full basis otherwise.
  std::mt19937_64 rng(kDefaultSeed ^ 0xc3);
  const Mat r = s.random_element(rng);
  ConcreteAlgebra z = commutant_with({r, r.adjoint()}, s);
  for (int probe = 0; probe < 2; ++probe) {
    const Mat x = s.random_element(rng);
    for (Index k = 0; k < z.dim(); ++k) {
      const Mat zk = z.element(k);
      if ((zk * x - x * zk).norm() > 1e-8 * x.norm()) return commutant_with(s.elements(), s);
    }
  }
  return z;
}

double subspace_distance(const ConcreteAlgebra& a, const ConcreteAlgebra& b) {
  if (a.size() != b.size()) return 1.0;
  return frame_distance(a.frame(), b.frame());
}

Mat BlockStructure::block_columns(std::size_t j) const {
  return unitary.middleCols(offsets[j], static_cast<Index>(dims[j]) * multiplicities[j]);
}

Mat BlockStructure::matrix_unit(std::size_t j, Index a, Index b) const {
  const Index m = multiplicities[j];
  const Mat cols = block_columns(j);
  return cols.middleCols(a * m, m) * cols.middleCols(b * m, m).adjoint();
}

Mat BlockStructure::compress(std::size_t j, const Mat& x) const {
  const Index n = dims[j];
  const Index m = multiplicities[j];
  const Mat cols = block_columns(j);
  Mat first(cols.rows(), n);
  for (Index i = 0; i < n; ++i) first.col(i) = cols.col(i * m);
  return first.adjoint() * x * first;
}

Mat BlockStructure::assemble(const std::vector<Mat>& factors) const {
  if (factors.size() != blocks()) throw Error(Errc::BlockMismatch, "one factor per block");
  Mat d = Mat::Zero(unitary.cols(), unitary.cols());
  for (std::size_t j = 0; j < blocks(); ++j) {
    const Index n = dims[j];
    const Index m = multiplicities[j];
    if (factors[j].rows() != n || factors[j].cols() != n) throw Error(Errc::ShapeMismatch, "block factor size");
    d.block(offsets[j], offsets[j], n * m, n * m) = kron(factors[j], Mat::Identity(m, m));
  }
  return unitary * d * unitary.adjoint();
}

namespace {

// Random Hermitian element of s with real Gaussian coordinates on a
// Hermitian spanning set.
Mat random_hermitian(const ConcreteAlgebra& s, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat h = Mat::Zero(s.size(), s.size());
  for (Index k = 0; k < s.dim(); ++k) {
    const Mat x = s.element(k);
    h += g(rng) * (x + x.adjoint()) * 0.5 + g(rng) * (x - x.adjoint()) * Complex(0.0, -0.5);
  }
  return (h + h.adjoint()) * 0.5;
}

// Eigenvector groups of a Hermitian matrix, split at relative gaps.
std::vector<Mat> eigen_clusters(const Mat& h, const Mat& basis) {
  const Mat c = basis.adjoint() * h * basis;
  Eigen::SelfAdjointEigenSolver<Mat> es((c + c.adjoint()) * 0.5);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::vector<Mat> out;
  for (const auto& cl : cluster_sorted(ev, 1e-6 * scale)) {
    Mat v(basis.rows(), static_cast<Index>(cl.size()));
    for (std::size_t i = 0; i < cl.size(); ++i) v.col(static_cast<Index>(i)) = basis * es.eigenvectors().col(cl[i]);
    out.push_back(std::move(v));
  }
  return out;
}

struct RawBlock {
  int n = 0;
  int m = 0;
  Mat z;
  Mat columns;
};

bool block_less(const RawBlock& a, const RawBlock& b) {
  auto first = [](const Mat& z) {
    for (Index i = 0; i < z.rows(); ++i)
      if (z(i, i).real() > 1e-8) return i;
    return z.rows();
  };
  const Index fa = first(a.z), fb = first(b.z);
  if (fa != fb) return fa < fb;
  if (a.n != b.n) return a.n < b.n;
  if (a.m != b.m) return a.m < b.m;
  for (Index i = 0; i < a.z.size(); ++i) {
    const double d = a.z.data()[i].real() - b.z.data()[i].real();
    if (std::abs(d) > 1e-8) return d > 0;
  }
  return false;
}

std::optional<RawBlock> split_block(const ConcreteAlgebra& s, const Mat& v, std::mt19937_64& rng) {
  RawBlock blk;
  blk.z = v * v.adjoint();
  const Index r = v.cols();
  OrthonormalSpan<Complex> comp(r * r, 8);
  for (Index k = 0; k < s.dim(); ++k) {
    const Mat c = v.adjoint() * s.element(k) * v;
    comp.add(vectorize(c), kRankTol, 1.0);
  }
  const int d = static_cast<int>(comp.size());
  blk.n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d))));
  if (blk.n < 1 || blk.n * blk.n != d || r % blk.n != 0) throw Error(Errc::NotAnAlgebra, "block dimension is not a square");
  blk.m = static_cast<int>(r / blk.n);
  const Index n = blk.n, m = blk.m;
  if (n == 1) {
    blk.columns = v;
    return blk;
  }
  const auto groups = eigen_clusters(random_hermitian(s, rng), v);
  if (static_cast<Index>(groups.size()) != n) return std::nullopt;
  for (const auto& g : groups)
    if (g.cols() != m) return std::nullopt;
  // Align each eigenspace with the first through an off-diagonal entry of a
  // second random element: F_i* y F_0 is a multiple of a unitary.
  const Mat y = s.random_element(rng);
  blk.columns.resize(s.size(), n * m);
  for (Index i = 0; i < n; ++i) {
    Mat gi = groups[i];
    if (i > 0) {
      const Mat w = groups[i].adjoint() * y * groups[0];
      const double c = w.norm() / std::sqrt(static_cast<double>(m));
      if (c < 1e-6 * std::max(1.0, y.norm())) return std::nullopt;
      gi = groups[i] * w / c;
    }
    for (Index a = 0; a < m; ++a) blk.columns.col(i * m + a) = gi.col(a);
  }
  return blk;
}

}  // namespace

BlockStructure block_structure(const ConcreteAlgebra& s, std::uint64_t seed) {
  if (s.dim() == 0 || !s.has_unit(1e-8)) throw Error(Errc::NotAnAlgebra, "block structure needs a unital algebra");
  const ConcreteAlgebra z = center(s);
  std::mt19937_64 rng(seed);
  const Mat full = Mat::Identity(s.size(), s.size());
  for (int attempt = 0; attempt < 6; ++attempt) {
    const auto central = eigen_clusters(random_hermitian(z, rng), full);
    if (static_cast<Index>(central.size()) != z.dim()) continue;
    std::vector<RawBlock> raw;
    bool ok = true;
    for (const auto& v : central) {
      auto b = split_block(s, v, rng);
      if (!b) {
        ok = false;
        break;
      }
      raw.push_back(std::move(*b));
    }
    if (!ok) continue;
    std::sort(raw.begin(), raw.end(), block_less);
    BlockStructure bs;
    std::vector<int> dims;
    bs.unitary.resize(s.size(), s.size());
    Index offset = 0;
    int lin = 0;
    for (auto& b : raw) {
      dims.push_back(b.n);
      lin += b.n * b.n;
      bs.multiplicities.push_back(b.m);
      bs.central_projections.push_back(b.z);
      bs.offsets.push_back(offset);
      bs.unitary.middleCols(offset, b.columns.cols()) = b.columns;
      offset += b.columns.cols();
    }
    if (lin != s.dim()) throw Error(Errc::NotAnAlgebra, "sum of squared block sizes differs from the dimension");
    bs.dims = DimensionVector(std::move(dims));
    return bs;
  }
  throw Error(Errc::NotAnAlgebra, "could not split the centre into minimal projections");
}

TraceFunctional trace_from_block_weights(const BlockStructure& blocks, const std::vector<double>& weights) {
  if (weights.size() != blocks.blocks()) throw Error(Errc::BlockMismatch, "one weight per block required");
  double total = 0.0;
  const Index n = blocks.unitary.rows();
  Mat h = Mat::Zero(n, n);
  for (std::size_t j = 0; j < blocks.blocks(); ++j) {
    if (!(weights[j] > 0.0)) throw Error(Errc::TraceNotFaithful, "block weights must be positive");
    total += blocks.dims[j] * weights[j];
    h += blocks.central_projections[j] * (weights[j] / blocks.multiplicities[j]);
  }
  if (std::abs(total - 1.0) > 1e-10) throw Error(Errc::InvalidArgument, "weights must satisfy sum n_j t_j = 1");
  return TraceFunctional((h + h.adjoint()) * 0.5, weights);
}

std::vector<double> block_weights(const TraceFunctional& tau, const BlockStructure& blocks) {
  std::vector<double> w;
  for (std::size_t j = 0; j < blocks.blocks(); ++j) w.push_back(tau(blocks.minimal_projection(j)).real());
  return w;
}

UnitalInclusion UnitalInclusion::make(ConcreteAlgebra sub, ConcreteAlgebra sup, std::string label) {
  if (sub.size() != sup.size()) throw Error(Errc::ShapeMismatch, "inclusion: different ambient sizes");
  if (!sup.has_unit()) throw Error(Errc::NotUnital, "larger algebra has no unit");
  if (!sub.has_unit()) throw Error(Errc::NotUnital, "subalgebra does not contain the unit");
  if (!sup.contains(sub)) throw Error(Errc::NotSubalgebra, "sub is not contained in sup");
  return UnitalInclusion{std::move(sub), std::move(sup), std::move(label)};
}

InclusionMatrixData inclusion_matrix(const BlockStructure& sub, const BlockStructure& sup) {
  Eigen::MatrixXi lambda(static_cast<Index>(sub.blocks()), static_cast<Index>(sup.blocks()));
  for (std::size_t i = 0; i < sub.blocks(); ++i) {
    const Mat p = sub.minimal_projection(i);
    for (std::size_t j = 0; j < sup.blocks(); ++j) {
      const double v = (p * sup.central_projections[j]).trace().real() / sup.multiplicities[j];
      const long r = std::lround(v);
      if (std::abs(v - static_cast<double>(r)) > 1e-6 || r < 0)
        throw Error(Errc::NotUnital, "non-integral multiplicity in inclusion matrix");
      lambda(static_cast<Index>(i), static_cast<Index>(j)) = static_cast<int>(r);
    }
  }
  for (std::size_t j = 0; j < sup.blocks(); ++j) {
    int s = 0;
    for (std::size_t i = 0; i < sub.blocks(); ++i) s += lambda(static_cast<Index>(i), static_cast<Index>(j)) * sub.dims[i];
    if (s != sup.dims[j]) throw Error(Errc::NotUnital, "inclusion matrix fails sum_i lambda_ij n_i = N_j");
  }
  return InclusionMatrixData{lambda, sub.dims, sup.dims};
}

InclusionMatrixData inclusion_matrix(const UnitalInclusion& inc) {
  return inclusion_matrix(block_structure(inc.sub), block_structure(inc.sup));
}

}  // namespace cidx
