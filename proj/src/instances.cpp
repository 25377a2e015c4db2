#include "cidx/instances.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <numeric>
#include <random>
#include <set>

#include "cidx/errors.hpp"

namespace cidx {

namespace {

using Table = std::vector<std::vector<int>>;

Mat unit(Index n, Index a, Index b) {
  Mat e = Mat::Zero(n, n);
  e(a, b) = 1.0;
  return e;
}

std::uint32_t mask_of(const Subgroup& s) {
  std::uint32_t m = 0;
  for (int x : s) m |= 1u << x;
  return m;
}

Subgroup from_mask(std::uint32_t m, int order) {
  Subgroup s;
  for (int x = 0; x < order; ++x)
    if (m & (1u << x)) s.push_back(x);
  return s;
}

// Closure under products; finite, so this is the generated subgroup.
std::uint32_t close(const FiniteGroupTable& g, std::uint32_t m) {
  m |= 1u << g.identity();
  for (bool grew = true; grew;) {
    grew = false;
    const Subgroup s = from_mask(m, g.order());
    for (int a : s)
      for (int b : s) {
        const std::uint32_t bit = 1u << g.mul(a, b);
        if (!(m & bit)) {
          m |= bit;
          grew = true;
        }
      }
  }
  return m;
}

void require_order(const FiniteGroupTable& g) {
  if (g.order() > kMaxGroupOrder) throw Error(Errc::SizeCapExceeded, "group order above 24");
}

Table permutation_table(const std::vector<std::vector<int>>& perms) {
  const auto n = perms.size();
  Table mult(n, std::vector<int>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      std::vector<int> c(perms[a].size());
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = perms[a][static_cast<std::size_t>(perms[b][i])];
      mult[a][b] = static_cast<int>(std::find(perms.begin(), perms.end(), c) - perms.begin());
    }
  return mult;
}

NamedAlgebra named(std::string name, ConcreteAlgebra a) { return {std::move(name), std::move(a)}; }

// Diagonal matrix units of a block-diagonal ambient.
ConcreteAlgebra diagonal_masa(Index n) {
  std::vector<Mat> d;
  for (Index i = 0; i < n; ++i) d.push_back(unit(n, i, i));
  return ConcreteAlgebra::span(n, d, d);
}

ConcreteAlgebra block_units(const AmbientAlgebra& amb) {
  std::vector<Mat> z;
  for (std::size_t j = 0; j < amb.dims().size(); ++j) z.push_back(amb.embed(j, Mat::Identity(amb.dims()[j], amb.dims()[j])));
  return ConcreteAlgebra::span(amb.size(), z, z);
}

ConcreteAlgebra tensor_factor(Index k, Index m, bool left) {
  std::vector<Mat> e;
  const Index f = left ? k : m;
  for (Index a = 0; a < f; ++a)
    for (Index b = 0; b < f; ++b)
      e.push_back(left ? kron(unit(k, a, b), Mat::Identity(m, m)) : kron(Mat::Identity(k, k), unit(m, a, b)));
  return ConcreteAlgebra::span(k * m, e);
}

}  // namespace

FiniteGroupTable FiniteGroupTable::from_table(std::string name, std::vector<std::vector<int>> mult) {
  const int n = static_cast<int>(mult.size());
  if (n == 0) throw Error(Errc::InvalidArgument, "empty multiplication table");
  if (n > 32) throw Error(Errc::SizeCapExceeded, "group order above 32");
  for (const auto& row : mult) {
    if (static_cast<int>(row.size()) != n) throw Error(Errc::InvalidArgument, "multiplication table is not square");
    for (int x : row)
      if (x < 0 || x >= n) throw Error(Errc::InvalidArgument, "table entry out of range");
  }
  // Latin square: each row and column a permutation.
  for (int a = 0; a < n; ++a) {
    std::vector<bool> row(n), col(n);
    for (int b = 0; b < n; ++b) {
      row[mult[a][b]] = true;
      col[mult[b][a]] = true;
    }
    if (std::count(row.begin(), row.end(), false) || std::count(col.begin(), col.end(), false))
      throw Error(Errc::InvalidArgument, "table is not a Latin square");
  }
  int e = -1;
  for (int c = 0; c < n && e < 0; ++c) {
    bool ok = true;
    for (int x = 0; x < n && ok; ++x) ok = mult[c][x] == x && mult[x][c] == x;
    if (ok) e = c;
  }
  if (e < 0) throw Error(Errc::InvalidArgument, "no identity element");

  auto assoc = [&](int a, int b, int c) { return mult[mult[a][b]][c] == mult[a][mult[b][c]]; };
  if (n <= kMaxGroupOrder) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (!assoc(a, b, c)) throw Error(Errc::InvalidArgument, "multiplication is not associative");
  } else {
    std::mt19937_64 rng(kDefaultSeed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int s = 0; s < 20000; ++s)
      if (!assoc(pick(rng), pick(rng), pick(rng))) throw Error(Errc::InvalidArgument, "multiplication is not associative");
  }

  FiniteGroupTable g;
  g.name_ = std::move(name);
  g.identity_ = e;
  g.inverse_.assign(n, -1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (mult[a][b] == e) g.inverse_[a] = b;
  g.mult_ = std::move(mult);
  return g;
}

FiniteGroupTable cyclic_group(int n) {
  if (n < 1 || n > 12) throw Error(Errc::InvalidArgument, "cyclic groups are built in for 1 <= n <= 12");
  Table mult(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) mult[a][b] = (a + b) % n;
  return FiniteGroupTable::from_table("Z" + std::to_string(n), std::move(mult));
}

FiniteGroupTable symmetric_group_3() {
  return FiniteGroupTable::from_table(
      "S3", permutation_table({{0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}}));
}

FiniteGroupTable symmetric_group_4() {
  std::vector<std::vector<int>> perms;
  std::vector<int> p = {0, 1, 2, 3};
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return FiniteGroupTable::from_table("S4", permutation_table(perms));
}

FiniteGroupTable dihedral_group_4() {
  Table mult(8, std::vector<int>(8));
  // (r^a s^b)(r^c s^d) = r^(a + (-1)^b c) s^(b + d)
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      const int a = x % 4, b = x / 4, c = y % 4, d = y / 4;
      const int r = ((b ? a - c : a + c) % 4 + 4) % 4;
      mult[x][y] = r + 4 * ((b + d) % 2);
    }
  return FiniteGroupTable::from_table("D4", std::move(mult));
}

FiniteGroupTable quaternion_group() {
  // unit products for 1, i, j, k: sign and unit
  static constexpr int usign[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
  static constexpr int uprod[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  Table mult(8, std::vector<int>(8));
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      const int sign = (x >= 4 ? -1 : 1) * (y >= 4 ? -1 : 1) * usign[x % 4][y % 4];
      mult[x][y] = uprod[x % 4][y % 4] + (sign < 0 ? 4 : 0);
    }
  return FiniteGroupTable::from_table("Q8", std::move(mult));
}

FiniteGroupTable klein_four_group() {
  Table mult(4, std::vector<int>(4));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) mult[a][b] = a ^ b;
  return FiniteGroupTable::from_table("Z2xZ2", std::move(mult));
}

FiniteGroupTable group_by_name(const std::string& name) {
  if (name == "S3") return symmetric_group_3();
  if (name == "S4") return symmetric_group_4();
  if (name == "D4") return dihedral_group_4();
  if (name == "Q8") return quaternion_group();
  if (name == "Z2xZ2" || name == "V4") return klein_four_group();
  if (name.size() >= 2 && name[0] == 'Z' && std::all_of(name.begin() + 1, name.end(), ::isdigit) && name.size() <= 3)
    return cyclic_group(std::stoi(name.substr(1)));
  throw Error(Errc::InvalidArgument, "unknown group '" + name + "'");
}

std::vector<std::string> builtin_group_names() {
  std::vector<std::string> names;
  for (int n = 1; n <= 12; ++n) names.push_back("Z" + std::to_string(n));
  for (const char* s : {"S3", "S4", "D4", "Q8", "Z2xZ2"}) names.emplace_back(s);
  return names;
}

bool is_subgroup(const FiniteGroupTable& g, const Subgroup& h) {
  if (h.empty()) return false;
  std::set<int> s;
  for (int x : h) {
    if (x < 0 || x >= g.order()) return false;
    s.insert(x);
  }
  if (!s.count(g.identity())) return false;
  for (int a : s) {
    if (!s.count(g.inverse(a))) return false;
    for (int b : s)
      if (!s.count(g.mul(a, b))) return false;
  }
  return true;
}

Subgroup subgroup_generated(const FiniteGroupTable& g, const std::vector<int>& gens) {
  require_order(g);
  std::uint32_t m = 0;
  for (int x : gens) {
    if (x < 0 || x >= g.order()) throw Error(Errc::InvalidArgument, "group element out of range");
    m |= 1u << x;
  }
  return from_mask(close(g, m), g.order());
}

Subgroup subgroup_intersection(const Subgroup& k, const Subgroup& l) {
  Subgroup out;
  std::set_intersection(k.begin(), k.end(), l.begin(), l.end(), std::back_inserter(out));
  return out;
}

std::string subgroup_label(const Subgroup& k) {
  std::string s = "{";
  for (std::size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k[i]);
  return s + "}";
}

SubgroupLattice intermediate_subgroup_lattice(const FiniteGroupTable& g, const Subgroup& h) {
  require_order(g);
  Subgroup hs = h;
  std::sort(hs.begin(), hs.end());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  if (!is_subgroup(g, hs)) throw Error(Errc::NotASubgroup, subgroup_label(hs) + " is not a subgroup of " + g.name());

  // Every K >= H is reached from H by adjoining one element at a time.
  const int n = g.order();
  const std::uint32_t base = mask_of(hs);
  std::set<std::uint32_t> seen = {base};
  std::vector<std::uint32_t> queue = {base};
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const std::uint32_t s = queue[q];
    const int size = std::popcount(s);
    for (int x = 0; x < n; ++x) {
      if (s & (1u << x)) continue;
      // Lagrange: past half the order the only overgroup is G.
      const std::uint32_t t = 2 * size > n ? (1u << n) - 1 : close(g, s | (1u << x));
      if (seen.insert(t).second) queue.push_back(t);
    }
  }

  SubgroupLattice lat;
  for (std::uint32_t s : seen) lat.members.push_back(from_mask(s, n));
  std::sort(lat.members.begin(), lat.members.end(), [](const Subgroup& a, const Subgroup& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  const std::size_t k = lat.members.size();
  lat.leq.assign(k, std::vector<bool>(k));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      lat.leq[a][b] = std::includes(lat.members[b].begin(), lat.members[b].end(), lat.members[a].begin(),
                                    lat.members[a].end());
  return lat;
}

std::vector<Mat> regular_representation(const FiniteGroupTable& g) {
  const Index n = g.order();
  std::vector<Mat> out;
  for (int x = 0; x < g.order(); ++x) {
    Mat p = Mat::Zero(n, n);
    for (int y = 0; y < g.order(); ++y) p(g.mul(x, y), y) = 1.0;
    out.push_back(p);
  }
  return out;
}

ConcreteAlgebra group_algebra(const FiniteGroupTable& g, const Subgroup& k) {
  require_order(g);
  if (!is_subgroup(g, k)) throw Error(Errc::NotASubgroup, subgroup_label(k) + " is not a subgroup of " + g.name());
  const auto rep = regular_representation(g);
  std::vector<Mat> e;
  for (int x : k) e.push_back(rep[static_cast<std::size_t>(x)]);
  return ConcreteAlgebra::span(g.order(), e, e);
}

const char* to_string(InstanceKind kind) noexcept {
  switch (kind) {
    case InstanceKind::scalar: return "scalar";
    case InstanceKind::factor_tensor: return "factor_tensor";
    case InstanceKind::direct_sum: return "direct_sum";
    case InstanceKind::diagonal: return "diagonal";
    case InstanceKind::group_pair: return "group_pair";
  }
  return "?";
}

InstanceKind instance_kind_from_string(const std::string& s) {
  for (auto k : {InstanceKind::scalar, InstanceKind::factor_tensor, InstanceKind::direct_sum, InstanceKind::diagonal,
                 InstanceKind::group_pair})
    if (s == to_string(k)) return k;
  throw Error(Errc::InvalidArgument, "unknown instance kind '" + s + "'");
}

Instance scalar_inclusion(const DimensionVector& n) {
  const AmbientAlgebra amb(n);
  if (amb.size() > 16) throw Error(Errc::SizeCapExceeded, "scalar instances are capped at N = 16");
  const auto mk = scalar_markov_closed_form(n);

  Instance out;
  out.descriptor.kind = InstanceKind::scalar;
  out.descriptor.dims = n;
  out.descriptor.label = "C in " + n.to_string();
  out.descriptor.expected_index = mk.alpha.to_double();
  out.inclusion = UnitalInclusion::make(scalar_algebra(amb.size()), full_algebra(amb), out.descriptor.label);
  out.trace = TraceFunctional::from_block_weights(amb, mk.weights);

  const Index size = amb.size();
  if (n.size() == 1 && n[0] == 4) {
    out.intermediates.push_back(named("M2(x)1", tensor_factor(2, 2, true)));
    out.intermediates.push_back(named("1(x)M2", tensor_factor(2, 2, false)));
  } else {
    const bool has_matrix_block = *std::max_element(n.begin(), n.end()) >= 2;
    if (n.size() >= 2 && has_matrix_block) out.intermediates.push_back(named("Z(A)", block_units(amb)));
    if (has_matrix_block) out.intermediates.push_back(named("D", diagonal_masa(size)));
  }
  if (size > 1) out.intermediates.push_back(named("A", out.inclusion.sup));
  return out;
}

Instance factor_tensor_inclusion(int k, int m) {
  if (k < 1 || m < 1) throw Error(Errc::InvalidArgument, "factor tensor needs k, m >= 1");
  if (k * m > 8) throw Error(Errc::SizeCapExceeded, "factor tensor needs km <= 8");
  Instance out;
  out.descriptor.kind = InstanceKind::factor_tensor;
  out.descriptor.k = k;
  out.descriptor.m = m;
  out.descriptor.label = "M" + std::to_string(k) + "(x)1 in M" + std::to_string(k * m);
  out.descriptor.expected_index = static_cast<double>(m * m);
  out.inclusion = UnitalInclusion::make(tensor_factor(k, m, true), full_matrix_algebra(k * m), out.descriptor.label);
  out.trace = TraceFunctional::normalized(k * m);
  if (m >= 2) {
    std::vector<Mat> e;
    for (Index a = 0; a < k; ++a)
      for (Index b = 0; b < k; ++b)
        for (Index c = 0; c < m; ++c) e.push_back(kron(unit(k, a, b), unit(m, c, c)));
    out.intermediates.push_back(named("M" + std::to_string(k) + "(x)D" + std::to_string(m), ConcreteAlgebra::span(k * m, e)));
    out.intermediates.push_back(named("A", out.inclusion.sup));
  }
  return out;
}

Instance direct_sum_inclusion(const DimensionVector& sub, const std::vector<std::vector<int>>& lambda) {
  if (lambda.size() != sub.size() || lambda.empty()) throw Error(Errc::InvalidArgument, "lambda needs one row per sub block");
  const std::size_t cols = lambda[0].size();
  if (cols == 0) throw Error(Errc::InvalidArgument, "lambda has no columns");
  std::vector<int> sup_dims(cols, 0);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i].size() != cols) throw Error(Errc::InvalidArgument, "lambda rows differ in length");
    int row = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      if (lambda[i][j] < 0) throw Error(Errc::InvalidArgument, "negative multiplicity");
      row += lambda[i][j];
      sup_dims[j] += lambda[i][j] * sub[i];
    }
    if (row == 0) throw Error(Errc::InvalidArgument, "a sub block is not embedded");
  }
  for (int a : sup_dims)
    if (a == 0) throw Error(Errc::NotUnital, "a sup block receives no sub block");
  const AmbientAlgebra amb{DimensionVector(sup_dims)};
  if (amb.size() > 16) throw Error(Errc::SizeCapExceeded, "direct sums are capped at N = 16");

  // Inside sup block j the copies are laid out sub block by sub block.
  std::vector<Mat> elems;
  for (std::size_t i = 0; i < sub.size(); ++i)
    for (Index a = 0; a < sub[i]; ++a)
      for (Index b = 0; b < sub[i]; ++b) {
        Mat x = Mat::Zero(amb.size(), amb.size());
        for (std::size_t j = 0; j < cols; ++j) {
          Index off = amb.offset(j);
          for (std::size_t p = 0; p < i; ++p) off += lambda[p][j] * sub[p];
          for (int r = 0; r < lambda[i][j]; ++r, off += sub[i]) x(off + a, off + b) = 1.0;
        }
        elems.push_back(x);
      }

  InclusionMatrixData data;
  data.lambda.resize(static_cast<Index>(sub.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < sub.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) data.lambda(static_cast<Index>(i), static_cast<Index>(j)) = lambda[i][j];
  data.sub_dims = sub;
  data.sup_dims = amb.dims();
  const auto mk = markov_trace(data);

  Instance out;
  out.descriptor.kind = InstanceKind::direct_sum;
  out.descriptor.dims = sub;
  out.descriptor.lambda = lambda;
  out.descriptor.label = sub.to_string() + " in " + amb.dims().to_string();
  out.descriptor.expected_index = mk.alpha;
  out.inclusion = UnitalInclusion::make(ConcreteAlgebra::span(amb.size(), elems), full_algebra(amb), out.descriptor.label);
  out.trace = TraceFunctional::from_block_weights(amb, std::vector<double>(mk.t_sup.data(), mk.t_sup.data() + mk.t_sup.size()));

  const auto with_center = join(out.inclusion.sub, block_units(amb));
  if (with_center.dim() > out.inclusion.sub.dim() && with_center.dim() < out.inclusion.sup.dim())
    out.intermediates.push_back(named("B v Z(A)", with_center));
  if (out.inclusion.sup.dim() > out.inclusion.sub.dim()) out.intermediates.push_back(named("A", out.inclusion.sup));
  return out;
}

Instance diagonal_inclusion(int n) {
  if (n < 1 || n > 8) throw Error(Errc::InvalidArgument, "diagonal instances need 1 <= n <= 8");
  Instance out;
  out.descriptor.kind = InstanceKind::diagonal;
  out.descriptor.n = n;
  out.descriptor.label = "D" + std::to_string(n) + " in M" + std::to_string(n);
  out.descriptor.expected_index = static_cast<double>(n);
  out.inclusion = UnitalInclusion::make(diagonal_masa(n), full_matrix_algebra(n), out.descriptor.label);
  out.trace = TraceFunctional::normalized(n);
  if (n >= 3) {
    // M_2 on the first two coordinates, diagonal elsewhere.
    std::vector<Mat> e;
    for (Index a = 0; a < 2; ++a)
      for (Index b = 0; b < 2; ++b) e.push_back(unit(n, a, b));
    for (Index i = 2; i < n; ++i) e.push_back(unit(n, i, i));
    out.intermediates.push_back(named("M2+D" + std::to_string(n - 2), ConcreteAlgebra::span(n, e, e)));
  }
  if (n >= 2) out.intermediates.push_back(named("A", out.inclusion.sup));
  return out;
}

Instance group_algebra_inclusion(const FiniteGroupTable& g, const Subgroup& h) {
  const auto lat = intermediate_subgroup_lattice(g, h);
  const Subgroup& hs = lat.members.front();
  Instance out;
  out.descriptor.kind = InstanceKind::group_pair;
  out.descriptor.group = g.name();
  out.descriptor.subgroup = hs;
  out.descriptor.label = "C[" + subgroup_label(hs) + "] in C[" + g.name() + "]";
  out.descriptor.expected_index = static_cast<double>(g.order()) / static_cast<double>(hs.size());
  Subgroup all(static_cast<std::size_t>(g.order()));
  std::iota(all.begin(), all.end(), 0);
  out.inclusion = UnitalInclusion::make(group_algebra(g, hs), group_algebra(g, all), out.descriptor.label);
  out.trace = TraceFunctional::normalized(g.order());
  for (std::size_t i = 1; i < lat.members.size(); ++i)
    out.intermediates.push_back(named(subgroup_label(lat.members[i]), group_algebra(g, lat.members[i])));
  return out;
}

Instance build_instance(const InstanceDescriptor& d) {
  switch (d.kind) {
    case InstanceKind::scalar: return scalar_inclusion(d.dims);
    case InstanceKind::factor_tensor: return factor_tensor_inclusion(d.k, d.m);
    case InstanceKind::direct_sum: return direct_sum_inclusion(d.dims, d.lambda);
    case InstanceKind::diagonal: return diagonal_inclusion(d.n);
    case InstanceKind::group_pair: return group_algebra_inclusion(group_by_name(d.group), d.subgroup);
  }
  throw Error(Errc::InvalidArgument, "unknown instance kind");
}

std::vector<InstanceDescriptor> standard_suite() {
  std::vector<InstanceDescriptor> s;
  auto scalar = [&](std::initializer_list<int> n) {
    InstanceDescriptor d;
    d.kind = InstanceKind::scalar;
    d.dims = DimensionVector(n);
    s.push_back(d);
  };
  auto factor = [&](int k, int m) {
    InstanceDescriptor d;
    d.kind = InstanceKind::factor_tensor;
    d.k = k;
    d.m = m;
    s.push_back(d);
  };
  auto direct = [&](std::initializer_list<int> sub, std::vector<std::vector<int>> lambda) {
    InstanceDescriptor d;
    d.kind = InstanceKind::direct_sum;
    d.dims = DimensionVector(sub);
    d.lambda = std::move(lambda);
    s.push_back(d);
  };
  auto group = [&](const char* g, Subgroup h) {
    InstanceDescriptor d;
    d.kind = InstanceKind::group_pair;
    d.group = g;
    d.subgroup = std::move(h);
    s.push_back(d);
  };
  scalar({1});
  scalar({2});
  scalar({4});
  scalar({1, 1});
  scalar({1, 2});
  scalar({2, 3});
  factor(2, 2);
  factor(1, 3);
  direct({1, 1}, {{1, 1}, {1, 0}});
  direct({1, 2}, {{1}, {1}});
  {
    InstanceDescriptor d;
    d.kind = InstanceKind::diagonal;
    d.n = 3;
    s.push_back(d);
  }
  group("S3", {0});
  group("S3", {0, 1});
  group("Z4", {0, 2});
  group("Z6", {0});
  group("Z2xZ2", {0});
  group("D4", {0});
  group("Q8", {0});
  for (auto& d : s) d = build_instance(d).descriptor;
  return s;
}

}  // namespace cidx
