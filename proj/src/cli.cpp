#include "cidx/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "cidx/errors.hpp"
#include "cidx/tensor.hpp"

namespace cidx::cli {

using nlohmann::json;

namespace {

constexpr Index kInlineCap = 24;

// ---- numbers --------------------------------------------------------------

json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // no negative zero
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json nums(const Eigen::VectorXd& v) { return nums(std::vector<double>(v.data(), v.data() + v.size())); }

json dims_json(const DimensionVector& d) { return d.values(); }

// Every checked quantity is emitted with its tolerance and verdict; failing
// ones are also collected for the exit status.
class Checks {
 public:
  explicit Checks(std::vector<std::string>& failures) : failures_(failures) {}

  void section(std::string name) { section_ = std::move(name); }

  json le(const std::string& what, double value, double tol) { return record(what, value, tol, value <= tol, "<="); }
  json ge(const std::string& what, double value, double tol) { return record(what, value, tol, value >= tol, ">="); }
  json flag(const std::string& what, bool pass, const std::string& note = {}) {
    if (!pass) failures_.push_back(section_ + "." + what + (note.empty() ? std::string() : ": " + note));
    json j = {{"pass", pass}};
    if (!note.empty()) j["note"] = note;
    return j;
  }
  void fail(const std::string& what, const std::string& message) { failures_.push_back(section_ + "." + what + ": " + message); }

 private:
  json record(const std::string& what, double value, double tol, bool pass, const char* rel) {
    if (!pass) {
      std::ostringstream s;
      s << section_ << "." << what << ": " << std::setprecision(6) << value << " fails " << rel << " " << tol;
      failures_.push_back(s.str());
    }
    return {{"value", num(value)}, {"tol", num(tol)}, {"relation", rel}, {"pass", pass}};
  }

  std::vector<std::string>& failures_;
  std::string section_;
};

// ---- spec parsing ---------------------------------------------------------

[[noreturn]] void spec_fail(const std::string& msg) { throw SpecError(msg); }

void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) spec_fail(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
      spec_fail("unknown key '" + k + "' in " + where);
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) spec_fail(where + " needs '" + key + "'");
  return j.at(key);
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) spec_fail(where + " must be an integer");
  return j.get<int>();
}

std::vector<int> get_ints(const json& j, const std::string& where) {
  if (!j.is_array()) spec_fail(where + " must be an array of integers");
  std::vector<int> v;
  for (const auto& x : j) v.push_back(get_int(x, where));
  return v;
}

Complex get_scalar(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  spec_fail(where + ": entries are numbers or [re, im] pairs");
}

Mat get_matrix(const json& j, Index n, const std::string& where) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n) spec_fail(where + " must have " + std::to_string(n) + " rows");
  Mat m(n, n);
  for (Index r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n)
      spec_fail(where + " must have " + std::to_string(n) + " columns");
    for (Index c = 0; c < n; ++c) m(r, c) = get_scalar(row[static_cast<std::size_t>(c)], where);
  }
  return m;
}

std::vector<Mat> get_matrices(const json& j, Index n, const std::string& where) {
  if (!j.is_array()) spec_fail(where + " must be an array of matrices");
  std::vector<Mat> out;
  for (const auto& m : j) out.push_back(get_matrix(m, n, where));
  return out;
}

FiniteGroupTable get_group(const json& j) {
  if (j.is_string()) return group_by_name(j.get<std::string>());
  allow_keys(j, {"name", "table"}, "group");
  const auto name = j.contains("name") ? j.at("name").get<std::string>() : std::string("G");
  std::vector<std::vector<int>> table;
  for (const auto& row : need(j, "table", "group")) table.push_back(get_ints(row, "group table row"));
  return FiniteGroupTable::from_table(name, std::move(table));
}

Subgroup get_subgroup(const json& j, const FiniteGroupTable& g) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "trivial") return {g.identity()};
    if (s == "whole") {
      Subgroup all;
      for (int x = 0; x < g.order(); ++x) all.push_back(x);
      return all;
    }
    spec_fail("subgroup must be a list, 'trivial' or 'whole'");
  }
  auto h = get_ints(j, "subgroup");
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end()), h.end());
  return h;
}

struct Parsed {
  Instance inst;
  std::optional<AmbientAlgebra> ambient;  // when sup is a full block-diagonal algebra
  std::optional<FiniteGroupTable> group;
  std::string kind;
};

Parsed parse_inline(const json& j) {
  allow_keys(j, {"kind", "label", "sup", "sub"}, "inline instance");
  Parsed p;
  p.kind = "inline";
  const auto& sup = need(j, "sup", "inline instance");
  ConcreteAlgebra a;
  if (sup.is_object() && sup.contains("dims")) {
    allow_keys(sup, {"dims"}, "sup");
    p.ambient.emplace(DimensionVector(get_ints(sup.at("dims"), "sup.dims")));
    if (p.ambient->size() > kInlineCap) throw Error(Errc::SizeCapExceeded, "inline algebras are capped at N = 24");
    a = full_algebra(*p.ambient);
  } else {
    allow_keys(sup, {"size", "generators"}, "sup");
    const int n = get_int(need(sup, "size", "sup"), "sup.size");
    if (n < 1) spec_fail("sup.size must be positive");
    if (n > kInlineCap) throw Error(Errc::SizeCapExceeded, "inline algebras are capped at N = 24");
    a = subalgebra_from_generators(n, get_matrices(need(sup, "generators", "sup"), n, "sup.generators"));
  }
  const Index n = a.size();
  ConcreteAlgebra b;
  const auto& sub = need(j, "sub", "inline instance");
  if (sub.is_string() && sub.get<std::string>() == "scalar") {
    b = scalar_algebra(n);
  } else {
    allow_keys(sub, {"generators"}, "sub");
    b = subalgebra_from_generators(n, get_matrices(need(sub, "generators", "sub"), n, "sub.generators"));
  }
  p.inst.descriptor.label = j.contains("label") ? j.at("label").get<std::string>() : std::string("inline");
  p.inst.inclusion = UnitalInclusion::make(std::move(b), std::move(a), p.inst.descriptor.label);
  p.inst.trace = TraceFunctional::normalized(n);
  if (p.ambient) {
    std::vector<Rational> w;
    int s = 0;
    for (int d : p.ambient->dims()) s += d;
    for (std::size_t k = 0; k < p.ambient->dims().size(); ++k) w.push_back(Rational(1, s));
    p.inst.trace = TraceFunctional::from_block_weights(*p.ambient, w);
  }
  if (p.inst.inclusion.sup.dim() > p.inst.inclusion.sub.dim())
    p.inst.intermediates.push_back({"A", p.inst.inclusion.sup});
  return p;
}

Parsed parse_instance(const json& j) {
  if (!j.is_object()) spec_fail("instance must be an object");
  const auto kind = need(j, "kind", "instance").get<std::string>();
  if (kind == "inline") return parse_inline(j);
  Parsed p;
  p.kind = kind;
  InstanceDescriptor d;
  d.kind = instance_kind_from_string(kind);
  switch (d.kind) {
    case InstanceKind::scalar:
      allow_keys(j, {"kind", "dims"}, "scalar instance");
      d.dims = DimensionVector(get_ints(need(j, "dims", "scalar instance"), "dims"));
      p.ambient.emplace(d.dims);
      break;
    case InstanceKind::factor_tensor:
      allow_keys(j, {"kind", "k", "m"}, "factor_tensor instance");
      d.k = get_int(need(j, "k", "factor_tensor instance"), "k");
      d.m = get_int(need(j, "m", "factor_tensor instance"), "m");
      break;
    case InstanceKind::direct_sum: {
      allow_keys(j, {"kind", "sub_dims", "lambda"}, "direct_sum instance");
      d.dims = DimensionVector(get_ints(need(j, "sub_dims", "direct_sum instance"), "sub_dims"));
      const auto& lam = need(j, "lambda", "direct_sum instance");
      if (!lam.is_array()) spec_fail("lambda must be a matrix of integers");
      for (const auto& row : lam) d.lambda.push_back(get_ints(row, "lambda row"));
      break;
    }
    case InstanceKind::diagonal:
      allow_keys(j, {"kind", "n"}, "diagonal instance");
      d.n = get_int(need(j, "n", "diagonal instance"), "n");
      break;
    case InstanceKind::group_pair:
      allow_keys(j, {"kind", "group", "subgroup"}, "group_pair instance");
      p.group = get_group(need(j, "group", "group_pair instance"));
      d.subgroup = get_subgroup(need(j, "subgroup", "group_pair instance"), *p.group);
      p.inst = group_algebra_inclusion(*p.group, d.subgroup);
      return p;
  }
  p.inst = build_instance(d);
  if (d.kind == InstanceKind::direct_sum) {
    std::vector<int> sup(d.lambda[0].size(), 0);
    for (std::size_t i = 0; i < d.lambda.size(); ++i)
      for (std::size_t c = 0; c < sup.size(); ++c) sup[c] += d.lambda[i][c] * d.dims[i];
    p.ambient.emplace(DimensionVector(sup));
  }
  return p;
}

TraceFunctional markov_trace_for(const UnitalInclusion& inc) {
  const auto sup = block_structure(inc.sup);
  const auto mk = markov_trace(inclusion_matrix(block_structure(inc.sub), sup));
  return trace_from_block_weights(sup, std::vector<double>(mk.t_sup.data(), mk.t_sup.data() + mk.t_sup.size()));
}

std::vector<NamedAlgebra> parse_intermediates(const json& j, const Parsed& p) {
  if (!j.is_array()) spec_fail("intermediates must be an array");
  const auto& inc = p.inst.inclusion;
  std::vector<NamedAlgebra> out;
  std::set<std::string> names;
  for (const auto& c : j) {
    allow_keys(c, {"name", "generators", "subgroup"}, "intermediate");
    const auto name = need(c, "name", "intermediate").get<std::string>();
    if (!names.insert(name).second) spec_fail("duplicate intermediate name '" + name + "'");
    ConcreteAlgebra alg;
    if (c.contains("subgroup")) {
      if (!p.group) spec_fail("intermediate '" + name + "' names a subgroup outside a group instance");
      alg = group_algebra(*p.group, get_subgroup(c.at("subgroup"), *p.group));
    } else {
      auto gens = inc.sub.generating_set();
      for (auto& g : get_matrices(need(c, "generators", "intermediate"), inc.sup.size(), "intermediate generators"))
        gens.push_back(std::move(g));
      alg = subalgebra_from_generators(inc.sup.size(), gens);
    }
    if (!inc.sup.contains(alg, 1e-8) || !alg.contains(inc.sub, 1e-8))
      spec_fail("intermediate '" + name + "' is not between B and A");
    if (alg.dim() == inc.sub.dim()) spec_fail("intermediate '" + name + "' coincides with B");
    out.push_back({name, std::move(alg)});
  }
  return out;
}

// ---- analyses -------------------------------------------------------------

struct Context {
  const JobSpec& job;
  Checks& checks;
  std::optional<BasicConstruction> bc;
  std::optional<BoundReport> bound;

  const UnitalInclusion& inc() const { return job.instance.inclusion; }
  const std::vector<NamedAlgebra>& mids() const { return job.instance.intermediates; }
  bool wants(const std::string& a) const {
    return std::find(job.analyses.begin(), job.analyses.end(), a) != job.analyses.end();
  }
  const BasicConstruction& basic() {
    if (!bc) {
      BasicConstructionOptions opt;
      opt.build_a1 = wants("bound");
      opt.structural_check = false;
      opt.seed = job.seed;
      bc.emplace(inc(), job.instance.trace, opt);
    }
    return *bc;
  }
};

json index_analysis(Context& cx) {
  auto& ck = cx.checks;
  const double tol = cx.job.tol;
  const auto e = trace_preserving_expectation(cx.inc().sup, cx.inc().sub, cx.job.instance.trace);
  const auto qb = quasi_basis(e);
  const auto idx = watatani_index(e);
  const auto pp = pp_constant(e, cx.job.seed);
  json r;
  r["value"] = num(idx.value);
  r["scalar"] = idx.scalar;
  r["block_values"] = nums(block_values(idx.element, block_structure(cx.inc().sup)));
  r["quasi_basis_size"] = qb.elements.size();
  r["reconstruction_residual"] = ck.le("reconstruction_residual", reconstruction_residual(e, qb), tol);
  r["centrality_defect"] = ck.le("centrality_defect", idx.centrality_defect, tol);
  r["independence_defect"] = ck.le("independence_defect", idx.independence_defect, tol);
  r["min_eigenvalue"] = ck.ge("min_eigenvalue", idx.min_eigenvalue, tol);
  r["expectation_defect"] = ck.le("expectation_defect", expectation_defects(e, 8, cx.job.seed).max(), tol);
  r["pp_constant"] = num(pp.value);
  r["probabilistic_index"] = num(probabilistic_index(pp));
  if (const auto& ex = cx.job.instance.descriptor.expected_index; ex && cx.job.trace_kind == "default")
    r["closed_form"] = {{"expected", num(*ex)},
                        {"difference", ck.le("closed_form_difference", std::abs(idx.value - *ex), tol * std::max(1.0, *ex))}};
  return r;
}

json commutant_analysis(Context& cx) {
  const auto rc = relative_commutant(cx.inc().sub, cx.inc().sup);
  const auto data = inclusion_matrix(cx.inc());
  json lam = json::array();
  for (Index i = 0; i < data.lambda.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < data.lambda.cols(); ++j) row.push_back(data.lambda(i, j));
    lam.push_back(row);
  }
  return {{"relative_commutant_dim", rc.dim()},
          {"relative_commutant_blocks", dims_json(block_structure(rc).dims)},
          {"irreducible", rc.dim() == 1},
          {"center_sup_dim", center(cx.inc().sup).dim()},
          {"center_sub_dim", center(cx.inc().sub).dim()},
          {"sub_blocks", dims_json(data.sub_dims)},
          {"sup_blocks", dims_json(data.sup_dims)},
          {"inclusion_matrix", lam}};
}

json markov_analysis(Context& cx) {
  auto& ck = cx.checks;
  const auto data = inclusion_matrix(cx.inc());
  json r;
  try {
    const auto mk = markov_trace(data);
    r["alpha"] = num(mk.alpha);
    r["alpha_exact"] = mk.alpha_exact.to_string();
    r["t_sub"] = nums(mk.t_sub);
    r["t_sup"] = nums(mk.t_sup);
    json ex = json::array();
    for (const auto& q : mk.t_sup_exact) ex.push_back(q.to_string());
    r["t_sup_exact"] = ex;
    r["eigen_residual"] = ck.le("eigen_residual", mk.eigen_residual, 1e-10);
    if (data.sub_dims.size() == 1 && data.sub_dims[0] == 1) {
      const auto cf = scalar_markov_closed_form(data.sup_dims);
      double diff = 0.0;
      for (std::size_t j = 0; j < cf.weights.size(); ++j)
        diff = std::max(diff, std::abs(cf.weights[j].to_double() - mk.t_sup(static_cast<Index>(j))));
      r["closed_form"] = {{"alpha", cf.alpha.to_string()},
                          {"weights_difference", ck.le("closed_form_weights", diff, 1e-10)},
                          {"alpha_exact_match", ck.flag("closed_form_alpha", cf.alpha == mk.alpha_exact)}};
    }
  } catch (const Error& e) {
    if (e.code() != Errc::DegeneratePerron) throw;
    r["degenerate"] = true;
    r["note"] = e.what();
  }
  return r;
}

json bound_analysis(Context& cx) {
  const auto rep = bound_pipeline(cx.basic(), cx.job.seed);
  cx.bound = rep;
  json chain = json::array();
  for (const auto& l : rep.chain) {
    json c = {{"name", l.name}, {"checked", l.checked}, {"hypotheses", l.hypotheses}, {"holds", l.holds},
              {"lhs", num(l.lhs)}, {"rhs", num(l.rhs)},
              {"pass", !(l.checked && l.hypotheses && !l.holds)}};
    if (!l.reason.empty()) c["reason"] = l.reason;
    chain.push_back(c);
  }
  for (const auto& v : rep.violations()) cx.checks.fail("chain", v);
  json r = {{"commutant_blocks", dims_json(rep.commutant_dims)},
            {"dim_total", rep.dim_total},
            {"min_block", rep.min_block},
            {"ratio", rep.ratio.to_string()},
            {"minimal_index", num(rep.minimal_index)},
            {"minimal_regime", rep.minimal_regime},
            {"pp_e1", num(rep.pp_e1)},
            {"pp_f", num(rep.pp_f)},
            {"pp_tau", num(rep.pp_tau)},
            {"irreducible", rep.irreducible},
            {"f_trace_defect", num(rep.f_trace_defect)},
            {"f_tracial", rep.f_tracial},
            {"exponent", rep.exponent},
            {"bound_log10", num(rep.bound_log10)},
            {"exponent_log10", num(rep.exponent_log10)},
            {"chain", chain},
            {"all_checked_hold", rep.all_checked_hold()}};
  if (rep.markov_index) r["markov_index"] = num(*rep.markov_index);
  if (!rep.markov_note.empty()) r["markov_note"] = rep.markov_note;
  // big integers as decimal strings
  if (!rep.nine_power.empty()) r["nine_power"] = rep.nine_power;
  return r;
}

json lattice_analysis(Context& cx) {
  auto& ck = cx.checks;
  const auto& g = *cx.job.group;
  const auto lat = intermediate_subgroup_lattice(g, cx.job.instance.descriptor.subgroup);
  json members = json::array(), order = json::array();
  std::vector<ConcreteAlgebra> algs;
  for (const auto& k : lat.members) {
    members.push_back(k);
    algs.push_back(group_algebra(g, k));
  }
  for (std::size_t a = 0; a < lat.members.size(); ++a)
    for (std::size_t b = 0; b < lat.members.size(); ++b)
      if (a != b && lat.leq[a][b]) order.push_back({a, b});
  double meet = 0.0, jn = 0.0;
  for (std::size_t a = 0; a < algs.size(); ++a)
    for (std::size_t b = a + 1; b < algs.size(); ++b) {
      const auto& k = lat.members[a];
      const auto& l = lat.members[b];
      meet = std::max(meet, subspace_distance(intersect(algs[a], algs[b]), group_algebra(g, subgroup_intersection(k, l))));
      Subgroup kl = k;
      kl.insert(kl.end(), l.begin(), l.end());
      jn = std::max(jn, subspace_distance(join(algs[a], algs[b]), group_algebra(g, subgroup_generated(g, kl))));
    }
  json r = {{"group", g.name()},
            {"count", lat.members.size()},
            {"members", members},
            {"order", order},
            {"meet_matches_intersection", ck.le("meet_matches_intersection", meet, cx.job.tol)},
            {"join_matches_generated", ck.le("join_matches_generated", jn, cx.job.tol)}};
  if (cx.bound)
    r["count_within_bound"] = ck.le("count_within_bound", std::log10(static_cast<double>(lat.members.size())),
                                    cx.bound->bound_log10 + 1e-12);
  return r;
}

json angle_analysis(Context& cx) {
  auto& ck = cx.checks;
  const auto& m = cx.mids();
  const auto& bc = cx.basic();
  const std::size_t k = m.size();
  std::vector<std::vector<double>> a(k, std::vector<double>(k));
  json entries = json::array();
  double asym = 0.0;
  bool in_range = true;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const auto r = angle(bc, m[i].algebra, m[j].algebra);
      a[i][j] = r.angle;
      in_range = in_range && r.raw_cos <= 1.0 + 1e-9 && r.angle >= 0.0 && r.angle <= std::numbers::pi / 2 + 1e-12;
      if (i < j) entries.push_back({{"first", m[i].name}, {"second", m[j].name}, {"angle", num(r.angle)}, {"cos", num(r.cos_value)}});
    }
  double self = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    self = std::max(self, a[i][i]);
    for (std::size_t j = 0; j < k; ++j) asym = std::max(asym, std::abs(a[i][j] - a[j][i]));
  }
  json matrix = json::array();
  for (const auto& row : a) matrix.push_back(nums(row));
  json names = json::array();
  for (const auto& c : m) names.push_back(c.name);
  return {{"intermediates", names},
          {"matrix", matrix},
          {"pairs", entries},
          {"self_angle", ck.le("self_angle", self, 0.0)},
          {"symmetry", ck.le("symmetry", asym, 1e-10)},
          {"range", ck.flag("range", in_range)}};
}

json meet_analysis(Context& cx) {
  auto& ck = cx.checks;
  const auto& m = cx.mids();
  json pairs = json::array();
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const auto r = meet_projection_check(cx.basic(), m[i].algebra, m[j].algebra);
      const std::string tag = m[i].name + "|" + m[j].name;
      pairs.push_back({{"first", m[i].name},
                       {"second", m[j].name},
                       {"meet_rank", r.meet_rank},
                       {"difference", ck.le("difference[" + tag + "]", r.difference, cx.job.tol)},
                       {"iterations", r.iterations},
                       {"final_residual", ck.le("alternating[" + tag + "]", r.final_residual, 1e-6)},
                       {"monotone", r.monotone}});
    }
  return {{"pairs", pairs}};
}

json stability_analysis(Context& cx) {
  auto& ck = cx.checks;
  const double tol = cx.job.tol;
  const auto ti = tensor_inclusion(cx.inc(), cx.job.instance.trace, cx.job.tensor_m);
  json r = {{"m", ti.m},
            {"base_index", num(ti.base_index.value)},
            {"tensored_index", num(ti.tensored_index.value)},
            {"index_difference", ck.le("index_difference", std::abs(ti.tensored_index.value - ti.base_index.value), tol)},
            {"quasi_basis_residual", ck.le("quasi_basis_residual", ti.quasi_basis_residual, tol)},
            {"index_residual", ck.le("index_residual", ti.index_residual, tol)}};
  json rt = json::array();
  for (const auto& c : cx.mids()) {
    const double d = subspace_distance(detensor(tensor_with_matrices(c.algebra, ti.m), ti), c.algebra);
    rt.push_back({{"name", c.name}, {"distance", ck.le("detensor[" + c.name + "]", d, tol)}});
  }
  r["detensor"] = rt;
  if (cx.inc().sup.dim() * ti.m * ti.m <= kTensorBasicGnsCap) {
    const auto b = tensor_basic_check(ti);
    r["basic_construction"] = {{"distance", ck.le("basic_distance", b.distance, 1e-7)},
                               {"jones_difference", ck.le("basic_jones", b.jones_difference, 1e-7)},
                               {"unitary_defect", ck.le("basic_unitary", b.unitary_defect, 1e-10)}};
  } else {
    r["basic_construction"] = {{"skipped", "tensored A_1 above the size cap"}};
  }
  json pairs = json::array();
  const auto& m = cx.mids();
  const auto setup = stability_setup(ti);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i; j < m.size(); ++j) {
      const auto s = stability_check(setup, m[i].algebra, m[j].algebra);
      pairs.push_back({{"first", m[i].name},
                       {"second", m[j].name},
                       {"base", num(s.base.angle)},
                       {"tensored", num(s.tensored.angle)},
                       {"difference", ck.le("angle[" + m[i].name + "|" + m[j].name + "]", s.difference, tol)}});
    }
  r["angles"] = pairs;
  return r;
}

json instance_json(const JobSpec& job) {
  const auto& inst = job.instance;
  json names = json::array();
  for (const auto& c : inst.intermediates) names.push_back(c.name);
  json tr = {{"kind", job.trace_kind}};
  if (!inst.trace.weights().empty()) tr["weights"] = nums(inst.trace.weights());
  if (!inst.trace.exact_weights().empty()) {
    json ex = json::array();
    for (const auto& q : inst.trace.exact_weights()) ex.push_back(q.to_string());
    tr["exact"] = ex;
  }
  return {{"label", inst.descriptor.label},
          {"kind", job.kind},
          {"size", inst.inclusion.sup.size()},
          {"sub_dim", inst.inclusion.sub.dim()},
          {"sup_dim", inst.inclusion.sup.dim()},
          {"trace", tr},
          {"intermediates", names}};
}

// Flattens {value, tol, pass} leaves into rows for the text table.
void collect_rows(const json& j, const std::string& path, std::vector<std::array<std::string, 4>>& rows) {
  if (j.is_object()) {
    if (j.contains("pass")) {
      const auto val = j.contains("value") ? j.at("value").dump() : std::string("-");
      const auto tol = j.contains("tol") ? j.at("relation").get<std::string>() + " " + j.at("tol").dump() : std::string("-");
      rows.push_back({path, val, tol, j.at("pass").get<bool>() ? "ok" : "FAIL"});
      return;
    }
    for (const auto& [k, v] : j.items()) collect_rows(v, path.empty() ? k : path + "." + k, rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) collect_rows(j[i], path + "[" + std::to_string(i) + "]", rows);
  }
}

}  // namespace

const std::vector<std::string>& analysis_names() {
  static const std::vector<std::string> names = {"index", "commutant", "markov", "bound",
                                                 "lattice", "angle", "meet", "stability"};
  return names;
}

std::string fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

JobSpec parse_job(const json& spec) {
  try {
    allow_keys(spec, {"instance", "trace", "analyses", "intermediates", "tensor_m", "seed", "tolerances"}, "job spec");
    JobSpec job;
    job.hash = "fnv1a64:" + fnv1a64(spec.dump());
    Parsed p = parse_instance(need(spec, "instance", "job spec"));

    job.trace_kind = "default";
    if (spec.contains("trace")) {
      const auto& t = spec.at("trace");
      const auto& inc = p.inst.inclusion;
      if (t.is_string()) {
        job.trace_kind = t.get<std::string>();
        if (job.trace_kind == "markov") p.inst.trace = markov_trace_for(inc);
        else if (job.trace_kind == "normalized") p.inst.trace = TraceFunctional::normalized(inc.sup.size());
        else if (job.trace_kind != "default") spec_fail("trace must be 'default', 'markov', 'normalized' or a weight list");
      } else if (t.is_array()) {
        if (!p.ambient) spec_fail("explicit trace weights need an instance whose algebra is given by block sizes");
        std::vector<Rational> w;
        for (const auto& x : t) {
          if (x.is_string()) w.push_back(Rational::parse(x.get<std::string>()));
          else if (x.is_number_integer()) w.push_back(Rational(x.get<std::int64_t>()));
          else spec_fail("trace weights are rational strings such as \"2/13\" or integers");
        }
        if (w.size() != p.ambient->dims().size()) spec_fail("one trace weight per block is required");
        for (const auto& q : w)
          if (!(Rational(0) < q)) spec_fail("trace weights must be positive");
        p.inst.trace = TraceFunctional::from_block_weights(*p.ambient, w);
        job.trace_kind = "weights";
      } else {
        spec_fail("trace must be a string or a weight list");
      }
    }

    if (spec.contains("intermediates")) p.inst.intermediates = parse_intermediates(spec.at("intermediates"), p);
    if (spec.contains("analyses")) {
      const auto& a = spec.at("analyses");
      if (!a.is_array()) spec_fail("analyses must be an array of names");
      for (const auto& x : a) job.analyses.push_back(x.get<std::string>());
    }
    if (spec.contains("tensor_m")) job.tensor_m = get_int(spec.at("tensor_m"), "tensor_m");
    if (spec.contains("seed")) {
      if (!spec.at("seed").is_number_unsigned()) spec_fail("seed must be a non-negative integer");
      job.seed = spec.at("seed").get<std::uint64_t>();
    }
    if (spec.contains("tolerances")) {
      const auto& t = spec.at("tolerances");
      allow_keys(t, {"residual"}, "tolerances");
      if (t.contains("residual")) {
        if (!t.at("residual").is_number() || !(t.at("residual").get<double>() > 0)) spec_fail("tolerances.residual must be positive");
        job.tol = t.at("residual").get<double>();
      }
    }
    job.group = p.group;
    job.kind = p.kind;
    job.instance = std::move(p.inst);
    return job;
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("malformed spec: ") + e.what());
  } catch (const Error& e) {
    throw SpecError(e.what());
  }
}

RunResult run(const JobSpec& job) {
  for (const auto& a : job.analyses)
    if (std::find(analysis_names().begin(), analysis_names().end(), a) == analysis_names().end())
      throw SpecError("unknown analysis '" + a + "'");
  if (std::find(job.analyses.begin(), job.analyses.end(), "lattice") != job.analyses.end() && !job.group)
    throw SpecError("the lattice analysis needs a group_pair instance");
  if (job.tensor_m < 2) throw SpecError("tensor_m must be at least 2");
  if (job.tol <= 0) throw SpecError("tolerance must be positive");

  RunResult res;
  Checks checks(res.failures);
  Context cx{job, checks, std::nullopt, std::nullopt};
  json report = {{"report_version", kReportVersion},
                 {"tool", {{"name", "cidx"}, {"version", kToolVersion}}},
                 {"spec_hash", job.hash},
                 {"seed", job.seed},
                 {"tolerance", num(job.tol)},
                 {"analyses", job.analyses},
                 {"instance", instance_json(job)}};

  using Fn = json (*)(Context&);
  const std::vector<std::pair<std::string, Fn>> table = {
      {"index", index_analysis},   {"commutant", commutant_analysis}, {"markov", markov_analysis},
      {"bound", bound_analysis},   {"lattice", lattice_analysis},     {"angle", angle_analysis},
      {"meet", meet_analysis},     {"stability", stability_analysis}};
  json results;
  for (const auto& [name, fn] : table) {
    if (!cx.wants(name)) continue;
    checks.section(name);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      results[name] = fn(cx);
    } catch (const Error& e) {
      if (is_input_error(e.code())) throw SpecError(name + ": " + e.what());
      checks.fail("error", e.what());
      results[name] = {{"error", e.what()}};
    }
    const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
    res.timings_ms.emplace_back(name, dt.count());
  }
  report["results"] = results;
  report["failures"] = res.failures;
  report["status"] = res.failures.empty() ? "pass" : "fail";
  res.report = std::move(report);
  res.exit_code = res.failures.empty() ? kOk : kVerificationFailed;
  return res;
}

std::string pretty(const RunResult& r) {
  std::vector<std::array<std::string, 4>> rows;
  collect_rows(r.report.at("results"), "", rows);
  std::size_t w = 5;
  for (const auto& row : rows) w = std::max(w, row[0].size());
  std::ostringstream s;
  s << r.report.at("instance").at("label").get<std::string>() << "  (" << r.report.at("spec_hash").get<std::string>()
    << ")\n";
  s << std::left << std::setw(static_cast<int>(w) + 2) << "check" << std::setw(22) << "value" << std::setw(16) << "tolerance"
    << "status\n";
  for (const auto& row : rows)
    s << std::setw(static_cast<int>(w) + 2) << row[0] << std::setw(22) << row[1] << std::setw(16) << row[2] << row[3] << "\n";
  s << "timings (ms):";
  for (const auto& [name, ms] : r.timings_ms) s << " " << name << "=" << std::fixed << std::setprecision(1) << ms;
  s << "\nstatus: " << r.report.at("status").get<std::string>() << "\n";
  return s.str();
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Index invariants of finite-dimensional C*-inclusions", "cidx"};
  std::string spec_path, out_path;
  std::vector<std::string> analyses;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool want_pretty = false;
  app.add_option("--spec", spec_path, "job spec (JSON)")->required();
  app.add_option("--analysis", analyses, "comma-separated analyses, overriding the job file")->delimiter(',');
  app.add_option("--seed", seed, "seed, overriding the job file");
  app.add_option("--tol", tol, "residual tolerance, overriding the job file");
  app.add_flag("--pretty", want_pretty, "also print a text table (stdout with --out, stderr otherwise)");
  app.add_option("--out", out_path, "write the JSON report here instead of stdout");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "cidx: " << e.what() << "\n";
    return kSpecError;
  }

  RunResult res;
  try {
    std::ifstream in(spec_path);
    if (!in) throw SpecError("cannot read " + spec_path);
    json spec;
    try {
      spec = json::parse(in);
    } catch (const json::parse_error& e) {
      throw SpecError(std::string("malformed JSON: ") + e.what());
    }
    JobSpec job = parse_job(spec);
    if (!analyses.empty()) job.analyses = analyses;
    if (seed) job.seed = *seed;
    if (tol) job.tol = *tol;
    if (job.analyses.empty()) throw SpecError("no analyses requested");
    res = run(job);
  } catch (const SpecError& e) {
    err << "cidx: spec error: " << e.what() << "\n";
    return kSpecError;
  }

  const std::string doc = res.report.dump(2) + "\n";
  if (out_path.empty()) {
    out << doc;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      err << "cidx: cannot write " << out_path << "\n";
      return kSpecError;
    }
    f << doc;
  }
  if (want_pretty) (out_path.empty() ? err : out) << pretty(res);
  for (const auto& f : res.failures) err << "cidx: verification failed: " << f << "\n";
  return res.exit_code;
}

}  // namespace cidx::cli
