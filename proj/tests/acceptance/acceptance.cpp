// One pass/fail line per acceptance criterion, at the pinned tolerances.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cidx/errors.hpp"
#include "cidx/instances.hpp"
#include "cidx/tensor.hpp"
#include "json.hpp"

using namespace cidx;

namespace {

constexpr std::uint64_t kSeed = 20240607;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the worst value per named quantity and every violation.
class Tally {
 public:
  void le(const std::string& what, double value, double tol, const std::string& where = {}) {
    auto& w = worst_[what];
    if (!seen_.count(what)) order_.push_back(what);
    seen_.insert(what);
    w = std::max(w, value);
    if (!(value <= tol)) fail(what + (where.empty() ? "" : " @ " + where) + " = " + fmt(value));
  }
  void require(bool ok, const std::string& msg) {
    if (!ok) fail(msg);
  }
  void fail(const std::string& msg) {
    if (violations_.size() < 6) violations_.push_back(msg);
    ++count_;
  }
  void note(const std::string& s) { notes_.push_back(s); }

  Outcome outcome() const {
    Outcome o;
    o.pass = count_ == 0;
    std::ostringstream s;
    for (std::size_t i = 0; i < order_.size(); ++i) s << (i ? ", " : "") << "max " << order_[i] << " " << fmt(worst_.at(order_[i]));
    for (const auto& n : notes_) s << (s.tellp() ? "; " : "") << n;
    if (count_) {
      s << "; " << count_ << " violation(s):";
      for (const auto& v : violations_) s << " [" << v << "]";
    }
    o.detail = s.str();
    return o;
  }

  static std::string fmt(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", x);
    return b;
  }

 private:
  std::map<std::string, double> worst_;
  std::set<std::string> seen_;
  std::vector<std::string> order_;
  std::vector<std::string> violations_;
  std::vector<std::string> notes_;
  int count_ = 0;
};

std::vector<DimensionVector> dimension_sweep() {
  std::vector<DimensionVector> out;
  for (int k = 1; k <= 4; ++k) {
    std::vector<int> v(static_cast<std::size_t>(k), 1);
    while (true) {
      out.emplace_back(v);
      std::size_t i = 0;
      while (i < v.size() && v[i] == 4) v[i++] = 1;
      if (i == v.size()) break;
      ++v[i];
    }
  }
  return out;
}

int sum_squares(const DimensionVector& n) {
  int s = 0;
  for (int d : n) s += d * d;
  return s;
}

// Decimal string of 9^k by schoolbook multiplication.
std::string nine_power_oracle(int k) {
  std::string digits = "1";  // little-endian
  for (int i = 0; i < k; ++i) {
    int carry = 0;
    for (auto& c : digits) {
      const int v = (c - '0') * 9 + carry;
      c = static_cast<char>('0' + v % 10);
      carry = v / 10;
    }
    while (carry) {
      digits.push_back(static_cast<char>('0' + carry % 10));
      carry /= 10;
    }
  }
  return {digits.rbegin(), digits.rend()};
}

struct SuiteEntry {
  Instance inst;
  std::optional<BasicConstruction> bc;
};

// ---- criteria -------------------------------------------------------------

Outcome markov_closed_form(double& budget) {
  budget = 1.0;
  Tally t;
  const auto sweep = dimension_sweep();
  for (const auto& n : sweep) {
    InclusionMatrixData data;
    data.lambda.resize(1, static_cast<Index>(n.size()));
    for (std::size_t j = 0; j < n.size(); ++j) data.lambda(0, static_cast<Index>(j)) = n[j];
    data.sub_dims = DimensionVector({1});
    data.sup_dims = n;
    const auto mk = markov_trace(data);
    const int s = sum_squares(n);
    double err = 0.0;
    for (std::size_t j = 0; j < n.size(); ++j)
      err = std::max(err, std::abs(mk.t_sup(static_cast<Index>(j)) - static_cast<double>(n[j]) / s));
    t.le("weight error", err, 1e-10, n.to_string());
    t.require(mk.alpha_exact == Rational(s), "alpha " + mk.alpha_exact.to_string() + " != " + std::to_string(s) + " @ " + n.to_string());
  }
  t.note(std::to_string(sweep.size()) + " dimension vectors, alpha exact on all");
  return t.outcome();
}

Outcome pp_closed_form(double& budget) {
  budget = 30.0;
  Tally t;
  const auto sweep = dimension_sweep();
  for (const auto& n : sweep) {
    const auto inst = scalar_inclusion(n);
    const auto e = trace_preserving_expectation(inst.inclusion.sup, inst.inclusion.sub, inst.trace);
    const auto pp = pp_constant(e, block_structure(inst.inclusion.sup), block_structure(inst.inclusion.sub), kSeed);
    const int mn = *std::min_element(n.begin(), n.end());
    t.le("|pp - min n_j / sum n^2|", std::abs(pp.value - static_cast<double>(mn) / sum_squares(n)), 1e-6, n.to_string());
  }
  t.note(std::to_string(sweep.size()) + " dimension vectors");
  return t.outcome();
}

Outcome quasi_basis_and_index(const std::vector<SuiteEntry>& suite, double& budget) {
  budget = 60.0;
  Tally t;
  for (const auto& s : suite) {
    const auto& inc = s.inst.inclusion;
    const auto& label = s.inst.descriptor.label;
    const auto e = trace_preserving_expectation(inc.sup, inc.sub, s.inst.trace);
    const auto q1 = quasi_basis(e);
    const auto q2 = quasi_basis(e, kSeed);
    t.le("reconstruction", std::max(reconstruction_residual(e, q1), reconstruction_residual(e, q2)), 1e-8, label);
    const auto i1 = watatani_index(e, q1);
    const auto i2 = watatani_index(e, q2);
    t.le("centrality", std::max(i1.centrality_defect, i2.centrality_defect), 1e-8, label);
    t.require(i1.min_eigenvalue > 1e-8, "index not positive invertible @ " + label);
    t.le("pivoting gap", (i1.element - i2.element).norm(), 1e-8, label);
  }
  t.note(std::to_string(suite.size()) + " instances");
  return t.outcome();
}

Outcome dual_expectation_criterion(std::vector<SuiteEntry>& suite, double& budget) {
  budget = 0.0;
  Tally t;
  int scalar = 0;
  for (auto& s : suite) {
    BasicConstructionOptions opt;
    opt.seed = kSeed;
    s.bc.emplace(s.inst.inclusion, s.inst.trace, opt);
    const auto& bc = *s.bc;
    const auto& label = s.inst.descriptor.label;
    const auto de = dual_expectation(bc);
    t.le("E_1 residual", de.residual, 1e-8, label);
    const Index n = bc.gns().dim();
    const Mat ind = bc.gns().left(bc.index().element);
    t.le("|Ind E_1(e_B) - 1|", spectral_norm(Mat(ind * de.map(bc.jones()) - Mat::Identity(n, n))), 1e-8, label);
    if (bc.index().scalar) {
      ++scalar;
      const auto d = dual_index_check(bc, de);
      t.le("|Ind(E_1) - Ind(E)|", d.difference, 1e-7, label);
    }
  }
  t.note(std::to_string(scalar) + " scalar-index instances");
  return t.outcome();
}

Outcome structural(const std::vector<SuiteEntry>& suite, double& budget) {
  budget = 0.0;
  Tally t;
  for (const auto& s : suite) {
    const double d = s.bc->checks().structural_distance;
    t.require(d >= 0.0, "structural check not run @ " + s.inst.descriptor.label);
    t.le("distance(A_1, R_B')", d, 1e-8, s.inst.descriptor.label);
  }
  return t.outcome();
}

Outcome meet_identity(const std::vector<SuiteEntry>& suite, double& budget) {
  budget = 0.0;
  Tally t;
  int pairs = 0;
  for (const auto& s : suite) {
    const auto& m = s.inst.intermediates;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = i + 1; j < m.size(); ++j) {
        const auto r = meet_projection_check(*s.bc, m[i].algebra, m[j].algebra);
        const auto where = s.inst.descriptor.label + " " + m[i].name + "|" + m[j].name;
        t.le("meet difference", r.difference, 1e-8, where);
        t.le("alternating residual", r.final_residual, 1e-6, where);
        t.require(r.iterations >= 0, "no convergence within 200 @ " + where);
        ++pairs;
      }
  }
  t.note(std::to_string(pairs) + " pairs");
  return t.outcome();
}

Outcome angle_engine(const std::vector<SuiteEntry>& suite, double& budget) {
  budget = 0.0;
  Tally t;
  for (const auto& s : suite) {
    const auto& label = s.inst.descriptor.label;
    const auto& m = s.inst.intermediates;
    for (std::size_t i = 0; i < m.size(); ++i) {
      t.le("self angle", angle(*s.bc, m[i].algebra, m[i].algebra).angle, 0.0, label + " " + m[i].name);
      for (std::size_t j = i + 1; j < m.size(); ++j) {
        const auto a = angle(*s.bc, m[i].algebra, m[j].algebra);
        const auto b = angle(*s.bc, m[j].algebra, m[i].algebra);
        t.le("asymmetry", std::abs(a.angle - b.angle), 1e-10, label);
      }
    }
    t.le("Cauchy-Schwarz excess", std::max(0.0, cauchy_schwarz_check(s.bc->expectation(), 1000, kSeed)), 1e-9, label);
    t.le("Cauchy-Schwarz excess (A_1)", std::max(0.0, cauchy_schwarz_check(dual_expectation(*s.bc).map, 1000, kSeed)), 1e-9,
         label);
  }
  const auto sq = scalar_inclusion(DimensionVector({4}));
  const auto r = angle(sq.inclusion, sq.intermediates[0].algebra, sq.intermediates[1].algebra, sq.trace);
  t.le("|commuting square - pi/2|", std::abs(r.angle - std::numbers::pi / 2), 1e-8);
  return t.outcome();
}

Outcome angle_stability(const std::vector<SuiteEntry>& suite, double& budget) {
  budget = 300.0;
  Tally t;
  int instances = 0;
  for (const auto& s : suite) {
    const auto& m = s.inst.intermediates;
    if (m.empty()) continue;
    bool counted = false;
    for (Index k : {2, 3}) {
      if (s.inst.inclusion.sup.dim() * k * k > kTensorGnsCap) continue;
      const auto setup = stability_setup(tensor_inclusion(s.inst.inclusion, s.inst.trace, k));
      for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i; j < m.size(); ++j)
          t.le("|alpha - alpha_tensored|", stability_check(setup, m[i].algebra, m[j].algebra).difference, 1e-8,
               s.inst.descriptor.label + " m=" + std::to_string(k));
      counted = true;
    }
    instances += counted;
  }
  t.require(instances >= 6, "fewer than 6 instances");
  t.note(std::to_string(instances) + " instances, m in {2,3}");
  return t.outcome();
}

Outcome detensoring(const std::vector<SuiteEntry>& suite, double& budget) {
  budget = 0.0;
  Tally t;
  int basic = 0;
  for (const auto& s : suite) {
    for (Index k : {2, 3}) {
      const auto ti = tensor_inclusion(s.inst.inclusion, s.inst.trace, k);
      const auto where = s.inst.descriptor.label + " m=" + std::to_string(k);
      for (const auto& c : s.inst.intermediates)
        t.le("round trip", subspace_distance(detensor(tensor_with_matrices(c.algebra, k), ti), c.algebra), 1e-8,
             where + " " + c.name);
      t.le("round trip", subspace_distance(detensor(ti.tensored.sub, ti), s.inst.inclusion.sub), 1e-8, where + " B");
      if (s.inst.inclusion.sup.dim() * k * k <= kTensorBasicGnsCap) {
        const auto b = tensor_basic_check(ti);
        t.le("basic distance", b.distance, 1e-7, where);
        t.le("Jones difference", b.jones_difference, 1e-7, where);
        t.require(b.pass, "tensor basic check @ " + where);
        ++basic;
      }
    }
  }
  t.note(std::to_string(basic) + " capped basic-construction checks");
  return t.outcome();
}

Outcome bound_pipeline_criterion(const std::vector<SuiteEntry>& suite, double& budget) {
  budget = 0.0;
  Tally t;
  std::vector<std::string> ratio_over;
  for (const auto& s : suite) {
    const auto& label = s.inst.descriptor.label;
    const auto rep = bound_pipeline(*s.bc, kSeed);
    t.le("pp(E_1) - pp(F)", rep.pp_e1 - rep.pp_f, 1e-8, label);
    const double excess = rep.ratio.to_double() - rep.minimal_index;
    if (excess > 1e-6)
      ratio_over.push_back(label + " (" + rep.ratio.to_string() + " > " + Tally::fmt(rep.minimal_index) +
                           (rep.irreducible ? ")" : ", reducible)"));
    if (rep.exponent <= 32)
      t.require(rep.nine_power == nine_power_oracle(rep.exponent), "9^" + std::to_string(rep.exponent) + " mismatch @ " + label);
    else
      t.require(rep.nine_power.empty() && std::abs(rep.exponent_log10 - rep.exponent * std::log10(9.0)) < 1e-9,
                "log form @ " + label);
  }
  for (const auto& r : ratio_over) t.fail("ratio > minimal index: " + r);

  const auto m2 = scalar_inclusion(DimensionVector({2}));
  const auto rep = bound_pipeline(m2.inclusion, m2.trace, kSeed);
  const bool chain = rep.ratio == Rational(4) && std::abs(rep.minimal_index - 4.0) < 1e-8 && rep.markov_index &&
                     std::abs(*rep.markov_index - 4.0) < 1e-8 && rep.nine_power == "6561" && rep.all_checked_hold() &&
                     std::abs(rep.pp_e1 - 0.25) < 1e-8 && std::abs(rep.pp_f - 0.25) < 1e-8;
  t.require(chain, "C in M2 chain does not close at 4");
  t.note("C in M2: ratio " + rep.ratio.to_string() + " = minimal index " + Tally::fmt(rep.minimal_index) + " = Markov " +
         Tally::fmt(rep.markov_index.value_or(0.0)) + ", 9^4 = " + rep.nine_power);
  return t.outcome();
}

Outcome group_instances(double& budget) {
  budget = 0.0;
  Tally t;
  const auto g = symmetric_group_3();
  const auto inst = group_algebra_inclusion(g, {0});
  const auto lat = intermediate_subgroup_lattice(g, {0});
  t.require(lat.members.size() == 6, "S3 has " + std::to_string(lat.members.size()) + " subgroups");
  auto dims = block_structure(inst.inclusion.sup).dims.values();
  std::sort(dims.begin(), dims.end());
  t.require(dims == std::vector<int>{1, 1, 2}, "block structure of C[S3]");

  BasicConstructionOptions opt;
  opt.build_a1 = false;
  const BasicConstruction bc(inst.inclusion, inst.trace, opt);
  const auto& m = inst.intermediates;
  auto matrix = [&] {
    std::vector<std::vector<double>> a(m.size(), std::vector<double>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m.size(); ++j) a[i][j] = angle(bc, m[i].algebra, m[j].algebra).angle;
    return a;
  };
  const auto first = matrix();
  t.require(first == matrix(), "angle matrix is not reproducible bit for bit");

  // Over B = C: nested C < D gives cos^2 = (|C|-1)/(|D|-1), trivially
  // intersecting ones give pi/2.
  const auto& mem = lat.members;
  std::ifstream fx(CIDX_FIXTURE_DIR "/s3_angles.json");
  const auto fixture = nlohmann::json::parse(fx);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) {
      const auto& c = mem[i + 1];
      const auto& d = mem[j + 1];
      double oracle = std::numbers::pi / 2;
      if (i == j) oracle = 0.0;
      else if (std::includes(d.begin(), d.end(), c.begin(), c.end()))
        oracle = std::acos(std::sqrt((c.size() - 1.0) / (d.size() - 1.0)));
      else if (std::includes(c.begin(), c.end(), d.begin(), d.end()))
        oracle = std::acos(std::sqrt((d.size() - 1.0) / (c.size() - 1.0)));
      t.le("oracle gap", std::abs(first[i][j] - oracle), 1e-10);
      t.le("fixture gap", std::abs(first[i][j] - fixture["matrix"][i][j].get<double>()), 1e-10);
      if (i != j) t.require(first[i][j] > 0.0 && first[i][j] <= std::numbers::pi / 2, "entry outside (0, pi/2]");
    }
  t.note("6 subgroups, blocks (1,1,2), 5x5 angle matrix");
  return t.outcome();
}

}  // namespace

int main() {
  std::vector<SuiteEntry> suite;
  for (const auto& d : standard_suite()) suite.push_back({build_instance(d), std::nullopt});

  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome(double&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "Markov trace closed form", [](double& b) { return markov_closed_form(b); }},
      {2, "Pimsner-Popa constant formula", [](double& b) { return pp_closed_form(b); }},
      {3, "quasi-basis and index", [&](double& b) { return quasi_basis_and_index(suite, b); }},
      {4, "dual expectation and dual index", [&](double& b) { return dual_expectation_criterion(suite, b); }},
      {5, "basic-construction structural check", [&](double& b) { return structural(suite, b); }},
      {6, "meet identity", [&](double& b) { return meet_identity(suite, b); }},
      {7, "angle engine", [&](double& b) { return angle_engine(suite, b); }},
      {8, "angle stability under tensoring", [&](double& b) { return angle_stability(suite, b); }},
      {9, "de-tensoring correspondence", [&](double& b) { return detensoring(suite, b); }},
      {10, "bound pipeline", [&](double& b) { return bound_pipeline_criterion(suite, b); }},
      {11, "group instances", [](double& b) { return group_instances(b); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    double budget = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(budget);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget > 0.0 && secs > budget) {
      o.pass = false;
      o.detail += "; runtime " + Tally::fmt(secs) + " s over budget " + Tally::fmt(budget) + " s";
    }
    failed += !o.pass;
    std::printf("[%s] %2d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
