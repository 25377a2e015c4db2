#include <cmath>
#include <numeric>

#include "cidx/errors.hpp"
#include "cidx/instances.hpp"
#include "support.hpp"

using namespace cidx;
using namespace testing;

namespace {

int divisor_count(int n) {
  int c = 0;
  for (int d = 1; d <= n; ++d) c += n % d == 0;
  return c;
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidArgument;
}

Subgroup whole(const FiniteGroupTable& g) {
  Subgroup s(static_cast<std::size_t>(g.order()));
  std::iota(s.begin(), s.end(), 0);
  return s;
}

}  // namespace

TEST_SUITE("instances") {
  TEST_CASE("built-in group tables") {
    for (const auto& name : builtin_group_names()) {
      const auto g = group_by_name(name);
      CHECK(g.name() == name);
      for (int a = 0; a < g.order(); ++a) {
        CHECK(g.mul(a, g.inverse(a)) == g.identity());
        CHECK(g.mul(g.inverse(a), a) == g.identity());
      }
    }
    CHECK(group_by_name("S4").order() == 24);
    CHECK(group_by_name("Q8").order() == 8);
    // S3 agrees with the test-side permutation table.
    CHECK(symmetric_group_3().table() == s3_table());

    // Q8 has a single involution, D4 has five, Z2xZ2 three.
    auto involutions = [](const FiniteGroupTable& g) {
      int c = 0;
      for (int a = 0; a < g.order(); ++a) c += a != g.identity() && g.mul(a, a) == g.identity();
      return c;
    };
    CHECK(involutions(quaternion_group()) == 1);
    CHECK(involutions(dihedral_group_4()) == 5);
    CHECK(involutions(klein_four_group()) == 3);
    CHECK(involutions(symmetric_group_4()) == 9);

    CHECK(code_of([] { group_by_name("A5"); }) == Errc::InvalidArgument);
    CHECK(code_of([] { cyclic_group(13); }) == Errc::InvalidArgument);
  }

  TEST_CASE("table validation") {
    // Latin square without a two-sided identity.
    std::vector<std::vector<int>> no_unit(3, std::vector<int>(3));
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) no_unit[a][b] = (2 * a + b) % 3;
    CHECK_THROWS_AS(FiniteGroupTable::from_table("x", no_unit), Error);
    // A loop of order 5 in which every element squares to the unit.
    const std::vector<std::vector<int>> loop = {
        {0, 1, 2, 3, 4}, {1, 0, 3, 4, 2}, {2, 4, 0, 1, 3}, {3, 2, 4, 0, 1}, {4, 3, 1, 2, 0}};
    CHECK_THROWS_AS(FiniteGroupTable::from_table("loop", loop), Error);
    CHECK_THROWS_AS(FiniteGroupTable::from_table("x", {{0, 1}, {0, 1}}), Error);
    CHECK_THROWS_AS(FiniteGroupTable::from_table("x", {{0, 1}}), Error);
    CHECK_NOTHROW(FiniteGroupTable::from_table("Z2", {{0, 1}, {1, 0}}));
  }

  TEST_CASE("subgroup lattices") {
    const auto s3 = symmetric_group_3();
    const auto lat = intermediate_subgroup_lattice(s3, {0});
    REQUIRE(lat.members.size() == 6);
    CHECK(lat.members[0] == Subgroup{0});
    CHECK(lat.members[1] == Subgroup{0, 1});
    CHECK(lat.members[2] == Subgroup{0, 2});
    CHECK(lat.members[3] == Subgroup{0, 3});
    CHECK(lat.members[4] == Subgroup{0, 4, 5});
    CHECK(lat.members[5] == whole(s3));
    CHECK(lat.leq[0][5]);
    CHECK_FALSE(lat.leq[1][2]);
    CHECK_FALSE(lat.leq[5][0]);

    for (int n = 1; n <= 12; ++n)
      CHECK(intermediate_subgroup_lattice(cyclic_group(n), {0}).members.size() ==
            static_cast<std::size_t>(divisor_count(n)));
    // classical counts
    CHECK(intermediate_subgroup_lattice(symmetric_group_4(), {0}).members.size() == 30);
    CHECK(intermediate_subgroup_lattice(dihedral_group_4(), {0}).members.size() == 10);
    CHECK(intermediate_subgroup_lattice(quaternion_group(), {0}).members.size() == 6);
    CHECK(intermediate_subgroup_lattice(klein_four_group(), {0}).members.size() == 5);

    CHECK(intermediate_subgroup_lattice(s3, whole(s3)).members.size() == 1);
    CHECK(intermediate_subgroup_lattice(s3, {0, 1}).members.size() == 2);
    CHECK(code_of([&] { intermediate_subgroup_lattice(s3, {0, 4}); }) == Errc::NotASubgroup);
    CHECK(code_of([&] { intermediate_subgroup_lattice(s3, {1}); }) == Errc::NotASubgroup);

    CHECK(subgroup_generated(s3, {1, 2}) == whole(s3));
    CHECK(subgroup_generated(s3, {4}) == Subgroup{0, 4, 5});
  }

  TEST_CASE("group algebra inclusions") {
    const auto s3 = symmetric_group_3();
    const auto inst = group_algebra_inclusion(s3, {0});
    CHECK(inst.inclusion.sup.dim() == 6);
    CHECK(inst.inclusion.sub.dim() == 1);
    auto dims = block_structure(inst.inclusion.sup).dims.values();
    std::sort(dims.begin(), dims.end());
    CHECK(dims == std::vector<int>{1, 1, 2});
    CHECK(inst.intermediates.size() == 5);
    CHECK(inst.descriptor.expected_index == doctest::Approx(6.0));

    // tau(u_g) = delta_{g,e}
    const auto rep = regular_representation(s3);
    for (int g = 0; g < 6; ++g) CHECK(std::abs(inst.trace(rep[g]) - Complex(g == 0 ? 1.0 : 0.0)) < 1e-14);

    const auto z4 = group_algebra_inclusion(cyclic_group(4), {0, 2});
    CHECK(z4.inclusion.sub.dim() == 2);
    CHECK(z4.inclusion.sup.dim() == 4);
    CHECK(z4.intermediates.size() == 1);

    const auto same = group_algebra_inclusion(s3, whole(s3));
    CHECK(subspace_distance(same.inclusion.sub, same.inclusion.sup) < 1e-12);
    CHECK(same.intermediates.empty());

    CHECK(code_of([&] { group_algebra_inclusion(s3, {0, 1, 2}); }) == Errc::NotASubgroup);
  }

  TEST_CASE("group algebra lattice operations") {
    for (const char* name : {"S3", "Z6", "D4", "Q8", "Z2xZ2"}) {
      const auto g = group_by_name(name);
      const auto lat = intermediate_subgroup_lattice(g, {0});
      std::vector<ConcreteAlgebra> algs;
      for (const auto& k : lat.members) {
        algs.push_back(group_algebra(g, k));
        CHECK(algs.back().closure_residual() < 1e-10);
        CHECK(algs.back().adjoint_residual() < 1e-10);
        CHECK(algs.back().dim() == static_cast<Index>(k.size()));
      }
      for (std::size_t a = 0; a < algs.size(); ++a)
        for (std::size_t b = a + 1; b < algs.size(); ++b) {
          const auto& k = lat.members[a];
          const auto& l = lat.members[b];
          CHECK(subspace_distance(intersect(algs[a], algs[b]), group_algebra(g, subgroup_intersection(k, l))) < 1e-8);
          Subgroup kl = k;
          kl.insert(kl.end(), l.begin(), l.end());
          CHECK(subspace_distance(join(algs[a], algs[b]), group_algebra(g, subgroup_generated(g, kl))) < 1e-8);
        }
    }
  }

  TEST_CASE("scalar and factor instances") {
    const auto t = scalar_inclusion(DimensionVector({2, 3}));
    CHECK(t.inclusion.sup.dim() == 13);
    REQUIRE(t.trace.exact_weights().size() == 2);
    CHECK(t.trace.exact_weights()[0] == Rational(2, 13));
    CHECK(t.trace.exact_weights()[1] == Rational(3, 13));
    CHECK(std::abs(t.trace(Mat::Identity(5, 5)) - Complex(1.0)) < 1e-14);
    CHECK(t.descriptor.expected_index == doctest::Approx(13.0));

    const auto triv = scalar_inclusion(DimensionVector({1}));
    CHECK(triv.inclusion.sup.dim() == 1);
    CHECK(triv.intermediates.empty());

    const auto m4 = scalar_inclusion(DimensionVector({4}));
    CHECK(m4.intermediates.size() == 3);

    const auto f = factor_tensor_inclusion(1, 3);
    CHECK(f.inclusion.sub.dim() == 1);
    CHECK(f.descriptor.expected_index == doctest::Approx(9.0));
    CHECK(factor_tensor_inclusion(1, 1).intermediates.empty());
    CHECK(code_of([] { factor_tensor_inclusion(3, 3); }) == Errc::SizeCapExceeded);
    CHECK(code_of([] { factor_tensor_inclusion(0, 2); }) == Errc::InvalidArgument);
  }

  TEST_CASE("direct sums from inclusion matrices") {
    const std::vector<std::vector<int>> lambda = {{1, 1}, {1, 0}};
    const auto d = direct_sum_inclusion(DimensionVector({1, 1}), lambda);
    CHECK(d.inclusion.sup.size() == 3);
    CHECK(d.inclusion.sup.dim() == 5);
    CHECK(d.inclusion.sub.dim() == 2);
    // The block analysis recovers the multiplicities it was built from.
    const auto data = inclusion_matrix(d.inclusion);
    CHECK(data.lambda.rows() == 2);
    CHECK(data.lambda.sum() == 3);
    // Markov trace: the Perron value of [[2,1],[1,1]] is (3 + sqrt 5) / 2.
    CHECK(*d.descriptor.expected_index == doctest::Approx((3.0 + std::sqrt(5.0)) / 2).epsilon(1e-12));
    CHECK(std::abs(d.trace(Mat::Identity(3, 3)) - Complex(1.0)) < 1e-12);

    const auto two = direct_sum_inclusion(DimensionVector({1, 2}), {{1}, {1}});
    CHECK(two.inclusion.sup.dim() == 9);
    CHECK(two.inclusion.sub.dim() == 5);

    CHECK(code_of([] { direct_sum_inclusion(DimensionVector({1}), {{1, 0}, {1, 1}}); }) == Errc::InvalidArgument);
    CHECK(code_of([] { direct_sum_inclusion(DimensionVector({1, 1}), {{1, 0}, {0, 0}}); }) == Errc::InvalidArgument);
    CHECK(code_of([] { direct_sum_inclusion(DimensionVector({2}), {{1, 0}}); }) == Errc::NotUnital);
  }

  TEST_CASE("diagonal instance") {
    const auto d = diagonal_inclusion(3);
    CHECK(d.inclusion.sub.dim() == 3);
    REQUIRE(d.intermediates.size() == 2);
    CHECK(d.intermediates[0].algebra.dim() == 5);
    CHECK(d.intermediates[0].algebra.closure_residual() < 1e-12);
  }

  TEST_CASE("suite indices match closed forms") {
    const auto suite = standard_suite();
    CHECK(suite.size() >= 12);
    for (const auto& desc : suite) {
      CAPTURE(desc.label);
      const auto inst = build_instance(desc);
      CHECK(inst.descriptor.label == desc.label);
      const auto e = trace_preserving_expectation(inst.inclusion.sup, inst.inclusion.sub, inst.trace);
      const auto idx = watatani_index(e);
      REQUIRE(desc.expected_index.has_value());
      CHECK(idx.scalar);
      CHECK(std::abs(idx.value - *desc.expected_index) < 1e-8);
      for (const auto& c : inst.intermediates) {
        CHECK(inst.inclusion.sup.contains(c.algebra, 1e-9));
        CHECK(c.algebra.contains(inst.inclusion.sub, 1e-9));
        CHECK(c.algebra.dim() > inst.inclusion.sub.dim());
        CHECK(c.algebra.closure_residual() < 1e-10);
      }
    }
  }

  TEST_CASE("intermediate group algebras against the 9-power bound") {
    for (const char* name : {"S3", "Z4", "Z6", "Z2xZ2"}) {
      CAPTURE(name);
      const auto g = group_by_name(name);
      const auto inst = group_algebra_inclusion(g, {0});
      const auto lat = intermediate_subgroup_lattice(g, {0});
      const auto rep = bound_pipeline(inst.inclusion, inst.trace);
      CHECK(std::log10(static_cast<double>(lat.members.size())) <= rep.bound_log10 + 1e-12);
    }
  }
}
