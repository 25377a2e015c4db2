#include <cmath>
#include <numbers>

#include "cidx/errors.hpp"
#include "cidx/tensor.hpp"
#include "support.hpp"

using namespace cidx;
using namespace testing;

namespace {

UnitalInclusion scalars_in(Index n) { return UnitalInclusion::make(scalar_algebra(n), full_matrix_algebra(n)); }

// C inside the diagonal C + C with weights (1/3, 2/3): a non-scalar index.
struct DiagonalPair {
  AmbientAlgebra amb{DimensionVector({1, 1})};
  UnitalInclusion inc = UnitalInclusion::make(scalar_algebra(2), full_algebra(amb));
  TraceFunctional tau = TraceFunctional::from_block_weights(amb, std::vector<double>{1.0 / 3, 2.0 / 3});
};

}  // namespace

TEST_SUITE("tensor") {
  TEST_CASE("tensored index") {
    const auto ti = tensor_inclusion(scalars_in(2), TraceFunctional::normalized(2), 2);
    CHECK(ti.tensored.sup.dim() == 16);
    CHECK(ti.tensored.sub.dim() == 4);
    CHECK(ti.tensored.sup.contains(Mat(Mat::Identity(4, 4))));
    CHECK(ti.tensored_index.scalar);
    CHECK(ti.tensored_index.value == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(ti.quasi_basis_residual <= 1e-8);
    CHECK(ti.index_residual <= 1e-8);
    CHECK((ti.tensored_index.element - 4.0 * Mat::Identity(4, 4)).norm() < 1e-8);

    CHECK_THROWS_AS(tensor_inclusion(scalars_in(2), TraceFunctional::normalized(2), 1), Error);

    const auto a = full_matrix_algebra(2);
    const auto same = tensor_inclusion(UnitalInclusion::make(a, a), TraceFunctional::normalized(2), 3);
    CHECK(same.tensored_index.value == doctest::Approx(1.0));
    CHECK(subspace_distance(same.tensored.sub, same.tensored.sup) < 1e-10);
  }

  TEST_CASE("index stability with a non-scalar index") {
    const DiagonalPair p;
    for (Index m : {2, 3}) {
      const auto ti = tensor_inclusion(p.inc, p.tau, m);
      CHECK_FALSE(ti.base_index.scalar);
      CHECK(std::abs(ti.tensored_index.value - ti.base_index.value) < 1e-8);
      CHECK(ti.index_residual <= 1e-8);
      CHECK((ti.tensored_index.element - kron(ti.base_index.element, Mat(Mat::Identity(m, m)))).norm() < 1e-8);
    }
  }

  TEST_CASE("size cap") {
    const auto big = scalars_in(8);
    CHECK_THROWS_AS(tensor_inclusion(big, TraceFunctional::normalized(8), 9), Error);
  }

  TEST_CASE("de-tensoring") {
    const auto inc = scalars_in(4);
    const auto ti = tensor_inclusion(inc, TraceFunctional::normalized(4), 2);
    CHECK(subspace_distance(detensor(ti.tensored.sub, ti), inc.sub) < 1e-8);
    CHECK(subspace_distance(detensor(ti.tensored.sup, ti), inc.sup) < 1e-8);
    const auto c = left_factor(2, 2);
    const auto back = detensor(tensor_with_matrices(c, 2), ti);
    CHECK(back.dim() == 4);
    CHECK(subspace_distance(back, c) < 1e-8);
    CHECK_THROWS_AS(detensor(scalar_algebra(8), ti), Error);
  }

  TEST_CASE("de-tensoring group intermediates") {
    const auto grp = regular_rep(s3_table());
    const auto s3 = group_span(grp, {0, 1, 2, 3, 4, 5});
    const auto inc = UnitalInclusion::make(scalar_algebra(6), s3);
    const std::vector<ConcreteAlgebra> mids = {group_span(grp, {0, 1}), group_span(grp, {0, 2}),
                                               group_span(grp, {0, 3}), group_span(grp, {0, 4, 5})};
    for (Index m : {2, 3}) {
      const auto ti = tensor_inclusion(inc, TraceFunctional::normalized(6), m);
      for (const auto& c : mids) CHECK(subspace_distance(detensor(tensor_with_matrices(c, m), ti), c) < 1e-8);
    }
  }

  TEST_CASE("tensored basic construction") {
    const auto a = full_matrix_algebra(2);
    const auto triv = tensor_basic_check(tensor_inclusion(UnitalInclusion::make(a, a), TraceFunctional::normalized(2), 2));
    CHECK(triv.pass);
    CHECK(triv.distance < 1e-10);

    const DiagonalPair p;
    const auto diag = tensor_basic_check(tensor_inclusion(p.inc, p.tau, 2));
    CHECK(diag.pass);
    CHECK(diag.unitary_defect < 1e-10);

    const auto m2 = tensor_basic_check(tensor_inclusion(scalars_in(2), TraceFunctional::normalized(2), 2));
    CHECK(m2.pass);
    CHECK(m2.distance <= 1e-7);
    CHECK(m2.jones_difference <= 1e-7);

    CHECK_THROWS_AS(tensor_basic_check(tensor_inclusion(scalars_in(4), TraceFunctional::normalized(4), 2)), Error);
  }

  TEST_CASE("angle stability") {
    const auto inc = scalars_in(4);
    const auto tau = TraceFunctional::normalized(4);
    const auto c = left_factor(2, 2);
    const auto d = right_factor(2, 2);
    const auto same = stability_check(inc, c, c, tau, 2);
    CHECK(same.base.angle == 0.0);
    CHECK(same.tensored.angle == 0.0);
    const auto sq = stability_check(inc, c, d, tau, 2);
    CHECK(std::abs(sq.base.angle - std::numbers::pi / 2) < 1e-8);
    CHECK(sq.difference <= 1e-8);

    const auto grp = regular_rep(s3_table());
    const auto s3 = group_span(grp, {0, 1, 2, 3, 4, 5});
    const auto ginc = UnitalInclusion::make(scalar_algebra(6), s3);
    const auto gtau = TraceFunctional::normalized(6);
    for (Index m : {2, 3}) {
      const auto ti = tensor_inclusion(ginc, gtau, m);
      CHECK(stability_check(ti, group_span(grp, {0, 1}), group_span(grp, {0, 2})).difference <= 1e-8);
      const auto nested = stability_check(ti, group_span(grp, {0, 1}), s3);
      CHECK(std::abs(nested.base.cos_value - 1.0 / std::sqrt(5.0)) < 1e-10);
      CHECK(nested.difference <= 1e-8);
    }
  }
}
