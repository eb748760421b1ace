#include "ssrkit/decompose.hpp"

#include <doctest.h>

#include "ssrkit/linalg.hpp"
#include "ssrkit/simulate.hpp"

#include "helpers.hpp"

using namespace ssr;
using ssrtest::rowmajor;

namespace {

SubsystemBundle f_decomposed(LtiSystem& sys_out) {
  sys_out = ssrtest::f_system();
  auto es = eigenstructure(sys_out.A);
  auto ds = canonical_projectors(es);
  return decompose_system(sys_out, es, ds);
}

double span_alignment(const Mat& basis, const Vec& v) {
  return (basis * (basis.transpose() * v.normalized())).norm();
}

}  // namespace

TEST_CASE("stacked observation map of sensor 1") {
  LtiSystem sys;
  auto b = f_decomposed(sys);
  Mat want = rowmajor(4, 4,
                      {3, 2, 0, 2,
                       4, 3, -1, 4,
                       6, 5, -3, 10,
                       10, 9, -7, 28});
  CHECK(ssrtest::rel_err(b.obs[0].O, want) < 1e-9);
}

TEST_CASE("per-block image directions of the running example") {
  LtiSystem sys;
  auto b = f_decomposed(sys);

  Vec g1(4), g2(4), g3(4);
  g1 << 1, 1, 1, 1;
  g2 << 1, 2, 4, 8;
  g3 << 1, 3, 9, 27;

  for (int i = 0; i < 4; ++i) {
    const auto& blocks = b.sensor_block[static_cast<std::size_t>(i)];
    REQUIRE(blocks.size() == 3);
    CHECK(blocks[0].rank == 1);
    CHECK(span_alignment(blocks[0].image, g1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(blocks[1].rank == 1);
    CHECK(span_alignment(blocks[1].image, g2) == doctest::Approx(1.0).epsilon(1e-9));
  }

  // Sensors 2 and 3 are blind to the eigenvalue-3 block: exact zeros.
  for (int i : {1, 2}) {
    const auto& sb = b.sensor_block[static_cast<std::size_t>(i)][2];
    CHECK(sb.zero);
    CHECK(sb.rank == 0);
    CHECK(sb.O.norm() == 0.0);
    CHECK(sb.C.norm() == 0.0);
    CHECK(sb.P.norm() == 0.0);
  }
  for (int i : {0, 3}) {
    const auto& sb = b.sensor_block[static_cast<std::size_t>(i)][2];
    CHECK(sb.rank == 1);
    CHECK(span_alignment(sb.image, g3) == doctest::Approx(1.0).epsilon(1e-9));
  }

  CHECK(b.image_rank == std::vector<int>{3, 2, 2, 3});
}

TEST_CASE("block restrictions commute with the canonical projectors") {
  LtiSystem sys;
  auto b = f_decomposed(sys);
  ssr::Rng rng(9);
  for (int i = 0; i < 4; ++i) {
    const Mat& O = b.obs[static_cast<std::size_t>(i)].O;
    for (int j = 0; j < 3; ++j) {
      const auto& sb = b.sensor_block[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      // P~ picks out exactly the O-image of the block component.
      Vec x = rng.vec(4, -2.0, 2.0);
      Vec lhs = sb.P * (O * x);
      Vec rhs = O * (b.sum.projector[static_cast<std::size_t>(j)] * x);
      CHECK((lhs - rhs).norm() < 1e-8);
    }
  }
}

TEST_CASE("nullity of each sensor map splits across the blocks") {
  ssr::Rng rng(31);
  for (int t = 0; t < 10; ++t) {
    auto sys = ssrtest::random_system(rng, rng.uniform_int(2, 5), rng.uniform_int(2, 5));
    auto es = eigenstructure(sys.A);
    auto ds = canonical_projectors(es);
    auto b = decompose_system(sys, es, ds);
    for (int i = 0; i < sys.N(); ++i) {
      const Mat& O = b.obs[static_cast<std::size_t>(i)].O;
      const int nullity = sys.n() - linalg::svd_rank(O, 1e-10);
      int split = 0;
      for (int j = 0; j < b.block_count(); ++j) {
        const auto& sb = b.sensor_block[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        split += ds.dim(j) - sb.rank;
      }
      CHECK(nullity == split);
    }
  }
}

TEST_CASE("kernel direction of sensor 1") {
  LtiSystem sys;
  auto b = f_decomposed(sys);
  Vec k(4);
  k << 2, -3, -1, 0;
  CHECK((b.obs[0].O * k).norm() < 1e-9);
  CHECK(linalg::null_space(b.obs[0].O, 1e-10).cols() == 1);
}

TEST_CASE("measurement projection splits a clean signal by block") {
  LtiSystem sys;
  auto b = f_decomposed(sys);
  Vec x0(4);
  x0 << 1, 1, 0, 1;
  auto yb = exact_measurements(sys, b.obs, x0);

  Vec y1_want(4);
  y1_want << 7, 11, 21, 47;
  CHECK((yb.Y[0] - y1_want).norm() < 1e-9);

  auto pm = project_measurements(b, yb);
  Vec g1(4), g2(4), g3(4);
  g1 << 1, 1, 1, 1;
  g2 << 1, 2, 4, 8;
  g3 << 1, 3, 9, 27;
  CHECK((pm.Y[0][0] - 4.0 * g1).norm() < 1e-8);
  CHECK((pm.Y[0][1] - 2.0 * g2).norm() < 1e-8);
  CHECK((pm.Y[0][2] - g3).norm() < 1e-8);
  for (double r : pm.residual) CHECK(r < 1e-8);

  // Blind blocks contribute empty-by-zero components.
  CHECK(pm.Y[1][2].norm() == 0.0);
}

TEST_CASE("energy outside a sensor's image lands in the residual") {
  LtiSystem sys;
  auto b = f_decomposed(sys);
  Vec x0(4);
  x0 << 1, 1, 0, 1;
  auto yb = exact_measurements(sys, b.obs, x0);

  ssr::Rng rng(41);
  Vec junk = rng.vec(4, -1.0, 1.0);
  Vec outside = junk - b.in_image[0] * junk;
  REQUIRE(outside.norm() > 1e-6);
  outside.normalize();
  yb.Y[0] += 10.0 * outside;

  auto pm = project_measurements(b, yb);
  CHECK(pm.residual[0] == doctest::Approx(10.0).epsilon(1e-8));
  // The block components still read the clean part.
  Vec g3(4);
  g3 << 1, 3, 9, 27;
  CHECK((pm.Y[0][2] - g3).norm() < 1e-7);
}

TEST_CASE("recompose_state assembles block coordinates") {
  LtiSystem sys;
  auto b = f_decomposed(sys);
  const auto& ds = b.sum;

  Vec c1(2), c2(1), c3(1);
  c1 << 1, 0;
  c2 << 1;
  c3 << 1;
  Vec want = ds.basis[0] * c1 + ds.basis[1] * c2 + ds.basis[2] * c3;
  Vec got = recompose_state(ds, {c1, c2, c3});
  CHECK((got - want).norm() < 1e-12);

  // Round trip through the coordinates of an arbitrary state.
  ssr::Rng rng(7);
  Vec x = rng.vec(4, -3.0, 3.0);
  std::vector<std::optional<Vec>> parts;
  for (int j = 0; j < 3; ++j) parts.push_back(Vec(ds.coord[static_cast<std::size_t>(j)] * x));
  CHECK((recompose_state(ds, parts) - x).norm() < 1e-8);

  CHECK_THROWS_AS(recompose_state(ds, {c1, std::nullopt, c3}), ValidationError);
  CHECK_THROWS_AS(recompose_state(ds, {c1, c2}), ValidationError);
  Vec wrong(2);
  wrong << 1, 1;
  CHECK_THROWS_AS(recompose_state(ds, {c1, wrong, c3}), ValidationError);
}

TEST_CASE("decompose_system rejects mismatched inputs") {
  auto sys = ssrtest::f_system();
  auto es = eigenstructure(sys.A);
  auto ds = canonical_projectors(es);

  auto other = ssrtest::example1_system();
  auto es2 = eigenstructure(other.A);
  auto ds2 = canonical_projectors(es2);
  CHECK_THROWS_AS(decompose_system(sys, es2, ds2), ValidationError);
  CHECK_THROWS_AS(decompose_system(sys, es, ds2), ValidationError);
}
