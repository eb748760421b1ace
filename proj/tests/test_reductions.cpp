#include "ssrkit/reductions.hpp"

#include <doctest.h>

#include "ssrkit/linalg.hpp"
#include "ssrkit/simulate.hpp"
#include "ssrkit/solvers.hpp"

#include "helpers.hpp"

using namespace ssr;
using ssrtest::rowmajor;

TEST_CASE("sparsest-solution instance validation") {
  CsInstance ok{rowmajor(1, 3, {1, 1, 1}), Vec::Ones(1)};
  CHECK_NOTHROW(validate_cs(ok, 1e-10));

  CsInstance square{rowmajor(2, 2, {1, 0, 0, 1}), Vec::Ones(2)};
  CHECK_THROWS_AS(validate_cs(square, 1e-10), ValidationError);

  CsInstance deficient{rowmajor(2, 3, {1, 1, 1, 2, 2, 2}), Vec::Ones(2)};
  CHECK_THROWS_AS(validate_cs(deficient, 1e-10), ValidationError);

  CsInstance short_b{rowmajor(1, 3, {1, 1, 1}), Vec::Ones(2)};
  CHECK_THROWS_AS(validate_cs(short_b, 1e-10), ValidationError);
}

TEST_CASE("sparsest-solution rewrite as state reconstruction") {
  CsInstance inst{rowmajor(1, 3, {1, 1, 1}), Vec::Ones(1)};
  auto red = cs_to_ssr(inst);

  CHECK(red.sys.n() == 2);
  CHECK(red.sys.N() == 3);
  CHECK((red.sys.A - Mat::Identity(2, 2)).norm() == 0.0);
  CHECK((inst.F * red.kernel).norm() < 1e-12);
  CHECK((red.kernel.transpose() * red.kernel - Mat::Identity(2, 2)).norm() < 1e-12);
  Vec third = Vec::Constant(3, 1.0 / 3.0);
  CHECK((red.particular - third).norm() < 1e-12);
  for (int i = 0; i < 3; ++i) {
    CHECK(red.yb.Y[static_cast<std::size_t>(i)].size() == 1);
    CHECK(red.yb.Y[static_cast<std::size_t>(i)](0) == doctest::Approx(1.0 / 3.0));
  }

  // Any reconstruction answer translates back to a candidate error vector.
  Vec x = Vec::Zero(2);
  CHECK((red.recover_error(x) - red.particular).norm() < 1e-12);
}

TEST_CASE("direct support search on the sparsest-solution problem") {
  CsInstance inst{rowmajor(1, 3, {1, 1, 1}), Vec::Ones(1)};
  auto res = cs_min_support(inst);
  CHECK(res.sparsity == 1);
  CHECK(res.support == std::vector<int>{1});
  CHECK(res.exhaustive);
  CHECK(res.exact_arithmetic);
  Vec want(3);
  want << 1, 0, 0;
  CHECK((res.e - want).norm() < 1e-12);

  CsInstance zero{rowmajor(1, 3, {1, 1, 1}), Vec::Zero(1)};
  auto rz = cs_min_support(zero);
  CHECK(rz.sparsity == 0);
  CHECK(rz.support.empty());

  CsInstance infeasible{rowmajor(2, 2, {1, 1, 2, 2}), (Vec(2) << 1, 3).finished()};
  CHECK_THROWS_AS(cs_min_support(infeasible), InfeasibleError);

  CsInstance fractional{rowmajor(1, 2, {0.5, 0.25}), Vec::Ones(1)};
  auto rf = cs_min_support(fractional);
  CHECK(rf.sparsity == 1);
  CHECK_FALSE(rf.exact_arithmetic);
}

TEST_CASE("support search and reduced reconstruction count the same minimum") {
  ssr::Rng rng(19);
  for (int t = 0; t < 15; ++t) {
    const int m = rng.uniform_int(1, 2);
    const int n = rng.uniform_int(m + 1, 5);
    Mat F(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) F(i, j) = rng.uniform_int(-2, 2);
    if (linalg::svd_rank(F, 1e-10) != m) continue;
    Vec b(m);
    for (int i = 0; i < m; ++i) b(i) = rng.uniform_int(-2, 2);

    CsInstance inst{F, b};
    auto direct = cs_min_support(inst);
    auto red = cs_to_ssr(inst);
    SolveOptions opt;
    opt.s_max = n;
    auto obs = all_observability_matrices(red.sys);
    auto sol = brute_force_ssr(red.sys, obs, red.yb, opt);
    CHECK(static_cast<int>(sol.attack_set.size()) == direct.sparsity);
  }
}

TEST_CASE("row-degeneracy instance validation and rewrite") {
  DegeneracyInstance inst{rowmajor(3, 2, {1, 0, 0, 1, 1, 0})};
  CHECK_NOTHROW(validate_degeneracy(inst, 1e-10));
  auto red = degeneracy_to_unobservability(inst);
  CHECK(red.r == 1);
  CHECK(red.sys.n() == 2);
  CHECK(red.sys.N() == 3);
  CHECK((red.sys.A - Mat::Identity(2, 2)).norm() == 0.0);
  CHECK((red.sys.sensor(3).C - rowmajor(1, 2, {1, 0})).norm() == 0.0);

  DegeneracyInstance wide{rowmajor(1, 2, {1, 0})};
  CHECK_THROWS_AS(validate_degeneracy(wide, 1e-10), ValidationError);

  DegeneracyInstance rank_def{rowmajor(3, 2, {1, 1, 2, 2, 3, 3})};
  CHECK_THROWS_AS(validate_degeneracy(rank_def, 1e-10), ValidationError);
}

TEST_CASE("degeneracy witnesses on known instances") {
  auto r1 = linear_degeneracy({rowmajor(3, 2, {1, 0, 0, 1, 1, 0})});
  CHECK(r1.degenerate);
  CHECK(r1.dependent == std::vector<int>{1, 3});
  CHECK(r1.removed == std::vector<int>{2});
  CHECK(r1.exact_arithmetic);

  auto r2 = linear_degeneracy({rowmajor(3, 2, {1, 1, 2, 2, 0, 1})});
  CHECK(r2.degenerate);
  CHECK(r2.dependent == std::vector<int>{1, 2});
  CHECK(r2.removed == std::vector<int>{3});

  auto r3 = linear_degeneracy({rowmajor(3, 2, {1, 0, 0, 1, 1, 1})});
  CHECK_FALSE(r3.degenerate);
  CHECK(r3.dependent.empty());
  CHECK(r3.exhaustive);
}

TEST_CASE("degeneracy agrees with the removal-set unobservability scan") {
  ssr::Rng rng(43);
  int degenerate_seen = 0;
  for (int t = 0; t < 20; ++t) {
    const int n = rng.uniform_int(2, 3);
    const int p = rng.uniform_int(n + 1, 6);
    Mat F(p, n);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < n; ++j) F(i, j) = rng.uniform_int(-1, 1);
    if (linalg::svd_rank(F, 1e-10) != n) continue;

    DegeneracyInstance inst{F};
    auto direct = linear_degeneracy(inst);
    std::vector<Mat> rows;
    for (int i = 0; i < p; ++i) rows.push_back(F.row(i));
    auto scan = r_sparse_unobservability(rows, p - n);
    CHECK(direct.degenerate == scan.found);
    if (direct.degenerate) {
      ++degenerate_seen;
      // The two scans enumerate in different orders, so the witnesses may
      // differ; each must still certify its own claim.
      Mat sub(n, n);
      for (int k = 0; k < n; ++k) sub.row(k) = F.row(direct.dependent[static_cast<std::size_t>(k)] - 1);
      CHECK(linalg::svd_rank(sub, 1e-10) < n);
      Mat kept(p - static_cast<int>(scan.removed.size()), n);
      int at = 0;
      std::size_t ri = 0;
      for (int i = 1; i <= p; ++i) {
        if (ri < scan.removed.size() && scan.removed[ri] == i) {
          ++ri;
          continue;
        }
        kept.row(at++) = F.row(i - 1);
      }
      CHECK(linalg::svd_rank(kept, 1e-10) < n);
    }
  }
  CHECK(degenerate_seen > 0);
}

TEST_CASE("square inputs are left to the removal scan") {
  // The degeneracy wrapper insists on strictly tall matrices; the map-level
  // scan still answers the r = 0 question directly.
  CHECK_THROWS_AS(linear_degeneracy({rowmajor(2, 2, {1, 1, 2, 2})}), ValidationError);

  std::vector<Mat> rows{rowmajor(1, 2, {1, 1}), rowmajor(1, 2, {2, 2})};
  auto scan = r_sparse_unobservability(rows, 0);
  CHECK(scan.found);
  CHECK(scan.removed.empty());

  std::vector<Mat> good{rowmajor(1, 2, {1, 0}), rowmajor(1, 2, {0, 1})};
  CHECK_FALSE(r_sparse_unobservability(good, 0).found);
}
