#include "ssrkit/io.hpp"

#include <doctest.h>

#include "helpers.hpp"

using namespace ssr;
using nlohmann::json;

namespace {

json f_doc() {
  return json::parse(R"({
    "A": [[1,0,0,-2],[0.5,1.5,-0.5,2],[-0.5,-0.5,1.5,0],[0,0,0,3]],
    "sensors": [
      {"id": 1, "C": [[3,2,0,2]]},
      {"id": 2, "C": [[2,3,1,-1]]},
      {"id": 3, "C": [[2,2,0,0]]},
      {"id": 4, "C": [[2,3,-1,0]]}
    ],
    "s": 1
  })");
}

}  // namespace

TEST_CASE("instance parsing reads the system and the budget") {
  auto inst = io::parse_instance(f_doc());
  CHECK(inst.sys.n() == 4);
  CHECK(inst.sys.N() == 4);
  REQUIRE(inst.s.has_value());
  CHECK(*inst.s == 1);
  CHECK_FALSE(inst.measurements.has_value());
  CHECK(inst.warnings.empty());
  CHECK(inst.sys.sensor(2).C(0, 3) == -1.0);
}

TEST_CASE("unknown keys warn but do not fail") {
  auto doc = f_doc();
  doc["comment"] = "hello";
  doc["sensors"][0]["label"] = "front";
  auto inst = io::parse_instance(doc);
  REQUIRE(inst.warnings.size() == 2);
  bool top = false, nested = false;
  for (const auto& w : inst.warnings) {
    top = top || w.find("\"comment\"") != std::string::npos;
    nested = nested || w.find("\"label\"") != std::string::npos;
  }
  CHECK(top);
  CHECK(nested);
}

TEST_CASE("instance parsing rejects structural defects") {
  auto no_a = f_doc();
  no_a.erase("A");
  CHECK_THROWS_AS(io::parse_instance(no_a), ValidationError);

  auto ragged = f_doc();
  ragged["A"][1] = json::array({1, 2});
  CHECK_THROWS_AS(io::parse_instance(ragged), ValidationError);

  auto bad_s = f_doc();
  bad_s["s"] = -2;
  CHECK_THROWS_AS(io::parse_instance(bad_s), ValidationError);

  auto bad_tol = f_doc();
  bad_tol["tolerances"] = {{"rank_rtol", -1.0}};
  CHECK_THROWS_AS(io::parse_instance(bad_tol), ValidationError);

  CHECK_THROWS_WITH_AS(io::parse_instance_text("{not json"),
                       doctest::Contains("JSON parse error"), ValidationError);
  CHECK_THROWS_AS(io::parse_instance_text(""), ValidationError);
}

TEST_CASE("measurements must cover every sensor exactly once") {
  auto doc = f_doc();
  doc["measurements"] = json::array();
  for (int i = 1; i <= 4; ++i)
    doc["measurements"].push_back({{"sensor", i}, {"Y", {1.0, 2.0, 3.0, 4.0}}});
  auto inst = io::parse_instance(doc);
  REQUIRE(inst.measurements.has_value());
  CHECK(inst.measurements->size() == 4);

  auto obs = all_observability_matrices(inst.sys);
  auto yb = io::bind_measurements(inst, obs);
  CHECK(yb.Y[0].size() == 4);

  auto dup = doc;
  dup["measurements"][1]["sensor"] = 1;
  CHECK_THROWS_AS(io::parse_instance(dup), ValidationError);

  auto missing = doc;
  missing["measurements"].erase(3);
  CHECK_THROWS_AS(io::parse_instance(missing), ValidationError);

  auto inf = doc;
  inf["measurements"][0]["Y"][2] = "oops";
  CHECK_THROWS_AS(io::parse_instance(inf), ValidationError);

  auto none = io::parse_instance(f_doc());
  CHECK_THROWS_AS(io::bind_measurements(none, obs), ValidationError);
}

TEST_CASE("instance serialization round trips losslessly") {
  auto sys = ssrtest::f_system();
  sys.A(0, 3) = -2.0000000000001;  // not representable in short decimal
  auto obs = all_observability_matrices(sys);
  Vec x0(4);
  x0 << 0.1, 0.2, 0.3, 0.7;
  auto yb = exact_measurements(sys, obs, x0);
  Tolerances tol;
  tol.vote = 3e-6;

  auto doc = io::instance_json(sys, 2, &yb, &tol);
  auto back = io::parse_instance(json::parse(doc.dump()));
  CHECK((back.sys.A - sys.A).norm() == 0.0);
  for (int i = 1; i <= 4; ++i)
    CHECK((back.sys.sensor(i).C - sys.sensor(i).C).norm() == 0.0);
  REQUIRE(back.s.has_value());
  CHECK(*back.s == 2);
  REQUIRE(back.measurements.has_value());
  for (int i = 0; i < 4; ++i)
    CHECK(((*back.measurements)[static_cast<std::size_t>(i)] - yb.Y[static_cast<std::size_t>(i)])
              .norm() == 0.0);
  CHECK(back.tol.vote == 3e-6);
  CHECK(back.warnings.empty());
}

TEST_CASE("eigenvalue labels are compact") {
  CHECK(io::lambda_label({2.0, 0.0}) == "2");
  CHECK(io::lambda_label({-0.5, 0.0}) == "-0.5");
  CHECK(io::lambda_label({1.0, 2.0}) == "1+2i");
  CHECK(io::lambda_label({0.0, -1.0}) == "0-1i");
}

TEST_CASE("matrix and vector payload shapes") {
  Mat m = ssrtest::rowmajor(2, 3, {1, 2, 3, 4, 5, 6});
  auto mj = io::matrix_json(m);
  CHECK(mj["rows"] == 2);
  CHECK(mj["cols"] == 3);
  CHECK(mj["colmajor"] == json::array({1.0, 4.0, 2.0, 5.0, 3.0, 6.0}));

  auto zj = io::matrix_or_zero_json(Mat::Zero(2, 2), true);
  CHECK(zj["zero"] == true);
  CHECK(zj["rows"] == 2);

  CHECK(io::nested_rows_json(m) == json::parse("[[1,2,3],[4,5,6]]"));

  Vec v(2);
  v << 7, 8;
  CHECK(io::vector_json(v) == json::array({7.0, 8.0}));

  CHECK((io::parse_matrix(json::parse("[[1,2],[3,4]]"), "m") -
         ssrtest::rowmajor(2, 2, {1, 2, 3, 4}))
            .norm() == 0.0);
  CHECK_THROWS_AS(io::parse_matrix(json::parse("[]"), "m"), ValidationError);
  CHECK_THROWS_AS(io::parse_matrix(json::parse("[[]]"), "m"), ValidationError);
  CHECK_THROWS_AS(io::parse_vector(json::parse("{\"a\":1}"), "v"), ValidationError);
}

TEST_CASE("analysis and solution documents expose the expected fields") {
  auto sys = ssrtest::f_system();
  auto es = eigenstructure(sys.A);
  auto ds = canonical_projectors(es);
  auto b = decompose_system(sys, es, ds);
  auto eig = eigenvalue_observability(sys, es);
  auto sparse = sparse_observability(sys);
  auto cls = classify_eigenvalues(sys, b, 1);

  auto a = io::analysis_json(es, eig, sparse, &cls);
  CHECK(a["eig"]["index"] == -1);
  CHECK(a["sparse"]["index"] == 1);
  CHECK(a["sparse"]["witness"] == json::array({1, 4}));
  CHECK(a["classification"]["J1"] == json::array({"3"}));
  CHECK(a["classification"]["J2"] == json::array({"2"}));
  CHECK(a["classification"]["J3"] == json::array({"1"}));
  CHECK(a["eig"]["S"]["3"] == json::array({1, 4}));

  auto bj = io::bundle_json(b);
  REQUIRE(bj["blocks"].size() == 3);
  CHECK(bj["blocks"][2]["label"] == "3");
  CHECK(bj["sensors"][1]["per_block"][2]["O"]["zero"] == true);

  SsrSolution sol;
  sol.x = Vec::Zero(4);
  sol.attack_set = {4};
  sol.unique = Uniqueness::ambiguous;
  sol.block_status = {BlockStatus::brute_forced, BlockStatus::voted,
                      BlockStatus::unreconstructable};
  auto sj = io::solution_json(sol, &es);
  CHECK(sj["unique"] == "ambiguous");
  CHECK(sj["per_eigenvalue_status"]["3"] == "unreconstructable");
  CHECK(sj["attack_set"] == json::array({4}));
}
