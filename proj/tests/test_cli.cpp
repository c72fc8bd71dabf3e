#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "birch/cli.hpp"

using namespace birch;
using nlohmann::json;

namespace {

json linear_config() {
  return json::parse(R"({
    "schema_version": 1,
    "path": {"generator": {"name": "linear", "x0": [0.0], "v": [1.0], "segments": 256}},
    "p": 1.0, "p_floor": 1,
    "gamma": 2.0,
    "one_form": {"d": 1, "e": 1, "gamma": 2.0,
                 "components": [[[{"monomial": [0], "coeff": 1}]]]},
    "seed": 1,
    "out_degree": 2
  })");
}

}  // namespace

TEST_CASE("cmd_lift") {
  json cfg{{"path", {{"generator",
                      {{"name", "linear"}, {"x0", {1.0, 0.0}}, {"v", {2.0, -1.0}}, {"segments", 1}}}}},
           {"p", 1.0}};
  auto res = cli::cmd_lift(cfg);
  REQUIRE(res.exit_code == 0);
  json out = json::parse(res.json_text);
  CHECK(out.at("schema_version") == 1);
  CHECK(out.at("times").size() == 2);
  // level-1 increments equal the coordinate differences
  auto v0 = out.at("values")[0].at("trees");
  auto v1 = out.at("values")[1].at("trees");
  double x10 = v0[0].at("value").get<double>();
  double x11 = v1[0].at("value").get<double>();
  CHECK(x11 - x10 == doctest::Approx(2.0));

  // malformed CSV gives exit 2 and names the row
  {
    std::ofstream f("/tmp/birch_bad.csv");
    f << "t,x1\n0,0\nnot,a,row\n1,1\n";
  }
  json bad{{"path", {{"csv", "/tmp/birch_bad.csv"}}}, {"p", 1.0}};
  auto res2 = cli::cmd_lift(bad);
  CHECK(res2.exit_code == 2);
  CHECK(res2.summary.find("row 3") != std::string::npos);
  std::remove("/tmp/birch_bad.csv");

  // refined grids beyond the desk cap are rejected
  json big = cfg;
  big["path"]["generator"]["segments"] = 4096;
  big["refine"] = 2;
  CHECK(cli::cmd_lift(big).exit_code == 2);
}

TEST_CASE("cmd_integrate") {
  // f == 0 reports the identity character
  json zero = linear_config();
  zero["one_form"]["components"][0][0] = json::array();
  auto res = cli::cmd_integrate(zero);
  REQUIRE(res.exit_code == 0);
  json out = json::parse(res.json_text);
  for (const auto& tv : out.at("Y").at("trees")) CHECK(tv.at("value").get<double>() == 0.0);
  CHECK(out.contains("schema_version"));
  CHECK(out.contains("interval"));
  CHECK(out.contains("y_tilde"));
  CHECK(out.contains("errors"));
  CHECK(out.contains("pvar_Y"));

  // linear fixture: (Y, [.1]_1) = 1/2 within 1e-6
  auto res2 = cli::cmd_integrate(linear_config());
  REQUIRE(res2.exit_code == 0);
  json out2 = json::parse(res2.json_text);
  double tree_val = 0.0;
  for (const auto& tv : out2.at("Y").at("trees"))
    if (tv.at("forest") == "1(1)") tree_val = tv.at("value").get<double>();
  CHECK(std::abs(tree_val - 0.5) < 1e-6);

  // byte-identical reruns
  auto rerun = cli::cmd_integrate(linear_config());
  CHECK(rerun.json_text == res2.json_text);

  json bad = linear_config();
  bad["gamma"] = 0.5;
  CHECK(cli::cmd_integrate(bad).exit_code == 2);
}

TEST_CASE("cmd_verify") {
  json cfg{{"seed", 3}, {"instances", 5}};
  auto res = cli::cmd_verify(cfg, "algebra");
  CHECK(res.exit_code == 0);
  json out = json::parse(res.json_text);
  CHECK(out.at("passed").get<bool>());
  CHECK(out.at("checks").size() >= 5);

  CHECK(cli::cmd_verify(cfg, "analysis").exit_code == 0);
  CHECK(cli::cmd_verify(cfg, "pi").exit_code == 0);
  CHECK(cli::cmd_verify(cfg, "no_such_suite").exit_code == 2);
}

TEST_CASE("cmd_lift matches the committed golden") {
  json cfg{{"path", {{"generator", {{"name", "monomial"}, {"exponents", {1, 2}}, {"segments", 8}}}}},
           {"p", 2.0}};
  auto res = cli::cmd_lift(cfg);
  REQUIRE(res.exit_code == 0);
  json got = json::parse(res.json_text);
  std::ifstream in(std::string(GOLDEN_DIR) + "/monomial_lift.json");
  REQUIRE(in.good());
  json want;
  in >> want;
  REQUIRE(got.at("times").size() == want.at("times").size());
  for (size_t k = 0; k < got.at("values").size(); ++k) {
    const auto& gv = got.at("values")[k].at("trees");
    const auto& wv = want.at("values")[k].at("trees");
    for (size_t s = 0; s < gv.size(); ++s) {
      CHECK(gv[s].at("forest") == wv[s].at("forest"));
      CHECK(gv[s].at("value").get<double>() ==
            doctest::Approx(wv[s].at("value").get<double>()).epsilon(1e-14));
    }
  }
  // closed-form spot checks on the final character: level 1 is (1, 1) and
  // the mixed tree carries int_0^1 r d(r^2) over the interpolant
  const auto& last = want.at("values").back().at("trees");
  double x1 = 0, x2 = 0, mixed = 0;
  for (const auto& tv : last) {
    if (tv.at("forest") == "1") x1 = tv.at("value").get<double>();
    if (tv.at("forest") == "2") x2 = tv.at("value").get<double>();
    if (tv.at("forest") == "2(1)") mixed = tv.at("value").get<double>();
  }
  CHECK(x1 == doctest::Approx(1.0));
  CHECK(x2 == doctest::Approx(1.0));
  CHECK(std::abs(mixed - 2.0 / 3.0) < 0.05);
}

TEST_CASE("cmd_metrics") {
  json cfg{{"p", 1.0},
            {"x1", {{"path", {{"generator", {{"name", "linear"}, {"x0", {0.0}}, {"v", {1.0}},
                                             {"segments", 16}}}}}}},
            {"x2", {{"path", {{"generator", {{"name", "linear"}, {"x0", {0.0}}, {"v", {1.0}},
                                             {"segments", 16}}}}}}}};
  auto res = cli::cmd_metrics(cfg);
  REQUIRE(res.exit_code == 0);
  json out = json::parse(res.json_text);
  CHECK(out.at("dp").get<double>() == doctest::Approx(0.0));
  CHECK(out.at("pvar1").get<double>() == doctest::Approx(1.0));

  json mismatch = cfg;
  mismatch["x2"]["path"]["generator"]["segments"] = 8;
  CHECK(cli::cmd_metrics(mismatch).exit_code == 2);
}
