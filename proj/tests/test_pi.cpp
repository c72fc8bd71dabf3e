#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "birch/pi.hpp"
#include "birch/verify.hpp"

using namespace birch;

TEST_CASE("generator sets") {
  auto g11 = compute_generators(1, 1);
  CHECK(g11.K() == 1);
  CHECK(encode(g11.table->forests[g11.tree_fids[0]]) == "1");

  auto g12 = compute_generators(1, 2);
  REQUIRE(g12.K() == 2);
  CHECK(encode(g12.table->forests[g12.tree_fids[1]]) == "1(1)");

  auto g22 = compute_generators(2, 2);
  REQUIRE(g22.K() == 5);
  std::vector<std::string> names;
  for (int fid : g22.tree_fids) names.push_back(encode(g22.table->forests[fid]));
  CHECK(names == std::vector<std::string>{"1", "2", "1(1)", "1(2)", "2(2)"});

  // degree-3 complement counts, frozen from the graded dimension series
  // (forest dims 1,2,4 for d=1 and 2,7,26 for d=2)
  CHECK(compute_generators(1, 3).K() == 3);
  CHECK(compute_generators(2, 3).K() == 11);
}

TEST_CASE("word degree") {
  auto gens = compute_generators(2, 2);
  CHECK(word_degree(Word{{}}, gens) == 0);
  CHECK(word_degree(Word{{1}}, gens) == 1);
  CHECK(word_degree(Word{{1, 5}}, gens) == 3);
  CHECK_THROWS_AS(word_degree(Word{{9}}, gens), std::invalid_argument);
}

TEST_CASE("word count matches the graded dimension") {
  for (int d = 1; d <= 2; ++d) {
    for (int pf = 1; pf <= 3; ++pf) {
      auto gens = compute_generators(d, pf);
      PiBasisChange bc(gens);
      size_t expect = 0;
      for (int n = 1; n <= pf; ++n) expect += gens.table->ids_of_degree(n).size();
      CHECK(bc.words().size() == expect);
    }
  }
}

TEST_CASE("level-1-only generators reduce to the classical signature case") {
  auto gens = compute_generators(2, 1);
  CHECK(gens.K() == 2);
  auto x = canonical_lift(gen_smooth(2, 32, 3, 2, 1.0), 1, 1.0);
  auto z = build_companion_pi_path(x, gens);
  // coordinates are the level-1 path itself
  for (int k = 0; k < x.grid_size(); ++k) {
    auto pt = x.point(k);
    auto p0 = x.point(0);
    CHECK(z.abs[k][0] == doctest::Approx(pt[0] - p0[0]).epsilon(1e-12));
    CHECK(z.abs[k][1] == doctest::Approx(pt[1] - p0[1]).epsilon(1e-12));
  }
}

TEST_CASE("constant driver gives a vanishing companion") {
  SamplePath flat;
  flat.times = {0.0, 0.5, 1.0};
  flat.points.assign(3, {2.0, -1.0});
  auto x = canonical_lift(flat, 2, 2.0);
  auto z = build_companion_pi_path(x, compute_generators(2, 2));
  for (const auto& row : z.abs)
    for (double v : row) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("companion of the canonical line lift, d=1 p=2") {
  // golden values for the solved normalization: the second coordinate is the
  // group-like remainder (X,[.1]_1) - (X,.1)^2/2, which vanishes for the
  // canonical lift of a line; the double-letter word carries (X,.1)^2/2
  auto x = canonical_lift(gen_linear({0.0}, {1.0}, 8), 2, 2.0);
  auto gens = compute_generators(1, 2);
  auto z = build_companion_pi_path(x, gens);
  auto zc = z.increment(0, 8);
  auto& bc = *z.basis;
  CHECK(zc[bc.word_index(Word{{1}})] == doctest::Approx(1.0));
  CHECK(zc[bc.word_index(Word{{1, 1}})] == doctest::Approx(0.5));
  CHECK(zc[bc.word_index(Word{{2}})] == doctest::Approx(0.0));
  CHECK(z.max_shuffle_defect() < 1e-12);
}

TEST_CASE("shuffle law holds exactly for word coefficients of characters") {
  // the word coordinates of any character form a shuffle character; exact
  // rational check through the basis change
  std::mt19937_64 rng(77);
  for (int pf = 2; pf <= 3; ++pf) {
    auto table = ForestTable::get(2, pf);
    auto gens = compute_generators(2, pf);
    PiBasisChange bc(gens);
    for (int inst = 0; inst < 5; ++inst) {
      RationalCharacter a(table);
      for (size_t s = 0; s < table->tree_ids.size(); ++s)
        a.tree_value(s) = Rational(static_cast<long long>(rng() % 9) - 4,
                                   static_cast<long long>(rng() % 3) + 1);
      auto c = bc.word_coefficients_exact(a);
      const auto& words = bc.words();
      for (size_t i = 0; i < words.size(); ++i) {
        for (size_t j = i; j < words.size(); ++j) {
          if (word_degree(words[i], gens) + word_degree(words[j], gens) > pf) continue;
          Rational lhs = c[i] * c[j];
          Rational rhs(0);
          for (const auto& [w, mult] : shuffle(words[i].letters, words[j].letters))
            rhs += Rational(mult) * c[bc.word_index(Word{w})];
          CHECK(lhs == rhs);
        }
      }
    }
  }
}

TEST_CASE("shuffle defect of companion paths stays at rounding level") {
  auto x = canonical_lift(gen_smooth(2, 64, 15, 3, 1.0), 2, 2.0);
  auto z = build_companion_pi_path(x, compute_generators(2, 2));
  CHECK(z.max_shuffle_defect() < 1e-10);

  SamplePath sp = gen_smooth(2, 64, 16, 3, 1.0);
  Perturbation c{1, 2, {}};
  for (double t : sp.times) c.values.push_back(-0.25 * t);
  auto ito = ito_like_lift(sp, {c}, 2.0);
  auto zi = build_companion_pi_path(ito, compute_generators(2, 2));
  CHECK(zi.max_shuffle_defect() < 1e-10);
}

TEST_CASE("pi first level: zero one-form") {
  auto gens = compute_generators(1, 2);
  LiftModel line{gen_linear({0.0}, {1.0}, 16), 2.0, 2, {}};
  PolynomialOneForm zf = PolynomialOneForm::zero(1, 1, 2.5);
  auto res = first_level_pi_integral(zf, line, gens, 0.0, 1.0, {});
  CHECK(res.value[0] == doctest::Approx(0.0));
}

TEST_CASE("pi first level reduces to the young integral when [p]=1") {
  auto gens = compute_generators(1, 1);
  LiftModel line{gen_linear({0.0}, {1.0}, 32), 1.0, 1, {}};
  PolynomialOneForm f = PolynomialOneForm::zero(1, 1, 2.0);
  f.comp[0][0].add_term({2}, Rational(1));  // f(x) = x^2
  RefineOpts ro;
  ro.max_levels = 10;
  auto pi_res = first_level_pi_integral(f, line, gens, 0.0, 1.0, ro);
  auto young = integrate_one_form(beta_from_one_form(f, ForestTable::get(1, 1)), line, 0.0,
                                  1.0, ro);
  CHECK(pi_res.value[0] == doctest::Approx(young.value[0]).epsilon(1e-10));
}

TEST_CASE("pi first level matches the branched ito value") {
  // d=e=1, p=2, c_11(t) = -t/2 over x_t = t, f(x) = x: both pipelines
  // integrate to 0
  SamplePath sp = gen_linear({0.0}, {1.0}, 64);
  Perturbation c{1, 1, {}};
  for (double t : sp.times) c.values.push_back(-t / 2);
  LiftModel ito{sp, 2.0, 2, {c}};
  PolynomialOneForm f = PolynomialOneForm::zero(1, 1, 2.5);
  f.comp[0][0].add_term({1}, Rational(1));
  RefineOpts ro;
  ro.max_levels = 8;
  auto gens = compute_generators(1, 2);
  auto res = first_level_pi_integral(f, ito, gens, 0.0, 1.0, ro);
  CHECK(std::abs(res.value[0]) < 1e-4);
  auto cmp = compare_first_levels(f, ito, 0.0, 1.0, ro);
  CHECK(cmp.gap < 1e-6);
}

TEST_CASE("first level comparison on a smooth d=2 fixture") {
  SamplePath sp = gen_smooth(2, 32, 19, 2, 0.7);
  LiftModel model{sp, 2.0, 2, {}};
  PolynomialOneForm f = random_polynomial_one_form(55, 2, 2, 2.5, 2);
  RefineOpts ro;
  ro.max_levels = 5;
  auto cmp = compare_first_levels(f, model, 0.0, 1.0, ro);
  CHECK(cmp.gap < 1e-4);
  // the per-interval Taylor terms agree to rounding at every level
  for (double r : cmp.termwise_residual) CHECK(r < 1e-10);
}

TEST_CASE("generator dump") {
  auto text = generators_to_json_text(compute_generators(2, 2));
  CHECK(text.find("\"generators\"") != std::string::npos);
  CHECK(text.find("2(2)") != std::string::npos);
}
