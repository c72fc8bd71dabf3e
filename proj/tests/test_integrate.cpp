#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "birch/integrate.hpp"
#include "birch/verify.hpp"

using namespace birch;

namespace {

OneFormRep single_term(std::shared_ptr<const ForestTable> table, const std::string& forest,
                       double v) {
  OneFormRep phi(table, 1);
  phi.set(parse_forest(forest), 0, v);
  return phi;
}

}  // namespace

TEST_CASE("parallel translation") {
  auto table = ForestTable::get(2, 2);
  Character b(table);
  b.set(leaf(1), 0.7);
  b.set(leaf(2), -1.2);
  b.set(parse_tree("2(1)"), 0.4);

  // translation by the identity does nothing
  auto phi = single_term(table, "2(1)", 3.0);
  auto same = translate(phi, Character::identity(table));
  for (int fid = 1; fid < table->num_forests(); ++fid)
    CHECK(same.at(fid, 0) == doctest::Approx(phi.at(fid, 0)));

  // a primitive term is invariant
  auto prim = translate(single_term(table, "1", 2.0), b);
  CHECK(prim.at(table->id(parse_forest("1")), 0) == doctest::Approx(2.0));
  CHECK(prim.norm() == doctest::Approx(2.0));

  // phi on [.1]_2 picks up a .2 term with coefficient phi * (b,.1)
  auto shifted = translate(phi, b);
  CHECK(shifted.at(table->id(parse_forest("2(1)")), 0) == doctest::Approx(3.0));
  CHECK(shifted.at(table->id(parse_forest("2")), 0) == doctest::Approx(3.0 * 0.7));

  // defining property: phi_b(c) = phi(bc) - phi(b) on random characters
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    Character c(table);
    for (size_t s = 0; s < table->tree_ids.size(); ++s)
      c.tree_value(s) = (static_cast<double>(rng() % 200) - 100) / 60.0;
    double lhs = shifted.evaluate(c)[0];
    double rhs = phi.evaluate(b.group_product(c))[0] - phi.evaluate(b)[0];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }

  // translation composes along the group: (phi_b)_c = phi_{bc}
  for (int k = 0; k < 5; ++k) {
    OneFormRep psi(table, 1);
    Character c(table);
    for (int fid = 1; fid < table->num_forests(); ++fid)
      psi.at(fid, 0) = (static_cast<double>(rng() % 200) - 100) / 80.0;
    for (size_t s = 0; s < table->tree_ids.size(); ++s)
      c.tree_value(s) = (static_cast<double>(rng() % 200) - 100) / 70.0;
    OneFormRep two_steps = translate(translate(psi, b), c);
    OneFormRep one_step = translate(psi, b.group_product(c));
    for (int fid = 1; fid < table->num_forests(); ++fid)
      CHECK(two_steps.at(fid, 0) == doctest::Approx(one_step.at(fid, 0)).epsilon(1e-11));
  }
}

TEST_CASE("fiber product and graft") {
  auto table = ForestTable::get(2, 2);
  auto p1 = single_term(table, "1", 2.0);
  auto p2 = single_term(table, "2", -3.0);
  auto prod = fiber_multiply(p1, p2);
  CHECK(prod.at(table->id(parse_forest("1 2")), 0) == doctest::Approx(-6.0));

  auto grafted = fiber_graft(p1, p2);
  CHECK(grafted.at(table->id(parse_forest("2(1)")), 0) == doctest::Approx(-6.0));

  // degree overflow terms are silently dropped
  auto heavy = fiber_multiply(single_term(table, "1 2", 1.0), p2);
  CHECK(heavy.norm() == doctest::Approx(0.0));

  // fiber product evaluation agrees with the double sum over forest splits
  std::mt19937_64 rng(9);
  OneFormRep f1(table, 1), f2(table, 1);
  for (int fid = 1; fid < table->num_forests(); ++fid) {
    f1.at(fid, 0) = (static_cast<double>(rng() % 100) - 50) / 25.0;
    f2.at(fid, 0) = (static_cast<double>(rng() % 100) - 50) / 25.0;
  }
  Character a(table);
  for (size_t s = 0; s < table->tree_ids.size(); ++s)
    a.tree_value(s) = (static_cast<double>(rng() % 100) - 50) / 40.0;
  double direct = 0.0;
  for (int fa = 1; fa < table->num_forests(); ++fa) {
    for (int fb = 1; fb < table->num_forests(); ++fb) {
      int cc = table->concat_id[fa][fb];
      if (cc < 0) continue;
      direct += f1.at(fa, 0) * f2.at(fb, 0) * a.evaluate(cc);
    }
  }
  CHECK(fiber_multiply(f1, f2).evaluate(a)[0] == doctest::Approx(direct).epsilon(1e-12));

  // graft requires tree support on the right
  CHECK_THROWS_AS(fiber_graft(p1, single_term(table, "1 2", 1.0)), std::invalid_argument);
}

TEST_CASE("effect composition helpers") {
  auto table = ForestTable::get(1, 2);
  int n = 4;
  std::vector<OneFormRep> b1(n, single_term(table, "1", 1.0));
  std::vector<OneFormRep> b2(n, single_term(table, "1(1)", 2.0));
  EffectPath y1, y2;
  for (int k = 0; k < n; ++k) {
    y1.times.push_back(k);
    y2.times.push_back(k);
    y1.values.push_back({0.5 * k});
    y2.values.push_back({1.0});
  }
  // beta1 == 0 leaves only the y1-weighted term
  std::vector<OneFormRep> zero(n, OneFormRep(table, 1));
  auto pure = multiply_effects(zero, b2, y1, y2);
  CHECK(pure[2].at(table->id(parse_forest("1(1)")), 0) == doctest::Approx(0.5 * 2 * 2.0));
  auto combo = multiply_effects(b1, b1, y1, y2);
  CHECK(combo[1].at(table->id(parse_forest("1 1")), 0) == doctest::Approx(1.0));

  auto grafted = graft_effects(b1, y1, b1);
  CHECK(grafted[3].at(table->id(parse_forest("1(1)")), 0) == doctest::Approx(1.0));
  CHECK(grafted[3].at(table->id(parse_forest("1")), 0) == doctest::Approx(1.5));
  CHECK_THROWS_AS(graft_effects(b1, y1, std::vector<OneFormRep>(n, single_term(table, "1 1", 1.0))),
                  std::invalid_argument);
}

TEST_CASE("integrate_one_form basics") {
  auto td = ForestTable::get(1, 1);
  LiftModel line{gen_linear({0.0}, {1.0}, 256), 1.0, 1, {}};

  // zero one-form integrates to zero
  PolynomialOneForm zf = PolynomialOneForm::zero(1, 1, 2.0);
  auto z = integrate_one_form(beta_from_one_form(zf, td), line, 0.0, 1.0, {});
  CHECK(z.value[0] == doctest::Approx(0.0));

  // classical calculus value at p = 1
  PolynomialOneForm f = PolynomialOneForm::zero(1, 1, 2.0);
  f.comp[0][0].add_term({1}, Rational(1));
  auto young = integrate_one_form(beta_from_one_form(f, td), line, 0.0, 1.0, {});
  CHECK(std::abs(young.value[0] - 0.5) < 1e-6);
  CHECK(young.level_gaps.size() >= 6);

  // grid-restricted adapter
  BranchedRoughPath x = line.build(1);
  std::vector<OneFormRep> tab;
  for (int k = 0; k < x.grid_size(); ++k) tab.push_back(beta_fiber(f, x.point(k), x.table));
  auto coarse = integrate_one_form_grid(tab, x, 0, x.grid_size() - 1);
  CHECK(std::abs(coarse[0] - 0.5) < 0.5 / 256.0 + 1e-12);
}

TEST_CASE("integrate_one_form flags a non-integrable integrand") {
  auto td = ForestTable::get(1, 1);
  LiftModel line{gen_linear({0.0}, {1.0}, 16), 1.0, 1, {}};
  BetaProvider singular = [td](double t, const std::vector<double>&) {
    OneFormRep b(td, 1);
    b.set(parse_forest("1"), 0, 1.0 / ((1.0 - t) * (1.0 - t)));
    return b;
  };
  CHECK_THROWS_AS(integrate_one_form(singular, line, 0.0, 1.0, {}), NonConvergenceError);
}

TEST_CASE("full integral closed forms") {
  LiftModel line{gen_linear({0.0}, {1.0}, 256), 1.0, 1, {}};

  // f == 0 gives the identity character
  PolynomialOneForm zf = PolynomialOneForm::zero(1, 1, 2.0);
  FullIntegralOpts opts;
  opts.out_degree = 2;
  auto zres = full_integral(zf, line, 0.0, 1.0, opts);
  for (int fid = 1; fid < zres.y.table()->num_forests(); ++fid)
    CHECK(zres.y.evaluate(fid) == doctest::Approx(0.0));

  // f == 1: level 1 is t, (Y,[.1]_1) = int_0^1 r dr = 1/2
  PolynomialOneForm one = PolynomialOneForm::zero(1, 1, 2.0);
  one.comp[0][0].add_term({0}, Rational(1));
  auto yres = full_integral(one, line, 0.0, 1.0, opts);
  CHECK(yres.y.evaluate(parse_forest("1")) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(yres.y.evaluate(parse_forest("1(1)")) - 0.5) < 1e-6);
  // output satisfies the character law by construction; spot-check anyway
  std::vector<double> fv(yres.y.table()->num_forests());
  for (int fid = 0; fid < yres.y.table()->num_forests(); ++fid)
    fv[fid] = yres.y.evaluate(fid);
  CHECK(is_character(fv, *yres.y.table(), 1e-12));

  // the recorded path end point matches the reported character
  CHECK(yres.y_path.back().evaluate(parse_forest("1(1)")) ==
        doctest::Approx(yres.y.evaluate(parse_forest("1(1)"))));
  CHECK(yres.base_times.size() == yres.y_path.size());

  CHECK_THROWS_AS(full_integral(one, line, 0.0, 0.33, opts), std::invalid_argument);
  PolynomialOneForm bad_gamma = one;
  bad_gamma.gamma = 0.5;
  CHECK_THROWS_AS(full_integral(bad_gamma, line, 0.0, 1.0, opts), std::invalid_argument);
}

TEST_CASE("full integral chen identity on a smooth fixture") {
  SamplePath sp = gen_smooth(2, 64, 5, 3, 0.8);
  LiftModel model{sp, 2.0, 2, {}};
  PolynomialOneForm f = random_polynomial_one_form(41, 2, 2, 2.5, 2);
  FullIntegralOpts opts;
  opts.refine.max_levels = 7;
  auto whole = full_integral(f, model, 0.0, 1.0, opts);
  auto first = full_integral(f, model, 0.0, 0.5, opts);
  auto second = full_integral(f, model, 0.5, 1.0, opts);
  auto composed = first.y.group_product(second.y);
  for (int fid = 1; fid < whole.y.table()->num_forests(); ++fid)
    CHECK(std::abs(composed.evaluate(fid) - whole.y.evaluate(fid)) < 1e-6);
}

TEST_CASE("y_tilde") {
  auto line = canonical_lift(gen_linear({0.0}, {1.0}, 4), 2, 2.0);

  PolynomialOneForm zf = PolynomialOneForm::zero(1, 1, 2.5);
  auto z = y_tilde(zf, line, 0, 4);
  CHECK(z.values[0] == doctest::Approx(1.0));
  for (size_t fid = 1; fid < z.values.size(); ++fid)
    CHECK(z.values[fid] == doctest::Approx(0.0));

  // (Ytilde_{s,t}, .j) = beta^j(X_s)(X_{s,t})
  PolynomialOneForm f = PolynomialOneForm::zero(1, 1, 2.5);
  f.comp[0][0].add_term({1}, Rational(1));
  auto yt = y_tilde(f, line, 0, 4);
  auto beta0 = beta_fiber(f, line.point(0), line.table);
  CHECK(yt.values[yt.table_e->id(parse_forest("1"))] ==
        doctest::Approx(beta0.evaluate(line.increment(0, 4))[0]));

  // single-term grafting: f == 1, straight line
  PolynomialOneForm one = PolynomialOneForm::zero(1, 1, 2.5);
  one.comp[0][0].add_term({0}, Rational(1));
  auto yt1 = y_tilde(one, line, 0, 4);
  CHECK(yt1.values[yt1.table_e->id(parse_forest("1(1)"))] == doctest::Approx(0.5));
}

TEST_CASE("single-step integral equals the local approximant on trees") {
  // with one partition interval the compensated sum collapses to
  // phi_rho(s)(X_{s,t}), which must coincide with B_rho(X_{s,t}) from the
  // one-step recursion; checks the two composition code paths against each
  // other on every tree
  SamplePath two;
  two.times = {0.0, 1.0};
  two.points = {{0.1, -0.2}, {0.7, 0.4}};
  LiftModel model{two, 2.0, 2, {}};
  PolynomialOneForm f = random_polynomial_one_form(29, 2, 2, 2.5, 2);
  FullIntegralOpts opts;
  opts.refine.max_levels = 0;
  opts.refine.min_levels = 0;
  auto yres = full_integral(f, model, 0.0, 1.0, opts);
  auto x = model.build(1);
  auto approx = y_tilde(f, x, 0, 1);
  const auto& te = *approx.table_e;
  for (int fid = 1; fid < te.num_forests(); ++fid) {
    if (!te.is_tree[fid]) continue;
    CHECK(yres.y.evaluate(fid) ==
          doctest::Approx(approx.values[fid]).epsilon(1e-12));
  }
}

TEST_CASE("the local approximant is generally not a character") {
  SamplePath sp = gen_smooth(2, 16, 44, 3, 1.0);
  auto x = canonical_lift(sp, 2, 2.0);
  PolynomialOneForm f = random_polynomial_one_form(45, 2, 2, 2.5, 2);
  auto approx = y_tilde(f, x, 0, x.grid_size() - 1);
  CHECK(!is_character(approx.values, *approx.table_e, 1e-6));
}

TEST_CASE("local error report on a constant path is identically zero") {
  SamplePath flat;
  flat.times.resize(17);
  flat.points.assign(17, {1.0});
  for (int k = 0; k <= 16; ++k) flat.times[k] = k / 16.0;
  LiftModel model{flat, 2.0, 2, {}};
  PolynomialOneForm f = random_polynomial_one_form(2, 1, 1, 2.5, 2);
  auto rows = local_error_report(f, model, 3, {});
  for (const auto& row : rows) {
    CHECK(row.remainder == doctest::Approx(0.0));
    CHECK(row.omega == doctest::Approx(0.0));
  }
}

TEST_CASE("local error decays with scale on a smooth fixture") {
  SamplePath sp = gen_smooth(1, 64, 8, 3, 1.0);
  LiftModel model{sp, 2.0, 2, {}};
  PolynomialOneForm f = random_polynomial_one_form(6, 1, 1, 2.5, 2);
  FullIntegralOpts opts;
  opts.refine.max_levels = 5;
  auto rows = local_error_report(f, model, 4, opts);
  REQUIRE(rows.size() == 4);
  CHECK(rows.back().remainder < rows.front().remainder);
  CHECK(rows.back().omega < rows.front().omega);
}

TEST_CASE("translation defect of beta decays at the slow-variation rate") {
  // |beta(X_t) - beta(X_s)_{X_{s,t}}|_rho <~ omega^((gamma ^ ([p]+1) - |rho|)/p)
  SamplePath sp = gen_smooth(2, 64, 12, 3, 0.8);
  BranchedRoughPath x = canonical_lift(sp, 2, 2.0);
  x.ensure_inverses();
  const double gamma = 2.5, p = 2.0;
  PolynomialOneForm f = random_polynomial_one_form(13, 2, 1, gamma, 2);
  auto table = x.table;
  const int scales = 5;
  std::vector<std::vector<double>> defect(table->num_forests(),
                                          std::vector<double>(scales, 0.0));
  std::vector<double> omega(scales, 0.0);
  for (int m = 1; m <= scales; ++m) {
    int span = 64 >> m;
    for (int k = 0; k + span <= 64; k += span) {
      OneFormRep bt = beta_fiber(f, x.point(k + span), table).slice(0);
      OneFormRep bs = beta_fiber(f, x.point(k), table).slice(0);
      OneFormRep moved = translate(bs, x.increment(k, k + span));
      for (int fid = 1; fid < table->num_forests(); ++fid) {
        double dv = std::abs(bt.at(fid, 0) - moved.at(fid, 0));
        defect[fid][m - 1] = std::max(defect[fid][m - 1], dv);
      }
      omega[m - 1] =
          std::max(omega[m - 1], std::pow(p_variation(x, k, k + span), p));
    }
  }
  for (int fid = 1; fid < table->num_forests(); ++fid) {
    double slope = log_log_slope(omega, defect[fid]);
    double want = (std::min(gamma, 3.0) - table->degree_of[fid]) / p - 0.1;
    INFO("forest ", encode(table->forests[fid]), " slope ", slope, " want ", want);
    CHECK(slope >= want);
  }
}
