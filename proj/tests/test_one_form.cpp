#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "birch/integrate.hpp"
#include "birch/polynomial.hpp"
#include "birch/verify.hpp"

using namespace birch;

TEST_CASE("polynomial arithmetic and exact derivatives") {
  Polynomial p(2);             // x1^2 x2 + 3/2 x2
  p.add_term({2, 1}, Rational(1));
  p.add_term({0, 1}, Rational(3, 2));
  CHECK(p.total_degree() == 3);
  CHECK(p.eval({2.0, 1.0}) == doctest::Approx(5.5));
  CHECK(p.eval_exact({Rational(1, 2), Rational(4)}) == Rational(7));

  auto d1 = p.derivative(0);
  CHECK(d1.eval({2.0, 3.0}) == doctest::Approx(12.0));
  auto d12 = p.derivative(0).derivative(1);
  auto d21 = p.derivative(1).derivative(0);
  CHECK(d12.terms() == d21.terms());
  CHECK(d12.eval({5.0, 0.0}) == doctest::Approx(10.0));  // D^2_{1,2} (x1^2 x2) = 2 x1

  Polynomial q = Polynomial::constant(2, Rational(2)) + p.scaled(Rational(-1));
  CHECK(q.eval_exact({Rational(1, 2), Rational(4)}) == Rational(-5));
  Polynomial prod = p * q;
  std::vector<double> at{0.3, -1.7};
  CHECK(prod.eval(at) == doctest::Approx(p.eval(at) * q.eval(at)).epsilon(1e-12));
}

TEST_CASE("one-form derivative operator") {
  // linear one-form: all second derivatives vanish
  PolynomialOneForm lin = PolynomialOneForm::zero(2, 1, 2.5);
  lin.comp[0][0].add_term({1, 0}, Rational(2));
  lin.comp[1][0].add_term({0, 1}, Rational(-1));
  for (int i = 1; i <= 2; ++i)
    for (int a = 1; a <= 2; ++a)
      for (int b = 1; b <= 2; ++b)
        CHECK(derivative(lin, i, {a, b})[0].is_zero());

  // mixed partials commute on random polynomials
  auto f = random_polynomial_one_form(3, 2, 2, 3.5, 3);
  for (int i = 1; i <= 2; ++i) {
    auto ab = derivative(f, i, {1, 2});
    auto ba = derivative(f, i, {2, 1});
    for (int j = 0; j < 2; ++j) CHECK(ab[j].terms() == ba[j].terms());
  }
}

TEST_CASE("f_tau") {
  PolynomialOneForm f = PolynomialOneForm::zero(2, 1, 2.5);
  f.comp[0][0].add_term({2, 1}, Rational(1));  // f_1 = x1^2 x2
  f.comp[1][0].add_term({0, 1}, Rational(1));  // f_2 = x2

  CHECK(f_tau(f, leaf(1))[0].terms() == f.comp[0][0].terms());
  // tau = [.2]_1 -> D_2 f_1 = x1^2
  auto d = f_tau(f, parse_tree("1(2)"));
  CHECK(d[0].eval({3.0, 7.0}) == doctest::Approx(9.0));
  // depth three vanishes identically
  CHECK(f_tau(f, parse_tree("1(1(1))"))[0].is_zero());
  // depth-2 tree with two leaves: D^2_{1,1} f_1 = 2 x2
  CHECK(f_tau(f, parse_tree("1(1 1)"))[0].eval({0.0, 4.0}) == doctest::Approx(8.0));
}

TEST_CASE("beta evaluation") {
  auto table = ForestTable::get(1, 2);
  // identity character: all tree values zero -> beta vanishes
  PolynomialOneForm f = PolynomialOneForm::zero(1, 1, 2.5);
  f.comp[0][0].add_term({1}, Rational(1));  // f(x) = x
  Character id = Character::identity(table);
  CHECK(beta_eval(f, {2.0}, id)[0] == doctest::Approx(0.0));

  // d=e=1, f(x)=x: beta(x)(a) = x*(a,.1) + (a,[.1]_1)
  Character a(table);
  a.set(leaf(1), 0.5);
  a.set(parse_tree("1(1)"), -2.0);
  CHECK(beta_eval(f, {3.0}, a)[0] == doctest::Approx(3.0 * 0.5 - 2.0));

  // constant c: only the level-1 term survives
  PolynomialOneForm c = PolynomialOneForm::zero(1, 1, 2.5);
  c.comp[0][0].add_term({0}, Rational(7, 2));
  CHECK(beta_eval(c, {9.0}, a)[0] == doctest::Approx(3.5 * 0.5));
}

TEST_CASE("lip norm estimate") {
  PolynomialOneForm lin = PolynomialOneForm::zero(2, 2, 2.5);
  lin.comp[0][0].add_term({1, 0}, Rational(1));
  lin.comp[1][1].add_term({0, 1}, Rational(1));
  Box box{{-1.0, -1.0}, {1.0, 1.0}};
  double est = lip_norm_estimate(lin, 1.5, box);
  CHECK(est >= 1.0);

  PolynomialOneForm cf = PolynomialOneForm::zero(1, 1, 2.5);
  cf.comp[0][0].add_term({0}, Rational(-3));
  CHECK(lip_norm_estimate(cf, 1.5, Box{{-2.0}, {2.0}}) == doctest::Approx(3.0));

  // monotone in box inclusion
  PolynomialOneForm q = PolynomialOneForm::zero(1, 1, 2.5);
  q.comp[0][0].add_term({2}, Rational(1));
  double small = lip_norm_estimate(q, 1.5, Box{{-1.0}, {1.0}});
  double large = lip_norm_estimate(q, 1.5, Box{{-2.0}, {2.0}});
  CHECK(small <= large);
}

TEST_CASE("one-form json round trip") {
  auto f = random_polynomial_one_form(11, 2, 2, 2.5, 2);
  auto text = one_form_to_json_text(f);
  auto back = one_form_from_json_text(text);
  CHECK(back.d == f.d);
  CHECK(back.e == f.e);
  CHECK(back.gamma == doctest::Approx(f.gamma));
  for (int i = 0; i < f.d; ++i)
    for (int j = 0; j < f.e; ++j) CHECK(back.comp[i][j].terms() == f.comp[i][j].terms());
}

TEST_CASE("exact algebra invariants hold (verify suite)") {
  auto checks = verify_algebra(7, 20);
  for (const auto& c : checks) {
    INFO(c.name);
    CHECK(c.pass);
  }
}
