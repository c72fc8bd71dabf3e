#pragma once

#include <map>
#include <string>
#include <vector>

#include "birch/forest.hpp"
#include "birch/rational.hpp"

namespace birch {

// Multivariate polynomial with exact rational coefficients, stored as
// exponent-vector -> coefficient.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;

  void add_term(const std::vector<int>& exps, const Rational& coeff);
  static Polynomial constant(int nvars, const Rational& c);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(const Rational& c) const;

  Polynomial derivative(int var) const;  // 0-based variable index

  double eval(const std::vector<double>& x) const;
  Rational eval_exact(const std::vector<Rational>& x) const;

  const std::map<std::vector<int>, Rational>& terms() const { return terms_; }
  std::string str() const;

 private:
  int nvars_ = 0;
  std::map<std::vector<int>, Rational> terms_;
};

// Polynomial one-form f = (f_1, ..., f_d) : R^d -> L(R^d, R^e); component
// (i, out) is a polynomial. gamma > p is the declared smoothness budget.
struct PolynomialOneForm {
  int d = 1, e = 1;
  double gamma = 2.0;
  std::vector<std::vector<Polynomial>> comp;  // comp[i][out], i in 0..d-1

  void validate() const;
  static PolynomialOneForm zero(int d, int e, double gamma);
};

// Exact partial derivative D^l_{i1..il} f_i; multi-index entries are labels
// in {1..d}.
std::vector<Polynomial> derivative(const PolynomialOneForm& f, int i,
                                   const std::vector<int>& multi_index);

// f_tau: f_i on a leaf, D^l_{i1..il} f_i on a depth-2 tree [.i1 ... .il]_i,
// identically zero when the tree is deeper than 2.
std::vector<Polynomial> f_tau(const PolynomialOneForm& f, const Tree& tau);

std::vector<double> eval_poly_vec(const std::vector<Polynomial>& polys,
                                  const std::vector<double>& x);

// Grid-sampled upper estimate of the Lip(gamma-1) norm on a box; used for
// reporting constants, never for correctness decisions.
struct Box {
  std::vector<double> lo, hi;
};
double lip_norm_estimate(const PolynomialOneForm& f, double gamma_minus_1, const Box& box,
                         int samples_per_dim = 7);

// JSON config:
// {"d":..,"e":..,"gamma":..,
//  "components": [ [ [ {"monomial":[..],"coeff":..}, ..] per out ] per i ]}
PolynomialOneForm one_form_from_json_text(const std::string& text);
std::string one_form_to_json_text(const PolynomialOneForm& f);

}  // namespace birch
