#include "birch/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace birch {

using nlohmann::json;

int Polynomial::total_degree() const {
  int deg = 0;
  for (const auto& [exps, c] : terms_)
    deg = std::max(deg, std::accumulate(exps.begin(), exps.end(), 0));
  return deg;
}

void Polynomial::add_term(const std::vector<int>& exps, const Rational& coeff) {
  if (static_cast<int>(exps.size()) != nvars_)
    throw std::invalid_argument("Polynomial: exponent vector length mismatch");
  for (int e : exps)
    if (e < 0) throw std::invalid_argument("Polynomial: negative exponent");
  if (coeff.is_zero()) return;
  auto it = terms_.find(exps);
  if (it == terms_.end()) {
    terms_.emplace(exps, coeff);
  } else {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Polynomial Polynomial::constant(int nvars, const Rational& c) {
  Polynomial p(nvars);
  p.add_term(std::vector<int>(nvars, 0), c);
  return p;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, c);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial out(nvars_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      std::vector<int> e(nvars_);
      for (int k = 0; k < nvars_; ++k) e[k] = ea[k] + eb[k];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Polynomial Polynomial::scaled(const Rational& c) const {
  Polynomial out(nvars_);
  for (const auto& [e, v] : terms_) out.add_term(e, v * c);
  return out;
}

Polynomial Polynomial::derivative(int var) const {
  Polynomial out(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    std::vector<int> de = e;
    de[var] -= 1;
    out.add_term(de, c * Rational(e[var]));
  }
  return out;
}

double Polynomial::eval(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != nvars_)
    throw std::invalid_argument("Polynomial::eval: dimension mismatch");
  double acc = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = c.to_double();
    for (int k = 0; k < nvars_; ++k)
      for (int j = 0; j < e[k]; ++j) term *= x[k];
    acc += term;
  }
  return acc;
}

Rational Polynomial::eval_exact(const std::vector<Rational>& x) const {
  if (static_cast<int>(x.size()) != nvars_)
    throw std::invalid_argument("Polynomial::eval_exact: dimension mismatch");
  Rational acc(0);
  for (const auto& [e, c] : terms_) {
    Rational term = c;
    for (int k = 0; k < nvars_; ++k)
      for (int j = 0; j < e[k]; ++j) term *= x[k];
    acc += term;
  }
  return acc;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c.str();
    for (int k = 0; k < nvars_; ++k) {
      if (e[k] > 0) {
        os << "*x" << (k + 1);
        if (e[k] > 1) os << "^" << e[k];
      }
    }
  }
  return os.str();
}

void PolynomialOneForm::validate() const {
  if (d < 1 || e < 1) throw std::invalid_argument("one-form: need d,e >= 1");
  if (static_cast<int>(comp.size()) != d)
    throw std::invalid_argument("one-form: needs d component families");
  for (const auto& fi : comp) {
    if (static_cast<int>(fi.size()) != e)
      throw std::invalid_argument("one-form: each f_i needs e coordinates");
    for (const auto& poly : fi) {
      if (poly.nvars() != d)
        throw std::invalid_argument("one-form: polynomial arity must be d");
    }
  }
}

PolynomialOneForm PolynomialOneForm::zero(int d, int e, double gamma) {
  PolynomialOneForm f;
  f.d = d;
  f.e = e;
  f.gamma = gamma;
  f.comp.assign(d, std::vector<Polynomial>(e, Polynomial(d)));
  return f;
}

std::vector<Polynomial> derivative(const PolynomialOneForm& f, int i,
                                   const std::vector<int>& multi_index) {
  if (i < 1 || i > f.d) throw std::invalid_argument("derivative: component out of range");
  std::vector<Polynomial> out = f.comp[i - 1];
  for (int var : multi_index) {
    if (var < 1 || var > f.d)
      throw std::invalid_argument("derivative: multi-index label out of range");
    for (auto& p : out) p = p.derivative(var - 1);
  }
  return out;
}

std::vector<Polynomial> f_tau(const PolynomialOneForm& f, const Tree& tau) {
  if (depth(tau) > 2) return std::vector<Polynomial>(f.e, Polynomial(f.d));
  std::vector<int> multi;
  multi.reserve(tau.children.size());
  for (const auto& c : tau.children) multi.push_back(c.label);
  return derivative(f, tau.label, multi);
}

std::vector<double> eval_poly_vec(const std::vector<Polynomial>& polys,
                                  const std::vector<double>& x) {
  std::vector<double> out(polys.size());
  for (size_t k = 0; k < polys.size(); ++k) out[k] = polys[k].eval(x);
  return out;
}

namespace {

void walk_box(const Box& box, int samples_per_dim, int dim, std::vector<double>& x,
              const std::function<void(const std::vector<double>&)>& visit) {
  if (dim == static_cast<int>(box.lo.size())) {
    visit(x);
    return;
  }
  for (int k = 0; k < samples_per_dim; ++k) {
    double lam = samples_per_dim == 1 ? 0.5 : static_cast<double>(k) / (samples_per_dim - 1);
    x[dim] = box.lo[dim] + lam * (box.hi[dim] - box.lo[dim]);
    walk_box(box, samples_per_dim, dim + 1, x, visit);
  }
}

}  // namespace

double lip_norm_estimate(const PolynomialOneForm& f, double gamma_minus_1, const Box& box,
                         int samples_per_dim) {
  f.validate();
  if (gamma_minus_1 <= 0) throw std::invalid_argument("lip_norm_estimate: gamma-1 must be > 0");
  if (box.lo.size() != static_cast<size_t>(f.d) || box.hi.size() != static_cast<size_t>(f.d))
    throw std::invalid_argument("lip_norm_estimate: box dimension mismatch");
  // largest integer strictly below gamma-1
  int top = static_cast<int>(std::ceil(gamma_minus_1)) - 1;
  double holder = gamma_minus_1 - top;

  // derivative families per order, flattened over multi-indices
  std::vector<std::vector<Polynomial>> by_order;
  std::vector<std::vector<Polynomial>> frontier;
  for (int i = 1; i <= f.d; ++i)
    for (int out = 0; out < f.e; ++out) frontier.push_back({f.comp[i - 1][out]});
  // frontier holds single polys; level k+1 differentiates every level-k poly
  std::vector<Polynomial> cur;
  for (auto& fr : frontier) cur.push_back(fr[0]);
  std::vector<std::vector<Polynomial>> levels{cur};
  for (int k = 1; k <= top; ++k) {
    std::vector<Polynomial> next;
    for (const auto& p : levels.back())
      for (int var = 0; var < f.d; ++var) next.push_back(p.derivative(var));
    levels.push_back(std::move(next));
  }

  double sup = 0.0;
  std::vector<std::vector<double>> grid_points;
  std::vector<double> x(f.d);
  walk_box(box, samples_per_dim, 0, x,
           [&](const std::vector<double>& pt) { grid_points.push_back(pt); });
  for (const auto& pt : grid_points) {
    for (const auto& level : levels) {
      for (const auto& p : level) sup = std::max(sup, std::abs(p.eval(pt)));
    }
  }
  // Hoelder quotient of the top derivative over sampled pairs
  double quot = 0.0;
  const auto& toplevel = levels.back();
  for (size_t a = 0; a < grid_points.size(); ++a) {
    for (size_t b = a + 1; b < grid_points.size(); ++b) {
      double dist = 0.0;
      for (int k = 0; k < f.d; ++k)
        dist = std::max(dist, std::abs(grid_points[a][k] - grid_points[b][k]));
      if (dist < 1e-12) continue;
      for (const auto& p : toplevel) {
        double diff = std::abs(p.eval(grid_points[a]) - p.eval(grid_points[b]));
        quot = std::max(quot, diff / std::pow(dist, holder));
      }
    }
  }
  return sup + quot;
}

PolynomialOneForm one_form_from_json_text(const std::string& text) {
  json j = json::parse(text);
  PolynomialOneForm f;
  f.d = j.at("d").get<int>();
  f.e = j.at("e").get<int>();
  f.gamma = j.at("gamma").get<double>();
  const auto& comps = j.at("components");
  if (static_cast<int>(comps.size()) != f.d)
    throw std::invalid_argument("one-form JSON: components must have d entries");
  for (const auto& fi : comps) {
    if (static_cast<int>(fi.size()) != f.e)
      throw std::invalid_argument("one-form JSON: each f_i needs e coordinate lists");
    std::vector<Polynomial> row;
    for (const auto& coord : fi) {
      Polynomial p(f.d);
      for (const auto& term : coord) {
        std::vector<int> exps = term.at("monomial").get<std::vector<int>>();
        Rational c = term.at("coeff").is_string()
                         ? Rational::parse(term.at("coeff").get<std::string>())
                         : Rational::from_double(term.at("coeff").get<double>());
        p.add_term(exps, c);
      }
      row.push_back(std::move(p));
    }
    f.comp.push_back(std::move(row));
  }
  f.validate();
  return f;
}

std::string one_form_to_json_text(const PolynomialOneForm& f) {
  json comps = json::array();
  for (const auto& fi : f.comp) {
    json row = json::array();
    for (const auto& p : fi) {
      json terms = json::array();
      for (const auto& [e, c] : p.terms()) {
        terms.push_back({{"monomial", e}, {"coeff", c.str()}});
      }
      row.push_back(terms);
    }
    comps.push_back(row);
  }
  json j{{"d", f.d}, {"e", f.e}, {"gamma", f.gamma}, {"components", comps}};
  return j.dump();
}

}  // namespace birch
