#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "birch/fiber.hpp"
#include "birch/path.hpp"
#include "birch/polynomial.hpp"

namespace birch {

// Raised when the refinement sequence of compensated Riemann sums stops
// being Cauchy; the CLI maps it to exit code 3.
struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One-form along the path, evaluable at any time (the driver model is
// piecewise linear, so sub-grid evaluation is well defined).
using BetaProvider = std::function<OneFormRep(double t, const std::vector<double>& x)>;

// The lifted one-form of a polynomial f: tree coefficients f_tau(x)/sigma(tau).
BetaProvider beta_from_one_form(const PolynomialOneForm& f,
                                std::shared_ptr<const ForestTable> table_d);
// Single evaluation of the same thing.
OneFormRep beta_fiber(const PolynomialOneForm& f, const std::vector<double>& x,
                      std::shared_ptr<const ForestTable> table_d);
std::vector<double> beta_eval(const PolynomialOneForm& f, const std::vector<double>& x,
                              const Character& a);

// Refinement schedule: level j cuts every original sample segment into 2^j
// parts; stops once consecutive values differ by less than gap_tol.
struct RefineOpts {
  int max_levels = 12;
  double gap_tol = 1e-9;
  long long max_fine_steps = 1ll << 21;
  int min_levels = 2;
};

struct IntegrateResult {
  std::vector<double> value;       // finest value in R^e
  std::vector<double> level_gaps;  // |v_j - v_{j-1}| per refinement step
  int levels_used = 0;
  bool converged = false;
};

// Partition limit of sum beta(X_{t_k})(X_{t_k,t_{k+1}}) over nested dyadic
// refinements of [s, t]; s and t must be sample times of the model.
IntegrateResult integrate_one_form(const BetaProvider& beta, const LiftModel& model, double s,
                                   double t, const RefineOpts& opts = {});

// Grid-restricted Riemann sum for a one-form tabulated on the grid of a
// built path (no sub-grid refinement).
std::vector<double> integrate_one_form_grid(const std::vector<OneFormRep>& beta,
                                            const BranchedRoughPath& x, int i0, int i1);

// Scalar effect path: values of y on a grid together with the one-form that
// generates it.
struct EffectPath {
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // R^e per grid time
  std::vector<OneFormRep> one_forms;
};

// One-form of the product effect y1*y2 (scalar effects):
// beta(t)(a) = y1(t) beta2(t)(a) + beta1(t)(a) y2(t) + (beta1(t) beta2(t))(a).
std::vector<OneFormRep> multiply_effects(const std::vector<OneFormRep>& beta1,
                                         const std::vector<OneFormRep>& beta2,
                                         const EffectPath& y1, const EffectPath& y2);

// One-form of t -> int y1 d y2 (scalar effects, beta2 tree-supported):
// beta(t)(a) = y1(t) beta2(t)(a) + (beta1(t) > beta2(t))(a).
std::vector<OneFormRep> graft_effects(const std::vector<OneFormRep>& beta1,
                                      const EffectPath& y1,
                                      const std::vector<OneFormRep>& beta2);

struct FullIntegralOpts {
  RefineOpts refine;
  int out_degree = 0;  // 0: use the driver's [p]
};

struct FullIntegralResult {
  Character y;                      // Y_{s,t} as a character over e labels
  std::vector<double> base_times;   // original sample times in [s, t]
  std::vector<Character> y_path;    // Y_{s, r} at base grid points (finest level)
  std::vector<double> level_gaps;
  int levels_used = 0;
  bool converged = false;
};

// The rough integral: level 1 is the increment of y = int beta(X) dX, tree
// components come from the recursive effect integration, forest components
// are filled multiplicatively.
FullIntegralResult full_integral(const PolynomialOneForm& f, const LiftModel& model, double s,
                                 double t, const FullIntegralOpts& opts = {});

// One-step local approximant: (Ytilde_{s,t}, rho) = B_rho(X_{s,t}) with
// B built from beta(X_s) by fiber products and grafts. Values are indexed by
// the e-labelled forest table (slot 0, the empty forest, holds 1). Generally
// not a character.
struct LocalApproximant {
  std::shared_ptr<const ForestTable> table_e;
  std::vector<double> values;
};
LocalApproximant y_tilde(const PolynomialOneForm& f, const BranchedRoughPath& x, int i0,
                         int i1, int out_degree = 0);
// The B_rho fiber elements themselves (for consistency checks).
std::vector<OneFormRep> y_tilde_one_forms(const PolynomialOneForm& f,
                                          const BranchedRoughPath& x, int i0,
                                          int out_degree = 0);

struct ErrorRow {
  int scale = 0;             // dyadic level of the interval family
  double remainder = 0.0;    // max over rho and intervals of |(Y,rho)-(Ytilde,rho)|
  double remainder_level1 = 0.0;  // max over intervals of |y_t - y_s - beta(X_s)(X_{s,t})|
  double omega = 0.0;        // max over intervals of omega(s,t)
};

// Per-scale table for slope regressions of the local error against the
// control.
std::vector<ErrorRow> local_error_report(const PolynomialOneForm& f, const LiftModel& model,
                                         int max_scale, const FullIntegralOpts& opts = {});

// Least-squares slope of log(err) vs log(omega), skipping noise-floor rows.
double log_log_slope(const std::vector<double>& omega, const std::vector<double>& err,
                     double floor = 1e-13);

}  // namespace birch
