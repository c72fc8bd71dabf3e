#pragma once

#include <memory>
#include <vector>

#include "birch/character.hpp"
#include "birch/forest.hpp"

namespace birch {

// Fiber element phi = sum over forests rho (1 <= |rho| <= [p]) of phi^rho,
// with phi^rho in L(R, R^e). Stored dense over forest ids; the empty-forest
// slot stays zero.
class OneFormRep {
 public:
  OneFormRep() = default;
  OneFormRep(std::shared_ptr<const ForestTable> table, int e)
      : table_(std::move(table)), e_(e), c_(static_cast<size_t>(table_->num_forests()) * e, 0.0) {}

  const std::shared_ptr<const ForestTable>& table() const { return table_; }
  int e() const { return e_; }

  double& at(int fid, int j) { return c_[static_cast<size_t>(fid) * e_ + j]; }
  double at(int fid, int j) const { return c_[static_cast<size_t>(fid) * e_ + j]; }

  void set(const Forest& f, int j, double v) { at(require_id(f), j) = v; }
  double get(const Forest& f, int j) const { return at(require_id(f), j); }

  void clear() { std::fill(c_.begin(), c_.end(), 0.0); }
  bool tree_only() const;

  // phi(a) = sum_rho phi^rho (a, rho)
  std::vector<double> evaluate(const Character& a) const;
  // same, against precomputed forest values of a character
  std::vector<double> evaluate_dense(const std::vector<double>& forest_values) const;

  // |phi|_rho = max_j |phi^rho_j|, and the max over rho
  double norm_rho(int fid) const;
  double norm() const;

  OneFormRep slice(int j) const;  // scalar component
  OneFormRep& add_scaled(const OneFormRep& o, double s);

 private:
  int require_id(const Forest& f) const;
  std::shared_ptr<const ForestTable> table_;
  int e_ = 0;
  std::vector<double> c_;
};

// Parallel translation: phi_b(c) = phi(bc) - phi(b). Coefficients come from
// pairing phi against the coproduct and dropping the constant term.
OneFormRep translate(const OneFormRep& phi, const Character& b);

// (phi1 phi2)(a) = sum phi1^r1 phi2^r2 (a, r1 r2), |r1|+|r2| <= [p]. Scalar
// fiber elements only.
OneFormRep fiber_multiply(const OneFormRep& phi1, const OneFormRep& phi2);

// (phi1 > phi2)(a) = sum phi1^rho phi2^tau (a, rho > tau); phi2 must be
// supported on trees.
OneFormRep fiber_graft(const OneFormRep& phi1, const OneFormRep& phi2);

// In-place variants used by the integrator hot loop; all reps share a table.
void fiber_multiply_into(OneFormRep& out, const OneFormRep& phi1, const OneFormRep& phi2);
void fiber_graft_into(OneFormRep& out, const OneFormRep& phi1, const OneFormRep& phi2);

}  // namespace birch
