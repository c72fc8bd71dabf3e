#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "birch/forest.hpp"

namespace birch {

// Element of the truncated character group G_d^{[p]}. Only tree values are
// stored; forest values are the multiplicative extension, so the character
// law holds by construction. The scalar is double for path numerics and
// Rational for exact identity checks.
template <class S>
class CharacterT {
 public:
  CharacterT() = default;
  explicit CharacterT(std::shared_ptr<const ForestTable> table)
      : table_(std::move(table)), vals_(table_->tree_ids.size(), S(0)) {}

  static CharacterT identity(std::shared_ptr<const ForestTable> table) {
    return CharacterT(std::move(table));
  }

  const std::shared_ptr<const ForestTable>& table() const { return table_; }
  int d() const { return table_->d; }
  int p_floor() const { return table_->cap; }

  S& tree_value(int slot) { return vals_[slot]; }
  const S& tree_value(int slot) const { return vals_[slot]; }

  void set(const Tree& t, S v) {
    int fid = table_->id(tree_as_forest(t));
    if (fid < 0 || !table_->is_tree[fid])
      throw std::invalid_argument("Character::set: unknown tree");
    vals_[table_->tree_slot[fid]] = std::move(v);
  }

  // Multiplicative extension to forests; 1 on the empty forest, 0 above the
  // truncation degree.
  S evaluate(int fid) const {
    if (fid < 0) return S(0);
    S v(1);
    for (const auto& [tid, mult] : table_->factors[fid]) {
      const S& tv = vals_[table_->tree_slot[tid]];
      for (int k = 0; k < mult; ++k) v = v * tv;
    }
    return v;
  }

  S evaluate(const Forest& f) const {
    if (degree(f) > table_->cap) return S(0);
    int fid = table_->id(f);
    if (fid < 0) throw std::invalid_argument("Character::evaluate: foreign forest");
    return evaluate(fid);
  }

  // (ab, tau) = sum over the full coproduct of (a, tau_1)(b, tau_2).
  CharacterT group_product(const CharacterT& b) const {
    require_compatible(b);
    CharacterT out(table_);
    for (size_t slot = 0; slot < table_->tree_ids.size(); ++slot) {
      int fid = table_->tree_ids[slot];
      S acc(0);
      for (const auto& cut : table_->coprod[fid]) {
        acc = acc + evaluate(cut.left) * b.evaluate(cut.right) * S(cut.mult);
      }
      out.vals_[slot] = acc;
    }
    return out;
  }

  // Solves (a a^-1, tau) = 0 degree by degree; the system is triangular
  // with unit diagonal.
  CharacterT inverse() const {
    CharacterT inv(table_);
    for (int deg = 1; deg <= table_->cap; ++deg) {
      for (int fid : table_->ids_of_degree(deg)) {
        if (!table_->is_tree[fid]) continue;
        S acc(0);
        for (const auto& cut : table_->coprod[fid]) {
          if (cut.right == fid) continue;  // the unknown (e (x) tau term)
          acc = acc + evaluate(cut.left) * inv.evaluate(cut.right) * S(cut.mult);
        }
        inv.vals_[table_->tree_slot[fid]] = -acc;
      }
    }
    return inv;
  }

  // (delta_lambda a, rho) = lambda^{|rho|} (a, rho).
  CharacterT dilate(S lambda) const {
    CharacterT out(table_);
    for (size_t slot = 0; slot < vals_.size(); ++slot) {
      int deg = table_->degree_of[table_->tree_ids[slot]];
      S scale(1);
      for (int k = 0; k < deg; ++k) scale = scale * lambda;
      out.vals_[slot] = vals_[slot] * scale;
    }
    return out;
  }

  // max over forests 1 <= |rho| <= [p] of |(a, rho)|^(1/|rho|)
  double norm() const {
    double best = 0.0;
    for (int fid = 1; fid < table_->num_forests(); ++fid) {
      double v = std::abs(to_double(evaluate(fid)));
      best = std::max(best, std::pow(v, 1.0 / table_->degree_of[fid]));
    }
    return best;
  }

  // Full forest-value vector computed through the coproduct formula for the
  // product a*b (not the multiplicative extension); lets tests exercise
  // is_character on something that is not a character by fiat.
  std::vector<S> product_forest_values(const CharacterT& b) const {
    require_compatible(b);
    std::vector<S> out(table_->num_forests(), S(0));
    for (int fid = 0; fid < table_->num_forests(); ++fid) {
      S acc(0);
      for (const auto& cut : table_->coprod[fid]) {
        acc = acc + evaluate(cut.left) * b.evaluate(cut.right) * S(cut.mult);
      }
      out[fid] = acc;
    }
    return out;
  }

 private:
  void require_compatible(const CharacterT& b) const {
    if (!table_ || !b.table_ || table_->d != b.table_->d || table_->cap != b.table_->cap)
      throw std::invalid_argument("Character: dimension mismatch");
  }

  static double to_double(const S& v);

  std::shared_ptr<const ForestTable> table_;
  std::vector<S> vals_;  // by tree slot
};

template <>
inline double CharacterT<double>::to_double(const double& v) {
  return v;
}
template <>
inline double CharacterT<Rational>::to_double(const Rational& v) {
  return v.to_double();
}

using Character = CharacterT<double>;
using RationalCharacter = CharacterT<Rational>;

// True iff the forest-value map is multiplicative across all splittings
// (within tol) and maps the empty forest to 1.
inline bool is_character(const std::vector<double>& forest_values, const ForestTable& table,
                         double tol) {
  if (forest_values.size() != static_cast<size_t>(table.num_forests())) return false;
  if (std::abs(forest_values[0] - 1.0) > tol) return false;
  for (int fid = 0; fid < table.num_forests(); ++fid) {
    for (const auto& [a, b] : table.splits[fid]) {
      if (std::abs(forest_values[fid] - forest_values[a] * forest_values[b]) > tol)
        return false;
    }
  }
  return true;
}

inline bool is_character_exact(const std::vector<Rational>& forest_values,
                               const ForestTable& table) {
  if (forest_values.size() != static_cast<size_t>(table.num_forests())) return false;
  if (forest_values[0] != Rational(1)) return false;
  for (int fid = 0; fid < table.num_forests(); ++fid) {
    for (const auto& [a, b] : table.splits[fid]) {
      if (forest_values[fid] != forest_values[a] * forest_values[b]) return false;
    }
  }
  return true;
}

inline RationalCharacter to_rational(const Character& a) {
  RationalCharacter out(a.table());
  for (size_t slot = 0; slot < a.table()->tree_ids.size(); ++slot)
    out.tree_value(slot) = Rational::from_double(a.tree_value(slot));
  return out;
}

inline Character to_double_character(const RationalCharacter& a) {
  Character out(a.table());
  for (size_t slot = 0; slot < a.table()->tree_ids.size(); ++slot)
    out.tree_value(slot) = a.tree_value(slot).to_double();
  return out;
}

}  // namespace birch
