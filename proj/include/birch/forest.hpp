#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "birch/rational.hpp"

namespace birch {

// Non-planar rooted tree with integer vertex labels. Children are kept in
// canonical sorted order; use canonicalize() after building by hand.
struct Tree {
  int label = 1;
  std::vector<Tree> children;
};

// Commutative monomial of trees, kept canonically sorted. The empty forest
// is the unit.
struct Forest {
  std::vector<Tree> trees;
};

int degree(const Tree& t);
int degree(const Forest& f);
int depth(const Tree& t);
int depth(const Forest& f);

// Total order: (degree, label, children lexicographically). Assumes both
// sides are canonical.
int compare(const Tree& a, const Tree& b);
int compare(const Forest& a, const Forest& b);

inline bool operator<(const Tree& a, const Tree& b) { return compare(a, b) < 0; }
inline bool operator==(const Tree& a, const Tree& b) { return compare(a, b) == 0; }
inline bool operator<(const Forest& a, const Forest& b) { return compare(a, b) < 0; }
inline bool operator==(const Forest& a, const Forest& b) { return compare(a, b) == 0; }

// Recursively sorts children into canonical order. Labels are validated
// against {1..d} when d > 0.
Tree canonicalize(Tree t, int d = 0);
Forest canonicalize(Forest f, int d = 0);

Tree leaf(int label);
Forest forest_of(std::initializer_list<Tree> trees);
Forest tree_as_forest(Tree t);

// Text encoding: a leaf is "i", [rho]_i is "i(<rho>)", a forest is the
// space-separated concatenation of its sorted trees, empty forest is "e".
std::string encode(const Tree& t);
std::string encode(const Forest& f);
Tree parse_tree(const std::string& s);
Forest parse_forest(const std::string& s);

// sigma(rho): order of the automorphism group of the labelled forest.
long long symmetry_factor(const Tree& t);
long long symmetry_factor(const Forest& f);

// [rho]_i : grafts the roots of all trees of rho onto a new root labelled i.
Tree graft_root(const Forest& rho, int label);
// rho > tau : attaches all trees of rho as new children of tau's root.
Tree graft_onto(const Forest& rho, const Tree& tau);

struct CutTerm {
  Forest left;   // pruned part
  Forest right;  // trunk part
  long long mult = 1;
};

// Full admissible-cut coproduct, including the unit terms rho (x) e and
// e (x) rho; multiplicative over forest factors. Capped at degree 3.
std::vector<CutTerm> coproduct(const Tree& t);
std::vector<CutTerm> coproduct(const Forest& f);

// Linear combination of forests with exact rational coefficients. Zero
// coefficients are dropped.
class ForestLinComb {
 public:
  void add(const Forest& f, const Rational& c);
  const std::map<Forest, Rational>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

 private:
  std::map<Forest, Rational> terms_;
};

// Grossman-Larson product, determined by duality with the admissible-cut
// coproduct under symmetry-factor weights. Coefficients must come out as
// nonnegative integers; anything else signals a bug upstream and throws.
ForestLinComb gl_product(const Forest& a, const Forest& b, int d);
ForestLinComb gl_product(const ForestLinComb& a, const ForestLinComb& b, int d);

struct ForestEnumeration {
  std::vector<Forest> forests;  // degrees 1..n, canonical order
  std::vector<Tree> trees;      // the single-tree subset T_d^n
};

// Exhaustive duplicate-free enumeration; n is capped at 3.
ForestEnumeration enumerate_forests(int d, int n);

constexpr int kDegreeCap = 3;

struct GlTerm {
  int forest = -1;
  long long coeff = 0;
};

// Id-indexed tables over all forests of degree <= cap with labels in
// {1..d}. Id 0 is the empty forest; ids are sorted canonically, so they are
// graded by degree. Instances are immutable and shared.
class ForestTable {
 public:
  static std::shared_ptr<const ForestTable> get(int d, int cap);

  int d = 0;
  int cap = 0;
  std::vector<Forest> forests;
  std::vector<int> degree_of;
  std::vector<int> depth_of;
  std::vector<long long> sigma;
  std::vector<char> is_tree;
  std::vector<int> tree_ids;                       // graded canonical order
  std::vector<int> tree_slot;                      // forest id -> index in tree_ids, or -1
  std::vector<std::vector<std::pair<int, int>>> factors;  // (tree forest-id, multiplicity)
  struct IdCut {
    int left, right;
    long long mult;
  };
  std::vector<std::vector<IdCut>> coprod;          // per forest id
  std::vector<std::vector<std::pair<int, int>>> splits;  // unordered proper splits (s1<=s2)
  std::vector<std::vector<int>> graft_root_id;     // [fid][label-1] -> tree fid or -1
  std::vector<std::vector<int>> graft_onto_id;     // [fid][tree fid] -> tree fid or -1
  std::vector<std::vector<int>> concat_id;         // [f1][f2] -> fid or -1
  std::vector<std::vector<std::vector<GlTerm>>> gl;  // [f1][f2] -> terms, empty over cap

  int id(const Forest& f) const;
  int id_of_encoding(const std::string& enc) const;
  int num_forests() const { return static_cast<int>(forests.size()); }
  const std::vector<int>& ids_of_degree(int deg) const { return by_degree_[deg]; }

 private:
  ForestTable() = default;
  void build();
  std::map<std::string, int> id_by_enc_;
  std::vector<std::vector<int>> by_degree_;
};

}  // namespace birch
