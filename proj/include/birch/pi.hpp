#pragma once

#include <map>
#include <memory>
#include <vector>

#include "birch/character.hpp"
#include "birch/integrate.hpp"
#include "birch/path.hpp"
#include "birch/polynomial.hpp"
#include "birch/rational.hpp"

namespace birch {

// Free generators of the truncated Grossman-Larson algebra: trees, graded,
// chosen deterministically (canonical order) as a complement of the span of
// products of lower-degree generators. The first d generators are the
// single-vertex trees.
struct GeneratorSet {
  std::shared_ptr<const ForestTable> table;  // d labels, cap = [p]
  std::vector<int> tree_fids;                // generator trees, graded
  std::vector<int> degrees;                  // per generator

  int K() const { return static_cast<int>(tree_fids.size()); }
  int d() const { return table->d; }
  int p_floor() const { return table->cap; }
};

// Exact degree-by-degree linear algebra; throws if the rank structure is
// inconsistent with freeness.
GeneratorSet compute_generators(int d, int p_floor);

struct Word {
  std::vector<int> letters;  // generator indices, 1-based
};

int word_degree(const Word& w, const GeneratorSet& gens);

// pi(w) = nu_{i1} * ... * nu_{im} expanded over forests is a graded basis
// change; words of weight n index the forest space of degree n. A character
// a corresponds to the group-like element sum (a,rho)/sigma(rho) * rho, and
// its word coordinates are A * [(a,rho)/sigma(rho)] per degree.
class PiBasisChange {
 public:
  explicit PiBasisChange(const GeneratorSet& gens);

  const GeneratorSet& gens() const { return gens_; }
  const std::vector<Word>& words() const { return words_; }  // flat, graded
  int word_index(const Word& w) const;

  // flat word coefficients of a character increment
  std::vector<double> word_coefficients(const Character& a) const;
  std::vector<Rational> word_coefficients_exact(const RationalCharacter& a) const;

 private:
  GeneratorSet gens_;
  std::vector<Word> words_;
  std::map<std::vector<int>, int> index_;
  // per degree n: forest ids (columns), word range [begin, end) in words_,
  // and A = (M^T)^{-1} exact and as doubles
  struct Block {
    std::vector<int> forest_ids;
    int begin = 0, end = 0;
    std::vector<std::vector<Rational>> a_exact;
    std::vector<std::vector<double>> a;
  };
  std::vector<Block> blocks_;  // index by degree, 1..cap
};

// Shuffle product of two words with multiplicities.
std::map<std::vector<int>, long long> shuffle(const std::vector<int>& w1,
                                              const std::vector<int>& w2);

// Companion path over the generator coordinates: absolute word functionals
// (Z_{0,t}, w) on the sample grid; increments live in the concatenation
// group, so Chen holds by construction and the shuffle law is inherited from
// the Hopf-algebra correspondence.
struct PiRoughPath {
  GeneratorSet gens;
  std::shared_ptr<const PiBasisChange> basis;
  double p = 1.0;
  std::vector<double> times;
  std::vector<double> x0;                 // base point, first d coordinates
  std::vector<std::vector<double>> abs;   // per time, flat word order

  int num_words() const { return static_cast<int>(basis->words().size()); }
  std::vector<double> coordinate_path(int k) const;  // z^k_t = (Z_{0,t}, word(k))
  std::vector<double> increment(int i, int j) const;
  // max violation of (Z,w1)(Z,w2) = (Z, w1 shuffle w2) over increments of
  // consecutive dyadic spans
  double max_shuffle_defect() const;
};

PiRoughPath build_companion_pi_path(const BranchedRoughPath& x, const GeneratorSet& gens);

// First level of the integral of g = (f_{nu_1}, ..., f_{nu_K}) along Z:
// compensated sums of sum_k sum_{i1..il} D^l f_{nu_k}(x) (Z, i1...il k).
IntegrateResult first_level_pi_integral(const PolynomialOneForm& f, const LiftModel& model,
                                        const GeneratorSet& gens, double s, double t,
                                        const RefineOpts& opts = {});

struct FirstLevelComparison {
  std::vector<double> branched;
  std::vector<double> pi;
  double gap = 0.0;
  // per refinement level: worst per-interval difference of the two local
  // Taylor terms, and the worst interval control
  std::vector<double> termwise_residual;
  std::vector<double> termwise_omega;
};

FirstLevelComparison compare_first_levels(const PolynomialOneForm& f, const LiftModel& model,
                                          double s, double t, const RefineOpts& opts = {});

std::string generators_to_json_text(const GeneratorSet& gens);

}  // namespace birch
