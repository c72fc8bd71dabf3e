#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "birch/character.hpp"
#include "birch/forest.hpp"

namespace birch {

// Time-stamped samples of a path in R^d; the continuous-time model behind
// every lift is the piecewise-linear interpolant of these samples.
struct SamplePath {
  std::vector<double> times;
  std::vector<std::vector<double>> points;

  int d() const { return points.empty() ? 0 : static_cast<int>(points[0].size()); }
  int segments() const { return static_cast<int>(times.size()) - 1; }
  void validate() const;
  std::vector<double> at(double t) const;  // piecewise-linear
  int index_of_time(double t) const;       // throws on off-grid times
};

// A path t -> c_ij(t) added to the [.i]_j tree component of a lift; must
// start at 0. Sampled on the same grid as the driving path.
struct Perturbation {
  int i = 1, j = 1;
  std::vector<double> values;
};

struct BranchedRoughPath {
  std::shared_ptr<const ForestTable> table;
  double p = 1.0;
  std::vector<double> times;
  std::vector<Character> values;  // absolute positions X_t

  int d() const { return table->d; }
  int p_floor() const { return table->cap; }
  int grid_size() const { return static_cast<int>(times.size()); }
  int index_of_time(double t) const;  // throws on off-grid times
  std::vector<double> point(int i) const;

  // X_s^{-1} X_t. Call ensure_inverses() before using increment() from
  // multiple threads; the DP entry points below do that themselves.
  void ensure_inverses() const;
  Character increment(int i, int j) const;
  Character increment_time(double s, double t) const;

  // Forest values of the increment via the coproduct formula (not the
  // multiplicative extension); food for is_character.
  std::vector<double> increment_forest_values(int i, int j) const;

  BranchedRoughPath dilate(double lambda) const;

 private:
  mutable std::vector<Character> inverses_;
};

// Driver model: samples + lift kind. Lifts at any dyadic sub-sampling of
// the original segments are exact for the piecewise-linear interpolant.
struct LiftModel {
  SamplePath samples;
  double p = 1.0;
  int p_floor = 1;
  std::vector<Perturbation> perturbations;

  void validate() const;
  BranchedRoughPath build(int subdiv = 1) const;

  // Visits fine segments of original segments [seg_begin, seg_end), each cut
  // into subdiv equal parts: visit(t_left, x_left, segment_increment).
  template <class F>
  void stream_segments(const std::shared_ptr<const ForestTable>& table, int seg_begin,
                       int seg_end, int subdiv, F&& visit) const;
};

// Closed-form lift of a straight segment with displacement v:
// value on a tree = v_label(root) * prod(children) / degree.
Character line_lift(std::shared_ptr<const ForestTable> table, const std::vector<double>& v);

// Bounded-variation lift of the piecewise-linear interpolant; level 1 equals
// the raw increments.
BranchedRoughPath canonical_lift(const SamplePath& samples, int p_floor, double p);

// Canonical lift plus a perturbation of the depth-2 tree components; stays a
// character-valued path but is generically non-geometric. p_floor must be 2.
BranchedRoughPath ito_like_lift(const SamplePath& samples,
                                const std::vector<Perturbation>& perturbations, double p);

// sup over sub-partitions of the sample grid between indices i0 and i1.
double p_variation(const BranchedRoughPath& x, int i0, int i1);
double p_variation_time(const BranchedRoughPath& x, double s, double t);

// omega(t_i, t_j) = p-variation^p over the grid, cached for all pairs.
struct ControlFn {
  std::vector<double> times;
  std::vector<std::vector<double>> omega;  // omega[i][j], i < j
  double operator()(int i, int j) const { return omega[i][j]; }
};
ControlFn build_control(const BranchedRoughPath& x, int i0, int i1);

// |pi1(X^1_0) - pi1(X^2_0)| + max over forests of the per-forest grid DP.
double dp_metric(const BranchedRoughPath& x1, const BranchedRoughPath& x2);

// max over grid triples i<j<k and forests of |(X_{ij} X_{jk} - X_{ik}, rho)|.
double max_chen_defect(const BranchedRoughPath& x, int stride = 1);

// max violation of the integration-by-parts relation
// (X,.i)(X,.j) = (X,[.i]_j) + (X,[.j]_i) over grid pairs. Zero (to rounding)
// for canonical lifts, visibly nonzero for Ito-type ones.
double max_geometric_defect(const BranchedRoughPath& x);

// ---- sample path constructors ------------------------------------------

SamplePath make_uniform(int d, int n_segments, double T,
                        const std::function<std::vector<double>(double)>& f);
SamplePath gen_linear(const std::vector<double>& x0, const std::vector<double>& v,
                      int n_segments, double T = 1.0);
SamplePath gen_monomial(const std::vector<int>& exponents, int n_segments, double T = 1.0);
SamplePath gen_zigzag(int teeth, double amplitude, int n_segments);
SamplePath gen_smooth(int d, int n_segments, std::uint64_t seed, int modes = 3,
                      double amplitude = 1.0);

// CSV with header "t,x1,...,xd"; throws std::invalid_argument naming the row
// on malformed input.
SamplePath parse_csv(std::istream& in);
SamplePath parse_csv_file(const std::string& path);

// ---- template implementation --------------------------------------------

template <class F>
void LiftModel::stream_segments(const std::shared_ptr<const ForestTable>& table,
                                int seg_begin, int seg_end, int subdiv, F&& visit) const {
  const int d = samples.d();
  std::vector<double> x_left(d), v(d);
  std::vector<int> pert_slot(perturbations.size());
  for (size_t n = 0; n < perturbations.size(); ++n) {
    Tree t = graft_root(tree_as_forest(leaf(perturbations[n].i)), perturbations[n].j);
    int fid = table->id(tree_as_forest(t));
    pert_slot[n] = table->tree_slot[fid];
  }
  for (int s = seg_begin; s < seg_end; ++s) {
    const double t0 = samples.times[s], t1 = samples.times[s + 1];
    const double dt = (t1 - t0) / subdiv;
    for (int q = 0; q < subdiv; ++q) {
      const double u0 = t0 + q * dt;
      const double frac0 = static_cast<double>(q) / subdiv;
      const double frac1 = static_cast<double>(q + 1) / subdiv;
      for (int k = 0; k < d; ++k) {
        const double a = samples.points[s][k], b = samples.points[s + 1][k];
        x_left[k] = a + (b - a) * frac0;
        v[k] = (b - a) * (frac1 - frac0);
      }
      Character inc = line_lift(table, v);
      for (size_t n = 0; n < perturbations.size(); ++n) {
        const auto& pv = perturbations[n].values;
        inc.tree_value(pert_slot[n]) += (pv[s + 1] - pv[s]) * (frac1 - frac0);
      }
      visit(u0, x_left, inc);
    }
  }
}

}  // namespace birch
