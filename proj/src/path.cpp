#include "birch/path.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "birch/kernels.hpp"

namespace birch {

void SamplePath::validate() const {
  if (times.size() < 2) throw std::invalid_argument("path needs at least 2 samples");
  if (times.size() != points.size())
    throw std::invalid_argument("path times/points length mismatch");
  const size_t d = points[0].size();
  if (d == 0) throw std::invalid_argument("path dimension must be >= 1");
  for (size_t k = 0; k + 1 < times.size(); ++k) {
    if (!(times[k] < times[k + 1]))
      throw std::invalid_argument("path times must be strictly increasing");
  }
  for (const auto& pt : points) {
    if (pt.size() != d) throw std::invalid_argument("ragged path samples");
  }
}

std::vector<double> SamplePath::at(double t) const {
  if (t <= times.front()) return points.front();
  if (t >= times.back()) return points.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  size_t k = static_cast<size_t>(it - times.begin()) - 1;
  double lam = (t - times[k]) / (times[k + 1] - times[k]);
  std::vector<double> out(points[k].size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = points[k][i] + lam * (points[k + 1][i] - points[k][i]);
  return out;
}

namespace {

int grid_index(const std::vector<double>& times, double t) {
  const double span = times.back() - times.front();
  const double tol = 1e-9 * std::max(1.0, std::abs(span));
  auto it = std::lower_bound(times.begin(), times.end(), t - tol);
  if (it == times.end() || std::abs(*it - t) > tol)
    throw std::invalid_argument("time " + std::to_string(t) + " is off the sample grid");
  return static_cast<int>(it - times.begin());
}

}  // namespace

int SamplePath::index_of_time(double t) const { return grid_index(times, t); }

int BranchedRoughPath::index_of_time(double t) const { return grid_index(times, t); }

std::vector<double> BranchedRoughPath::point(int i) const {
  std::vector<double> x(d());
  for (int k = 1; k <= d(); ++k) {
    int fid = table->id(tree_as_forest(leaf(k)));
    x[k - 1] = values[i].tree_value(table->tree_slot[fid]);
  }
  return x;
}

void BranchedRoughPath::ensure_inverses() const {
  if (inverses_.size() == values.size()) return;
  inverses_.resize(values.size());
  for (size_t i = 0; i < values.size(); ++i) inverses_[i] = values[i].inverse();
}

Character BranchedRoughPath::increment(int i, int j) const {
  ensure_inverses();
  return inverses_[i].group_product(values[j]);
}

Character BranchedRoughPath::increment_time(double s, double t) const {
  return increment(index_of_time(s), index_of_time(t));
}

std::vector<double> BranchedRoughPath::increment_forest_values(int i, int j) const {
  ensure_inverses();
  return inverses_[i].product_forest_values(values[j]);
}

BranchedRoughPath BranchedRoughPath::dilate(double lambda) const {
  BranchedRoughPath out;
  out.table = table;
  out.p = p;
  out.times = times;
  out.values.reserve(values.size());
  for (const auto& v : values) out.values.push_back(v.dilate(lambda));
  return out;
}

Character line_lift(std::shared_ptr<const ForestTable> table, const std::vector<double>& v) {
  Character out(table);
  // value(tau) = v_root * prod(children) / |tau|, computed bottom-up
  struct Rec {
    const std::vector<double>& v;
    double eval(const Tree& t) const {
      double val = v[t.label - 1];
      int deg = 1;
      for (const auto& c : t.children) {
        val *= eval(c);
        deg += degree(c);
      }
      return val / deg;
    }
  } rec{v};
  for (size_t slot = 0; slot < table->tree_ids.size(); ++slot) {
    const Tree& t = table->forests[table->tree_ids[slot]].trees[0];
    out.tree_value(slot) = rec.eval(t);
  }
  return out;
}

void LiftModel::validate() const {
  samples.validate();
  if (p < 1.0) throw std::invalid_argument("p must be >= 1");
  if (p_floor < 1 || p_floor > kDegreeCap)
    throw std::invalid_argument("p_floor must be in 1..3");
  if (p_floor != static_cast<int>(std::floor(p)))
    throw std::invalid_argument("p_floor must equal floor(p)");
  for (const auto& pert : perturbations) {
    if (p_floor != 2)
      throw std::invalid_argument("perturbed lifts require p_floor == 2");
    if (pert.i < 1 || pert.i > samples.d() || pert.j < 1 || pert.j > samples.d())
      throw std::invalid_argument("perturbation labels out of range");
    if (pert.values.size() != samples.times.size())
      throw std::invalid_argument("perturbation must share the sample grid");
    if (std::abs(pert.values.front()) > 0.0)
      throw std::invalid_argument("perturbation paths must start at 0");
  }
}

BranchedRoughPath LiftModel::build(int subdiv) const {
  validate();
  if (subdiv < 1) throw std::invalid_argument("subdiv must be >= 1");
  auto table = ForestTable::get(samples.d(), p_floor);
  BranchedRoughPath out;
  out.table = table;
  out.p = p;
  Character cur(table);
  for (int k = 1; k <= samples.d(); ++k) {
    int fid = table->id(tree_as_forest(leaf(k)));
    cur.tree_value(table->tree_slot[fid]) = samples.points[0][k - 1];
  }
  out.times.push_back(samples.times[0]);
  out.values.push_back(cur);
  const int nseg = samples.segments();
  stream_segments(table, 0, nseg, subdiv,
                  [&](double, const std::vector<double>&, const Character& inc) {
                    cur = cur.group_product(inc);
                    out.values.push_back(cur);
                  });
  for (int s = 0; s < nseg; ++s) {
    const double t0 = samples.times[s], t1 = samples.times[s + 1];
    for (int q = 1; q <= subdiv; ++q)
      out.times.push_back(q == subdiv ? t1 : t0 + (t1 - t0) * q / subdiv);
  }
  return out;
}

BranchedRoughPath canonical_lift(const SamplePath& samples, int p_floor, double p) {
  LiftModel m{samples, p, p_floor, {}};
  return m.build(1);
}

BranchedRoughPath ito_like_lift(const SamplePath& samples,
                                const std::vector<Perturbation>& perturbations, double p) {
  if (static_cast<int>(std::floor(p)) != 2)
    throw std::invalid_argument("ito_like_lift requires p in [2,3)");
  LiftModel m{samples, p, 2, perturbations};
  return m.build(1);
}

double p_variation(const BranchedRoughPath& x, int i0, int i1) {
  if (i0 < 0 || i1 >= x.grid_size() || i0 > i1)
    throw std::invalid_argument("p_variation: bad index range");
  if (i0 == i1) return 0.0;
  x.ensure_inverses();
  const double p = x.p;
  auto w = [&](int i, int j) {
    return std::pow(x.increment(i0 + i, i0 + j).norm(), p);
  };
  double vp = kernels::pvar_dp(i1 - i0, w);
  return std::pow(vp, 1.0 / p);
}

double p_variation_time(const BranchedRoughPath& x, double s, double t) {
  return p_variation(x, x.index_of_time(s), x.index_of_time(t));
}

ControlFn build_control(const BranchedRoughPath& x, int i0, int i1) {
  if (i0 < 0 || i1 >= x.grid_size() || i0 >= i1)
    throw std::invalid_argument("build_control: bad index range");
  x.ensure_inverses();
  const double p = x.p;
  auto w = [&](int i, int j) {
    return std::pow(x.increment(i0 + i, i0 + j).norm(), p);
  };
  ControlFn c;
  c.times.assign(x.times.begin() + i0, x.times.begin() + i1 + 1);
  c.omega = kernels::control_table(i1 - i0, w);
  return c;
}

double dp_metric(const BranchedRoughPath& x1, const BranchedRoughPath& x2) {
  if (x1.table->d != x2.table->d || x1.table->cap != x2.table->cap || x1.p != x2.p)
    throw std::invalid_argument("dp_metric: paths live in different spaces");
  if (x1.times.size() != x2.times.size())
    throw std::invalid_argument("dp_metric: grid mismatch");
  for (size_t k = 0; k < x1.times.size(); ++k) {
    if (std::abs(x1.times[k] - x2.times[k]) > 1e-12)
      throw std::invalid_argument("dp_metric: grid mismatch");
  }
  x1.ensure_inverses();
  x2.ensure_inverses();
  const auto& table = *x1.table;
  const int nf = table.num_forests() - 1;  // forests of degree >= 1
  const double p = x1.p;
  const int m = x1.grid_size() - 1;
  auto fill = [&](int i, int j, double* out) {
    Character a = x1.increment(i, j);
    Character b = x2.increment(i, j);
    for (int fid = 1; fid < table.num_forests(); ++fid) {
      double diff = std::abs(a.evaluate(fid) - b.evaluate(fid));
      out[fid - 1] = std::pow(diff, p / table.degree_of[fid]);
    }
  };
  std::vector<double> vp = kernels::multi_pvar_dp(m, nf, fill);
  double best = 0.0;
  for (double v : vp) best = std::max(best, std::pow(v, 1.0 / p));
  auto a0 = x1.point(0);
  auto b0 = x2.point(0);
  double lvl0 = 0.0;
  for (size_t k = 0; k < a0.size(); ++k) lvl0 = std::max(lvl0, std::abs(a0[k] - b0[k]));
  return lvl0 + best;
}

double max_chen_defect(const BranchedRoughPath& x, int stride) {
  x.ensure_inverses();
  const int n = x.grid_size();
  std::vector<int> idx;
  for (int i = 0; i < n; i += stride) idx.push_back(i);
  if (idx.back() != n - 1) idx.push_back(n - 1);
  const int m = static_cast<int>(idx.size());
  double worst = 0.0;
#ifdef _OPENMP
#pragma omp parallel for reduction(max : worst) schedule(dynamic)
#endif
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      Character left = x.increment(idx[a], idx[b]);
      for (int c = b + 1; c < m; ++c) {
        Character right = x.increment(idx[b], idx[c]);
        Character direct = x.increment(idx[a], idx[c]);
        Character composed = left.group_product(right);
        for (int fid = 1; fid < x.table->num_forests(); ++fid) {
          worst = std::max(worst, std::abs(composed.evaluate(fid) - direct.evaluate(fid)));
        }
      }
    }
  }
  return worst;
}

double max_geometric_defect(const BranchedRoughPath& x) {
  if (x.p_floor() < 2) throw std::invalid_argument("needs p_floor >= 2");
  x.ensure_inverses();
  const auto& table = *x.table;
  const int d = x.d();
  const int n = x.grid_size();
  double worst = 0.0;
  std::vector<std::vector<int>> pair_slot(d, std::vector<int>(d));
  std::vector<int> leaf_slot(d);
  for (int i = 1; i <= d; ++i) {
    leaf_slot[i - 1] = table.tree_slot[table.id(tree_as_forest(leaf(i)))];
    for (int j = 1; j <= d; ++j) {
      Tree t = graft_root(tree_as_forest(leaf(i)), j);
      pair_slot[i - 1][j - 1] = table.tree_slot[table.id(tree_as_forest(t))];
    }
  }
#ifdef _OPENMP
#pragma omp parallel for reduction(max : worst) schedule(dynamic)
#endif
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      Character inc = x.increment(a, b);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          double lhs = inc.tree_value(leaf_slot[i]) * inc.tree_value(leaf_slot[j]);
          double rhs = inc.tree_value(pair_slot[i][j]) + inc.tree_value(pair_slot[j][i]);
          worst = std::max(worst, std::abs(lhs - rhs));
        }
      }
    }
  }
  return worst;
}

SamplePath make_uniform(int d, int n_segments, double T,
                        const std::function<std::vector<double>(double)>& f) {
  if (n_segments < 1) throw std::invalid_argument("need at least 1 segment");
  SamplePath p;
  p.times.resize(n_segments + 1);
  p.points.resize(n_segments + 1);
  for (int k = 0; k <= n_segments; ++k) {
    double t = T * k / n_segments;
    p.times[k] = t;
    p.points[k] = f(t);
    if (static_cast<int>(p.points[k].size()) != d)
      throw std::invalid_argument("generator dimension mismatch");
  }
  return p;
}

SamplePath gen_linear(const std::vector<double>& x0, const std::vector<double>& v,
                      int n_segments, double T) {
  if (x0.size() != v.size()) throw std::invalid_argument("gen_linear: x0/v mismatch");
  int d = static_cast<int>(x0.size());
  return make_uniform(d, n_segments, T, [&](double t) {
    std::vector<double> x(d);
    for (int k = 0; k < d; ++k) x[k] = x0[k] + v[k] * t;
    return x;
  });
}

SamplePath gen_monomial(const std::vector<int>& exponents, int n_segments, double T) {
  int d = static_cast<int>(exponents.size());
  return make_uniform(d, n_segments, T, [&](double t) {
    std::vector<double> x(d);
    for (int k = 0; k < d; ++k) x[k] = std::pow(t, exponents[k]);
    return x;
  });
}

SamplePath gen_zigzag(int teeth, double amplitude, int n_segments) {
  if (teeth < 1 || n_segments % (2 * teeth) != 0)
    throw std::invalid_argument("gen_zigzag: n_segments must be a multiple of 2*teeth");
  return make_uniform(1, n_segments, 1.0, [&](double t) {
    double phase = t * teeth * 2.0;
    double frac = phase - std::floor(phase / 2.0) * 2.0;
    double up = frac <= 1.0 ? frac : 2.0 - frac;
    return std::vector<double>{amplitude * up};
  });
}

SamplePath gen_smooth(int d, int n_segments, std::uint64_t seed, int modes, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::vector<double>> a(d, std::vector<double>(modes)),
      b(d, std::vector<double>(modes));
  for (int k = 0; k < d; ++k) {
    for (int m = 0; m < modes; ++m) {
      a[k][m] = unif(rng) * amplitude / ((m + 1) * (m + 1));
      b[k][m] = unif(rng) * amplitude / ((m + 1) * (m + 1));
    }
  }
  const double two_pi = 6.283185307179586476925286766559;
  return make_uniform(d, n_segments, 1.0, [&](double t) {
    std::vector<double> x(d, 0.0);
    for (int k = 0; k < d; ++k) {
      for (int m = 0; m < modes; ++m) {
        x[k] += a[k][m] * std::sin(two_pi * (m + 1) * t) +
                b[k][m] * (std::cos(two_pi * (m + 1) * t) - 1.0);
      }
    }
    return x;
  });
}

SamplePath parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("CSV: empty input");
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
  };
  auto header = split(line);
  if (header.empty() || header[0] != "t")
    throw std::invalid_argument("CSV: header must start with 't'");
  int d = static_cast<int>(header.size()) - 1;
  if (d < 1) throw std::invalid_argument("CSV: need at least one coordinate column");
  for (int k = 1; k <= d; ++k) {
    if (header[k] != "x" + std::to_string(k))
      throw std::invalid_argument("CSV: expected header column x" + std::to_string(k));
  }
  SamplePath p;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto cells = split(line);
    if (static_cast<int>(cells.size()) != d + 1)
      throw std::invalid_argument("CSV: row " + std::to_string(row) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(d + 1));
    try {
      size_t used = 0;
      p.times.push_back(std::stod(cells[0], &used));
      std::vector<double> x(d);
      for (int k = 0; k < d; ++k) x[k] = std::stod(cells[k + 1]);
      p.points.push_back(std::move(x));
    } catch (const std::exception&) {
      throw std::invalid_argument("CSV: row " + std::to_string(row) + " is malformed");
    }
  }
  p.validate();
  return p;
}

SamplePath parse_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open CSV file: " + path);
  return parse_csv(in);
}

}  // namespace birch
