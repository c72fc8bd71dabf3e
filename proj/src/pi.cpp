#include "birch/pi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace birch {

namespace {

// -- exact linear algebra on small dense matrices ---------------------------

// Incremental row elimination; returns true (and keeps the row) if it
// enlarges the span.
bool try_add_row(std::vector<Rational> row, std::vector<std::vector<Rational>>& basis,
                 std::vector<int>& pivots) {
  const int n = static_cast<int>(row.size());
  for (size_t r = 0; r < basis.size(); ++r) {
    const Rational& lead = row[pivots[r]];
    if (!lead.is_zero()) {
      Rational factor = lead;  // basis rows are normalized to pivot 1
      for (int c = 0; c < n; ++c) row[c] -= factor * basis[r][c];
    }
  }
  int pivot = -1;
  for (int c = 0; c < n; ++c) {
    if (!row[c].is_zero()) {
      pivot = c;
      break;
    }
  }
  if (pivot < 0) return false;
  Rational inv = Rational(1) / row[pivot];
  for (int c = 0; c < n; ++c) row[c] *= inv;
  basis.push_back(std::move(row));
  pivots.push_back(pivot);
  return true;
}

std::vector<std::vector<Rational>> invert_exact(std::vector<std::vector<Rational>> m) {
  const int n = static_cast<int>(m.size());
  std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) inv[i][i] = Rational(1);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (!m[r][col].is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw std::runtime_error("basis change matrix is singular");
    std::swap(m[col], m[pivot]);
    std::swap(inv[col], inv[pivot]);
    Rational scale = Rational(1) / m[col][col];
    for (int c = 0; c < n; ++c) {
      m[col][c] *= scale;
      inv[col][c] *= scale;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || m[r][col].is_zero()) continue;
      Rational f = m[r][col];
      for (int c = 0; c < n; ++c) {
        m[r][c] -= f * m[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

// dense GL-algebra vector over forest ids; multiply on the right by a
// generator tree
std::vector<Rational> star_right(const ForestTable& table, const std::vector<Rational>& vec,
                                 int gen_fid) {
  std::vector<Rational> out(table.num_forests(), Rational(0));
  for (int fid = 0; fid < table.num_forests(); ++fid) {
    if (vec[fid].is_zero()) continue;
    for (const auto& term : table.gl[fid][gen_fid]) {
      out[term.forest] += vec[fid] * Rational(term.coeff);
    }
  }
  return out;
}

std::vector<Rational> star_word(const ForestTable& table, const std::vector<int>& gen_fids) {
  std::vector<Rational> vec(table.num_forests(), Rational(0));
  vec[gen_fids[0]] = Rational(1);
  for (size_t k = 1; k < gen_fids.size(); ++k) vec = star_right(table, vec, gen_fids[k]);
  return vec;
}

void sequences_of_degree(const std::vector<int>& gen_degrees, int target, int min_len,
                         std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (target == 0) {
    if (static_cast<int>(cur.size()) >= min_len) out.push_back(cur);
    return;
  }
  for (size_t g = 0; g < gen_degrees.size(); ++g) {
    if (gen_degrees[g] > target) continue;
    cur.push_back(static_cast<int>(g));
    sequences_of_degree(gen_degrees, target - gen_degrees[g], min_len, cur, out);
    cur.pop_back();
  }
}

}  // namespace

GeneratorSet compute_generators(int d, int p_floor) {
  auto table = ForestTable::get(d, p_floor);
  GeneratorSet gens;
  gens.table = table;
  for (int n = 1; n <= p_floor; ++n) {
    const auto& ids = table->ids_of_degree(n);
    const int dim = static_cast<int>(ids.size());
    std::vector<int> col_of(table->num_forests(), -1);
    for (int c = 0; c < dim; ++c) col_of[ids[c]] = c;

    std::vector<std::vector<Rational>> basis;
    std::vector<int> pivots;
    // span of GL products of lower-degree generators
    std::vector<std::vector<int>> seqs;
    std::vector<int> cur;
    sequences_of_degree(gens.degrees, n, 2, cur, seqs);
    int rank_products = 0;
    for (const auto& seq : seqs) {
      std::vector<int> fids;
      for (int g : seq) fids.push_back(gens.tree_fids[g]);
      auto vec = star_word(*table, fids);
      std::vector<Rational> row(dim, Rational(0));
      for (int fid = 0; fid < table->num_forests(); ++fid) {
        if (vec[fid].is_zero()) continue;
        if (col_of[fid] < 0)
          throw std::runtime_error("GL product left its degree block");
        row[col_of[fid]] = vec[fid];
      }
      if (try_add_row(std::move(row), basis, pivots)) ++rank_products;
    }
    // complete with trees, deterministically
    int added = 0;
    for (int fid : ids) {
      if (!table->is_tree[fid]) continue;
      std::vector<Rational> row(dim, Rational(0));
      row[col_of[fid]] = Rational(1);
      if (try_add_row(std::move(row), basis, pivots)) {
        gens.tree_fids.push_back(fid);
        gens.degrees.push_back(n);
        ++added;
      }
    }
    if (static_cast<int>(basis.size()) != dim || added != dim - rank_products)
      throw std::runtime_error(
          "generator computation: rank deficiency inconsistent with freeness");
  }
  // the degree-1 generators are the single vertices in label order
  for (int i = 1; i <= d; ++i) {
    if (gens.tree_fids[i - 1] != table->id(tree_as_forest(leaf(i))))
      throw std::runtime_error("generator computation: unexpected degree-1 ordering");
  }
  return gens;
}

int word_degree(const Word& w, const GeneratorSet& gens) {
  int deg = 0;
  for (int letter : w.letters) {
    if (letter < 1 || letter > gens.K())
      throw std::invalid_argument("word_degree: letter out of range");
    deg += gens.degrees[letter - 1];
  }
  return deg;
}

PiBasisChange::PiBasisChange(const GeneratorSet& gens) : gens_(gens) {
  const auto& table = *gens.table;
  blocks_.resize(table.cap + 1);
  for (int n = 1; n <= table.cap; ++n) {
    Block& blk = blocks_[n];
    blk.forest_ids = table.ids_of_degree(n);
    const int dim = static_cast<int>(blk.forest_ids.size());
    // words of weight n, lexicographic in letters
    std::vector<std::vector<int>> words;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int remaining) {
      if (remaining == 0) {
        words.push_back(cur);
        return;
      }
      for (int letter = 1; letter <= gens.K(); ++letter) {
        int dg = gens.degrees[letter - 1];
        if (dg > remaining) continue;
        cur.push_back(letter);
        rec(remaining - dg);
        cur.pop_back();
      }
    };
    rec(n);
    if (static_cast<int>(words.size()) != dim)
      throw std::runtime_error("word count does not match forest dimension at degree " +
                               std::to_string(n));
    blk.begin = static_cast<int>(words_.size());
    std::vector<int> col_of(table.num_forests(), -1);
    for (int c = 0; c < dim; ++c) col_of[blk.forest_ids[c]] = c;
    // M[w][rho], then A = (M^T)^{-1}
    std::vector<std::vector<Rational>> mt(dim, std::vector<Rational>(dim, Rational(0)));
    for (int w = 0; w < dim; ++w) {
      std::vector<int> fids;
      for (int letter : words[w]) fids.push_back(gens.tree_fids[letter - 1]);
      auto vec = star_word(table, fids);
      for (int fid = 0; fid < table.num_forests(); ++fid) {
        if (vec[fid].is_zero()) continue;
        mt[col_of[fid]][w] = vec[fid];  // transposed on the fly
      }
      index_[words[w]] = static_cast<int>(words_.size());
      words_.push_back(Word{words[w]});
    }
    blk.end = static_cast<int>(words_.size());
    blk.a_exact = invert_exact(std::move(mt));
    blk.a.assign(dim, std::vector<double>(dim));
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) blk.a[r][c] = blk.a_exact[r][c].to_double();
  }
}

int PiBasisChange::word_index(const Word& w) const {
  auto it = index_.find(w.letters);
  if (it == index_.end()) throw std::invalid_argument("word outside the truncation");
  return it->second;
}

std::vector<double> PiBasisChange::word_coefficients(const Character& a) const {
  const auto& table = *gens_.table;
  std::vector<double> out(words_.size(), 0.0);
  for (int n = 1; n <= table.cap; ++n) {
    const Block& blk = blocks_[n];
    const int dim = static_cast<int>(blk.forest_ids.size());
    std::vector<double> v(dim);
    for (int c = 0; c < dim; ++c) {
      int fid = blk.forest_ids[c];
      v[c] = a.evaluate(fid) / table.sigma[fid];
    }
    for (int w = 0; w < dim; ++w) {
      double acc = 0.0;
      for (int c = 0; c < dim; ++c) acc += blk.a[w][c] * v[c];
      out[blk.begin + w] = acc;
    }
  }
  return out;
}

std::vector<Rational> PiBasisChange::word_coefficients_exact(const RationalCharacter& a) const {
  const auto& table = *gens_.table;
  std::vector<Rational> out(words_.size(), Rational(0));
  for (int n = 1; n <= table.cap; ++n) {
    const Block& blk = blocks_[n];
    const int dim = static_cast<int>(blk.forest_ids.size());
    std::vector<Rational> v(dim);
    for (int c = 0; c < dim; ++c) {
      int fid = blk.forest_ids[c];
      v[c] = a.evaluate(fid) / Rational(table.sigma[fid]);
    }
    for (int w = 0; w < dim; ++w) {
      Rational acc(0);
      for (int c = 0; c < dim; ++c) acc += blk.a_exact[w][c] * v[c];
      out[blk.begin + w] = acc;
    }
  }
  return out;
}

std::map<std::vector<int>, long long> shuffle(const std::vector<int>& w1,
                                              const std::vector<int>& w2) {
  std::map<std::vector<int>, long long> out;
  if (w1.empty()) {
    out[w2] = 1;
    return out;
  }
  if (w2.empty()) {
    out[w1] = 1;
    return out;
  }
  auto head1 = std::vector<int>(w1.begin(), w1.end() - 1);
  auto head2 = std::vector<int>(w2.begin(), w2.end() - 1);
  for (auto& [w, m] : shuffle(head1, w2)) {
    auto key = w;
    key.push_back(w1.back());
    out[key] += m;
  }
  for (auto& [w, m] : shuffle(w1, head2)) {
    auto key = w;
    key.push_back(w2.back());
    out[key] += m;
  }
  return out;
}

std::vector<double> PiRoughPath::coordinate_path(int k) const {
  std::vector<double> out(abs.size());
  for (size_t t = 0; t < abs.size(); ++t) out[t] = abs[t][k];
  return out;
}

namespace {

// inverse in the concatenation group: sum_{uv=w} (g,u)(g^{-1},v) = [w empty]
std::vector<double> concat_inverse(const std::vector<Word>& words,
                                   const std::map<std::vector<int>, int>& index,
                                   const std::vector<double>& g) {
  std::vector<double> inv(g.size(), 0.0);
  for (size_t wi = 0; wi < words.size(); ++wi) {
    const auto& w = words[wi].letters;
    double acc = -g[wi];  // u = w, v = empty
    for (size_t cut = 1; cut < w.size(); ++cut) {
      std::vector<int> u(w.begin(), w.begin() + cut);
      std::vector<int> v(w.begin() + cut, w.end());
      acc -= g[index.at(u)] * inv[index.at(v)];
    }
    inv[wi] = acc;  // prefix empty term has coefficient 1
  }
  return inv;
}

std::vector<double> concat_product(const std::vector<Word>& words,
                                   const std::map<std::vector<int>, int>& index,
                                   const std::vector<double>& g, const std::vector<double>& h) {
  std::vector<double> out(g.size(), 0.0);
  for (size_t wi = 0; wi < words.size(); ++wi) {
    const auto& w = words[wi].letters;
    double acc = g[wi] + h[wi];
    for (size_t cut = 1; cut < w.size(); ++cut) {
      std::vector<int> u(w.begin(), w.begin() + cut);
      std::vector<int> v(w.begin() + cut, w.end());
      acc += g[index.at(u)] * h[index.at(v)];
    }
    out[wi] = acc;
  }
  return out;
}

std::map<std::vector<int>, int> word_index_map(const std::vector<Word>& words) {
  std::map<std::vector<int>, int> m;
  for (size_t k = 0; k < words.size(); ++k) m[words[k].letters] = static_cast<int>(k);
  return m;
}

}  // namespace

std::vector<double> PiRoughPath::increment(int i, int j) const {
  auto index = word_index_map(basis->words());
  auto inv = concat_inverse(basis->words(), index, abs[i]);
  return concat_product(basis->words(), index, inv, abs[j]);
}

double PiRoughPath::max_shuffle_defect() const {
  auto index = word_index_map(basis->words());
  const auto& words = basis->words();
  double worst = 0.0;
  const int n = static_cast<int>(abs.size());
  for (int j = 1; j < n; j = j * 2) {
    auto zc = increment(0, j);
    for (size_t a = 0; a < words.size(); ++a) {
      for (size_t b = a; b < words.size(); ++b) {
        if (word_degree(words[a], gens) + word_degree(words[b], gens) > gens.p_floor())
          continue;
        double lhs = zc[a] * zc[b];
        double rhs = 0.0;
        for (const auto& [w, mult] : shuffle(words[a].letters, words[b].letters))
          rhs += mult * zc[index.at(w)];
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
  }
  return worst;
}

PiRoughPath build_companion_pi_path(const BranchedRoughPath& x, const GeneratorSet& gens) {
  if (x.table->d != gens.d() || x.table->cap != gens.p_floor())
    throw std::invalid_argument("build_companion_pi_path: table mismatch");
  PiRoughPath z;
  z.gens = gens;
  z.basis = std::make_shared<PiBasisChange>(gens);
  z.p = x.p;
  z.times = x.times;
  z.x0 = x.point(0);
  auto index = word_index_map(z.basis->words());
  std::vector<double> cur(z.basis->words().size(), 0.0);
  z.abs.push_back(cur);
  for (int k = 0; k + 1 < x.grid_size(); ++k) {
    auto seg = z.basis->word_coefficients(x.increment(k, k + 1));
    cur = concat_product(z.basis->words(), index, cur, seg);
    z.abs.push_back(cur);
  }
  double defect = z.max_shuffle_defect();
  if (defect > 1e-6)
    throw std::runtime_error("companion path fails the shuffle law (defect " +
                             std::to_string(defect) + ")");
  return z;
}

namespace {

int model_sample_index(const LiftModel& model, double t) {
  return model.samples.index_of_time(t);
}

struct PiTerm {
  int word_idx;
  std::vector<Polynomial> polys;  // e components of D^l f_{nu_k}
};

std::vector<PiTerm> pi_terms(const PolynomialOneForm& f, const GeneratorSet& gens,
                             const PiBasisChange& bc) {
  std::vector<PiTerm> terms;
  const auto& table = *gens.table;
  for (int k = 1; k <= gens.K(); ++k) {
    int fid = gens.tree_fids[k - 1];
    const Tree& nu = table.forests[fid].trees[0];
    int max_l = table.cap - table.degree_of[fid];
    for (int l = 0; l <= max_l; ++l) {
      std::vector<int> multi(l, 1);
      while (true) {
        std::vector<Polynomial> polys = f_tau(f, nu);
        for (int var : multi)
          for (auto& p : polys) p = p.derivative(var - 1);
        std::vector<int> letters = multi;
        letters.push_back(k);
        terms.push_back(PiTerm{bc.word_index(Word{letters}), std::move(polys)});
        int pos = l - 1;
        while (pos >= 0 && multi[pos] == f.d) multi[pos--] = 1;
        if (pos < 0) break;
        ++multi[pos];
      }
    }
  }
  return terms;
}

}  // namespace

IntegrateResult first_level_pi_integral(const PolynomialOneForm& f, const LiftModel& model,
                                        const GeneratorSet& gens, double s, double t,
                                        const RefineOpts& opts) {
  model.validate();
  f.validate();
  // gamma_k = (gamma - |nu_k|)/p must exceed 1 - 1/p_k, which for gamma > p
  // holds for every generator; keep the guard anyway.
  for (int k = 0; k < gens.K(); ++k) {
    double pk = model.p / gens.degrees[k];
    if (!((f.gamma - gens.degrees[k]) / model.p > 1.0 - 1.0 / pk))
      throw std::invalid_argument("first_level_pi_integral: smoothness budget too small");
  }
  int seg0 = model_sample_index(model, s), seg1 = model_sample_index(model, t);
  if (seg0 >= seg1) throw std::invalid_argument("first_level_pi_integral: need s < t");
  auto td = ForestTable::get(model.samples.d(), model.p_floor);
  PiBasisChange bc(gens);
  auto terms = pi_terms(f, gens, bc);

  IntegrateResult res;
  std::vector<double> prev;
  double scale = 0.0;
  for (int level = 0; level <= opts.max_levels; ++level) {
    long long steps = static_cast<long long>(seg1 - seg0) << level;
    if (level > 0 && steps > opts.max_fine_steps) break;
    std::vector<double> val(f.e, 0.0);
    std::vector<double> x_pi = model.samples.at(s);
    model.stream_segments(td, seg0, seg1, 1 << level,
                          [&](double, const std::vector<double>&, const Character& seg) {
                            auto zc = bc.word_coefficients(seg);
                            for (const auto& term : terms) {
                              double zw = zc[term.word_idx];
                              if (zw == 0.0) continue;
                              for (int j = 0; j < f.e; ++j)
                                val[j] += term.polys[j].eval(x_pi) * zw;
                            }
                            for (int i = 0; i < model.samples.d(); ++i) x_pi[i] += zc[i];
                          });
    if (!prev.empty()) {
      double gap = 0.0;
      for (size_t j = 0; j < val.size(); ++j) gap = std::max(gap, std::abs(val[j] - prev[j]));
      res.level_gaps.push_back(gap);
    }
    for (double v : val) scale = std::max(scale, std::abs(v));
    prev = val;
    res.levels_used = level + 1;
    size_t ng = res.level_gaps.size();
    if (ng >= 4 && res.level_gaps[ng - 1] > res.level_gaps[ng - 2] &&
        res.level_gaps[ng - 2] > res.level_gaps[ng - 3] &&
        res.level_gaps[ng - 1] > 1e-4 * (1.0 + scale))
      throw NonConvergenceError("pi-side Riemann sums stopped contracting");
    if (ng >= static_cast<size_t>(opts.min_levels) && ng > 0 &&
        res.level_gaps.back() <= opts.gap_tol)
      break;
  }
  res.converged = !res.level_gaps.empty() && res.level_gaps.back() <= opts.gap_tol;
  res.value = prev;
  return res;
}

FirstLevelComparison compare_first_levels(const PolynomialOneForm& f, const LiftModel& model,
                                          double s, double t, const RefineOpts& opts) {
  model.validate();
  f.validate();
  auto td = ForestTable::get(model.samples.d(), model.p_floor);
  GeneratorSet gens = compute_generators(model.samples.d(), model.p_floor);
  PiBasisChange bc(gens);
  auto terms = pi_terms(f, gens, bc);
  auto bpolys = beta_from_one_form(f, td);
  int seg0 = model_sample_index(model, s), seg1 = model_sample_index(model, t);
  if (seg0 >= seg1) throw std::invalid_argument("compare_first_levels: need s < t");

  FirstLevelComparison cmp;
  std::vector<double> prev_b, prev_p;
  for (int level = 0; level <= opts.max_levels; ++level) {
    long long steps = static_cast<long long>(seg1 - seg0) << level;
    if (level > 0 && steps > opts.max_fine_steps) break;
    std::vector<double> vb(f.e, 0.0), vp(f.e, 0.0);
    std::vector<double> x_pi = model.samples.at(s);
    double residual = 0.0, omega = 0.0;
    model.stream_segments(td, seg0, seg1, 1 << level,
                          [&](double u, const std::vector<double>& x, const Character& seg) {
                            OneFormRep b = bpolys(u, x);
                            auto db = b.evaluate(seg);
                            auto zc = bc.word_coefficients(seg);
                            std::vector<double> dp(f.e, 0.0);
                            for (const auto& term : terms) {
                              double zw = zc[term.word_idx];
                              if (zw == 0.0) continue;
                              for (int j = 0; j < f.e; ++j)
                                dp[j] += term.polys[j].eval(x_pi) * zw;
                            }
                            for (int j = 0; j < f.e; ++j) {
                              vb[j] += db[j];
                              vp[j] += dp[j];
                              residual = std::max(residual, std::abs(db[j] - dp[j]));
                            }
                            omega = std::max(omega, std::pow(seg.norm(), model.p));
                            for (int i = 0; i < model.samples.d(); ++i) x_pi[i] += zc[i];
                          });
    cmp.termwise_residual.push_back(residual);
    cmp.termwise_omega.push_back(omega);
    prev_b = vb;
    prev_p = vp;
  }
  cmp.branched = prev_b;
  cmp.pi = prev_p;
  cmp.gap = 0.0;
  for (int j = 0; j < f.e; ++j)
    cmp.gap = std::max(cmp.gap, std::abs(prev_b[j] - prev_p[j]));
  return cmp;
}

std::string generators_to_json_text(const GeneratorSet& gens) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["p_floor"] = gens.p_floor();
  j["d"] = gens.d();
  auto arr = nlohmann::json::array();
  for (int fid : gens.tree_fids) arr.push_back(encode(gens.table->forests[fid]));
  j["generators"] = arr;
  return j.dump();
}

}  // namespace birch
