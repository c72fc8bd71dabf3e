#include "birch/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace birch {

namespace {

int sample_index(const LiftModel& model, double t) {
  return model.samples.index_of_time(t);
}

// Scaled coefficient polynomials of the lifted one-form: per d-tree slot,
// e polynomials f_tau / sigma(tau).
std::vector<std::vector<Polynomial>> beta_polynomials(const PolynomialOneForm& f,
                                                      const ForestTable& td) {
  std::vector<std::vector<Polynomial>> out(td.tree_ids.size());
  for (size_t slot = 0; slot < td.tree_ids.size(); ++slot) {
    int fid = td.tree_ids[slot];
    const Tree& tau = td.forests[fid].trees[0];
    auto polys = f_tau(f, tau);
    Rational inv_sigma = Rational(1) / Rational(td.sigma[fid]);
    for (auto& p : polys) p = p.scaled(inv_sigma);
    out[slot] = std::move(polys);
  }
  return out;
}

struct Node {
  enum Kind { kLeaf, kTree, kForest } kind = kLeaf;
  int j = 0;     // root label (leaf/tree)
  int sub = -1;  // child forest fid (tree)
  int tau1 = -1, rest = -1;  // factor split (forest)
};

std::vector<Node> decompose(const ForestTable& te) {
  std::vector<Node> nodes(te.num_forests());
  for (int fid = 1; fid < te.num_forests(); ++fid) {
    const Forest& fo = te.forests[fid];
    Node n;
    if (fo.trees.size() == 1) {
      const Tree& t = fo.trees[0];
      if (t.children.empty()) {
        n.kind = Node::kLeaf;
        n.j = t.label;
      } else {
        n.kind = Node::kTree;
        n.j = t.label;
        Forest children;
        children.trees = t.children;
        n.sub = te.id(children);
      }
    } else {
      n.kind = Node::kForest;
      n.tau1 = te.id(tree_as_forest(fo.trees[0]));
      Forest rest;
      rest.trees.assign(fo.trees.begin() + 1, fo.trees.end());
      n.rest = te.id(rest);
    }
    nodes[fid] = n;
  }
  return nodes;
}

struct PassOutput {
  std::vector<double> y;                         // per e-forest fid
  std::vector<std::vector<double>> tree_path;    // per base point, per te tree slot
  long long steps = 0;
};

// One self-consistent left-point sweep of the compensated sums on the grid
// where every original segment in [seg0, seg1) is cut into subdiv parts.
PassOutput run_pass(const LiftModel& model, const PolynomialOneForm& f,
                    const std::shared_ptr<const ForestTable>& td,
                    const std::shared_ptr<const ForestTable>& te,
                    const std::vector<std::vector<Polynomial>>& bpolys,
                    const std::vector<Node>& nodes, int seg0, int seg1, int subdiv,
                    bool record_path) {
  const int nf_d = td->num_forests();
  const int nf_e = te->num_forests();
  PassOutput out;
  out.y.assign(nf_e, 0.0);

  std::vector<OneFormRep> phi(nf_e);
  for (int fid = 1; fid < nf_e; ++fid) phi[fid] = OneFormRep(td, 1);
  std::vector<OneFormRep> beta_slice(f.e, OneFormRep(td, 1));
  OneFormRep graft_tmp(td, 1), mult_tmp(td, 1);
  std::vector<double> segvals(nf_d);
  std::vector<double> dy(nf_e, 0.0);

  auto record = [&]() {
    std::vector<double> row(te->tree_ids.size());
    for (size_t slot = 0; slot < te->tree_ids.size(); ++slot)
      row[slot] = out.y[te->tree_ids[slot]];
    out.tree_path.push_back(std::move(row));
  };
  if (record_path) record();

  long long step = 0;
  model.stream_segments(td, seg0, seg1, subdiv,
                        [&](double, const std::vector<double>& x, const Character& seg) {
    // lifted one-form at the left point
    for (int j = 0; j < f.e; ++j) beta_slice[j].clear();
    for (size_t slot = 0; slot < td->tree_ids.size(); ++slot) {
      int fid = td->tree_ids[slot];
      for (int j = 0; j < f.e; ++j) beta_slice[j].at(fid, 0) = bpolys[slot][j].eval(x);
    }
    // forest values of the segment increment
    for (int fid = 0; fid < nf_d; ++fid) segvals[fid] = seg.evaluate(fid);

    // one-forms for every effect, lowest degree first
    for (int fid = 1; fid < nf_e; ++fid) {
      const Node& n = nodes[fid];
      switch (n.kind) {
        case Node::kLeaf:
          phi[fid] = beta_slice[n.j - 1];
          break;
        case Node::kTree:
          fiber_graft_into(graft_tmp, phi[n.sub], beta_slice[n.j - 1]);
          phi[fid] = graft_tmp;
          phi[fid].add_scaled(beta_slice[n.j - 1], out.y[n.sub]);
          break;
        case Node::kForest:
          fiber_multiply_into(mult_tmp, phi[n.tau1], phi[n.rest]);
          phi[fid] = mult_tmp;
          phi[fid].add_scaled(phi[n.rest], out.y[n.tau1]);
          phi[fid].add_scaled(phi[n.tau1], out.y[n.rest]);
          break;
      }
    }
    // advance the tree integrals, then refresh forest products
    for (int fid = 1; fid < nf_e; ++fid) {
      if (!te->is_tree[fid]) continue;
      dy[fid] = phi[fid].evaluate_dense(segvals)[0];
    }
    for (int fid = 1; fid < nf_e; ++fid) {
      if (te->is_tree[fid])
        out.y[fid] += dy[fid];
      else
        out.y[fid] = out.y[nodes[fid].tau1] * out.y[nodes[fid].rest];
    }
    ++step;
    if (record_path && step % subdiv == 0) record();
  });
  out.steps = step;
  return out;
}

}  // namespace

OneFormRep beta_fiber(const PolynomialOneForm& f, const std::vector<double>& x,
                      std::shared_ptr<const ForestTable> table_d) {
  f.validate();
  OneFormRep out(table_d, f.e);
  for (int tid : table_d->tree_ids) {
    const Tree& tau = table_d->forests[tid].trees[0];
    auto vals = eval_poly_vec(f_tau(f, tau), x);
    for (int j = 0; j < f.e; ++j) out.at(tid, j) = vals[j] / table_d->sigma[tid];
  }
  return out;
}

BetaProvider beta_from_one_form(const PolynomialOneForm& f,
                                std::shared_ptr<const ForestTable> table_d) {
  f.validate();
  return [f, table_d](double, const std::vector<double>& x) {
    return beta_fiber(f, x, table_d);
  };
}

std::vector<double> beta_eval(const PolynomialOneForm& f, const std::vector<double>& x,
                              const Character& a) {
  return beta_fiber(f, x, a.table()).evaluate(a);
}

namespace {

void check_cauchy(const std::vector<double>& gaps, double scale) {
  size_t n = gaps.size();
  if (n < 4) return;
  if (gaps[n - 1] > gaps[n - 2] && gaps[n - 2] > gaps[n - 3] &&
      gaps[n - 1] > 1e-4 * (1.0 + scale)) {
    throw NonConvergenceError("Riemann sums stopped contracting (gap " +
                              std::to_string(gaps[n - 1]) + ")");
  }
}

}  // namespace

IntegrateResult integrate_one_form(const BetaProvider& beta, const LiftModel& model, double s,
                                   double t, const RefineOpts& opts) {
  model.validate();
  int seg0 = sample_index(model, s), seg1 = sample_index(model, t);
  if (seg0 >= seg1) throw std::invalid_argument("integrate_one_form: need s < t");
  auto td = ForestTable::get(model.samples.d(), model.p_floor);

  IntegrateResult res;
  std::vector<double> prev;
  double scale = 0.0;
  for (int level = 0; level <= opts.max_levels; ++level) {
    long long steps = static_cast<long long>(seg1 - seg0) << level;
    if (level > 0 && steps > opts.max_fine_steps) break;
    std::vector<double> val;
    model.stream_segments(td, seg0, seg1, 1 << level,
                          [&](double u, const std::vector<double>& x, const Character& seg) {
                            OneFormRep b = beta(u, x);
                            auto dv = b.evaluate(seg);
                            if (val.empty()) val.assign(dv.size(), 0.0);
                            for (size_t j = 0; j < dv.size(); ++j) val[j] += dv[j];
                          });
    if (!prev.empty()) {
      double gap = 0.0;
      for (size_t j = 0; j < val.size(); ++j) gap = std::max(gap, std::abs(val[j] - prev[j]));
      res.level_gaps.push_back(gap);
    }
    for (double v : val) scale = std::max(scale, std::abs(v));
    prev = val;
    res.levels_used = level + 1;
    check_cauchy(res.level_gaps, scale);
    if (!res.level_gaps.empty() &&
        static_cast<int>(res.level_gaps.size()) >= opts.min_levels &&
        res.level_gaps.back() <= opts.gap_tol) {
      res.converged = true;
      break;
    }
  }
  if (!res.level_gaps.empty() && res.level_gaps.back() <= opts.gap_tol) res.converged = true;
  res.value = prev;
  return res;
}

std::vector<double> integrate_one_form_grid(const std::vector<OneFormRep>& beta,
                                            const BranchedRoughPath& x, int i0, int i1) {
  if (beta.size() != x.times.size())
    throw std::invalid_argument("integrate_one_form_grid: one-form table must cover the grid");
  if (i0 < 0 || i1 >= x.grid_size() || i0 >= i1)
    throw std::invalid_argument("integrate_one_form_grid: bad index range");
  std::vector<double> val(beta[i0].e(), 0.0);
  for (int k = i0; k < i1; ++k) {
    auto dv = beta[k].evaluate(x.increment(k, k + 1));
    for (size_t j = 0; j < val.size(); ++j) val[j] += dv[j];
  }
  return val;
}

std::vector<OneFormRep> multiply_effects(const std::vector<OneFormRep>& beta1,
                                         const std::vector<OneFormRep>& beta2,
                                         const EffectPath& y1, const EffectPath& y2) {
  if (beta1.size() != beta2.size() || beta1.size() != y1.values.size() ||
      beta1.size() != y2.values.size())
    throw std::invalid_argument("multiply_effects: grid mismatch");
  std::vector<OneFormRep> out;
  out.reserve(beta1.size());
  for (size_t k = 0; k < beta1.size(); ++k) {
    if (beta1[k].e() != 1 || beta2[k].e() != 1)
      throw std::invalid_argument("multiply_effects: scalar effects only");
    OneFormRep b = fiber_multiply(beta1[k], beta2[k]);
    b.add_scaled(beta2[k], y1.values[k][0]);
    b.add_scaled(beta1[k], y2.values[k][0]);
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<OneFormRep> graft_effects(const std::vector<OneFormRep>& beta1,
                                      const EffectPath& y1,
                                      const std::vector<OneFormRep>& beta2) {
  if (beta1.size() != beta2.size() || beta1.size() != y1.values.size())
    throw std::invalid_argument("graft_effects: grid mismatch");
  std::vector<OneFormRep> out;
  out.reserve(beta1.size());
  for (size_t k = 0; k < beta1.size(); ++k) {
    if (!beta2[k].tree_only())
      throw std::invalid_argument("graft_effects: beta2 must be tree-supported");
    OneFormRep b = fiber_graft(beta1[k], beta2[k]);
    b.add_scaled(beta2[k], y1.values[k][0]);
    out.push_back(std::move(b));
  }
  return out;
}

FullIntegralResult full_integral(const PolynomialOneForm& f, const LiftModel& model, double s,
                                 double t, const FullIntegralOpts& opts) {
  model.validate();
  f.validate();
  if (f.d != model.samples.d())
    throw std::invalid_argument("full_integral: one-form dimension mismatch");
  if (!(f.gamma > model.p))
    throw std::invalid_argument("full_integral: gamma must exceed p");
  int out_degree = opts.out_degree > 0 ? opts.out_degree : model.p_floor;
  int seg0 = sample_index(model, s), seg1 = sample_index(model, t);
  if (seg0 >= seg1) throw std::invalid_argument("full_integral: need s < t");

  auto td = ForestTable::get(model.samples.d(), model.p_floor);
  auto te = ForestTable::get(f.e, out_degree);
  auto bpolys = beta_polynomials(f, *td);
  auto nodes = decompose(*te);

  FullIntegralResult res;
  PassOutput last;
  std::vector<double> prev;
  double scale = 0.0;
  for (int level = 0; level <= opts.refine.max_levels; ++level) {
    long long steps = static_cast<long long>(seg1 - seg0) << level;
    if (level > 0 && steps > opts.refine.max_fine_steps) break;
    PassOutput po = run_pass(model, f, td, te, bpolys, nodes, seg0, seg1, 1 << level, true);
    if (!prev.empty()) {
      double gap = 0.0;
      for (int fid = 1; fid < te->num_forests(); ++fid)
        gap = std::max(gap, std::abs(po.y[fid] - prev[fid]));
      res.level_gaps.push_back(gap);
    }
    for (int fid = 1; fid < te->num_forests(); ++fid)
      scale = std::max(scale, std::abs(po.y[fid]));
    prev = po.y;
    last = std::move(po);
    res.levels_used = level + 1;
    check_cauchy(res.level_gaps, scale);
    if (!res.level_gaps.empty() &&
        static_cast<int>(res.level_gaps.size()) >= opts.refine.min_levels &&
        res.level_gaps.back() <= opts.refine.gap_tol)
      break;
  }
  res.converged = !res.level_gaps.empty() && res.level_gaps.back() <= opts.refine.gap_tol;

  res.y = Character(te);
  for (size_t slot = 0; slot < te->tree_ids.size(); ++slot)
    res.y.tree_value(slot) = last.y[te->tree_ids[slot]];
  res.base_times.assign(model.samples.times.begin() + seg0,
                        model.samples.times.begin() + seg1 + 1);
  res.y_path.reserve(last.tree_path.size());
  for (const auto& row : last.tree_path) {
    Character c(te);
    for (size_t slot = 0; slot < row.size(); ++slot) c.tree_value(slot) = row[slot];
    res.y_path.push_back(std::move(c));
  }
  return res;
}

std::vector<OneFormRep> y_tilde_one_forms(const PolynomialOneForm& f,
                                          const BranchedRoughPath& x, int i0,
                                          int out_degree) {
  f.validate();
  if (out_degree <= 0) out_degree = x.p_floor();
  auto td = x.table;
  auto te = ForestTable::get(f.e, out_degree);
  auto nodes = decompose(*te);
  OneFormRep beta = beta_fiber(f, x.point(i0), td);
  std::vector<OneFormRep> b(te->num_forests());
  for (int fid = 1; fid < te->num_forests(); ++fid) {
    const Node& n = nodes[fid];
    switch (n.kind) {
      case Node::kLeaf:
        b[fid] = beta.slice(n.j - 1);
        break;
      case Node::kTree:
        b[fid] = fiber_graft(b[n.sub], beta.slice(n.j - 1));
        break;
      case Node::kForest:
        b[fid] = fiber_multiply(b[n.tau1], b[n.rest]);
        break;
    }
  }
  return b;
}

LocalApproximant y_tilde(const PolynomialOneForm& f, const BranchedRoughPath& x, int i0,
                         int i1, int out_degree) {
  if (out_degree <= 0) out_degree = x.p_floor();
  auto b = y_tilde_one_forms(f, x, i0, out_degree);
  auto te = ForestTable::get(f.e, out_degree);
  Character inc = x.increment(i0, i1);
  LocalApproximant out;
  out.table_e = te;
  out.values.assign(te->num_forests(), 0.0);
  out.values[0] = 1.0;
  for (int fid = 1; fid < te->num_forests(); ++fid) out.values[fid] = b[fid].evaluate(inc)[0];
  return out;
}

std::vector<ErrorRow> local_error_report(const PolynomialOneForm& f, const LiftModel& model,
                                         int max_scale, const FullIntegralOpts& opts) {
  model.validate();
  const int nseg = model.samples.segments();
  if (max_scale < 1 || (nseg % (1 << max_scale)) != 0)
    throw std::invalid_argument(
        "local_error_report: segment count must be divisible by 2^max_scale");
  int out_degree = opts.out_degree > 0 ? opts.out_degree : model.p_floor;
  // one fixed fine grid for omega and the increments that feed Ytilde
  int subdiv = 1;
  while ((static_cast<long long>(nseg) << 1) * subdiv <= (1 << 12)) subdiv <<= 1;
  BranchedRoughPath fine = model.build(subdiv);
  fine.ensure_inverses();
  auto te = ForestTable::get(f.e, out_degree);

  std::vector<ErrorRow> rows;
  for (int m = 1; m <= max_scale; ++m) {
    int pieces = 1 << m;
    int span = nseg / pieces;
    ErrorRow row;
    row.scale = m;
    for (int k = 0; k < pieces; ++k) {
      double ts = model.samples.times[k * span];
      double tt = model.samples.times[(k + 1) * span];
      FullIntegralOpts local = opts;
      local.out_degree = out_degree;
      FullIntegralResult yres = full_integral(f, model, ts, tt, local);
      int fi0 = k * span * subdiv, fi1 = (k + 1) * span * subdiv;
      LocalApproximant approx = y_tilde(f, fine, fi0, fi1, out_degree);
      for (int fid = 1; fid < te->num_forests(); ++fid) {
        double diff = std::abs(yres.y.evaluate(fid) - approx.values[fid]);
        row.remainder = std::max(row.remainder, diff);
        if (te->degree_of[fid] == 1)
          row.remainder_level1 = std::max(row.remainder_level1, diff);
      }
      double pv = p_variation(fine, fi0, fi1);
      row.omega = std::max(row.omega, std::pow(pv, fine.p));
    }
    rows.push_back(row);
  }
  return rows;
}

double log_log_slope(const std::vector<double>& omega, const std::vector<double>& err,
                     double floor) {
  std::vector<double> xs, ys;
  for (size_t k = 0; k < omega.size(); ++k) {
    if (err[k] > floor && omega[k] > 0.0) {
      xs.push_back(std::log(omega[k]));
      ys.push_back(std::log(err[k]));
    }
  }
  if (xs.size() < 2) return std::numeric_limits<double>::infinity();
  double mx = 0, my = 0;
  for (size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= xs.size();
  my /= ys.size();
  double num = 0, den = 0;
  for (size_t k = 0; k < xs.size(); ++k) {
    num += (xs[k] - mx) * (ys[k] - my);
    den += (xs[k] - mx) * (xs[k] - mx);
  }
  if (den == 0) return std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace birch
