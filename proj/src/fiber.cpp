#include "birch/fiber.hpp"

#include <cmath>
#include <stdexcept>

namespace birch {

int OneFormRep::require_id(const Forest& f) const {
  int fid = table_->id(f);
  if (fid <= 0) throw std::invalid_argument("OneFormRep: forest outside table (or empty)");
  return fid;
}

bool OneFormRep::tree_only() const {
  for (int fid = 1; fid < table_->num_forests(); ++fid) {
    if (table_->is_tree[fid]) continue;
    for (int j = 0; j < e_; ++j)
      if (at(fid, j) != 0.0) return false;
  }
  return true;
}

std::vector<double> OneFormRep::evaluate(const Character& a) const {
  if (a.table() != table_)
    throw std::invalid_argument("OneFormRep::evaluate: character from a different table");
  std::vector<double> out(e_, 0.0);
  for (int fid = 1; fid < table_->num_forests(); ++fid) {
    double av = a.evaluate(fid);
    if (av == 0.0) continue;
    for (int j = 0; j < e_; ++j) out[j] += at(fid, j) * av;
  }
  return out;
}

std::vector<double> OneFormRep::evaluate_dense(const std::vector<double>& fv) const {
  std::vector<double> out(e_, 0.0);
  for (int fid = 1; fid < table_->num_forests(); ++fid) {
    for (int j = 0; j < e_; ++j) out[j] += at(fid, j) * fv[fid];
  }
  return out;
}

double OneFormRep::norm_rho(int fid) const {
  double m = 0.0;
  for (int j = 0; j < e_; ++j) m = std::max(m, std::abs(at(fid, j)));
  return m;
}

double OneFormRep::norm() const {
  double m = 0.0;
  for (int fid = 1; fid < table_->num_forests(); ++fid) m = std::max(m, norm_rho(fid));
  return m;
}

OneFormRep OneFormRep::slice(int j) const {
  OneFormRep out(table_, 1);
  for (int fid = 1; fid < table_->num_forests(); ++fid) out.at(fid, 0) = at(fid, j);
  return out;
}

OneFormRep& OneFormRep::add_scaled(const OneFormRep& o, double s) {
  for (size_t k = 0; k < c_.size(); ++k) c_[k] += s * o.c_[k];
  return *this;
}

OneFormRep translate(const OneFormRep& phi, const Character& b) {
  if (b.table() != phi.table())
    throw std::invalid_argument("translate: character from a different table");
  const auto& table = *phi.table();
  OneFormRep out(phi.table(), phi.e());
  for (int fid = 1; fid < table.num_forests(); ++fid) {
    for (const auto& cut : table.coprod[fid]) {
      if (cut.right == 0) continue;  // dropping the constant term phi(b)
      double w = cut.mult * b.evaluate(cut.left);
      if (w == 0.0) continue;
      for (int j = 0; j < phi.e(); ++j) out.at(cut.right, j) += w * phi.at(fid, j);
    }
  }
  return out;
}

void fiber_multiply_into(OneFormRep& out, const OneFormRep& phi1, const OneFormRep& phi2) {
  const auto& table = *out.table();
  out.clear();
  for (int f1 = 1; f1 < table.num_forests(); ++f1) {
    double c1 = phi1.at(f1, 0);
    if (c1 == 0.0) continue;
    for (int f2 = 1; f2 < table.num_forests(); ++f2) {
      double c2 = phi2.at(f2, 0);
      if (c2 == 0.0) continue;
      int tgt = table.concat_id[f1][f2];
      if (tgt < 0) continue;  // degree overflow
      out.at(tgt, 0) += c1 * c2;
    }
  }
}

void fiber_graft_into(OneFormRep& out, const OneFormRep& phi1, const OneFormRep& phi2) {
  const auto& table = *out.table();
  out.clear();
  for (int f1 = 1; f1 < table.num_forests(); ++f1) {
    double c1 = phi1.at(f1, 0);
    if (c1 == 0.0) continue;
    for (int tid : table.tree_ids) {
      double c2 = phi2.at(tid, 0);
      if (c2 == 0.0) continue;
      int tgt = table.graft_onto_id[f1][tid];
      if (tgt < 0) continue;
      out.at(tgt, 0) += c1 * c2;
    }
  }
}

OneFormRep fiber_multiply(const OneFormRep& phi1, const OneFormRep& phi2) {
  if (phi1.e() != 1 || phi2.e() != 1)
    throw std::invalid_argument("fiber_multiply: scalar fiber elements only");
  OneFormRep out(phi1.table(), 1);
  fiber_multiply_into(out, phi1, phi2);
  return out;
}

OneFormRep fiber_graft(const OneFormRep& phi1, const OneFormRep& phi2) {
  if (phi1.e() != 1 || phi2.e() != 1)
    throw std::invalid_argument("fiber_graft: scalar fiber elements only");
  if (!phi2.tree_only())
    throw std::invalid_argument("fiber_graft: right factor must be tree-supported");
  OneFormRep out(phi1.table(), 1);
  fiber_graft_into(out, phi1, phi2);
  return out;
}

}  // namespace birch
