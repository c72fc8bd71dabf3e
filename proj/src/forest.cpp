#include "birch/forest.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace birch {

int degree(const Tree& t) {
  int n = 1;
  for (const auto& c : t.children) n += degree(c);
  return n;
}

int degree(const Forest& f) {
  int n = 0;
  for (const auto& t : f.trees) n += degree(t);
  return n;
}

int depth(const Tree& t) {
  int m = 0;
  for (const auto& c : t.children) m = std::max(m, depth(c));
  return m + 1;
}

int depth(const Forest& f) {
  int m = 0;
  for (const auto& t : f.trees) m = std::max(m, depth(t));
  return m;
}

int compare(const Tree& a, const Tree& b) {
  int da = degree(a), db = degree(b);
  if (da != db) return da < db ? -1 : 1;
  if (a.label != b.label) return a.label < b.label ? -1 : 1;
  size_t n = std::min(a.children.size(), b.children.size());
  for (size_t i = 0; i < n; ++i) {
    int c = compare(a.children[i], b.children[i]);
    if (c != 0) return c;
  }
  if (a.children.size() != b.children.size())
    return a.children.size() < b.children.size() ? -1 : 1;
  return 0;
}

int compare(const Forest& a, const Forest& b) {
  int da = degree(a), db = degree(b);
  if (da != db) return da < db ? -1 : 1;
  size_t n = std::min(a.trees.size(), b.trees.size());
  for (size_t i = 0; i < n; ++i) {
    int c = compare(a.trees[i], b.trees[i]);
    if (c != 0) return c;
  }
  if (a.trees.size() != b.trees.size())
    return a.trees.size() < b.trees.size() ? -1 : 1;
  return 0;
}

Tree canonicalize(Tree t, int d) {
  if (t.label < 1 || (d > 0 && t.label > d))
    throw std::invalid_argument("tree label out of range: " + std::to_string(t.label));
  for (auto& c : t.children) c = canonicalize(std::move(c), d);
  std::sort(t.children.begin(), t.children.end());
  return t;
}

Forest canonicalize(Forest f, int d) {
  for (auto& t : f.trees) t = canonicalize(std::move(t), d);
  std::sort(f.trees.begin(), f.trees.end());
  return f;
}

Tree leaf(int label) { return Tree{label, {}}; }

Forest forest_of(std::initializer_list<Tree> trees) {
  Forest f;
  f.trees.assign(trees.begin(), trees.end());
  return canonicalize(std::move(f));
}

Forest tree_as_forest(Tree t) {
  Forest f;
  f.trees.push_back(std::move(t));
  return f;
}

std::string encode(const Tree& t) {
  std::string s = std::to_string(t.label);
  if (!t.children.empty()) {
    s += "(";
    for (size_t i = 0; i < t.children.size(); ++i) {
      if (i) s += " ";
      s += encode(t.children[i]);
    }
    s += ")";
  }
  return s;
}

std::string encode(const Forest& f) {
  if (f.trees.empty()) return "e";
  std::string s;
  for (size_t i = 0; i < f.trees.size(); ++i) {
    if (i) s += " ";
    s += encode(f.trees[i]);
  }
  return s;
}

namespace {

Tree parse_tree_at(const std::string& s, size_t& pos) {
  size_t start = pos;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos == start) throw std::invalid_argument("forest parse error at '" + s + "'");
  Tree t;
  t.label = std::stoi(s.substr(start, pos - start));
  if (pos < s.size() && s[pos] == '(') {
    ++pos;
    while (pos < s.size() && s[pos] != ')') {
      if (s[pos] == ' ') {
        ++pos;
        continue;
      }
      t.children.push_back(parse_tree_at(s, pos));
    }
    if (pos >= s.size()) throw std::invalid_argument("unbalanced '(' in '" + s + "'");
    ++pos;
  }
  return t;
}

}  // namespace

Tree parse_tree(const std::string& s) {
  size_t pos = 0;
  Tree t = parse_tree_at(s, pos);
  if (pos != s.size()) throw std::invalid_argument("trailing input in tree '" + s + "'");
  return canonicalize(std::move(t));
}

Forest parse_forest(const std::string& s) {
  Forest f;
  if (s.empty() || s == "e") return f;
  size_t pos = 0;
  while (pos < s.size()) {
    if (s[pos] == ' ') {
      ++pos;
      continue;
    }
    f.trees.push_back(parse_tree_at(s, pos));
  }
  return canonicalize(std::move(f));
}

namespace {

long long factorial(int n) {
  long long r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// sigma over the multiset of trees: prod over distinct factors tau^k of
// k! * sigma(tau)^k.
long long sigma_of_factors(const std::vector<Tree>& trees) {
  long long s = 1;
  size_t i = 0;
  while (i < trees.size()) {
    size_t j = i;
    while (j < trees.size() && compare(trees[j], trees[i]) == 0) ++j;
    int mult = static_cast<int>(j - i);
    long long st = symmetry_factor(trees[i]);
    s *= factorial(mult);
    for (int k = 0; k < mult; ++k) s *= st;
    i = j;
  }
  return s;
}

}  // namespace

long long symmetry_factor(const Tree& t) { return sigma_of_factors(t.children); }

long long symmetry_factor(const Forest& f) { return sigma_of_factors(f.trees); }

Tree graft_root(const Forest& rho, int label) {
  Tree t;
  t.label = label;
  t.children = rho.trees;
  return canonicalize(std::move(t));
}

Tree graft_onto(const Forest& rho, const Tree& tau) {
  Tree t = tau;
  t.children.insert(t.children.end(), rho.trees.begin(), rho.trees.end());
  return canonicalize(std::move(t));
}

namespace {

void add_cut(std::map<std::pair<std::string, std::string>, CutTerm>& acc,
             Forest left, Forest right, long long mult) {
  left = canonicalize(std::move(left));
  right = canonicalize(std::move(right));
  auto key = std::make_pair(encode(left), encode(right));
  auto it = acc.find(key);
  if (it == acc.end()) {
    acc.emplace(std::move(key), CutTerm{std::move(left), std::move(right), mult});
  } else {
    it->second.mult += mult;
  }
}

std::vector<CutTerm> finish(std::map<std::pair<std::string, std::string>, CutTerm>&& acc) {
  std::vector<CutTerm> out;
  out.reserve(acc.size());
  for (auto& [k, v] : acc) out.push_back(std::move(v));
  return out;
}

}  // namespace

std::vector<CutTerm> coproduct(const Tree& t) {
  if (degree(t) > kDegreeCap)
    throw std::invalid_argument("coproduct: degree cap exceeded");
  std::map<std::pair<std::string, std::string>, CutTerm> acc;
  // Delta([rho]_i) = [rho]_i (x) e + sum over Delta(rho) of rho_1 (x) [rho_2]_i
  add_cut(acc, tree_as_forest(t), Forest{}, 1);
  Forest rho;
  rho.trees = t.children;
  rho = canonicalize(std::move(rho));
  for (const auto& term : coproduct(rho)) {
    add_cut(acc, term.left, tree_as_forest(graft_root(term.right, t.label)), term.mult);
  }
  return finish(std::move(acc));
}

std::vector<CutTerm> coproduct(const Forest& f) {
  if (degree(f) > kDegreeCap)
    throw std::invalid_argument("coproduct: degree cap exceeded");
  std::map<std::pair<std::string, std::string>, CutTerm> acc;
  add_cut(acc, Forest{}, Forest{}, 1);
  std::vector<CutTerm> cur = finish(std::move(acc));
  for (const auto& t : f.trees) {
    auto ct = coproduct(t);
    std::map<std::pair<std::string, std::string>, CutTerm> next;
    for (const auto& a : cur) {
      for (const auto& b : ct) {
        Forest l = a.left;
        l.trees.insert(l.trees.end(), b.left.trees.begin(), b.left.trees.end());
        Forest r = a.right;
        r.trees.insert(r.trees.end(), b.right.trees.begin(), b.right.trees.end());
        add_cut(next, std::move(l), std::move(r), a.mult * b.mult);
      }
    }
    cur = finish(std::move(next));
  }
  return cur;
}

void ForestLinComb::add(const Forest& f, const Rational& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(f);
  if (it == terms_.end()) {
    terms_.emplace(f, c);
  } else {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

namespace {

// All forests of exactly degree n over labels 1..d, built bottom-up.
void forests_of_degree(int d, int n, std::vector<std::vector<Forest>>& memo);

std::vector<Tree> trees_of_degree(int d, int n, std::vector<std::vector<Forest>>& memo) {
  std::vector<Tree> out;
  if (n < 1) return out;
  forests_of_degree(d, n - 1, memo);
  for (int i = 1; i <= d; ++i) {
    for (const auto& rho : memo[n - 1]) out.push_back(graft_root(rho, i));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Tree& a, const Tree& b) { return compare(a, b) == 0; }),
            out.end());
  return out;
}

void extend(std::vector<Forest>& out, const std::vector<std::vector<Tree>>& trees_by_deg,
            Forest cur, int remaining, const Tree* min_tree) {
  if (remaining == 0) {
    out.push_back(canonicalize(std::move(cur)));
    return;
  }
  for (int deg = 1; deg <= remaining; ++deg) {
    for (const auto& t : trees_by_deg[deg]) {
      if (min_tree && compare(t, *min_tree) < 0) continue;  // nondecreasing order
      Forest next = cur;
      next.trees.push_back(t);
      extend(out, trees_by_deg, std::move(next), remaining - deg, &t);
    }
  }
}

void forests_of_degree(int d, int n, std::vector<std::vector<Forest>>& memo) {
  if (static_cast<int>(memo.size()) > n && !memo[n].empty()) return;
  if (static_cast<int>(memo.size()) <= n) memo.resize(n + 1);
  if (n == 0) {
    memo[0] = {Forest{}};
    return;
  }
  std::vector<std::vector<Tree>> trees_by_deg(n + 1);
  for (int m = 1; m <= n; ++m) trees_by_deg[m] = trees_of_degree(d, m, memo);
  std::vector<Forest> out;
  extend(out, trees_by_deg, Forest{}, n, nullptr);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Forest& a, const Forest& b) { return compare(a, b) == 0; }),
            out.end());
  memo[n] = std::move(out);
}

}  // namespace

ForestEnumeration enumerate_forests(int d, int n) {
  if (d < 1) throw std::invalid_argument("enumerate_forests: d must be >= 1");
  if (n < 1 || n > kDegreeCap)
    throw std::invalid_argument("enumerate_forests: n must be in 1..3");
  std::vector<std::vector<Forest>> memo;
  ForestEnumeration e;
  for (int m = 1; m <= n; ++m) {
    forests_of_degree(d, m, memo);
    for (const auto& f : memo[m]) {
      e.forests.push_back(f);
      if (f.trees.size() == 1) e.trees.push_back(f.trees[0]);
    }
  }
  return e;
}

ForestLinComb gl_product(const Forest& a, const Forest& b, int d) {
  int n = degree(a) + degree(b);
  if (n > kDegreeCap) throw std::invalid_argument("gl_product: degree cap exceeded");
  ForestLinComb out;
  if (n == 0) {
    out.add(Forest{}, 1);
    return out;
  }
  std::vector<std::vector<Forest>> memo;
  forests_of_degree(d, n, memo);
  Rational sa(symmetry_factor(a)), sb(symmetry_factor(b));
  std::string ea = encode(a), eb = encode(b);
  for (const auto& lam : memo[n]) {
    long long c = 0;
    for (const auto& term : coproduct(lam)) {
      if (encode(term.left) == ea && encode(term.right) == eb) c += term.mult;
    }
    if (c == 0) continue;
    Rational coeff = sa * sb * Rational(c) / Rational(symmetry_factor(lam));
    if (coeff.den() != 1 || coeff.sign() < 0)
      throw std::runtime_error("gl_product: duality solve produced a non-integral coefficient");
    out.add(lam, coeff);
  }
  return out;
}

ForestLinComb gl_product(const ForestLinComb& a, const ForestLinComb& b, int d) {
  ForestLinComb out;
  for (const auto& [fa, ca] : a.terms()) {
    for (const auto& [fb, cb] : b.terms()) {
      ForestLinComb part = gl_product(fa, fb, d);
      for (const auto& [fl, cl] : part.terms()) {
        out.add(fl, ca * cb * cl);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// ForestTable

int ForestTable::id(const Forest& f) const { return id_of_encoding(encode(f)); }

int ForestTable::id_of_encoding(const std::string& enc) const {
  auto it = id_by_enc_.find(enc);
  return it == id_by_enc_.end() ? -1 : it->second;
}

void ForestTable::build() {
  std::vector<std::vector<Forest>> memo;
  by_degree_.assign(cap + 1, {});
  for (int m = 0; m <= cap; ++m) {
    forests_of_degree(d, m, memo);
    for (const auto& f : memo[m]) {
      int fid = static_cast<int>(forests.size());
      forests.push_back(f);
      id_by_enc_[encode(f)] = fid;
      by_degree_[m].push_back(fid);
    }
  }
  int nf = num_forests();
  degree_of.resize(nf);
  depth_of.resize(nf);
  sigma.resize(nf);
  is_tree.assign(nf, 0);
  tree_slot.assign(nf, -1);
  factors.resize(nf);
  coprod.resize(nf);
  splits.resize(nf);
  for (int i = 0; i < nf; ++i) {
    const Forest& f = forests[i];
    degree_of[i] = degree(f);
    depth_of[i] = depth(f);
    sigma[i] = symmetry_factor(f);
    if (f.trees.size() == 1) {
      is_tree[i] = 1;
      tree_slot[i] = static_cast<int>(tree_ids.size());
      tree_ids.push_back(i);
    }
    // factor multiset
    size_t a = 0;
    while (a < f.trees.size()) {
      size_t b = a;
      while (b < f.trees.size() && compare(f.trees[b], f.trees[a]) == 0) ++b;
      factors[i].emplace_back(id(tree_as_forest(f.trees[a])), static_cast<int>(b - a));
      a = b;
    }
    for (const auto& term : coproduct(f)) {
      coprod[i].push_back(IdCut{id(term.left), id(term.right), term.mult});
    }
    // unordered proper splits of the tree multiset (for character checks)
    int k = static_cast<int>(f.trees.size());
    if (k >= 2) {
      std::map<std::pair<int, int>, char> seen;
      for (int mask = 1; mask < (1 << k) - 1; ++mask) {
        Forest l, r;
        for (int j = 0; j < k; ++j) {
          if (mask & (1 << j))
            l.trees.push_back(f.trees[j]);
          else
            r.trees.push_back(f.trees[j]);
        }
        int li = id(canonicalize(std::move(l))), ri = id(canonicalize(std::move(r)));
        auto key = std::minmax(li, ri);
        if (!seen.emplace(std::make_pair(key.first, key.second), 1).second) continue;
        splits[i].emplace_back(key.first, key.second);
      }
    }
  }
  graft_root_id.assign(nf, std::vector<int>(d, -1));
  graft_onto_id.assign(nf, std::vector<int>(nf, -1));
  concat_id.assign(nf, std::vector<int>(nf, -1));
  gl.assign(nf, std::vector<std::vector<GlTerm>>(nf));
  for (int i = 0; i < nf; ++i) {
    if (degree_of[i] + 1 <= cap) {
      for (int lab = 1; lab <= d; ++lab)
        graft_root_id[i][lab - 1] = id(tree_as_forest(graft_root(forests[i], lab)));
    }
    for (int j = 0; j < nf; ++j) {
      int total = degree_of[i] + degree_of[j];
      if (total > cap) continue;
      if (is_tree[j] && degree_of[j] >= 1)
        graft_onto_id[i][j] = id(tree_as_forest(graft_onto(forests[i], forests[j].trees[0])));
      Forest cc = forests[i];
      cc.trees.insert(cc.trees.end(), forests[j].trees.begin(), forests[j].trees.end());
      concat_id[i][j] = id(canonicalize(std::move(cc)));
      ForestLinComb prod = gl_product(forests[i], forests[j], d);
      for (const auto& [fl, cl] : prod.terms()) {
        gl[i][j].push_back(GlTerm{id(fl), cl.num().convert_to<long long>()});
      }
    }
  }
}

std::shared_ptr<const ForestTable> ForestTable::get(int d, int cap) {
  if (d < 1 || cap < 1 || cap > kDegreeCap)
    throw std::invalid_argument("ForestTable: need d >= 1 and 1 <= cap <= 3");
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const ForestTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(d, cap);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto table = std::shared_ptr<ForestTable>(new ForestTable());
  table->d = d;
  table->cap = cap;
  table->build();
  cache[key] = table;
  return table;
}

}  // namespace birch
