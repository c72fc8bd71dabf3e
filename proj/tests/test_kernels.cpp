#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "birch/kernels.hpp"
#include "birch/path.hpp"

using namespace birch;

TEST_CASE("dp on hand-checkable weights") {
  // superadditive weights: one big jump wins
  auto square = [](int i, int j) { return static_cast<double>((j - i) * (j - i)); };
  CHECK(kernels::pvar_dp_serial(10, square) == doctest::Approx(100.0));
  // subadditive weights: the finest partition wins
  auto root = [](int i, int j) { return std::sqrt(static_cast<double>(j - i)); };
  CHECK(kernels::pvar_dp_serial(10, root) == doctest::Approx(10.0));
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
  std::mt19937_64 rng(123);
  const int m = 97;
  std::vector<std::vector<double>> w(m + 1, std::vector<double>(m + 1, 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j <= m; ++j)
      w[i][j] = static_cast<double>(rng() % 10000) / 997.0;
  auto wf = [&](int i, int j) { return w[i][j]; };
  CHECK(kernels::pvar_dp_serial(m, wf) == kernels::pvar_dp_parallel(m, wf));

  const int R = 7;
  auto fill = [&](int i, int j, double* out) {
    for (int r = 0; r < R; ++r) out[r] = std::fmod(w[i][j] * (r + 1), 3.7);
  };
  CHECK(kernels::multi_pvar_dp_serial(m, R, fill) == kernels::multi_pvar_dp_parallel(m, R, fill));

  auto ts = kernels::control_table_serial(m, wf);
  auto tp = kernels::control_table_parallel(m, wf);
  CHECK(ts == tp);
  // the full table agrees with the single-interval DP
  CHECK(ts[0][m] == kernels::pvar_dp_serial(m, wf));
}

TEST_CASE("kernels back the path metrics consistently") {
  auto x = canonical_lift(gen_smooth(2, 80, 31, 3, 1.0), 2, 2.0);
  auto y = canonical_lift(gen_smooth(2, 80, 32, 3, 1.0), 2, 2.0);
  x.ensure_inverses();
  y.ensure_inverses();
  auto w = [&](int i, int j) { return std::pow(x.increment(i, j).norm(), x.p); };
  double direct = std::pow(kernels::pvar_dp_serial(80, w), 1.0 / x.p);
  CHECK(p_variation(x, 0, 80) == direct);

  // dp metric is dominated by any single-forest DP
  const auto& table = *x.table;
  double dm = dp_metric(x, y);
  for (int fid : {1, 3, 5}) {
    auto wf = [&](int i, int j) {
      double diff =
          std::abs(x.increment(i, j).evaluate(fid) - y.increment(i, j).evaluate(fid));
      return std::pow(diff, x.p / table.degree_of[fid]);
    };
    double single = std::pow(kernels::pvar_dp_serial(80, wf), 1.0 / x.p);
    CHECK(dm + 1e-12 >= single);
  }
}
