// Times the partition-DP kernels (p-variation, d_p metric, control table)
// serial vs OpenMP and prints a small table.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "birch/kernels.hpp"
#include "birch/path.hpp"

using namespace birch;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <class F>
double time_ms(F&& fn, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    double t0 = now_ms();
    fn();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 512;
  std::printf("kernel benchmark, grid %d segments, OpenMP %s\n", n,
              kernels::openmp_enabled() ? "on" : "off");

  SamplePath sp = gen_smooth(2, n, 1234, 4, 1.0);
  BranchedRoughPath x = canonical_lift(sp, 2, 2.0);
  BranchedRoughPath y = canonical_lift(gen_smooth(2, n, 77, 4, 1.0), 2, 2.0);
  x.ensure_inverses();
  y.ensure_inverses();

  auto w = [&](int i, int j) { return std::pow(x.increment(i, j).norm(), x.p); };
  double serial = 0, parallel = 0, check1 = 0, check2 = 0;

  serial = time_ms([&] { check1 = kernels::pvar_dp_serial(n, w); });
  parallel = time_ms([&] { check2 = kernels::pvar_dp_parallel(n, w); });
  std::printf("%-16s serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   match %d\n",
              "pvar_dp", serial, parallel, serial / parallel, check1 == check2);

  const auto& table = *x.table;
  int R = table.num_forests() - 1;
  auto fill = [&](int i, int j, double* out) {
    Character a = x.increment(i, j);
    Character b = y.increment(i, j);
    for (int fid = 1; fid < table.num_forests(); ++fid) {
      out[fid - 1] =
          std::pow(std::abs(a.evaluate(fid) - b.evaluate(fid)), x.p / table.degree_of[fid]);
    }
  };
  std::vector<double> v1, v2;
  serial = time_ms([&] { v1 = kernels::multi_pvar_dp_serial(n, R, fill); });
  parallel = time_ms([&] { v2 = kernels::multi_pvar_dp_parallel(n, R, fill); });
  std::printf("%-16s serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   match %d\n",
              "multi_pvar_dp", serial, parallel, serial / parallel, v1 == v2);

  int m = std::min(n, 192);
  std::vector<std::vector<double>> t1, t2;
  serial = time_ms([&] { t1 = kernels::control_table_serial(m, w); }, 1);
  parallel = time_ms([&] { t2 = kernels::control_table_parallel(m, w); }, 1);
  std::printf("%-16s serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   match %d (m=%d)\n",
              "control_table", serial, parallel, serial / parallel, t1 == t2, m);
  return 0;
}
