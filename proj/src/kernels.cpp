#include "birch/kernels.hpp"

#include <algorithm>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace birch::kernels {

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

double pvar_dp_serial(int m, const WeightFn& w) {
  if (m < 1) return 0.0;
  std::vector<double> v(m + 1, 0.0);
  for (int j = 1; j <= m; ++j) {
    double best = -1.0;
    for (int i = 0; i < j; ++i) best = std::max(best, v[i] + w(i, j));
    v[j] = best;
  }
  return v[m];
}

double pvar_dp_parallel(int m, const WeightFn& w) {
#ifndef _OPENMP
  return pvar_dp_serial(m, w);
#else
  if (m < 1) return 0.0;
  std::vector<double> v(m + 1, 0.0);
  for (int j = 1; j <= m; ++j) {
    double best = -1.0;
#pragma omp parallel for reduction(max : best) schedule(static)
    for (int i = 0; i < j; ++i) best = std::max(best, v[i] + w(i, j));
    v[j] = best;
  }
  return v[m];
#endif
}

double pvar_dp(int m, const WeightFn& w) {
#ifdef _OPENMP
  return m >= 64 ? pvar_dp_parallel(m, w) : pvar_dp_serial(m, w);
#else
  return pvar_dp_serial(m, w);
#endif
}

std::vector<double> multi_pvar_dp_serial(int m, int R, const MultiWeightFn& fill) {
  std::vector<double> v((m + 1) * R, 0.0);
  std::vector<double> buf(R);
  for (int j = 1; j <= m; ++j) {
    std::vector<double> best(R, -1.0);
    for (int i = 0; i < j; ++i) {
      fill(i, j, buf.data());
      for (int r = 0; r < R; ++r) best[r] = std::max(best[r], v[i * R + r] + buf[r]);
    }
    for (int r = 0; r < R; ++r) v[j * R + r] = best[r];
  }
  return std::vector<double>(v.begin() + m * R, v.begin() + (m + 1) * R);
}

std::vector<double> multi_pvar_dp_parallel(int m, int R, const MultiWeightFn& fill) {
#ifndef _OPENMP
  return multi_pvar_dp_serial(m, R, fill);
#else
  std::vector<double> v((m + 1) * R, 0.0);
  std::vector<double> row(static_cast<size_t>(m) * R);
  for (int j = 1; j <= m; ++j) {
    // weight evaluation dominates; fill the row in parallel, reduce serially
    // so the result is independent of the schedule
#pragma omp parallel for schedule(static)
    for (int i = 0; i < j; ++i) fill(i, j, row.data() + static_cast<size_t>(i) * R);
    for (int r = 0; r < R; ++r) {
      double best = -1.0;
      for (int i = 0; i < j; ++i)
        best = std::max(best, v[i * R + r] + row[static_cast<size_t>(i) * R + r]);
      v[j * R + r] = best;
    }
  }
  return std::vector<double>(v.begin() + m * R, v.begin() + (m + 1) * R);
#endif
}

std::vector<double> multi_pvar_dp(int m, int R, const MultiWeightFn& fill) {
#ifdef _OPENMP
  return m >= 64 ? multi_pvar_dp_parallel(m, R, fill) : multi_pvar_dp_serial(m, R, fill);
#else
  return multi_pvar_dp_serial(m, R, fill);
#endif
}

namespace {

std::vector<std::vector<double>> control_table_impl(int m, const WeightFn& w, bool parallel) {
  // pairwise weights first, then one forward DP per start index
  std::vector<std::vector<double>> ww(m + 1, std::vector<double>(m + 1, 0.0));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j <= m; ++j) ww[i][j] = w(i, j);

  std::vector<std::vector<double>> table(m + 1, std::vector<double>(m + 1, 0.0));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int i = 0; i < m; ++i) {
    std::vector<double> v(m + 1, 0.0);
    for (int j = i + 1; j <= m; ++j) {
      double best = ww[i][j];
      for (int k = i + 1; k < j; ++k) best = std::max(best, v[k] + ww[k][j]);
      v[j] = best;
      table[i][j] = best;
    }
  }
  return table;
}

}  // namespace

std::vector<std::vector<double>> control_table_serial(int m, const WeightFn& w) {
  return control_table_impl(m, w, false);
}

std::vector<std::vector<double>> control_table_parallel(int m, const WeightFn& w) {
  return control_table_impl(m, w, true);
}

std::vector<std::vector<double>> control_table(int m, const WeightFn& w) {
#ifdef _OPENMP
  return m >= 64 ? control_table_parallel(m, w) : control_table_serial(m, w);
#else
  return control_table_serial(m, w);
#endif
}

}  // namespace birch::kernels
