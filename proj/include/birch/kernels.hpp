#pragma once

#include <functional>
#include <vector>

namespace birch::kernels {

// Partition dynamic programs behind p-variation and the d_p metric.
// sup over sub-partitions s = r_0 < r_1 < ... < r_k = t of sum w(r_i, r_{i+1})
// on a grid of m segments (points 0..m). Weights must be >= 0.
//
// The *_serial variants are the reference implementations; the *_parallel
// ones use OpenMP and must produce bit-identical results (max reductions
// only, no reordered sums).

using WeightFn = std::function<double(int, int)>;

double pvar_dp_serial(int m, const WeightFn& w);
double pvar_dp_parallel(int m, const WeightFn& w);
double pvar_dp(int m, const WeightFn& w);  // picks parallel when built with OpenMP

// R simultaneous DPs sharing one weight evaluation per index pair. fill(i, j, out)
// writes R weights for the pair (i, j).
using MultiWeightFn = std::function<void(int, int, double*)>;

std::vector<double> multi_pvar_dp_serial(int m, int R, const MultiWeightFn& fill);
std::vector<double> multi_pvar_dp_parallel(int m, int R, const MultiWeightFn& fill);
std::vector<double> multi_pvar_dp(int m, int R, const MultiWeightFn& fill);

// Full table V[i][j] = DP value over [i, j] for all 0 <= i < j <= m.
std::vector<std::vector<double>> control_table_serial(int m, const WeightFn& w);
std::vector<std::vector<double>> control_table_parallel(int m, const WeightFn& w);
std::vector<std::vector<double>> control_table(int m, const WeightFn& w);

bool openmp_enabled();

}  // namespace birch::kernels
