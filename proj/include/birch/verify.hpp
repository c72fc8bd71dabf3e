#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "birch/polynomial.hpp"

namespace birch {

struct CheckResult {
  std::string name;
  bool pass = false;
  double metric = 0.0;  // defect / gap / count, whatever the check measures
  std::string detail;
};

// Exact identities of the forest algebra and character group at d=2,
// degree <= 3, over `instances` random rational instances. Zero tolerance.
std::vector<CheckResult> verify_algebra(std::uint64_t seed, int instances);

// Float checks on the shipped fixtures: lift validity, controls, metric
// axioms, Young values, local error decay.
std::vector<CheckResult> verify_analysis(std::uint64_t seed);

// Generators, shuffle law, first-level coincidence.
std::vector<CheckResult> verify_pi(std::uint64_t seed);

bool all_pass(const std::vector<CheckResult>& checks);

// Seeded random helpers shared by the verify suites and tests.
Rational random_rational(std::uint64_t& state, int num_range = 6, int den_range = 6);
PolynomialOneForm random_polynomial_one_form(std::uint64_t seed, int d, int e, double gamma,
                                             int max_degree = 3);

}  // namespace birch
