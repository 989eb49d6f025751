#pragma once

// Seeded verification suites for the weighted-operator inequalities: each
// suite measures a fitted constant (max observed ratio over a random field
// suite) at the base grid and at a doubled grid, and passes when the constant
// is finite and stable, alongside any exact identity checks.

#include "crestwave/grid.hpp"

#include <map>
#include <string>
#include <vector>

namespace crestwave {

struct SuiteReport {
  std::string suite;
  int n = 0;
  double gamma = 0.0;
  double fitted_C = 0.0;
  double fitted_C_refined = 0.0;
  bool pass = false;
  std::string note;
  std::map<std::string, double> details;
};

// name in {hilbert, hardy, riesz, cauchy, mollifier, commutators, halfnorm}
SuiteReport verify_suite(const std::string& name, int n, double gamma, std::uint64_t seed);

std::vector<std::string> verify_suite_names();

}  // namespace crestwave
