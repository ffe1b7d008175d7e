#pragma once

#include <string>
#include <vector>

#include "stefanopt/problem.hpp"

namespace stefanopt {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Self-check suites behind the `verify` subcommand: discrete-norm
/// identities and the sampling inequality, lift smoothness at the knots,
/// per-step Galerkin oracles, and the reflection-extension energy bound.
std::vector<SuiteResult> run_verify_suites(const ProblemData& pd, unsigned seed);

}  // namespace stefanopt
