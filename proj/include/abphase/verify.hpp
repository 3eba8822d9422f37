#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "abphase/spacetime.hpp"

namespace abphase {

struct CaseResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  int count = 0;
  std::vector<CaseResult> cases;

  [[nodiscard]] bool passed() const;
  [[nodiscard]] double max_residual() const;
};

/// Random pair of subluminal piecewise-linear worldlines with shared endpoints,
/// coordinates of order one in units where time is measured as c t.
WorldlinePair random_worldline_pair(std::mt19937_64& rng, double c = 1.0);

/// Random polynomial gauges on random equal-time ruled surfaces: boundary
/// holonomy against the flux of the exterior derivative, relative residual.
SuiteReport verify_stokes(std::uint64_t seed, int count);

/// Divergence theorem on random boxes and the curl theorem on random patches,
/// both with random cubic vector fields; `count` cases of each.
SuiteReport verify_appendix_a(std::uint64_t seed, int count);

/// Potential-route phase of both scenarios under chi = x t and `count` random
/// smooth gauge functions; absolute residual.
SuiteReport verify_gauge(std::uint64_t seed, int count);

/// Total flux phase of both scenarios at v/c in {0, 0.3, 0.6, 0.9} and in the
/// special frames against the rest-frame value; relative residual.
SuiteReport verify_frames();

/// Dispatch by name: stokes, appendixA, gauge, frames. Unknown names throw ConfigError.
SuiteReport run_suite(const std::string& name, std::uint64_t seed, int count);

}  // namespace abphase
