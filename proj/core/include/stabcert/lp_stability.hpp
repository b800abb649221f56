#pragma once

#include <cstddef>

#include "stabcert/embedding.hpp"
#include "stabcert/matrix.hpp"

namespace stabcert::lp {

enum class StabilityLpStatus { StrictlyFeasible, Infeasible, DegenerateMargin };
const char* to_string(StabilityLpStatus s) noexcept;

struct LpOutcome {
  StabilityLpStatus status = StabilityLpStatus::Infeasible;
  Vector p;               // length 2n, normalized to sum 2n
  double margin = 0.0;    // optimal epsilon
  int iterations = 0;
  double solve_time = 0.0;    // seconds
  std::size_t memory_bytes = 0;  // peak tracked bytes during the solve
};

// Strict feasibility of  exists p > 0 : Ahat p < sigma  (sigma = 0 for CT,
// sigma = p for DT), decided through
//   maximize eps  s.t.  Ahat p + eps 1 <= sigma,  p >= eps 1,  sum(p) = 2n.
LpOutcome lp_stability_test(const embedding::EmbeddingPair& pair);

// Largest entry of Ahat p - sigma; negative means the certificate holds.
double certificate_slack(const embedding::EmbeddingPair& pair, std::span<const double> p);

}  // namespace stabcert::lp
