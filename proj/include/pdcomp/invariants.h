// Copyright 2026 The pdcomp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PDCOMP_INVARIANTS_H_
#define PDCOMP_INVARIANTS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pdcomp/problem.h"
#include "pdcomp/schedule.h"

namespace pdcomp {

// Executable property checks shared by the test suites and `pdcomp check`.
// Each returns the worst observed violation measure; callers compare it to
// the documented tolerance.

// max |prox_{rho H*}(v) + rho prox_{H/rho}(v / rho) - v| over random v, rho
// for the max, quadratic and cone-indicator H, computing prox_{rho H*} in
// closed form.
double MoreauIdentityError(int samples, std::uint64_t seed);

struct TauReport {
  double max_identity_error = 0.0;  // |tau_k^2 - (1 - tau_k) tau_{k-1}^2|
  bool bounds_hold = true;          // 1/(k+1) <= tau_k <= 2/(k+2)
};
TauReport CheckThm4Tau(std::size_t k_max);

// max_k ||y_tilde^{k+1} - eta_k Theta_{k+1} - y0|| / max(1, ||y0||, ||y_tilde^{k+1}||).
double TelescopingError(const CompositeProblem& prob,
                        const ScheduleParams& params, std::size_t iterations);

// max_k of L_g [||y*|| + ||y_tilde^k - y*|| + rho M_g ||x^k - x*||] - rho C
// under the constant-step ergodic schedule (nonpositive when the bound holds).
double LemmaB1Slack(const CompositeProblem& prob, std::size_t iterations);

// Number of iterations whose op counts differ from the contract: one
// Jacobian-transpose product, one gradient of f, one prox of h and of H*,
// and two evaluations of g except for the cached case of beta = 0 schedules
// after the first iteration.
std::size_t OpCounterViolations(const CompositeProblem& prob,
                                const ScheduleParams& params,
                                std::size_t iterations);

// min_k L~(x^k, y*) - L~(x*, y^k) along a run (should be >= 0).
double SaddleGapMinimum(const CompositeProblem& prob,
                        const ScheduleParams& params, std::size_t iterations);

// Worst ratio of ||g(x) - g(x')|| / (M_g ||x - x'||) and
// ||g'(x)^T y - g'(x')^T y|| / (L_g ||y|| ||x - x'||) over random pairs
// (both must be <= 1).
struct ConstantsReport {
  double worst_M_ratio = 0.0;
  double worst_L_ratio = 0.0;
};
ConstantsReport CheckMappingConstants(const CompositeProblem& prob, int pairs,
                                      std::uint64_t seed);

// Largest violation (negative slack) of the two momentum conditions of the
// strongly convex semi-ergodic schedule for k in [1, k_max], relative to
// their scale.
double Thm4BetaViolation(const CompositeProblem& prob,
                         const ScheduleParams& params, std::size_t k_max);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// The full invariant suite over the registered instances.
std::vector<CheckResult> RunInvariantSuite();

}  // namespace pdcomp

#endif  // PDCOMP_INVARIANTS_H_
