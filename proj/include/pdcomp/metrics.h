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

#ifndef PDCOMP_METRICS_H_
#define PDCOMP_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>

#include "pdcomp/core.h"
#include "pdcomp/problem.h"
#include "pdcomp/schedule.h"

namespace pdcomp {

// One row of a run trace. Row k describes the reported point after k
// iterations and the parameters of iteration k.
//
// primal_residual is P(x) - P* for composite problems and |F(x) - F*| for
// cone programs (whose P is an indicator-valued extended real). pd_gap is
// P(x) + D(y) with D the dual objective as a minimization, so D* = -P* and
// the gap is nonnegative.
struct TraceRecord {
  std::size_t k = 0;
  double tau = 0.0;
  double rho = 0.0;
  double eta = 0.0;
  double L = 0.0;
  double beta = 0.0;
  std::optional<double> primal_residual;
  std::optional<double> dual_residual;
  std::optional<double> pd_gap;
  std::optional<double> feasibility;
  std::optional<double> theorem_bound;
  double wall_time_ms = 0.0;
};

// P(x) - P*; +inf when x is outside the domain.
double PrimalResidual(const CompositeProblem& prob, const Vector& x,
                      double P_star);

// Settings of the inner solver behind the dual objective.
struct DualOracle {
  double tolerance = 1e-10;
  int iteration_cap = 100000;
};

struct DualValueResult {
  double value = 0.0;
  // False when the inner solve hit the cap before reaching the tolerance.
  bool converged = false;
  // The inner problem was detected unbounded below (value is +inf).
  bool unbounded = false;
  int iterations = 0;
  Vector inner_x;
};

// D(y) = H*(y) - min_x {F(x) + <y, g(x)>}, the inner minimization solved by
// an accelerated proximal gradient method with backtracking and adaptive
// restart. Requires H.conjugate_value.
DualValueResult DualValue(const CompositeProblem& prob, const Vector& y,
                          const DualOracle& oracle = {});

// P(x) + D(y).
double PrimalDualGap(const CompositeProblem& prob, const Vector& x,
                     const Vector& y, const DualOracle& oracle = {});

// Euclidean distance from g(x) to -K.
double ConeFeasibility(const CompositeProblem& prob, const Vector& x);

// E(x) = max{|F(x) - F*|, dist(g(x), -K)} for cone programs.
double ConeMeasureE(const CompositeProblem& prob, const Vector& x,
                    double F_star);

// Right-hand side of the variant's primal guarantee at iteration k >= 1.
// Returns nullopt when the bound is not available (M_H = +inf outside cone
// mode and no H.subgradient is available). When M_H = +inf and
// H.subgradient exists, the radius ||y|| with y in dH(g(x_report)) replaces
// M_H, which is valid since P(x) = L~(x, y) for that y. In cone mode the bound is on E(x) and uses
// Delta_0 = L_0 ||x0 - x*||^2 + (||y0|| + ||y*|| + 1)^2 / eta_0.
std::optional<double> TheoremBound(Schedule& schedule,
                                   const CompositeProblem& prob,
                                   std::size_t k, const Vector& x0,
                                   const Vector& y0,
                                   const KnownOptimum& saddle,
                                   const Vector* x_report = nullptr);

// Least-squares slope of log(envelope) against log(k) over
// k in [k_min, k_max], where envelope is the running minimum of the series.
// Throws InvalidInputError with fewer than 5 points in range or a
// nonpositive envelope value there.
double FitRateSlope(std::span<const std::pair<double, double>> series,
                    double k_min, double k_max);

// Delta_rho(x_hat, s_hat; x, s, y): the remainder of the linearization of
// phi_rho(x, s, y) = <y, g(x) - s> + (rho / 2) ||g(x) - s||^2.
double DeltaRho(const CompositeProblem& prob, const Vector& x_hat,
                const Vector& s_hat, const Vector& x, const Vector& s,
                const Vector& y, double rho);

using DeltaFunction = std::function<double(
    const CompositeProblem&, const Vector& x_hat, const Vector& s_hat,
    const Vector& x, const Vector& s, const Vector& y, double rho)>;

struct SandwichReport {
  // min over samples of Delta - (rho/2)||...||^2 (must be >= 0).
  double min_lower_slack = kInfinity;
  // max over samples of that quantity minus (1/2) L_g ||w|| ||x_hat - x||^2
  // (must be <= 0).
  double max_upper_slack = -kInfinity;
  int samples = 0;
  int skipped = 0;
  bool pass = false;
};

inline constexpr double kSandwichTolerance = 1e-9;

// Samples (x, x_hat) from dom F, w from dom H*, s and s_hat at random, and
// sets y = w - rho (g(x) - s) so that y + rho (g(x) - s) = w lies in dom H*.
SandwichReport Lemma1SandwichCheck(const CompositeProblem& prob, int samples,
                                   std::uint64_t seed, double rho = 1.0,
                                   const DeltaFunction& delta = DeltaRho);

}  // namespace pdcomp

#endif  // PDCOMP_METRICS_H_
