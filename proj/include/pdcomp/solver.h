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

#ifndef PDCOMP_SOLVER_H_
#define PDCOMP_SOLVER_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pdcomp/core.h"
#include "pdcomp/metrics.h"
#include "pdcomp/problem.h"
#include "pdcomp/schedule.h"

namespace pdcomp {

// Oracle calls made by one iteration (or accumulated over a run).
struct OpCounters {
  long g_evals = 0;
  long jvp_evals = 0;
  long grad_f_evals = 0;
  long prox_h_calls = 0;
  long prox_Hstar_calls = 0;

  OpCounters& operator+=(const OpCounters& other);
};

struct IterateState {
  std::size_t k = 0;
  Vector x;
  Vector x_hat;
  Vector y;
  Vector y_tilde;
  Vector y_breve;
  Vector Theta;

  // Weighted sums behind the ergodic averages.
  Vector x_sum;
  Vector y_sum;
  double weight_sum = 0.0;

  // g(x_hat^k) when already known from the previous iteration.
  std::optional<Vector> g_x_hat;

  // Inputs of the last dual step, kept to reconstruct s^{k+1}.
  Vector last_y_tilde;
  Vector last_g_x_hat;

  OpCounters last_step_ops;
  OpCounters total_ops;
};

// x_hat^0 = x^0, y_tilde^0 = y_breve^0 = y^0, Theta_0 = 0.
IterateState InitState(const CompositeProblem& prob, const Vector& x0,
                       const Vector& y0);

struct StepOptions {
  // Dual step projects onto K* instead of applying prox_{rho H*}.
  bool cone_mode = false;
  // Reuse g(x^{k+1}) as g(x_hat^{k+1}) when beta_{k+1} = 0.
  bool reuse_g = false;
};

StepOptions DefaultStepOptions(const ScheduleParams& params);

// One pass of the update block. Returns false when a produced vector is not
// finite; the state is then left at the failed values.
bool Step(const CompositeProblem& prob, const ScheduleState& params,
          IterateState& state, const StepOptions& options);

// The beta = 0, tau = 1 special case written in its own terms: dual step at
// g(x^k), primal step from x^k, and
// y_tilde^{k+1} = y_tilde^k + eta [g(x^{k+1}) - g(x^k) + (y^{k+1} - y_tilde^k)
// / rho]. Used to cross-check Step; touches x, y, y_tilde only.
void SimplifiedErgodicStep(const CompositeProblem& prob,
                           const ScheduleState& params, IterateState& state,
                           bool cone_mode = false);

// Folds the newest iterate into the running averages: uniform over x^j, y^j
// for thm1, rho_j-weighted for thm2, nothing for the semi-ergodic schedules.
void UpdateAverages(IterateState& state, const ScheduleState& params,
                    Variant variant);

// Reported point: ergodic average (or x^0 before the first iteration) for
// thm1/thm2, the last iterate otherwise.
Vector ReportedPrimal(const IterateState& state, Variant variant);
// Reported dual point: the ergodic average for thm1/thm2, y_breve otherwise.
Vector ReportedDual(const IterateState& state, Variant variant);

// s^{k+1} = g(x_hat^k) + (y_tilde^k - y^{k+1}) / rho_k.
Vector ReconstructS(const IterateState& state, double rho);

enum class RunStatus { kCompleted, kStopped, kDiverged, kPreconditionFailed };
std::string_view RunStatusName(RunStatus status);

struct TraceOptions {
  // Evaluate dual residual and gap every this many iterations (0 = never).
  std::size_t dual_every = 0;
  bool theorem_bound = true;
  bool timing = true;
  DualOracle dual_oracle;
};

using IterationCallback = std::function<void(
    const IterateState&, const ScheduleState&, const TraceRecord&)>;

struct RunOptions {
  std::size_t max_iters = 1000;
  TraceOptions trace;
  // Stop once the primal residual (or E for cone programs) drops below this.
  std::optional<double> stop_below;
  std::vector<IterationCallback> callbacks;
};

struct RunResult {
  RunStatus status = RunStatus::kCompleted;
  std::string message;
  std::size_t iterations = 0;
  IterateState final_state;
  std::vector<TraceRecord> trace;
  std::vector<std::string> warnings;
};

// Runs the solver. The trace has one row per completed iteration plus the
// initial row. Schedule precondition failures are reported in the status;
// malformed input (max_iters = 0, wrong sizes) throws InvalidInputError.
RunResult Run(const CompositeProblem& prob, const ScheduleParams& params,
              const Vector& x0, const Vector& y0, const RunOptions& options);

}  // namespace pdcomp

#endif  // PDCOMP_SOLVER_H_
