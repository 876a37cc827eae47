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

#include "pdcomp/solver.h"

#include <chrono>
#include <utility>

namespace pdcomp {

OpCounters& OpCounters::operator+=(const OpCounters& other) {
  g_evals += other.g_evals;
  jvp_evals += other.jvp_evals;
  grad_f_evals += other.grad_f_evals;
  prox_h_calls += other.prox_h_calls;
  prox_Hstar_calls += other.prox_Hstar_calls;
  return *this;
}

IterateState InitState(const CompositeProblem& prob, const Vector& x0,
                       const Vector& y0) {
  RequireSize(x0, prob.dimension_p, "x0");
  RequireSize(y0, prob.dimension_n, "y0");
  if (!x0.allFinite() || !y0.allFinite()) {
    throw InvalidInputError("initial point has non-finite entries");
  }
  if (prob.h.value(x0) == kInfinity) {
    throw InvalidInputError("x0 lies outside dom h");
  }
  IterateState state;
  state.x = x0;
  state.x_hat = x0;
  state.y = y0;
  state.y_tilde = y0;
  state.y_breve = y0;
  state.Theta = Vector::Zero(prob.dimension_n);
  state.x_sum = Vector::Zero(prob.dimension_p);
  state.y_sum = Vector::Zero(prob.dimension_n);
  return state;
}

StepOptions DefaultStepOptions(const ScheduleParams& params) {
  StepOptions options;
  options.cone_mode = params.cone_mode;
  options.reuse_g = IsErgodic(params.variant);
  return options;
}

namespace {

Vector DualStep(const CompositeProblem& prob, const Vector& arg, double rho,
                bool cone_mode) {
  if (cone_mode) return ProjectCone(arg, DualCone(*prob.cone));
  return ProxConjugateMoreau(prob.H.prox, arg, rho);
}

}  // namespace

bool Step(const CompositeProblem& prob, const ScheduleState& params,
          IterateState& state, const StepOptions& options) {
  OpCounters ops;
  const double rho = params.rho;
  const double inv_L = 1.0 / params.L;

  Vector g_hat;
  if (state.g_x_hat) {
    g_hat = std::move(*state.g_x_hat);
  } else {
    g_hat = prob.g.apply(state.x_hat);
    ++ops.g_evals;
  }
  state.g_x_hat.reset();

  Vector y_next = DualStep(prob, state.y_tilde + rho * g_hat, rho,
                           options.cone_mode);
  ++ops.prox_Hstar_calls;

  const Vector grad = prob.f.gradient(state.x_hat);
  ++ops.grad_f_evals;
  const Vector jvp = prob.g.jacobian_transpose_apply(state.x_hat, y_next);
  ++ops.jvp_evals;
  Vector x_next = prob.h.prox(state.x_hat - inv_L * (grad + jvp), inv_L);
  ++ops.prox_h_calls;

  Vector g_next = prob.g.apply(x_next);
  ++ops.g_evals;

  Vector theta_next = g_next - g_hat + (1.0 / rho) * (y_next - state.y_tilde);
  Vector y_tilde_next =
      state.y_tilde +
      params.eta * (theta_next - (1.0 - params.tau) * state.Theta);
  Vector x_hat_next = x_next + params.beta * (x_next - state.x);
  Vector y_breve_next =
      (1.0 - params.tau) * state.y_breve + params.tau * y_next;

  state.last_y_tilde = std::move(state.y_tilde);
  state.last_g_x_hat = std::move(g_hat);
  state.x = std::move(x_next);
  state.y = std::move(y_next);
  state.Theta = std::move(theta_next);
  state.y_tilde = std::move(y_tilde_next);
  state.x_hat = std::move(x_hat_next);
  state.y_breve = std::move(y_breve_next);
  if (options.reuse_g && params.beta == 0.0) {
    state.g_x_hat = std::move(g_next);
  }
  state.last_step_ops = ops;
  state.total_ops += ops;

  return state.x.allFinite() && state.y.allFinite() &&
         state.y_tilde.allFinite() && state.x_hat.allFinite() &&
         state.Theta.allFinite();
}

void SimplifiedErgodicStep(const CompositeProblem& prob,
                           const ScheduleState& params, IterateState& state,
                           bool cone_mode) {
  const double rho = params.rho;
  const double inv_L = 1.0 / params.L;
  const Vector g_x = prob.g.apply(state.x);
  Vector y_next = DualStep(prob, state.y_tilde + rho * g_x, rho, cone_mode);
  const Vector grad = prob.f.gradient(state.x);
  const Vector jvp = prob.g.jacobian_transpose_apply(state.x, y_next);
  Vector x_next = prob.h.prox(state.x - inv_L * (grad + jvp), inv_L);
  const Vector g_next = prob.g.apply(x_next);
  const Vector increment = g_next - g_x + (1.0 / rho) * (y_next - state.y_tilde);
  state.y_tilde = state.y_tilde + params.eta * increment;
  state.x = std::move(x_next);
  state.y = std::move(y_next);
}

void UpdateAverages(IterateState& state, const ScheduleState& params,
                    Variant variant) {
  switch (variant) {
    case Variant::kErgodicConvex:
      state.x_sum += state.x;
      state.y_sum += state.y;
      state.weight_sum += 1.0;
      break;
    case Variant::kErgodicStronglyConvex:
      state.x_sum += params.rho * state.x;
      state.y_sum += params.rho * state.y;
      state.weight_sum += params.rho;
      break;
    case Variant::kSemiErgodicConvex:
    case Variant::kSemiErgodicStronglyConvex:
      break;
  }
}

Vector ReportedPrimal(const IterateState& state, Variant variant) {
  if (IsErgodic(variant) && state.weight_sum > 0.0) {
    return state.x_sum / state.weight_sum;
  }
  return state.x;
}

Vector ReportedDual(const IterateState& state, Variant variant) {
  if (IsErgodic(variant)) {
    if (state.weight_sum > 0.0) return state.y_sum / state.weight_sum;
    return state.y;
  }
  return state.y_breve;
}

Vector ReconstructS(const IterateState& state, double rho) {
  if (!(rho > 0.0)) throw InvalidInputError("rho must be positive");
  if (state.last_g_x_hat.size() == 0) {
    throw InvalidInputError("no dual step has been taken yet");
  }
  return state.last_g_x_hat + (state.last_y_tilde - state.y) / rho;
}

std::string_view RunStatusName(RunStatus status) {
  switch (status) {
    case RunStatus::kCompleted:
      return "completed";
    case RunStatus::kStopped:
      return "stopped";
    case RunStatus::kDiverged:
      return "diverged";
    case RunStatus::kPreconditionFailed:
      return "precondition_failed";
  }
  return "unknown";
}

namespace {

class Recorder {
 public:
  Recorder(const CompositeProblem& prob, Schedule& schedule,
           const Vector& x0, const Vector& y0, const RunOptions& options)
      : prob_(prob), schedule_(schedule), x0_(x0), y0_(y0),
        options_(options) {}

  TraceRecord Make(const IterateState& state, const ScheduleState& params,
                   double wall_ms) {
    TraceRecord row;
    row.k = state.k;
    row.tau = params.tau;
    row.rho = params.rho;
    row.eta = params.eta;
    row.L = params.L;
    row.beta = params.beta;
    row.wall_time_ms = options_.trace.timing ? wall_ms : 0.0;

    const Variant variant = schedule_.variant();
    const Vector x = ReportedPrimal(state, variant);
    if (prob_.cone) row.feasibility = ConeFeasibility(prob_, x);
    if (!prob_.known_optimum) return row;
    const KnownOptimum& opt = *prob_.known_optimum;
    if (prob_.cone) {
      row.primal_residual = std::abs(EvaluateObjectiveF(prob_, x) - opt.value);
    } else {
      row.primal_residual = PrimalResidual(prob_, x, opt.value);
    }
    if (options_.trace.theorem_bound && state.k >= 1) {
      row.theorem_bound =
          TheoremBound(schedule_, prob_, state.k, x0_, y0_, opt, &x);
    }
    const std::size_t every = options_.trace.dual_every;
    if (every > 0 && prob_.H.conjugate_value &&
        (state.k % every == 0 || state.k == options_.max_iters)) {
      const Vector y = ReportedDual(state, variant);
      const double d = DualValue(prob_, y, options_.trace.dual_oracle).value;
      row.dual_residual = ExtendedSum(d, opt.value);
      row.pd_gap = ExtendedSum(EvaluatePrimal(prob_, x), d);
    }
    return row;
  }

  bool BelowThreshold(const TraceRecord& row) const {
    if (!options_.stop_below || !row.primal_residual) return false;
    double measure = *row.primal_residual;
    if (row.feasibility) measure = std::max(measure, *row.feasibility);
    return measure < *options_.stop_below;
  }

 private:
  const CompositeProblem& prob_;
  Schedule& schedule_;
  const Vector& x0_;
  const Vector& y0_;
  const RunOptions& options_;
};

}  // namespace

RunResult Run(const CompositeProblem& prob, const ScheduleParams& params,
              const Vector& x0, const Vector& y0, const RunOptions& options) {
  if (options.max_iters == 0) {
    throw InvalidInputError("max_iters must be at least 1");
  }
  RunResult result;
  result.final_state = InitState(prob, x0, y0);
  std::optional<Schedule> schedule;
  try {
    schedule.emplace(prob, params, x0, y0);
  } catch (const PreconditionError& e) {
    result.status = RunStatus::kPreconditionFailed;
    result.message = e.what();
    return result;
  }
  result.warnings = schedule->warnings();
  const Variant variant = params.variant;
  const StepOptions step_options = DefaultStepOptions(params);
  Recorder recorder(prob, *schedule, x0, y0, options);
  IterateState& state = result.final_state;

  auto notify = [&](const ScheduleState& sp, const TraceRecord& row) {
    for (const auto& callback : options.callbacks) callback(state, sp, row);
  };

  using Clock = std::chrono::steady_clock;
  double wall_ms = 0.0;
  ScheduleState current = schedule->At(0);
  result.trace.push_back(recorder.Make(state, current, wall_ms));
  notify(current, result.trace.back());

  for (std::size_t it = 0; it < options.max_iters; ++it) {
    const auto start = Clock::now();
    const bool finite = Step(prob, current, state, step_options);
    if (!finite) {
      result.status = RunStatus::kDiverged;
      result.message = "non-finite iterate at iteration " + std::to_string(it);
      break;
    }
    UpdateAverages(state, current, variant);
    state.k = it + 1;
    current = schedule->At(it + 1);
    wall_ms += std::chrono::duration<double, std::milli>(Clock::now() - start)
                   .count();
    result.iterations = state.k;
    result.trace.push_back(recorder.Make(state, current, wall_ms));
    notify(current, result.trace.back());
    if (recorder.BelowThreshold(result.trace.back())) {
      result.status = RunStatus::kStopped;
      break;
    }
  }
  return result;
}

}  // namespace pdcomp
