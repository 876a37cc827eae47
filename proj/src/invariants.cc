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

#include "pdcomp/invariants.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pdcomp/instances.h"
#include "pdcomp/metrics.h"
#include "pdcomp/prox.h"
#include "pdcomp/solver.h"

namespace pdcomp {
namespace {

Vector Gaussian(Rng& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

std::string Describe(double value) {
  std::ostringstream out;
  out.precision(3);
  out << value;
  return out.str();
}

}  // namespace

double MoreauIdentityError(int samples, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> log_rho(-3.0, 3.0);
  std::uniform_int_distribution<int> dim(1, 8);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Eigen::Index n = dim(rng);
    const Vector v = Gaussian(rng, n, 3.0);
    const double rho = std::pow(10.0, log_rho(rng));

    // H = max: H* is the simplex indicator, its prox the projection.
    const Vector max_moreau = ProxConjugateMoreau(ProxMaxCoords, v, rho);
    worst = std::max(worst, (max_moreau - ProjectSimplex(v)).cwiseAbs().maxCoeff());

    // H = ||.||^2 / 2 is self-conjugate: prox_{rho H*}(v) = v / (1 + rho).
    const ProxOperator quad = [](const Vector& u, double lambda) -> Vector {
      return u / (1.0 + lambda);
    };
    worst = std::max(
        worst, (ProxConjugateMoreau(quad, v, rho) - v / (1.0 + rho))
                   .cwiseAbs()
                   .maxCoeff());

    // H = indicator of -K: prox_{rho H*} is the projection onto K*.
    for (Cone cone : {Cone::kNonnegativeOrthant, Cone::kSecondOrder,
                      Cone::kZero}) {
      const ProxOperator indicator = [cone](const Vector& u,
                                            double) -> Vector {
        return -ProjectCone(-u, cone);
      };
      const Vector lhs = ProxConjugateMoreau(indicator, v, rho);
      const Vector rhs = ProjectCone(v, DualCone(cone));
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

TauReport CheckThm4Tau(std::size_t k_max) {
  // The tau recursion does not depend on the problem; any strongly convex
  // instance admits the schedule.
  const CompositeProblem prob = BuildInstance(DefaultInstanceSpec("cone_qp"));
  ScheduleParams params;
  params.variant = Variant::kSemiErgodicStronglyConvex;
  params.rho0 = Schedule::Thm4Rho0Bound(prob, params.gamma);
  Schedule schedule(prob, params, prob.default_x0, prob.default_y0);
  TauReport report;
  double prev = schedule.At(0).tau;
  if (prev != 1.0) report.bounds_hold = false;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double tau = schedule.At(k).tau;
    report.max_identity_error =
        std::max(report.max_identity_error,
                 std::abs(tau * tau - (1.0 - tau) * prev * prev));
    const double kk = static_cast<double>(k);
    if (tau < 1.0 / (kk + 1.0) || tau > 2.0 / (kk + 2.0)) {
      report.bounds_hold = false;
    }
    prev = tau;
  }
  return report;
}

double TelescopingError(const CompositeProblem& prob,
                        const ScheduleParams& params, std::size_t iterations) {
  const Vector& y0 = prob.default_y0;
  Schedule schedule(prob, params, prob.default_x0, y0);
  IterateState state = InitState(prob, prob.default_x0, y0);
  const StepOptions options = DefaultStepOptions(params);
  double worst = 0.0;
  for (std::size_t k = 0; k < iterations; ++k) {
    const ScheduleState sp = schedule.At(k);
    if (!Step(prob, sp, state, options)) return kInfinity;
    const Vector residual = state.y_tilde - sp.eta * state.Theta - y0;
    const double scale =
        std::max({1.0, y0.norm(), state.y_tilde.norm(), sp.eta * state.Theta.norm()});
    worst = std::max(worst, residual.norm() / scale);
  }
  return worst;
}

double LemmaB1Slack(const CompositeProblem& prob, std::size_t iterations) {
  if (!prob.known_optimum) {
    throw InvalidInputError("dual growth check needs a known saddle point");
  }
  const KnownOptimum& opt = *prob.known_optimum;
  ScheduleParams params;
  params.variant = Variant::kErgodicConvex;
  Schedule schedule(prob, params, prob.default_x0, prob.default_y0);
  IterateState state = InitState(prob, prob.default_x0, prob.default_y0);
  const StepOptions options = DefaultStepOptions(params);
  const double L_g = prob.aggregate_L_g;
  const double M_g = prob.aggregate_M_g;
  double worst = -kInfinity;
  for (std::size_t k = 0; k <= iterations; ++k) {
    const ScheduleState sp = schedule.At(k);
    const double lhs =
        L_g * (opt.y.norm() + (state.y_tilde - opt.y).norm() +
               sp.rho * M_g * (state.x - opt.x).norm());
    worst = std::max(worst, lhs - sp.rho * sp.constant_C);
    if (k == iterations) break;
    if (!Step(prob, sp, state, options)) return kInfinity;
  }
  return worst;
}

std::size_t OpCounterViolations(const CompositeProblem& prob,
                                const ScheduleParams& params,
                                std::size_t iterations) {
  Schedule schedule(prob, params, prob.default_x0, prob.default_y0);
  IterateState state = InitState(prob, prob.default_x0, prob.default_y0);
  const StepOptions options = DefaultStepOptions(params);
  std::size_t violations = 0;
  bool previous_beta_zero = false;
  for (std::size_t k = 0; k < iterations; ++k) {
    const ScheduleState sp = schedule.At(k);
    if (!Step(prob, sp, state, options)) return iterations;
    const OpCounters& ops = state.last_step_ops;
    const long expected_g =
        (IsErgodic(params.variant) && k > 0 && previous_beta_zero) ? 1 : 2;
    if (ops.g_evals != expected_g || ops.jvp_evals != 1 ||
        ops.grad_f_evals != 1 || ops.prox_h_calls != 1 ||
        ops.prox_Hstar_calls != 1) {
      ++violations;
    }
    previous_beta_zero = sp.beta == 0.0;
  }
  return violations;
}

double SaddleGapMinimum(const CompositeProblem& prob,
                        const ScheduleParams& params, std::size_t iterations) {
  if (!prob.known_optimum) {
    throw InvalidInputError("saddle gap check needs a known saddle point");
  }
  const KnownOptimum& opt = *prob.known_optimum;
  Schedule schedule(prob, params, prob.default_x0, prob.default_y0);
  IterateState state = InitState(prob, prob.default_x0, prob.default_y0);
  const StepOptions options = DefaultStepOptions(params);
  double worst = kInfinity;
  for (std::size_t k = 0; k < iterations; ++k) {
    if (!Step(prob, schedule.At(k), state, options)) return -kInfinity;
    const double gap = ReducedLagrangianValue(prob, state.x, opt.y) -
                       ReducedLagrangianValue(prob, opt.x, state.y);
    worst = std::min(worst, gap);
  }
  return worst;
}

ConstantsReport CheckMappingConstants(const CompositeProblem& prob, int pairs,
                                      std::uint64_t seed) {
  Rng rng(seed);
  ConstantsReport report;
  for (int i = 0; i < pairs; ++i) {
    const Vector x = prob.sampler.primal(rng);
    const Vector x2 = prob.sampler.primal(rng);
    const Vector y = Gaussian(rng, prob.dimension_n);
    const double dx = (x - x2).norm();
    if (dx == 0.0) continue;
    const double dg = (prob.g.apply(x) - prob.g.apply(x2)).norm();
    const double dj = (prob.g.jacobian_transpose_apply(x, y) -
                       prob.g.jacobian_transpose_apply(x2, y))
                          .norm();
    const double m_den = prob.aggregate_M_g * dx;
    const double l_den = prob.aggregate_L_g * y.norm() * dx;
    // Zero constants must come with (numerically) zero variation.
    auto ratio = [](double num, double den) {
      if (den > 0.0) return num / den;
      return num <= 1e-12 ? 0.0 : kInfinity;
    };
    report.worst_M_ratio = std::max(report.worst_M_ratio, ratio(dg, m_den));
    report.worst_L_ratio = std::max(report.worst_L_ratio, ratio(dj, l_den));
  }
  return report;
}

double Thm4BetaViolation(const CompositeProblem& prob,
                         const ScheduleParams& params, std::size_t k_max) {
  Schedule schedule(prob, params, prob.default_x0, prob.default_y0);
  double worst = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const BetaConditionSlack slack = Thm4BetaConditions(schedule, prob, k);
    const double scale = std::max(slack.scale, 1e-300);
    worst = std::max({worst, -slack.first / scale, -slack.second / scale});
  }
  return worst;
}

std::vector<CheckResult> RunInvariantSuite() {
  std::vector<CheckResult> results;
  auto add = [&](std::string name, bool pass, std::string detail) {
    while (!detail.empty() && (detail.back() == ' ' || detail.back() == ',')) {
      detail.pop_back();
    }
    results.push_back({std::move(name), pass, std::move(detail)});
  };
  auto build = [](const char* name) {
    return BuildInstance(DefaultInstanceSpec(name));
  };
  const CompositeProblem toy = build("toy");
  const CompositeProblem toy_max = build("toy_max");
  const CompositeProblem game = build("game");
  const CompositeProblem classification = build("classification");
  const CompositeProblem cone_qp = build("cone_qp");
  const std::vector<const CompositeProblem*> instances = {
      &toy, &toy_max, &game, &classification, &cone_qp};

  const double moreau = MoreauIdentityError(1000, 1);
  add("moreau_identity", moreau <= 1e-10, "max error " + Describe(moreau));

  const TauReport tau = CheckThm4Tau(10000);
  add("thm4_tau_identity", tau.max_identity_error <= 1e-14 && tau.bounds_hold,
      "max error " + Describe(tau.max_identity_error) +
          (tau.bounds_hold ? ", bounds hold" : ", bounds violated"));

  ScheduleParams thm3;
  thm3.variant = Variant::kSemiErgodicConvex;
  ScheduleParams thm4;
  thm4.variant = Variant::kSemiErgodicStronglyConvex;
  thm4.rho0 = Schedule::Thm4Rho0Bound(classification, thm4.gamma);
  const double tele3 = TelescopingError(game, thm3, 2000);
  const double tele4 = TelescopingError(classification, thm4, 2000);
  add("telescoping_dual", tele3 <= 1e-8 && tele4 <= 1e-8,
      "thm3/game " + Describe(tele3) + ", thm4/classification " +
          Describe(tele4));

  double b1 = -kInfinity;
  for (const auto* prob : {&toy, &toy_max, &game}) {
    b1 = std::max(b1, LemmaB1Slack(*prob, 2000));
  }
  add("lemma_b1_bound", b1 <= 0.0, "max slack " + Describe(b1));

  const SandwichReport sandwich = Lemma1SandwichCheck(game, 1000, 3);
  add("lemma1_sandwich", sandwich.pass && sandwich.samples == 1000,
      "lower " + Describe(sandwich.min_lower_slack) + ", upper " +
          Describe(sandwich.max_upper_slack));

  ScheduleParams thm1;
  ScheduleParams thm2;
  thm2.variant = Variant::kErgodicStronglyConvex;
  std::size_t ops = OpCounterViolations(game, thm1, 200) +
                    OpCounterViolations(game, thm3, 200) +
                    OpCounterViolations(classification, thm2, 200) +
                    OpCounterViolations(classification, thm4, 200);
  add("op_counters", ops == 0, std::to_string(ops) + " mismatched iterations");

  bool fd_pass = true;
  std::string fd_detail;
  for (const auto* prob : instances) {
    const FiniteDiffReport fd = FiniteDiffCheck(*prob, 100, 5);
    fd_pass = fd_pass && fd.pass;
    fd_detail += prob->name + " " + Describe(std::max(fd.max_gradient_error,
                                                      fd.max_jacobian_error)) +
                 ", ";
  }
  add("finite_differences", fd_pass, fd_detail);

  bool constants_pass = true;
  std::string constants_detail;
  for (const auto* prob : instances) {
    const ConstantsReport c = CheckMappingConstants(*prob, 1000, 9);
    constants_pass = constants_pass && c.worst_M_ratio <= 1.0 + 1e-12 &&
                     c.worst_L_ratio <= 1.0 + 1e-12;
    constants_detail += prob->name + " " + Describe(c.worst_M_ratio) + "/" +
                        Describe(c.worst_L_ratio) + ", ";
  }
  add("mapping_constants", constants_pass, constants_detail);

  ScheduleParams thm4_cone = thm4;
  thm4_cone.rho0 = Schedule::Thm4Rho0Bound(cone_qp, thm4.gamma);
  const double beta = std::max(Thm4BetaViolation(classification, thm4, 10000),
                               Thm4BetaViolation(cone_qp, thm4_cone, 10000));
  add("thm4_beta_conditions", beta <= 1e-12,
      "max relative violation " + Describe(beta));

  bool oracle_pass = true;
  std::string oracle_detail;
  for (const auto* prob : instances) {
    const KnownOptimum& opt = *prob->known_optimum;
    const double value = prob->cone ? EvaluateObjectiveF(*prob, opt.x)
                                    : EvaluatePrimal(*prob, opt.x);
    const double err = std::abs(value - opt.value);
    oracle_pass = oracle_pass && err <= opt.accuracy + 1e-12;
    oracle_detail += prob->name + " acc " + Describe(opt.accuracy) + ", ";
  }
  add("oracle_consistency", oracle_pass, oracle_detail);

  const double saddle = SaddleGapMinimum(game, thm3, 2000);
  const double saddle_tol = 1e-9 + 2.0 * game.known_optimum->accuracy;
  add("saddle_gap_nonnegative", saddle >= -saddle_tol,
      "min gap " + Describe(saddle));
  return results;
}

}  // namespace pdcomp
