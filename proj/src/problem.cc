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

#include "pdcomp/problem.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace pdcomp {
namespace {

void RequireNonnegative(double value, const std::string& what) {
  if (!(value >= 0.0)) {
    throw InvalidInputError(what + " must be nonnegative, got " +
                            std::to_string(value));
  }
}

Vector GaussianVector(Rng& rng, Eigen::Index size) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = normal(rng);
  return v;
}

// Centered difference of `fn` along coordinate i. The step actually taken is
// recomputed from the perturbed points so it is exactly representable.
// Returns NaN if either evaluation is not finite.
template <typename Fn>
double CenteredDifference(const Fn& fn, const Vector& x, Eigen::Index i) {
  Vector plus = x;
  Vector minus = x;
  plus[i] += kFiniteDiffStep;
  minus[i] -= kFiniteDiffStep;
  const double f_plus = fn(plus);
  const double f_minus = fn(minus);
  if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return (f_plus - f_minus) / (plus[i] - minus[i]);
}

double RelativeMaxError(const Vector& numeric, const Vector& analytic) {
  const double scale = std::max(1.0, analytic.lpNorm<Eigen::Infinity>());
  return (numeric - analytic).lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace

AggregateConstantsResult AggregateConstants(std::span<const double> M_gi,
                                            std::span<const double> L_gi) {
  double sum_m = 0.0;
  double sum_l = 0.0;
  for (double m : M_gi) {
    RequireNonnegative(m, "M_gi entry");
    sum_m += m * m;
  }
  for (double l : L_gi) {
    RequireNonnegative(l, "L_gi entry");
    sum_l += l * l;
  }
  return {std::sqrt(sum_m), std::sqrt(sum_l)};
}

CompositeProblem FinalizeProblem(CompositeProblem problem) {
  const Eigen::Index p = problem.dimension_p;
  const Eigen::Index n = problem.dimension_n;
  if (p <= 0 || n <= 0) {
    throw InvalidInputError("problem dimensions must be positive");
  }
  if (!problem.f.value || !problem.f.gradient || !problem.h.value ||
      !problem.h.prox || !problem.H.value || !problem.H.prox ||
      !problem.g.apply || !problem.g.jacobian_transpose_apply) {
    throw InvalidInputError("problem '" + problem.name +
                            "' is missing a required callable");
  }
  const auto n_components = static_cast<std::size_t>(n);
  if (problem.g.component_lipschitz.size() != n_components ||
      problem.g.component_gradient_lipschitz.size() != n_components) {
    throw InvalidInputError("per-component constants must have length n");
  }
  RequireNonnegative(problem.f.lipschitz, "L_f");
  RequireNonnegative(problem.f.strong_convexity, "mu_f");
  RequireNonnegative(problem.h.strong_convexity, "mu_h");
  RequireNonnegative(problem.H.lipschitz, "M_H");
  if (problem.f.lipschitz > 0.0 && problem.f.strong_convexity > 0.0 &&
      problem.f.strong_convexity > problem.f.lipschitz) {
    throw InvalidInputError("mu_f exceeds L_f");
  }
  const auto aggregate = AggregateConstants(
      problem.g.component_lipschitz, problem.g.component_gradient_lipschitz);
  problem.aggregate_M_g = aggregate.M_g;
  problem.aggregate_L_g = problem.g.is_affine ? 0.0 : aggregate.L_g;

  if (!problem.sampler.primal) {
    problem.sampler.primal = [p](Rng& rng) { return GaussianVector(rng, p); };
  }
  if (!problem.sampler.dual) {
    problem.sampler.dual = [n](Rng& rng) { return GaussianVector(rng, n); };
  }
  if (problem.default_x0.size() == 0) problem.default_x0 = Vector::Zero(p);
  if (problem.default_y0.size() == 0) problem.default_y0 = Vector::Zero(n);
  RequireSize(problem.default_x0, p, "default_x0");
  RequireSize(problem.default_y0, n, "default_y0");
  if (problem.known_optimum) {
    RequireSize(problem.known_optimum->x, p, "known optimum x");
    RequireSize(problem.known_optimum->y, n, "known optimum y");
  }
  return problem;
}

double EvaluateObjectiveF(const CompositeProblem& prob, const Vector& x) {
  RequireSize(x, prob.dimension_p, "x");
  const double h_value = prob.h.value(x);
  if (h_value == kInfinity) return kInfinity;
  return ExtendedSum(prob.f.value(x), h_value);
}

double EvaluatePrimal(const CompositeProblem& prob, const Vector& x) {
  const double objective = EvaluateObjectiveF(prob, x);
  if (objective == kInfinity) return kInfinity;
  return ExtendedSum(objective, prob.H.value(prob.g.apply(x)));
}

double LagrangianValue(const CompositeProblem& prob, const Vector& x,
                       const Vector& s, const Vector& y) {
  RequireSize(s, prob.dimension_n, "s");
  RequireSize(y, prob.dimension_n, "y");
  const double objective = EvaluateObjectiveF(prob, x);
  if (objective == kInfinity) return kInfinity;
  const double outer = prob.H.value(s);
  if (outer == kInfinity) return kInfinity;
  return objective + outer + y.dot(prob.g.apply(x) - s);
}

double ReducedLagrangianValue(const CompositeProblem& prob, const Vector& x,
                              const Vector& y) {
  RequireSize(y, prob.dimension_n, "y");
  if (!prob.H.conjugate_value) {
    throw InvalidInputError("problem '" + prob.name +
                            "' has no closed-form conjugate of H");
  }
  const double objective = EvaluateObjectiveF(prob, x);
  const double conjugate = prob.H.conjugate_value(y);
  if (objective == kInfinity) return kInfinity;
  if (conjugate == kInfinity) return -kInfinity;
  return objective + prob.g.apply(x).dot(y) - conjugate;
}

FiniteDiffReport FiniteDiffCheck(const CompositeProblem& prob, int samples,
                                 std::uint64_t seed) {
  if (samples <= 0) throw InvalidInputError("samples must be positive");
  Rng rng(seed);
  FiniteDiffReport report;
  const int max_attempts = 10 * samples;
  int attempts = 0;
  const Eigen::Index p = prob.dimension_p;
  while (report.samples_used < samples && attempts < max_attempts) {
    ++attempts;
    const Vector x = prob.sampler.primal(rng);
    const Vector y = prob.sampler.dual(rng);
    if (!std::isfinite(prob.f.value(x)) || !prob.g.apply(x).allFinite()) {
      ++report.resampled;
      continue;
    }
    const auto coupling = [&](const Vector& z) {
      const Vector gz = prob.g.apply(z);
      return gz.allFinite() ? y.dot(gz)
                            : std::numeric_limits<double>::quiet_NaN();
    };
    Vector fd_grad(p);
    Vector fd_jac(p);
    for (Eigen::Index i = 0; i < p; ++i) {
      fd_grad[i] = CenteredDifference(prob.f.value, x, i);
      fd_jac[i] = CenteredDifference(coupling, x, i);
    }
    if (!fd_grad.allFinite() || !fd_jac.allFinite()) {
      ++report.resampled;
      continue;
    }
    report.max_gradient_error = std::max(
        report.max_gradient_error, RelativeMaxError(fd_grad, prob.f.gradient(x)));
    report.max_jacobian_error =
        std::max(report.max_jacobian_error,
                 RelativeMaxError(fd_jac, prob.g.jacobian_transpose_apply(x, y)));
    ++report.samples_used;
  }
  if (report.samples_used == 0) {
    throw CheckFailedError("finite-difference check: every sample was outside "
                           "the domain");
  }
  report.pass = report.max_gradient_error <= kFiniteDiffTolerance &&
                report.max_jacobian_error <= kFiniteDiffTolerance;
  return report;
}

}  // namespace pdcomp
