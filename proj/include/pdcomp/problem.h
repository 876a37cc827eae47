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

#ifndef PDCOMP_PROBLEM_H_
#define PDCOMP_PROBLEM_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdcomp/core.h"
#include "pdcomp/prox.h"

namespace pdcomp {

using Rng = std::mt19937_64;

// Smooth convex part f with L_f-Lipschitz gradient, mu_f-strongly convex.
struct SmoothTerm {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double lipschitz = 0.0;
  double strong_convexity = 0.0;
};

// Proper closed convex function reached only through its value and prox.
// `lipschitz` is the Lipschitz constant of the function itself (M_H for the
// outer term); +inf is allowed. `conjugate_value` is optional and only used
// by dual-side metrics.
struct ProxTerm {
  std::function<double(const Vector&)> value;
  ProxOperator prox;
  double strong_convexity = 0.0;
  double lipschitz = kInfinity;
  std::function<double(const Vector&)> conjugate_value;
  // An element of the subdifferential, when cheap. Lets bounds that need
  // M_H fall back to a local dual radius when H is not Lipschitz.
  std::function<Vector(const Vector&)> subgradient;
};

// Inner map g: R^p -> R^n together with y -> g'(x)^T y.
struct Mapping {
  std::function<Vector(const Vector&)> apply;
  std::function<Vector(const Vector& x, const Vector& y)>
      jacobian_transpose_apply;
  std::vector<double> component_lipschitz;           // M_{g_i}
  std::vector<double> component_gradient_lipschitz;  // L_{g_i}
  bool is_affine = false;
  std::optional<double> bound;  // B_g with ||g(x)|| <= B_g on dom F
};

// Reference solution of a test instance.
struct KnownOptimum {
  Vector x;
  Vector y;
  double value = 0.0;
  // Certified absolute accuracy of `value`.
  double accuracy = 0.0;
  std::string method;
};

// Draws points in dom F and in dom H*; used by the randomized checks.
struct DomainSampler {
  std::function<Vector(Rng&)> primal;
  std::function<Vector(Rng&)> dual;
};

// min_x f(x) + h(x) + H(g(x)). Immutable once built by FinalizeProblem; all
// callables must be re-entrant.
struct CompositeProblem {
  std::string name;
  SmoothTerm f;
  ProxTerm h;
  ProxTerm H;
  Mapping g;
  Eigen::Index dimension_p = 0;
  Eigen::Index dimension_n = 0;
  double aggregate_M_g = 0.0;
  double aggregate_L_g = 0.0;
  std::optional<double> m_Fstar;
  std::optional<KnownOptimum> known_optimum;
  // Set for cone programs, where H is the indicator of -K and H* the
  // indicator of K*.
  std::optional<Cone> cone;
  // A valid D for the constant-step schedules when the instance knows one.
  std::optional<double> D_bound;
  DomainSampler sampler;
  Vector default_x0;
  Vector default_y0;

  double mu_F() const { return f.strong_convexity + h.strong_convexity; }
  double M_H() const { return H.lipschitz; }
};

struct AggregateConstantsResult {
  double M_g = 0.0;
  double L_g = 0.0;
};

// M_g = sqrt(sum M_{g_i}^2), L_g = sqrt(sum L_{g_i}^2).
AggregateConstantsResult AggregateConstants(std::span<const double> M_gi,
                                            std::span<const double> L_gi);

// Fills the aggregate constants, default samplers and initial points, and
// validates dimensions and constants. Throws InvalidInputError.
CompositeProblem FinalizeProblem(CompositeProblem problem);

// P(x) = f(x) + h(x) + H(g(x)); +inf outside the domain.
double EvaluatePrimal(const CompositeProblem& prob, const Vector& x);

// F(x) = f(x) + h(x).
double EvaluateObjectiveF(const CompositeProblem& prob, const Vector& x);

// L(x, s, y) = F(x) + H(s) + <y, g(x) - s>.
double LagrangianValue(const CompositeProblem& prob, const Vector& x,
                       const Vector& s, const Vector& y);

// L~(x, y) = F(x) + <g(x), y> - H*(y). Requires H.conjugate_value.
double ReducedLagrangianValue(const CompositeProblem& prob, const Vector& x,
                              const Vector& y);

struct FiniteDiffReport {
  double max_gradient_error = 0.0;
  double max_jacobian_error = 0.0;
  int samples_used = 0;
  int resampled = 0;
  bool pass = false;
};

inline constexpr double kFiniteDiffStep = 1e-6;
inline constexpr double kFiniteDiffTolerance = 1e-4;

// Compares grad f and g'(x)^T y with centered differences of f and <y, g(.)>
// at `samples` points drawn from the problem's sampler. Errors are
// max-norm differences relative to max(1, ||analytic||_inf).
FiniteDiffReport FiniteDiffCheck(const CompositeProblem& prob, int samples,
                                 std::uint64_t seed);

}  // namespace pdcomp

#endif  // PDCOMP_PROBLEM_H_
