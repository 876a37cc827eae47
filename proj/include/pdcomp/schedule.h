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

#ifndef PDCOMP_SCHEDULE_H_
#define PDCOMP_SCHEDULE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdcomp/core.h"
#include "pdcomp/problem.h"

namespace pdcomp {

// The four parameter schedules. The ergodic ones keep tau = 1 and beta = 0
// and report weighted averages; the semi-ergodic ones report the primal
// last iterate with the dual average y_breve.
enum class Variant {
  kErgodicConvex,              // "thm1": constant step, O(1/k)
  kErgodicStronglyConvex,      // "thm2": geometric growth, O(1/k^2)
  kSemiErgodicConvex,          // "thm3": tau_k = 1/(k+1), O(1/k)
  kSemiErgodicStronglyConvex,  // "thm4": Nesterov tau recursion, O(1/k^2)
};

std::string_view VariantName(Variant variant);
Variant ParseVariant(std::string_view tag);
inline bool IsErgodic(Variant v) {
  return v == Variant::kErgodicConvex || v == Variant::kErgodicStronglyConvex;
}
inline bool IsStronglyConvexVariant(Variant v) {
  return v == Variant::kErgodicStronglyConvex ||
         v == Variant::kSemiErgodicStronglyConvex;
}

inline constexpr double kDefaultGamma = 0.5;
inline constexpr double kDefaultRho0 = 1.0;

struct ScheduleParams {
  Variant variant = Variant::kErgodicConvex;
  double rho0 = kDefaultRho0;
  double gamma = kDefaultGamma;
  std::optional<double> D_bound;
  bool cone_mode = false;
};

// Parameters used by iteration k. `beta` is beta_{k+1}, the momentum applied
// when forming x_hat^{k+1}; `theta` is theta_{k+1} for the strongly convex
// ergodic schedule and 1 otherwise.
struct ScheduleState {
  std::size_t k = 0;
  double tau = 1.0;
  double rho = 1.0;
  double eta = 0.5;
  double L = 1.0;
  double beta = 0.0;
  double theta = 1.0;
  double constant_C = 0.0;
  double P0 = 0.0;
};

// Lazily generated parameter sequence. Values are computed on demand and
// cached, one step ahead of the requested k (beta_{k+1} needs tau_{k+1} and
// L_{k+1}). Single consumer; build one per run.
class Schedule {
 public:
  // Validates the variant's preconditions against the problem constants and
  // throws PreconditionError (or InvalidInputError for malformed params).
  Schedule(const CompositeProblem& prob, const ScheduleParams& params,
           const Vector& x0, const Vector& y0);

  const ScheduleState& At(std::size_t k);

  Variant variant() const { return params_.variant; }
  const ScheduleParams& params() const { return params_; }
  double rho0() const { return rho_[0]; }
  double L0() const { return L_[0]; }
  double eta0() const { return eta_[0]; }
  double gamma() const { return params_.gamma; }
  double constant_C() const { return C_; }
  double P0() const { return P0_; }
  // D used in C; NaN for the semi-ergodic variants, which do not need it.
  double D() const { return D_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Largest rho0 admitted by the strongly convex semi-ergodic schedule.
  static double Thm4Rho0Bound(const CompositeProblem& prob, double gamma);

 private:
  void ExtendTo(std::size_t k);
  double SemiErgodicL(double rho) const;

  ScheduleParams params_;
  double L_f_ = 0.0;
  double mu_f_ = 0.0;
  double mu_h_ = 0.0;
  double M_g_ = 0.0;
  double L_g_ = 0.0;
  double L_g_M_H_ = 0.0;
  double cone_coupling_ = 0.0;  // L_g [||y0|| / rho0 + (2 - gamma) B_g]
  double C_ = 0.0;
  double P0_ = 0.0;
  double D_ = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> tau_;
  std::vector<double> rho_;
  std::vector<double> eta_;
  std::vector<double> L_;
  std::vector<double> theta_;
  std::vector<ScheduleState> states_;
  std::vector<std::string> warnings_;
};

Schedule MakeThm1Schedule(const CompositeProblem& prob, ScheduleParams params,
                          const Vector& x0, const Vector& y0);
Schedule MakeThm2Schedule(const CompositeProblem& prob, ScheduleParams params,
                          const Vector& x0, const Vector& y0);
Schedule MakeThm3Schedule(const CompositeProblem& prob, ScheduleParams params,
                          const Vector& x0, const Vector& y0);
Schedule MakeThm4Schedule(const CompositeProblem& prob, ScheduleParams params,
                          const Vector& x0, const Vector& y0);

// C = max{L_f + 2 M_g^2 + 2, L_g D (L_g D + 4 M_g + 2)}.
double ErgodicConstantC(double L_f, double M_g, double L_g, double D);

// Step constant for the cone variant of the semi-ergodic schedules:
// L_f + (rho_k / gamma) (L_g [||y0|| / rho0 + (2 - gamma) B_g] + M_g^2).
// Requires affine g or a bound B_g.
double ConeStepConstant(const CompositeProblem& prob,
                        const ScheduleParams& params, double rho_k,
                        double y0_norm);

// Slacks (lhs - rhs) of the two momentum conditions that make the
// strongly convex semi-ergodic beta_{k+1} admissible, evaluated at k >= 1.
struct BetaConditionSlack {
  double first = 0.0;
  double second = 0.0;
  // Scale for relative comparisons.
  double scale = 1.0;
};
BetaConditionSlack Thm4BetaConditions(Schedule& schedule,
                                      const CompositeProblem& prob,
                                      std::size_t k);

}  // namespace pdcomp

#endif  // PDCOMP_SCHEDULE_H_
