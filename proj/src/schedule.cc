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

#include "pdcomp/schedule.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace pdcomp {
namespace {

std::string Format(double value) {
  std::ostringstream out;
  out.precision(6);
  out << value;
  return out.str();
}

}  // namespace

std::string_view VariantName(Variant variant) {
  switch (variant) {
    case Variant::kErgodicConvex:
      return "thm1";
    case Variant::kErgodicStronglyConvex:
      return "thm2";
    case Variant::kSemiErgodicConvex:
      return "thm3";
    case Variant::kSemiErgodicStronglyConvex:
      return "thm4";
  }
  return "unknown";
}

Variant ParseVariant(std::string_view tag) {
  if (tag == "thm1") return Variant::kErgodicConvex;
  if (tag == "thm2") return Variant::kErgodicStronglyConvex;
  if (tag == "thm3") return Variant::kSemiErgodicConvex;
  if (tag == "thm4") return Variant::kSemiErgodicStronglyConvex;
  throw InvalidInputError("unknown variant '" + std::string(tag) +
                          "' (expected thm1, thm2, thm3 or thm4)");
}

double ErgodicConstantC(double L_f, double M_g, double L_g, double D) {
  const double first = L_f + 2.0 * M_g * M_g + 2.0;
  const double LgD = L_g * D;
  const double second = LgD * (LgD + 4.0 * M_g + 2.0);
  return std::max(first, second);
}

double ConeStepConstant(const CompositeProblem& prob,
                        const ScheduleParams& params, double rho_k,
                        double y0_norm) {
  double coupling = 0.0;
  if (prob.aggregate_L_g > 0.0) {
    if (!prob.g.bound) {
      throw PreconditionError(
          "cone variant with nonlinear g needs a bound B_g on ||g(x)||");
    }
    coupling = prob.aggregate_L_g * (y0_norm / params.rho0 +
                                     (2.0 - params.gamma) * *prob.g.bound);
  }
  const double M_g = prob.aggregate_M_g;
  return prob.f.lipschitz + (rho_k / params.gamma) * (coupling + M_g * M_g);
}

double Schedule::Thm4Rho0Bound(const CompositeProblem& prob, double gamma) {
  const double mu_F = prob.mu_F();
  const double M_g2 = prob.aggregate_M_g * prob.aggregate_M_g;
  const double stated_denominator =
      SaturatingProduct(prob.aggregate_L_g, prob.M_H()) + M_g2;
  const double stated =
      stated_denominator > 0.0 ? mu_F / stated_denominator : kInfinity;
  // The first momentum condition reduces to M_g^2 rho0 / gamma <= mu_F.
  const double momentum = M_g2 > 0.0 ? gamma * mu_F / M_g2 : kInfinity;
  return std::min(stated, momentum);
}

Schedule::Schedule(const CompositeProblem& prob, const ScheduleParams& params,
                   const Vector& x0, const Vector& y0)
    : params_(params),
      L_f_(prob.f.lipschitz),
      mu_f_(prob.f.strong_convexity),
      mu_h_(prob.h.strong_convexity),
      M_g_(prob.aggregate_M_g),
      L_g_(prob.aggregate_L_g),
      L_g_M_H_(SaturatingProduct(prob.aggregate_L_g, prob.M_H())) {
  RequireSize(x0, prob.dimension_p, "x0");
  RequireSize(y0, prob.dimension_n, "y0");
  const Variant variant = params_.variant;
  if (!(params_.rho0 > 0.0) || !std::isfinite(params_.rho0)) {
    throw InvalidInputError("rho0 must be positive and finite");
  }
  if (!(params_.gamma > 0.0 && params_.gamma < 1.0)) {
    throw InvalidInputError("gamma must lie in (0, 1), got " +
                            Format(params_.gamma));
  }
  if (params_.cone_mode && !prob.cone) {
    throw PreconditionError("cone mode requested but problem '" + prob.name +
                            "' is not a cone program");
  }
  const double mu_F = prob.mu_F();

  if (IsErgodic(variant)) {
    if (params_.rho0 != 1.0) {
      throw PreconditionError(std::string(VariantName(variant)) +
                              " fixes rho0 = 1");
    }
    if (params_.D_bound) {
      D_ = *params_.D_bound;
    } else if (prob.D_bound) {
      D_ = *prob.D_bound;
    } else if (prob.known_optimum) {
      // Exact D from the reference saddle point, padded by its accuracy.
      const KnownOptimum& opt = *prob.known_optimum;
      D_ = std::max({(x0 - opt.x).norm(), (y0 - opt.y).norm(), opt.y.norm()});
      D_ = D_ * (1.0 + 1e-6) + std::sqrt(std::max(opt.accuracy, 0.0));
      if (D_ == 0.0) D_ = 1.0;
    } else {
      D_ = 10.0 * (x0.norm() + y0.norm() + 1.0);
      warnings_.push_back(
          "no bound D on ||x0 - x*||, ||y0 - y*||, ||y*|| is known; using "
          "D = 10 (||x0|| + ||y0|| + 1) = " +
          Format(D_) + ", the rate guarantee assumes this is a valid bound");
    }
    if (!(D_ > 0.0) || !std::isfinite(D_)) {
      throw InvalidInputError("D must be positive and finite");
    }
    C_ = ErgodicConstantC(L_f_, M_g_, L_g_, D_);
    if (variant == Variant::kErgodicStronglyConvex && !(mu_F > 0.0)) {
      throw PreconditionError(
          "thm2 needs a strongly convex F (mu_f + mu_h > 0); with mu_F = 0 "
          "the schedule degenerates to thm1");
    }
  } else {
    if (params_.cone_mode) {
      cone_coupling_ = 0.0;
      if (L_g_ > 0.0) {
        if (!prob.g.bound) {
          throw PreconditionError(
              "cone variant with nonlinear g needs a bound B_g on ||g(x)||");
        }
        cone_coupling_ =
            L_g_ * (y0.norm() / params_.rho0 +
                    (2.0 - params_.gamma) * *prob.g.bound);
      }
    } else if (!std::isfinite(L_g_M_H_)) {
      throw PreconditionError(
          std::string(VariantName(variant)) +
          " needs L_g * M_H finite: H must be Lipschitz or g affine");
    }
    if (variant == Variant::kSemiErgodicStronglyConvex) {
      if (!(mu_F > 0.0)) {
        throw PreconditionError("thm4 needs a strongly convex F (mu_F > 0)");
      }
      const double bound = Thm4Rho0Bound(prob, params_.gamma);
      if (params_.rho0 > bound) {
        throw PreconditionError("thm4 requires 0 < rho0 <= " + Format(bound) +
                                " for this problem, got rho0 = " +
                                Format(params_.rho0));
      }
    }
  }

  // Index-0 parameters.
  tau_.push_back(1.0);
  rho_.push_back(params_.rho0);
  switch (variant) {
    case Variant::kErgodicConvex:
    case Variant::kErgodicStronglyConvex:
      eta_.push_back(0.5 * rho_[0]);
      L_.push_back(L_f_ + rho_[0] * (C_ + 2.0 * M_g_ * M_g_));
      break;
    case Variant::kSemiErgodicConvex:
    case Variant::kSemiErgodicStronglyConvex:
      eta_.push_back((1.0 - params_.gamma) * rho_[0]);
      L_.push_back(SemiErgodicL(rho_[0]));
      break;
  }
  if (variant == Variant::kErgodicStronglyConvex) {
    const double L0 = L_[0];
    const double a = 2.0 * L0 - mu_f_;
    // sqrt(4 L0 mu_F + a^2) - a, rewritten without cancellation.
    P0_ = rho_[0] / (2.0 * L0) * (4.0 * L0 * mu_F) /
          (std::sqrt(4.0 * L0 * mu_F + a * a) + a);
  }
}

double Schedule::SemiErgodicL(double rho) const {
  if (params_.cone_mode) {
    return L_f_ + (rho / params_.gamma) * (cone_coupling_ + M_g_ * M_g_);
  }
  return L_f_ + L_g_M_H_ + M_g_ * M_g_ * rho / params_.gamma;
}

void Schedule::ExtendTo(std::size_t k) {
  // Parameters up to index k + 1 are needed for beta_{k+1}.
  while (tau_.size() < k + 2) {
    const std::size_t i = tau_.size() - 1;  // last computed index
    switch (params_.variant) {
      case Variant::kErgodicConvex:
        tau_.push_back(1.0);
        rho_.push_back(rho_[i]);
        eta_.push_back(eta_[i]);
        L_.push_back(L_[i]);
        theta_.push_back(1.0);
        break;
      case Variant::kErgodicStronglyConvex: {
        const double L = L_[i];
        const double theta =
            2.0 * L / (mu_f_ + std::sqrt(mu_f_ * mu_f_ + 4.0 * L * (L + mu_h_)));
        theta_.push_back(theta);
        tau_.push_back(1.0);
        L_.push_back(L / theta);
        rho_.push_back(rho_[i] / theta);
        eta_.push_back(0.5 * rho_.back());
        break;
      }
      case Variant::kSemiErgodicConvex: {
        const double tau = 1.0 / static_cast<double>(i + 2);
        tau_.push_back(tau);
        rho_.push_back(params_.rho0 / tau);
        eta_.push_back((1.0 - params_.gamma) * rho_.back());
        L_.push_back(SemiErgodicL(rho_.back()));
        theta_.push_back(1.0);
        break;
      }
      case Variant::kSemiErgodicStronglyConvex: {
        const double t = tau_[i];
        const double tau = 0.5 * t * (std::sqrt(t * t + 4.0) - t);
        tau_.push_back(tau);
        rho_.push_back(params_.rho0 / (tau * tau));
        eta_.push_back((1.0 - params_.gamma) * rho_.back());
        L_.push_back(SemiErgodicL(rho_.back()));
        theta_.push_back(1.0);
        break;
      }
    }
  }
  while (states_.size() <= k) {
    const std::size_t j = states_.size();
    ScheduleState s;
    s.k = j;
    s.tau = tau_[j];
    s.rho = rho_[j];
    s.eta = eta_[j];
    s.L = L_[j];
    s.theta = theta_[j];
    s.constant_C = C_;
    s.P0 = P0_;
    switch (params_.variant) {
      case Variant::kErgodicConvex:
      case Variant::kErgodicStronglyConvex:
        s.beta = 0.0;
        break;
      case Variant::kSemiErgodicConvex:
        s.beta = (1.0 - tau_[j]) * tau_[j + 1] / tau_[j];
        break;
      case Variant::kSemiErgodicStronglyConvex: {
        const double a = L_[j] + mu_h_;
        const double b = L_[j + 1] + mu_h_;
        s.beta = (1.0 - tau_[j]) * tau_[j] * a /
                 (tau_[j] * tau_[j] * a + b * tau_[j + 1]);
        break;
      }
    }
    states_.push_back(s);
  }
}

const ScheduleState& Schedule::At(std::size_t k) {
  ExtendTo(k);
  return states_[k];
}

Schedule MakeThm1Schedule(const CompositeProblem& prob, ScheduleParams params,
                          const Vector& x0, const Vector& y0) {
  params.variant = Variant::kErgodicConvex;
  return Schedule(prob, params, x0, y0);
}

Schedule MakeThm2Schedule(const CompositeProblem& prob, ScheduleParams params,
                          const Vector& x0, const Vector& y0) {
  params.variant = Variant::kErgodicStronglyConvex;
  return Schedule(prob, params, x0, y0);
}

Schedule MakeThm3Schedule(const CompositeProblem& prob, ScheduleParams params,
                          const Vector& x0, const Vector& y0) {
  params.variant = Variant::kSemiErgodicConvex;
  return Schedule(prob, params, x0, y0);
}

Schedule MakeThm4Schedule(const CompositeProblem& prob, ScheduleParams params,
                          const Vector& x0, const Vector& y0) {
  params.variant = Variant::kSemiErgodicStronglyConvex;
  return Schedule(prob, params, x0, y0);
}

BetaConditionSlack Thm4BetaConditions(Schedule& schedule,
                                      const CompositeProblem& prob,
                                      std::size_t k) {
  if (k == 0) throw InvalidInputError("momentum conditions start at k = 1");
  const ScheduleState prev = schedule.At(k - 1);
  const ScheduleState cur = schedule.At(k);
  const double mu_f = prob.f.strong_convexity;
  const double mu_h = prob.h.strong_convexity;
  const double a_prev = prev.L + mu_h;
  const double m = (cur.L + mu_h) / a_prev;
  const double t_prev2 = prev.tau * prev.tau;
  BetaConditionSlack slack;
  slack.first = a_prev * (1.0 - cur.tau) * t_prev2 +
                (mu_f + mu_h) * (1.0 - cur.tau) * cur.tau -
                (cur.L - mu_f) * cur.tau * cur.tau;
  slack.second = a_prev * (t_prev2 + m * cur.tau) * m * cur.tau -
                 (cur.L - mu_f) * t_prev2;
  slack.scale = (cur.L + mu_h) * t_prev2;
  return slack;
}

}  // namespace pdcomp
