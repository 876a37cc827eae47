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

#include "pdcomp/metrics.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace pdcomp {

double PrimalResidual(const CompositeProblem& prob, const Vector& x,
                      double P_star) {
  const double value = EvaluatePrimal(prob, x);
  if (value == kInfinity) return kInfinity;
  return value - P_star;
}

DualValueResult DualValue(const CompositeProblem& prob, const Vector& y,
                          const DualOracle& oracle) {
  RequireSize(y, prob.dimension_n, "y");
  if (!prob.H.conjugate_value) {
    throw InvalidInputError("problem '" + prob.name +
                            "' does not provide H*, the dual is unavailable");
  }
  DualValueResult result;
  const double conj = prob.H.conjugate_value(y);
  if (conj == kInfinity) {
    result.value = kInfinity;
    result.converged = true;
    return result;
  }

  // Smooth part psi(x) = f(x) + <y, g(x)>, convex for y in dom H*.
  auto psi = [&](const Vector& x) {
    return prob.f.value(x) + y.dot(prob.g.apply(x));
  };
  auto grad = [&](const Vector& x) -> Vector {
    return prob.f.gradient(x) + prob.g.jacobian_transpose_apply(x, y);
  };

  double L = std::max(prob.f.lipschitz + prob.aggregate_L_g * y.norm(), 1e-6);
  Vector x = prob.h.prox(prob.default_x0, 1.0);
  Vector x_prev = x;
  Vector z = x;
  double t = 1.0;
  constexpr double kUnboundedNorm = 1e12;

  int it = 0;
  bool converged = false;
  for (; it < oracle.iteration_cap; ++it) {
    const double psi_z = psi(z);
    const Vector grad_z = grad(z);
    Vector x_next;
    // Backtracking on the quadratic upper model.
    for (int bt = 0; bt < 60; ++bt) {
      x_next = prob.h.prox(z - grad_z / L, 1.0 / L);
      const Vector d = x_next - z;
      const double model = psi_z + grad_z.dot(d) + 0.5 * L * d.squaredNorm();
      if (psi(x_next) <= model + 1e-15 * std::max(1.0, std::abs(psi_z))) break;
      L *= 2.0;
    }
    const double step_norm = L * (z - x_next).norm();
    if (!x_next.allFinite() || x_next.norm() > kUnboundedNorm) {
      result.unbounded = true;
      result.value = kInfinity;
      result.iterations = it + 1;
      result.converged = true;
      result.inner_x = x_next;
      return result;
    }
    x_prev = x;
    x = x_next;
    if (step_norm <= oracle.tolerance) {
      converged = true;
      ++it;
      break;
    }
    // Gradient-based adaptive restart.
    if ((z - x).dot(x - x_prev) > 0.0) {
      t = 1.0;
      z = x;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = x + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;
  }
  const double inner = prob.f.value(x) + y.dot(prob.g.apply(x)) +
                       prob.h.value(x);
  result.value = conj - inner;
  result.converged = converged;
  result.iterations = it;
  result.inner_x = std::move(x);
  return result;
}

double PrimalDualGap(const CompositeProblem& prob, const Vector& x,
                     const Vector& y, const DualOracle& oracle) {
  return ExtendedSum(EvaluatePrimal(prob, x), DualValue(prob, y, oracle).value);
}

double ConeFeasibility(const CompositeProblem& prob, const Vector& x) {
  if (!prob.cone) {
    throw InvalidInputError("problem '" + prob.name + "' is not a cone program");
  }
  const Vector gx = prob.g.apply(x);
  return DistanceToCone(-gx, *prob.cone);
}

double ConeMeasureE(const CompositeProblem& prob, const Vector& x,
                    double F_star) {
  const double gap = std::abs(EvaluateObjectiveF(prob, x) - F_star);
  return std::max(gap, ConeFeasibility(prob, x));
}

std::optional<double> TheoremBound(Schedule& schedule,
                                   const CompositeProblem& prob,
                                   std::size_t k, const Vector& x0,
                                   const Vector& y0,
                                   const KnownOptimum& saddle,
                                   const Vector* x_report) {
  if (k == 0) throw InvalidInputError("theorem bound needs k >= 1");
  const double kk = static_cast<double>(k);
  const double rho0 = schedule.rho0();
  const double P0 = schedule.P0();
  const double rx = schedule.L0() * (x0 - saddle.x).squaredNorm();
  const Variant variant = schedule.variant();

  if (schedule.params().cone_mode) {
    const double r = y0.norm() + saddle.y.norm() + 1.0;
    const double delta0 = rx + r * r / schedule.eta0();
    switch (variant) {
      case Variant::kErgodicConvex:
      case Variant::kSemiErgodicConvex:
        return delta0 / (2.0 * kk);
      case Variant::kErgodicStronglyConvex:
        return delta0 / (2.0 * (rho0 * kk + P0 * kk * (kk - 1.0)));
      case Variant::kSemiErgodicStronglyConvex:
        return 2.0 * delta0 / ((kk + 1.0) * (kk + 1.0));
    }
  }

  double M_H = prob.M_H();
  if (!std::isfinite(M_H)) {
    if (!prob.H.subgradient || x_report == nullptr) return std::nullopt;
    M_H = prob.H.subgradient(prob.g.apply(*x_report)).norm();
  }
  const double r = y0.norm() + M_H;
  switch (variant) {
    case Variant::kErgodicConvex:
      return (rx + (2.0 / rho0) * r * r) / (2.0 * kk);
    case Variant::kErgodicStronglyConvex:
      return (rx + (2.0 / rho0) * r * r) /
             (2.0 * rho0 * kk + P0 * kk * (kk - 1.0));
    case Variant::kSemiErgodicConvex:
      return (rx + r * r / ((1.0 - schedule.gamma()) * rho0)) / (2.0 * kk);
    case Variant::kSemiErgodicStronglyConvex:
      return 2.0 * (rx + r * r / ((1.0 - schedule.gamma()) * rho0)) /
             ((kk + 1.0) * (kk + 1.0));
  }
  return std::nullopt;
}

double FitRateSlope(std::span<const std::pair<double, double>> series,
                    double k_min, double k_max) {
  std::vector<std::pair<double, double>> sorted(series.begin(), series.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  double envelope = kInfinity;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (const auto& [k, value] : sorted) {
    if (!std::isnan(value)) envelope = std::min(envelope, value);
    if (k < k_min || k > k_max) continue;
    if (!(envelope > 0.0) || !std::isfinite(envelope) || !(k > 0.0)) {
      throw InvalidInputError(
          "rate fit needs positive finite values and k > 0 in the window");
    }
    const double lx = std::log(k);
    const double ly = std::log(envelope);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 5) {
    throw InvalidInputError("rate fit needs at least 5 points in [" +
                            std::to_string(k_min) + ", " +
                            std::to_string(k_max) + "], got " +
                            std::to_string(count));
  }
  const double n = count;
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) {
    throw InvalidInputError("rate fit window has a single distinct k");
  }
  return (n * sxy - sx * sy) / denom;
}

double DeltaRho(const CompositeProblem& prob, const Vector& x_hat,
                const Vector& s_hat, const Vector& x, const Vector& s,
                const Vector& y, double rho) {
  const Vector gx = prob.g.apply(x);
  const Vector g_hat = prob.g.apply(x_hat);
  const Vector r = gx - s;
  const Vector r_hat = g_hat - s_hat;
  const double phi = y.dot(r) + 0.5 * rho * r.squaredNorm();
  const double phi_hat = y.dot(r_hat) + 0.5 * rho * r_hat.squaredNorm();
  const Vector w = y + rho * r;
  const Vector grad_x = prob.g.jacobian_transpose_apply(x, w);
  // grad_s phi = -w.
  return phi_hat - phi - grad_x.dot(x_hat - x) + w.dot(s_hat - s);
}

SandwichReport Lemma1SandwichCheck(const CompositeProblem& prob, int samples,
                                   std::uint64_t seed, double rho,
                                   const DeltaFunction& delta) {
  if (samples <= 0) throw InvalidInputError("samples must be positive");
  if (!(rho > 0.0)) throw InvalidInputError("rho must be positive");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
  };
  SandwichReport report;
  const double L_g = prob.aggregate_L_g;
  for (int i = 0; i < samples; ++i) {
    const Vector x = prob.sampler.primal(rng);
    const Vector x_hat = prob.sampler.primal(rng);
    const Vector w = prob.sampler.dual(rng);
    const Vector s = gaussian(prob.dimension_n);
    const Vector s_hat = gaussian(prob.dimension_n);
    const Vector gx = prob.g.apply(x);
    const Vector g_hat = prob.g.apply(x_hat);
    if (!gx.allFinite() || !g_hat.allFinite()) {
      ++report.skipped;
      continue;
    }
    const Vector y = w - rho * (gx - s);
    const double d = delta(prob, x_hat, s_hat, x, s, y, rho);
    const Vector diff = (g_hat - s_hat) - (gx - s);
    const double lower = d - 0.5 * rho * diff.squaredNorm();
    const double upper =
        0.5 * L_g * w.norm() * (x_hat - x).squaredNorm();
    // Relative slack against the magnitude of the terms involved.
    const double scale =
        std::max({1.0, std::abs(d), 0.5 * rho * diff.squaredNorm(), upper});
    report.min_lower_slack = std::min(report.min_lower_slack, lower / scale);
    report.max_upper_slack =
        std::max(report.max_upper_slack, (lower - upper) / scale);
    ++report.samples;
  }
  report.pass = report.samples > 0 &&
                report.min_lower_slack >= -kSandwichTolerance &&
                report.max_upper_slack <= kSandwichTolerance;
  return report;
}

}  // namespace pdcomp
