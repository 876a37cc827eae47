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

#include "pdcomp/prox.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace pdcomp {
namespace {

void RequirePositive(double lambda, const char* what) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidInputError(std::string(what) +
                            ": scale must be positive and finite, got " +
                            std::to_string(lambda));
  }
}

}  // namespace

Cone ParseCone(std::string_view tag) {
  if (tag == "orthant" || tag == "nonneg") return Cone::kNonnegativeOrthant;
  if (tag == "soc" || tag == "second_order") return Cone::kSecondOrder;
  if (tag == "zero") return Cone::kZero;
  if (tag == "free") return Cone::kFree;
  throw InvalidInputError("unknown cone tag '" + std::string(tag) + "'");
}

std::string_view ConeName(Cone cone) {
  switch (cone) {
    case Cone::kNonnegativeOrthant:
      return "orthant";
    case Cone::kSecondOrder:
      return "soc";
    case Cone::kZero:
      return "zero";
    case Cone::kFree:
      return "free";
  }
  return "unknown";
}

Cone DualCone(Cone cone) {
  switch (cone) {
    case Cone::kZero:
      return Cone::kFree;
    case Cone::kFree:
      return Cone::kZero;
    default:
      return cone;  // orthant and SOC are self-dual
  }
}

Vector ProjectSimplex(const Vector& v) {
  if (v.size() == 0) throw InvalidInputError("ProjectSimplex: empty vector");
  if (!v.allFinite()) {
    throw InvalidInputError("ProjectSimplex: non-finite entry");
  }
  const Eigen::Index n = v.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&v](Eigen::Index a, Eigen::Index b) { return v[a] > v[b]; });

  double cumulative = 0.0;
  double threshold = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double u = v[order[static_cast<std::size_t>(j)]];
    cumulative += u;
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    // The support size is the last j with u_j > candidate; the sorted order
    // makes the condition monotone.
    if (u - candidate > 0.0) threshold = candidate;
  }
  return (v.array() - threshold).max(0.0).matrix();
}

Vector ProxMaxCoords(const Vector& v, double lambda) {
  RequirePositive(lambda, "ProxMaxCoords");
  return v - lambda * ProjectSimplex(v / lambda);
}

Vector ProxConjugateMoreau(const ProxOperator& prox_h, const Vector& v,
                           double rho) {
  RequirePositive(rho, "ProxConjugateMoreau");
  return v - rho * prox_h(v / rho, 1.0 / rho);
}

Vector SoftThreshold(const Vector& v, double lambda) {
  RequirePositive(lambda, "SoftThreshold");
  return v.unaryExpr([lambda](double x) {
    return std::copysign(std::max(std::abs(x) - lambda, 0.0), x);
  });
}

Vector ProjectCone(const Vector& v, Cone cone) {
  if (!v.allFinite()) throw InvalidInputError("ProjectCone: non-finite entry");
  switch (cone) {
    case Cone::kNonnegativeOrthant:
      return v.cwiseMax(0.0);
    case Cone::kZero:
      return Vector::Zero(v.size());
    case Cone::kFree:
      return v;
    case Cone::kSecondOrder: {
      if (v.size() == 0) {
        throw InvalidInputError("ProjectCone: second-order cone needs t");
      }
      const double t = v[0];
      const auto u = v.tail(v.size() - 1);
      const double norm_u = u.norm();
      if (norm_u <= t) return v;
      if (norm_u <= -t) return Vector::Zero(v.size());
      const double scale = 0.5 * (t + norm_u);
      Vector out(v.size());
      out[0] = scale;
      out.tail(v.size() - 1) = (scale / norm_u) * u;
      return out;
    }
  }
  throw InvalidInputError("ProjectCone: unknown cone");
}

double DistanceToCone(const Vector& v, Cone cone) {
  return (v - ProjectCone(v, cone)).norm();
}

}  // namespace pdcomp
