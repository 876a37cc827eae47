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

#ifndef PDCOMP_PROX_H_
#define PDCOMP_PROX_H_

#include <functional>
#include <string_view>

#include "pdcomp/core.h"

namespace pdcomp {

// Scaled proximal map: apply(v, lambda) = argmin_u phi(u) + ||u - v||^2 / (2 lambda).
using ProxOperator = std::function<Vector(const Vector& v, double lambda)>;

// Closed convex cones with closed-form Euclidean projections. The
// second-order cone is {(t, u) : ||u|| <= t} with t stored in entry 0.
// kFree is the whole space; it only arises as the dual of kZero.
enum class Cone { kNonnegativeOrthant, kSecondOrder, kZero, kFree };

// Accepts "orthant", "soc" and "zero" (and "free"); throws InvalidInputError
// on anything else.
Cone ParseCone(std::string_view tag);
std::string_view ConeName(Cone cone);
Cone DualCone(Cone cone);

// Euclidean projection onto the unit simplex {u >= 0, sum(u) = 1}.
//
// Sort-based thresholding: entries are sorted in descending order with a
// stable sort, so ties keep their original index order and the threshold is
// a deterministic function of the multiset of entries.
Vector ProjectSimplex(const Vector& v);

// prox of lambda * max_i(u_i). max is the support function of the simplex,
// so by Moreau this is v - lambda * ProjectSimplex(v / lambda).
Vector ProxMaxCoords(const Vector& v, double lambda);

// prox_{rho H*}(v) = v - rho * prox_{H / rho}(v / rho), where prox_h is the
// scaled prox of H.
Vector ProxConjugateMoreau(const ProxOperator& prox_h, const Vector& v,
                           double rho);

Vector SoftThreshold(const Vector& v, double lambda);

Vector ProjectCone(const Vector& v, Cone cone);

// Euclidean distance from v to the cone.
double DistanceToCone(const Vector& v, Cone cone);

}  // namespace pdcomp

#endif  // PDCOMP_PROX_H_
