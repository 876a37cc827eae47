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

#ifndef PDCOMP_INSTANCES_H_
#define PDCOMP_INSTANCES_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "pdcomp/core.h"
#include "pdcomp/problem.h"
#include "pdcomp/prox.h"

namespace pdcomp {

// Feature rows and labels of one data source.
struct Dataset {
  Matrix features;  // N x p
  Vector labels;    // N
};

// LIBSVM text: "label idx:val idx:val ..." with 1-based ascending indices.
// Rows are densified to the largest index seen. Blank lines are skipped.
Dataset ParseLibsvm(std::istream& in);
Dataset ReadLibsvm(const std::string& path);

// Gaussian groups with identity covariance and means 3 units apart, labels
// from a shared random linear rule with label noise.
std::vector<Dataset> SynthData(int p, int n_groups, int N_per_group,
                               std::uint64_t seed);

inline constexpr double kDefaultRegularization = 0.01;

// min (reg/2)||x||^2 + max_i (1/N_i) sum_j log(1 + exp(1 + a_j^T x)) with
// a_j = label_j * feature_j.
CompositeProblem BuildMultidistLogistic(const std::vector<Dataset>& datasets,
                                        double reg = kDefaultRegularization);

// min_{x in simplex} (1/N) sum_j log(1 + exp(a_j^T x)) + max_i b_i/(1 + x_i).
// Requires b >= 0 and size(b) <= columns of A.
CompositeProblem BuildGame(const Matrix& A, const Vector& b);

// p = n = 1, f = h = 0, g(x) = x, H(s) = s^2/2.
CompositeProblem BuildBilinearToy();

// p = 1, n = 2, f = h = 0, g(x) = (x, -x), H = max, so P(x) = |x|.
CompositeProblem BuildMaxToy();

// min (1/2) x^T Q x + q^T x subject to K x - bvec in -cone.
CompositeProblem BuildConeQP(const Matrix& Q, const Vector& q,
                             const Matrix& K, const Vector& bvec, Cone cone);

// Reference solutions. Each is computed without the primal-dual solver.

// Grid search over the simplex (step 1e-3, then zoomed), paired with a
// zoomed grid search of the dual. accuracy is the duality gap of the pair.
// Supports p, n <= 3.
KnownOptimum GameGridOracle(const CompositeProblem& game);

// Barrier method on the epigraph form, polished by Newton on the KKT system
// of the active set. accuracy is the certified duality gap.
KnownOptimum LogisticKktOracle(const std::vector<Dataset>& datasets,
                               double reg);

// Active-set enumeration of the KKT system. Orthant and zero cones only.
std::optional<KnownOptimum> ConeQpKktOracle(const Matrix& Q, const Vector& q,
                                            const Matrix& K,
                                            const Vector& bvec, Cone cone);

// Named instance recipes.
struct InstanceSpec {
  std::string name;
  int p = 0;
  int n = 0;
  int N = 0;
  std::uint64_t seed = 0;
  double reg = kDefaultRegularization;
  // LIBSVM files for the classification instance, one per distribution.
  std::vector<std::string> datasets;
};

// Names accepted by BuildInstance.
std::vector<std::string> RegisteredInstances();

// Default recipe for a registered name (throws InvalidInputError when
// unknown).
InstanceSpec DefaultInstanceSpec(const std::string& name);

// Builds the instance and attaches its reference solution. Oracle results
// are memoized per recipe.
CompositeProblem BuildInstance(const InstanceSpec& spec);

}  // namespace pdcomp

#endif  // PDCOMP_INSTANCES_H_
