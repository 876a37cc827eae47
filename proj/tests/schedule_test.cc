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

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "pdcomp/instances.h"

namespace pdcomp {
namespace {

// A one-dimensional problem that carries the requested constants; only the
// constants matter to the schedules.
CompositeProblem WithConstants(double L_f, double mu_f,
                               std::vector<double> M_gi,
                               std::vector<double> L_gi, double M_H = 1.0,
                               std::optional<double> B_g = std::nullopt) {
  CompositeProblem prob;
  prob.name = "constants";
  prob.dimension_p = 1;
  prob.dimension_n = static_cast<Eigen::Index>(M_gi.size());
  prob.f.value = [L_f](const Vector& x) { return 0.5 * L_f * x.squaredNorm(); };
  prob.f.gradient = [L_f](const Vector& x) -> Vector { return L_f * x; };
  prob.f.lipschitz = L_f;
  prob.f.strong_convexity = mu_f;
  prob.h.value = [](const Vector&) { return 0.0; };
  prob.h.prox = [](const Vector& v, double) { return v; };
  prob.H.value = [](const Vector& u) { return u.maxCoeff(); };
  prob.H.prox = ProxMaxCoords;
  prob.H.lipschitz = M_H;
  const Eigen::Index n = prob.dimension_n;
  prob.g.apply = [n](const Vector&) -> Vector { return Vector::Zero(n); };
  prob.g.jacobian_transpose_apply = [](const Vector& x, const Vector&) {
    return Vector::Zero(x.size()).eval();
  };
  prob.g.component_lipschitz = std::move(M_gi);
  prob.g.component_gradient_lipschitz = std::move(L_gi);
  prob.g.bound = B_g;
  return FinalizeProblem(std::move(prob));
}

Schedule Make(const CompositeProblem& prob, ScheduleParams params) {
  return Schedule(prob, params, Vector::Zero(prob.dimension_p),
                  Vector::Zero(prob.dimension_n));
}

TEST(Thm1Schedule, BilinearConstants) {
  const CompositeProblem prob = WithConstants(1.0, 0.0, {1.0}, {0.0});
  ScheduleParams params;
  params.D_bound = 1.0;
  Schedule s = Make(prob, params);
  EXPECT_DOUBLE_EQ(s.constant_C(), 5.0);
  for (std::size_t k : {0u, 1u, 57u}) {
    const ScheduleState& st = s.At(k);
    EXPECT_EQ(st.tau, 1.0);
    EXPECT_EQ(st.beta, 0.0);
    EXPECT_EQ(st.rho, 1.0);
    EXPECT_EQ(st.eta, 0.5);
    EXPECT_DOUBLE_EQ(st.L, 8.0);
  }
}

TEST(Thm1Schedule, ToyConstants) {
  const CompositeProblem toy = BuildBilinearToy();
  Schedule s = Make(toy, ScheduleParams{});
  EXPECT_DOUBLE_EQ(s.constant_C(), 4.0);
  EXPECT_DOUBLE_EQ(s.At(0).L, 6.0);
}

TEST(Thm1Schedule, CurvatureTermDominates) {
  const CompositeProblem prob = WithConstants(0.0, 0.0, {0.0}, {1.0});
  ScheduleParams params;
  params.D_bound = 1.0;
  Schedule s = Make(prob, params);
  EXPECT_DOUBLE_EQ(s.constant_C(), 3.0);
  EXPECT_DOUBLE_EQ(s.At(0).L, 3.0);
  EXPECT_DOUBLE_EQ(ErgodicConstantC(0.0, 0.0, 1.0, 1.0), 3.0);
}

TEST(Thm1Schedule, NonpositiveDRejected) {
  const CompositeProblem prob = WithConstants(1.0, 0.0, {1.0}, {0.0});
  ScheduleParams params;
  params.D_bound = 0.0;
  EXPECT_THROW(Make(prob, params), InvalidInputError);
}

TEST(Thm1Schedule, DefaultDWarns) {
  const CompositeProblem prob = WithConstants(1.0, 0.0, {1.0}, {0.0});
  Schedule s = Make(prob, ScheduleParams{});
  EXPECT_DOUBLE_EQ(s.D(), 10.0);
  ASSERT_EQ(s.warnings().size(), 1u);
}

TEST(Thm1Schedule, RejectsOtherRho0) {
  const CompositeProblem prob = WithConstants(1.0, 0.0, {1.0}, {0.0});
  ScheduleParams params;
  params.rho0 = 2.0;
  EXPECT_THROW(Make(prob, params), PreconditionError);
}

TEST(Thm2Schedule, FirstContraction) {
  const CompositeProblem prob = WithConstants(1.0, 1.0, {1.0}, {0.0});
  ScheduleParams params;
  params.variant = Variant::kErgodicStronglyConvex;
  params.D_bound = 1.0;
  Schedule s = Make(prob, params);
  EXPECT_DOUBLE_EQ(s.At(0).L, 8.0);
  const double theta = 16.0 / (1.0 + std::sqrt(257.0));
  EXPECT_NEAR(s.At(0).theta, theta, 1e-15);
  EXPECT_NEAR(s.At(0).theta, 0.9394512, 1e-7);
  EXPECT_NEAR(s.At(1).L, 8.0 / theta, 1e-14);
  EXPECT_NEAR(s.At(1).L, 8.5156098, 1e-7);
  EXPECT_NEAR(s.At(1).rho, 1.0 / theta, 1e-15);
  EXPECT_DOUBLE_EQ(s.At(1).eta, s.At(1).rho / 2.0);
  // P0 from its defining expression.
  const double L0 = 8.0, mu = 1.0;
  const double P0 =
      (1.0 / (2.0 * L0)) *
      (std::sqrt(4.0 * L0 * mu + (2.0 * L0 - mu) * (2.0 * L0 - mu)) -
       (2.0 * L0 - mu));
  EXPECT_NEAR(s.P0(), P0, 1e-14);
}

TEST(Thm2Schedule, RejectsZeroStrongConvexity) {
  const CompositeProblem prob = WithConstants(1.0, 0.0, {1.0}, {0.0});
  ScheduleParams params;
  params.variant = Variant::kErgodicStronglyConvex;
  params.D_bound = 1.0;
  EXPECT_THROW(Make(prob, params), PreconditionError);
}

TEST(Thm2Schedule, GrowthInvariants) {
  const CompositeProblem prob =
      WithConstants(2.0, 0.5, {1.0, 0.5}, {0.3, 0.2});
  ScheduleParams params;
  params.variant = Variant::kErgodicStronglyConvex;
  params.D_bound = 2.0;
  Schedule s = Make(prob, params);
  const double ratio = s.At(0).rho / s.At(0).L;
  // Each increment rho_k (1/theta - 1) is at least rho0 mu_F / (2 L0).
  const double growth = s.rho0() * 0.5 / (2.0 * s.L0());
  EXPECT_NEAR(s.At(1).rho - s.At(0).rho, s.P0(), 1e-14);
  for (std::size_t k = 0; k <= 10000; ++k) {
    const ScheduleState cur = s.At(k);
    const ScheduleState next = s.At(k + 1);
    EXPECT_GE(cur.rho, s.rho0() + growth * k - 1e-12 * cur.rho);
    if (k >= 1) {
      // Increments shrink when mu_f > mu_h, so P0 is the largest one.
      EXPECT_LE(next.rho - cur.rho, s.P0() * (1.0 + 1e-12));
    }
    if (k <= 1000) {
      EXPECT_NEAR(cur.L, (next.L - 0.5) / cur.theta, 1e-12 * cur.L);
    }
    EXPECT_NEAR(cur.rho / cur.L, ratio, 1e-12 * ratio);
    EXPECT_EQ(cur.tau, 1.0);
    EXPECT_EQ(cur.beta, 0.0);
  }
}

TEST(Thm3Schedule, FirstIterations) {
  const CompositeProblem prob = WithConstants(0.0, 0.0, {1.0}, {0.0});
  ScheduleParams params;
  params.variant = Variant::kSemiErgodicConvex;
  Schedule s = Make(prob, params);
  EXPECT_EQ(s.At(0).tau, 1.0);
  EXPECT_EQ(s.At(0).beta, 0.0);
  const ScheduleState one = s.At(1);
  EXPECT_DOUBLE_EQ(one.tau, 0.5);
  EXPECT_DOUBLE_EQ(one.rho, 2.0);
  EXPECT_DOUBLE_EQ(one.eta, 1.0);
  EXPECT_DOUBLE_EQ(one.L, 4.0);
  EXPECT_DOUBLE_EQ(one.beta, 1.0 / 3.0);
}

TEST(Thm3Schedule, ChainsAndMomentum) {
  const CompositeProblem prob =
      WithConstants(1.5, 0.0, {1.0, 2.0}, {0.5, 0.5});
  ScheduleParams params;
  params.variant = Variant::kSemiErgodicConvex;
  params.rho0 = 0.1;
  Schedule s = Make(prob, params);
  for (std::size_t k = 1; k <= 10000; ++k) {
    const ScheduleState prev = s.At(k - 1);
    const ScheduleState cur = s.At(k);
    EXPECT_NEAR(prev.eta, (1.0 - cur.tau) * cur.eta, 1e-12 * prev.eta);
    EXPECT_NEAR(prev.rho, (1.0 - cur.tau) * cur.rho, 1e-10 * prev.rho);
    EXPECT_NEAR(prev.beta, (k - 1.0) / (k + 1.0), 1e-15);
    EXPECT_LE(cur.L * cur.tau * cur.tau,
              (1.0 - cur.tau) * prev.L * prev.tau * prev.tau *
                  (1.0 + 1e-14));
    EXPECT_GT(cur.rho, cur.eta);
  }
}

TEST(Thm3Schedule, NonLipschitzOuterRejected) {
  const CompositeProblem prob =
      WithConstants(0.0, 0.0, {1.0}, {1.0}, kInfinity);
  ScheduleParams params;
  params.variant = Variant::kSemiErgodicConvex;
  EXPECT_THROW(Make(prob, params), PreconditionError);
  // Affine g allows M_H = +inf.
  const CompositeProblem affine =
      WithConstants(0.0, 0.0, {1.0}, {0.0}, kInfinity);
  EXPECT_NO_THROW(Make(affine, params));
}

TEST(Thm4Schedule, TauRecursion) {
  const CompositeProblem prob = WithConstants(1.0, 1.0, {1.0}, {0.0});
  ScheduleParams params;
  params.variant = Variant::kSemiErgodicStronglyConvex;
  params.rho0 = Schedule::Thm4Rho0Bound(prob, params.gamma);
  Schedule s = Make(prob, params);
  EXPECT_EQ(s.At(0).tau, 1.0);
  EXPECT_NEAR(s.At(1).tau, (std::sqrt(5.0) - 1.0) / 2.0, 1e-15);
  EXPECT_NEAR(s.At(1).tau, 0.6180339887, 1e-10);
  for (std::size_t k = 1; k <= 10000; ++k) {
    const double t = s.At(k).tau;
    const double tp = s.At(k - 1).tau;
    EXPECT_NEAR(t * t, (1.0 - t) * tp * tp, 1e-14);
    EXPECT_GE(t, 1.0 / (k + 1.0));
    EXPECT_LE(t, 2.0 / (k + 2.0));
    EXPECT_NEAR(s.At(k - 1).rho, (1.0 - t) * s.At(k).rho,
                1e-10 * s.At(k - 1).rho);
  }
}

TEST(Thm4Schedule, MomentumMatchesFormula) {
  const CompositeProblem prob = WithConstants(2.0, 1.0, {1.0}, {0.0});
  ScheduleParams params;
  params.variant = Variant::kSemiErgodicStronglyConvex;
  params.rho0 = 0.2;
  Schedule s = Make(prob, params);
  for (std::size_t k = 0; k < 50; ++k) {
    const ScheduleState c = s.At(k);
    const ScheduleState n = s.At(k + 1);
    const double expected = (1.0 - c.tau) * c.tau * c.L /
                            (c.tau * c.tau * c.L + n.L * n.tau);
    EXPECT_NEAR(c.beta, expected, 1e-15);
    EXPECT_NEAR(c.L, 2.0 + c.rho / 0.5, 1e-12 * c.L);
  }
}

TEST(Thm4Schedule, Rho0BoundEnforced) {
  const CompositeProblem prob = WithConstants(1.0, 1.0, {1.0}, {0.5});
  ScheduleParams params;
  params.variant = Variant::kSemiErgodicStronglyConvex;
  const double bound = Schedule::Thm4Rho0Bound(prob, params.gamma);
  // min{mu_F / (L_g M_H + M_g^2), gamma mu_F / M_g^2} = min{2/3, 1/2}.
  EXPECT_DOUBLE_EQ(bound, 0.5);
  params.rho0 = bound * 1.01;
  EXPECT_THROW(Make(prob, params), PreconditionError);
  params.rho0 = bound;
  EXPECT_NO_THROW(Make(prob, params));
}

TEST(Thm4Schedule, RequiresStrongConvexity) {
  const CompositeProblem prob = WithConstants(1.0, 0.0, {1.0}, {0.0});
  ScheduleParams params;
  params.variant = Variant::kSemiErgodicStronglyConvex;
  params.rho0 = 1e-3;
  EXPECT_THROW(Make(prob, params), PreconditionError);
}

TEST(Thm4Schedule, MomentumConditionsHold) {
  const CompositeProblem cls =
      BuildInstance(DefaultInstanceSpec("classification"));
  ScheduleParams params;
  params.variant = Variant::kSemiErgodicStronglyConvex;
  params.rho0 = Schedule::Thm4Rho0Bound(cls, params.gamma);
  Schedule s = Make(cls, params);
  for (std::size_t k = 1; k <= 10000; ++k) {
    const BetaConditionSlack slack = Thm4BetaConditions(s, cls, k);
    EXPECT_GE(slack.first, -1e-12 * slack.scale) << k;
    EXPECT_GE(slack.second, -1e-12 * slack.scale) << k;
  }
}

TEST(ConeStepConstant, Examples) {
  CompositeProblem prob =
      WithConstants(0.0, 0.0, {1.0}, {1.0}, kInfinity, 1.0);
  ScheduleParams params;
  params.variant = Variant::kSemiErgodicConvex;
  params.gamma = 0.5;
  EXPECT_DOUBLE_EQ(ConeStepConstant(prob, params, 1.0, 0.0), 5.0);
  prob.g.bound.reset();
  EXPECT_THROW(ConeStepConstant(prob, params, 1.0, 0.0), PreconditionError);
  // Affine g: L_f + rho M_g^2 / gamma.
  const CompositeProblem affine = WithConstants(3.0, 0.0, {2.0}, {0.0});
  EXPECT_DOUBLE_EQ(ConeStepConstant(affine, params, 0.5, 7.0), 3.0 + 4.0);
}

TEST(ConeStepConstant, MonotoneUnderThm3) {
  const CompositeProblem qp = BuildInstance(DefaultInstanceSpec("cone_qp"));
  ScheduleParams params;
  params.variant = Variant::kSemiErgodicConvex;
  params.cone_mode = true;
  Schedule s = Make(qp, params);
  for (std::size_t k = 1; k < 1000; ++k) {
    EXPECT_GE(s.At(k).L, s.At(k - 1).L);
    EXPECT_DOUBLE_EQ(s.At(k).L,
                     ConeStepConstant(qp, params, s.At(k).rho, 0.0));
  }
}

TEST(Variant, Names) {
  EXPECT_EQ(ParseVariant("thm3"), Variant::kSemiErgodicConvex);
  EXPECT_EQ(VariantName(Variant::kErgodicStronglyConvex), "thm2");
  EXPECT_THROW(ParseVariant("thm5"), InvalidInputError);
}

}  // namespace
}  // namespace pdcomp
