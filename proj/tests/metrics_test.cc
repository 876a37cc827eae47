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

#include <cmath>
#include <utility>
#include <vector>

#include "Eigen/Dense"
#include "gtest/gtest.h"
#include "pdcomp/instances.h"

namespace pdcomp {
namespace {

double Softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}
double Sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

TEST(PrimalResidual, Examples) {
  const CompositeProblem toy = BuildBilinearToy();
  EXPECT_DOUBLE_EQ(PrimalResidual(toy, Vector::Ones(1), 0.0), 0.5);
  EXPECT_EQ(PrimalResidual(toy, Vector::Zero(1), 0.0), 0.0);
  const CompositeProblem game = BuildInstance(DefaultInstanceSpec("game"));
  EXPECT_EQ(PrimalResidual(game, Vector::Constant(3, 1.0), 0.0), kInfinity);
  const KnownOptimum& opt = *game.known_optimum;
  EXPECT_LE(std::abs(PrimalResidual(game, opt.x, opt.value)), 1e-6);
}

TEST(DualValue, ToyZeroCoupling) {
  const CompositeProblem toy = BuildBilinearToy();
  const DualValueResult r = DualValue(toy, Vector::Zero(1));
  EXPECT_NEAR(r.value, 0.0, 1e-12);
  EXPECT_TRUE(r.converged);
}

TEST(DualValue, ToyUnboundedInner) {
  // With y != 0 the inner problem min_x y x is unbounded below.
  const CompositeProblem toy = BuildBilinearToy();
  const DualValueResult r = DualValue(toy, Vector::Ones(1));
  EXPECT_TRUE(r.unbounded);
  EXPECT_EQ(r.value, kInfinity);
}

TEST(DualValue, GameStrongDuality) {
  const CompositeProblem game = BuildInstance(DefaultInstanceSpec("game"));
  const KnownOptimum& opt = *game.known_optimum;
  const DualValueResult r = DualValue(game, opt.y);
  EXPECT_NEAR(r.value, -opt.value, 1e-6);
  EXPECT_NEAR(PrimalDualGap(game, opt.x, opt.y), 0.0, 1e-6);
}

TEST(DualValue, ClassificationVertexMatchesGradientDescent) {
  const InstanceSpec spec = DefaultInstanceSpec("classification");
  const std::vector<Dataset> data = SynthData(spec.p, spec.n, spec.N, spec.seed);
  const CompositeProblem cls = BuildMultidistLogistic(data, spec.reg);
  const Matrix& F = data[0].features;
  const Vector& lab = data[0].labels;
  const Eigen::Index N = F.rows();
  Matrix A = lab.asDiagonal() * F;
  // Plain gradient descent on (reg/2)||x||^2 + mean softplus(1 + A x).
  const double smooth =
      spec.reg + A.squaredNorm() / (4.0 * static_cast<double>(N));
  Vector x = Vector::Zero(spec.p);
  for (int it = 0; it < 200000; ++it) {
    Vector t = (A * x).array() + 1.0;
    Vector s = t.unaryExpr([](double v) { return Sigmoid(v); });
    const Vector grad = spec.reg * x + A.transpose() * s / N;
    x -= grad / smooth;
  }
  Vector t = (A * x).array() + 1.0;
  double loss = 0.0;
  for (Eigen::Index j = 0; j < N; ++j) loss += Softplus(t(j));
  const double inner = 0.5 * spec.reg * x.squaredNorm() + loss / N;

  Vector e1 = Vector::Zero(spec.n);
  e1(0) = 1.0;
  const DualValueResult r = DualValue(cls, e1);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, -inner, 1e-8);
}

TEST(DualValue, OutsideConjugateDomain) {
  const CompositeProblem game = BuildInstance(DefaultInstanceSpec("game"));
  EXPECT_EQ(DualValue(game, Vector::Constant(3, 1.0)).value, kInfinity);
}

TEST(PrimalDualGap, ToyExample) {
  const CompositeProblem toy = BuildBilinearToy();
  EXPECT_NEAR(PrimalDualGap(toy, Vector::Ones(1), Vector::Zero(1)), 0.5,
              1e-12);
}

TEST(PrimalDualGap, WeakDuality) {
  for (const char* name : {"game", "classification", "toy_max"}) {
    const CompositeProblem prob = BuildInstance(DefaultInstanceSpec(name));
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
      const Vector x = prob.h.prox(prob.sampler.primal(rng), 1.0);
      const Vector y = prob.sampler.dual(rng);
      EXPECT_GE(PrimalDualGap(prob, x, y), -1e-6) << name;
    }
  }
}

TEST(ConeMeasure, Examples) {
  const CompositeProblem qp = BuildInstance(DefaultInstanceSpec("cone_qp"));
  const KnownOptimum& opt = *qp.known_optimum;
  EXPECT_LE(ConeMeasureE(qp, opt.x, opt.value), 1e-8);
  // x = (1, 1): g = 1, F = 1 - 2 = -1, so E = max(0.25, 1).
  EXPECT_NEAR(ConeMeasureE(qp, Vector::Ones(2), opt.value), 1.0, 1e-12);

  Matrix K = Matrix::Identity(2, 2);
  const Vector b = (Vector(2) << -1.0, 1.0).finished();
  const CompositeProblem two =
      BuildConeQP(Matrix::Identity(2, 2), Vector::Zero(2), K, b,
                  Cone::kNonnegativeOrthant);
  // g(0) = (1, -1): distance to the nonpositive orthant is 1.
  EXPECT_NEAR(ConeMeasureE(two, Vector::Zero(2), 0.0), 1.0, 1e-15);
  EXPECT_THROW(ConeFeasibility(BuildBilinearToy(), Vector::Zero(1)),
               InvalidInputError);
}

TEST(TheoremBound, ErgodicHalving) {
  const CompositeProblem prob = BuildInstance(DefaultInstanceSpec("toy_max"));
  Schedule s(prob, ScheduleParams{}, prob.default_x0, prob.default_y0);
  const KnownOptimum& opt = *prob.known_optimum;
  for (std::size_t k : {1u, 7u, 100u}) {
    const double a = *TheoremBound(s, prob, k, prob.default_x0,
                                   prob.default_y0, opt);
    const double b = *TheoremBound(s, prob, 2 * k, prob.default_x0,
                                   prob.default_y0, opt);
    EXPECT_EQ(a, 2.0 * b);
  }
  EXPECT_THROW(
      TheoremBound(s, prob, 0, prob.default_x0, prob.default_y0, opt),
      InvalidInputError);
}

TEST(TheoremBound, Thm4FirstIteration) {
  const CompositeProblem cls =
      BuildInstance(DefaultInstanceSpec("classification"));
  ScheduleParams params;
  params.variant = Variant::kSemiErgodicStronglyConvex;
  params.rho0 = Schedule::Thm4Rho0Bound(cls, params.gamma);
  Schedule s(cls, params, cls.default_x0, cls.default_y0);
  const KnownOptimum& opt = *cls.known_optimum;
  const double expected =
      0.5 * (s.L0() * (cls.default_x0 - opt.x).squaredNorm() +
             std::pow(cls.default_y0.norm() + 1.0, 2) /
                 ((1.0 - params.gamma) * params.rho0));
  EXPECT_NEAR(*TheoremBound(s, cls, 1, cls.default_x0, cls.default_y0, opt),
              expected, 1e-14 * expected);
}

TEST(TheoremBound, GameSemiErgodicIndependentFormula) {
  Matrix A(4, 3);
  A << 0.3, -1.2, 0.5, 1.1, 0.4, -0.7, -0.2, 0.9, 1.3, 0.6, -0.1, 0.2;
  const Vector b = (Vector(3) << 0.2, 0.7, 0.4).finished();
  const CompositeProblem game = BuildGame(A, b);
  ScheduleParams params;
  params.variant = Variant::kSemiErgodicConvex;
  Schedule s(game, params, game.default_x0, game.default_y0);
  KnownOptimum saddle;
  saddle.x = (Vector(3) << 0.2, 0.3, 0.5).finished();
  saddle.y = (Vector(3) << 0.1, 0.6, 0.3).finished();

  const double sigma = Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
  const double L_f = sigma * sigma / 16.0;
  const double M_g = b.norm();
  const double L_g = 2.0 * b.norm();
  const double L0 = L_f + L_g * 1.0 + M_g * M_g * 1.0 / 0.5;
  const Vector x0 = Vector::Constant(3, 1.0 / 3.0);
  const Vector y0 = Vector::Constant(3, 1.0 / 3.0);
  const double expected =
      (L0 * (x0 - saddle.x).squaredNorm() +
       std::pow(y0.norm() + 1.0, 2) / (0.5 * 1.0)) /
      200.0;
  EXPECT_NEAR(*TheoremBound(s, game, 100, x0, y0, saddle), expected,
              1e-12 * expected);
}

TEST(TheoremBound, UnavailableWithoutOuterLipschitz) {
  const CompositeProblem qp = BuildInstance(DefaultInstanceSpec("cone_qp"));
  Schedule s(qp, ScheduleParams{}, qp.default_x0, qp.default_y0);
  EXPECT_FALSE(TheoremBound(s, qp, 10, qp.default_x0, qp.default_y0,
                            *qp.known_optimum)
                   .has_value());
}

TEST(FitRateSlope, PowerLaws) {
  std::vector<std::pair<double, double>> inv, inv2, flat;
  for (int k = 1; k <= 10000; ++k) {
    inv.emplace_back(k, 1.0 / k);
    inv2.emplace_back(k, 1.0 / (static_cast<double>(k) * k));
    flat.emplace_back(k, 3.0);
  }
  EXPECT_NEAR(FitRateSlope(inv, 100, 10000), -1.0, 1e-6);
  EXPECT_NEAR(FitRateSlope(inv2, 100, 10000), -2.0, 1e-6);
  EXPECT_NEAR(FitRateSlope(flat, 100, 10000), 0.0, 1e-9);
}

TEST(FitRateSlope, UsesRunningMinimum) {
  std::vector<std::pair<double, double>> series;
  for (int k = 1; k <= 1000; ++k) {
    series.emplace_back(k, (k % 2 == 0 ? 1.0 : 5.0) / k);
  }
  std::vector<std::pair<double, double>> envelope;
  double best = kInfinity;
  for (const auto& [k, v] : series) {
    best = std::min(best, v);
    envelope.emplace_back(k, best);
  }
  EXPECT_DOUBLE_EQ(FitRateSlope(series, 10, 1000),
                   FitRateSlope(envelope, 10, 1000));
}

TEST(FitRateSlope, Errors) {
  std::vector<std::pair<double, double>> few = {
      {1, 1.0}, {2, 0.5}, {3, 0.3}, {4, 0.25}};
  EXPECT_THROW(FitRateSlope(few, 1, 4), InvalidInputError);
  std::vector<std::pair<double, double>> zero = {
      {1, 1.0}, {2, 0.0}, {3, 0.3}, {4, 0.25}, {5, 0.2}};
  EXPECT_THROW(FitRateSlope(zero, 1, 5), InvalidInputError);
}

TEST(Sandwich, AffineIsExact) {
  const CompositeProblem qp = BuildInstance(DefaultInstanceSpec("cone_qp"));
  const SandwichReport r = Lemma1SandwichCheck(qp, 500, 1);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(std::abs(r.min_lower_slack), 1e-9);
  EXPECT_LE(std::abs(r.max_upper_slack), 1e-9);
}

TEST(Sandwich, GamePasses) {
  const CompositeProblem game = BuildInstance(DefaultInstanceSpec("game"));
  const SandwichReport r = Lemma1SandwichCheck(game, 1000, 2);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.samples + r.skipped, 1000);
  EXPECT_GT(r.samples, 0);
}

TEST(Sandwich, WrongSignFails) {
  const CompositeProblem game = BuildInstance(DefaultInstanceSpec("game"));
  const DeltaFunction flipped =
      [](const CompositeProblem& prob, const Vector& x_hat,
         const Vector& s_hat, const Vector& x, const Vector& s,
         const Vector& y, double rho) {
        return -DeltaRho(prob, x_hat, s_hat, x, s, y, rho);
      };
  EXPECT_FALSE(Lemma1SandwichCheck(game, 1000, 2, 1.0, flipped).pass);
}

}  // namespace
}  // namespace pdcomp
