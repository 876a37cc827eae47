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

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "Eigen/Dense"
#include "pdcomp/instances.h"
#include "pdcomp/metrics.h"

namespace pdcomp {
namespace {

// Minimizes `func` over the unit simplex in R^d (d = 2 or 3) by a grid of
// spacing `step`, then repeatedly re-grids a window of +-5 cells around the
// incumbent at a quarter of the spacing until `final_step`.
Vector ZoomSimplexMinimize(Eigen::Index d,
                           const std::function<double(const Vector&)>& func,
                           double step, double final_step) {
  if (d < 1 || d > 3) {
    throw InvalidInputError("grid oracle supports dimensions 1 to 3");
  }
  if (d == 1) return Vector::Ones(1);
  auto point = [d](double u, double v) {
    Vector x(d);
    if (d == 2) {
      x << u, 1.0 - u;
    } else {
      x << u, v, 1.0 - u - v;
    }
    if (x.minCoeff() < 0.0) x = ProjectSimplex(x);
    return x;
  };
  Vector best = point(1.0 / double(d), 1.0 / double(d));
  double best_value = func(best);
  auto consider = [&](const Vector& x) {
    const double value = func(x);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
  };
  const long cells = std::lround(1.0 / step);
  for (long i = 0; i <= cells; ++i) {
    const double u = double(i) / double(cells);
    if (d == 2) {
      consider(point(u, 0.0));
      continue;
    }
    for (long j = 0; i + j <= cells; ++j) {
      consider(point(u, double(j) / double(cells)));
    }
  }
  constexpr int kHalfWidth = 20;  // 5 old cells at a quarter spacing
  while (step > final_step) {
    step /= 4.0;
    const double cu = best[0];
    const double cv = d == 3 ? best[1] : 0.0;
    for (int i = -kHalfWidth; i <= kHalfWidth; ++i) {
      const double u = cu + i * step;
      if (u < -step || u > 1.0 + step) continue;
      if (d == 2) {
        consider(point(std::clamp(u, 0.0, 1.0), 0.0));
        continue;
      }
      for (int j = -kHalfWidth; j <= kHalfWidth; ++j) {
        const double v = cv + j * step;
        if (v < -step || u + v > 1.0 + 2.0 * step) continue;
        consider(point(std::max(u, 0.0), std::max(v, 0.0)));
      }
    }
  }
  return best;
}

double SoftplusValue(double u) {
  return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

double SigmoidValue(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

// Logistic group losses written out again for the reference solver, with
// second derivatives.
class LogisticGroups {
 public:
  explicit LogisticGroups(const std::vector<Dataset>& datasets) {
    for (const auto& d : datasets) {
      rows_.push_back(d.labels.asDiagonal() * d.features);
    }
  }
  Eigen::Index n() const { return static_cast<Eigen::Index>(rows_.size()); }
  Eigen::Index p() const { return rows_.front().cols(); }

  double Value(Eigen::Index i, const Vector& x) const {
    const Matrix& A = rows_[static_cast<std::size_t>(i)];
    double sum = 0.0;
    for (Eigen::Index j = 0; j < A.rows(); ++j) {
      sum += SoftplusValue(1.0 + A.row(j).dot(x));
    }
    return sum / double(A.rows());
  }
  Vector Gradient(Eigen::Index i, const Vector& x) const {
    const Matrix& A = rows_[static_cast<std::size_t>(i)];
    Vector out = Vector::Zero(p());
    for (Eigen::Index j = 0; j < A.rows(); ++j) {
      out += SigmoidValue(1.0 + A.row(j).dot(x)) * A.row(j).transpose();
    }
    return out / double(A.rows());
  }
  Matrix Hessian(Eigen::Index i, const Vector& x) const {
    const Matrix& A = rows_[static_cast<std::size_t>(i)];
    Vector w(A.rows());
    for (Eigen::Index j = 0; j < A.rows(); ++j) {
      const double s = SigmoidValue(1.0 + A.row(j).dot(x));
      w[j] = s * (1.0 - s);
    }
    return A.transpose() * w.asDiagonal() * A / double(A.rows());
  }

 private:
  std::vector<Matrix> rows_;
};

// Newton's method on the strongly convex Lagrangian
// (reg/2)||x||^2 + sum_i y_i g_i(x); returns a certified lower bound on its
// minimum via the strong convexity gap ||grad||^2 / (2 reg).
double LagrangianLowerBound(const LogisticGroups& groups, double reg,
                            const Vector& y, Vector x) {
  auto value = [&](const Vector& z) {
    double v = 0.5 * reg * z.squaredNorm();
    for (Eigen::Index i = 0; i < groups.n(); ++i) {
      if (y[i] != 0.0) v += y[i] * groups.Value(i, z);
    }
    return v;
  };
  auto gradient = [&](const Vector& z) {
    Vector g = reg * z;
    for (Eigen::Index i = 0; i < groups.n(); ++i) {
      if (y[i] != 0.0) g += y[i] * groups.Gradient(i, z);
    }
    return g;
  };
  for (int it = 0; it < 100; ++it) {
    const Vector g = gradient(x);
    if (g.norm() < 1e-15) break;
    Matrix hess = reg * Matrix::Identity(groups.p(), groups.p());
    for (Eigen::Index i = 0; i < groups.n(); ++i) {
      if (y[i] != 0.0) hess += y[i] * groups.Hessian(i, x);
    }
    const Vector dx = -hess.ldlt().solve(g);
    const double v0 = value(x);
    double t = 1.0;
    while (t > 1e-12 && value(x + t * dx) > v0 + 1e-4 * t * g.dot(dx)) {
      t *= 0.5;
    }
    const Vector next = x + t * dx;
    if (next == x) break;
    x = next;
  }
  const Vector g = gradient(x);
  return value(x) - g.squaredNorm() / (2.0 * reg);
}

}  // namespace

KnownOptimum GameGridOracle(const CompositeProblem& game) {
  const Eigen::Index p = game.dimension_p;
  const Eigen::Index n = game.dimension_n;
  if (p > 3 || n > 3) {
    throw InvalidInputError("game grid oracle supports p, n <= 3");
  }
  KnownOptimum opt;
  opt.x = ZoomSimplexMinimize(
      p, [&](const Vector& x) { return EvaluatePrimal(game, x); }, 1e-3,
      1e-12);
  opt.value = EvaluatePrimal(game, opt.x);
  DualOracle inner;
  inner.tolerance = 1e-12;
  opt.y = ZoomSimplexMinimize(
      n, [&](const Vector& y) { return DualValue(game, y, inner).value; }, 2e-2,
      1e-9);
  const double dual = DualValue(game, opt.y, inner).value;
  opt.accuracy = std::max(opt.value + dual, 0.0) + 1e-12;
  opt.method = "grid";
  return opt;
}

KnownOptimum LogisticKktOracle(const std::vector<Dataset>& datasets,
                               double reg) {
  if (datasets.empty()) throw InvalidInputError("no datasets given");
  if (!(reg > 0.0)) {
    throw InvalidInputError("reference solver needs reg > 0");
  }
  const LogisticGroups groups(datasets);
  const Eigen::Index p = groups.p();
  const Eigen::Index n = groups.n();
  auto all_values = [&](const Vector& x) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = groups.Value(i, x);
    return v;
  };

  // Barrier method on min t + (reg/2)||x||^2 s.t. g_i(x) <= t.
  Vector x = Vector::Zero(p);
  double t = all_values(x).maxCoeff() + 1.0;
  double s = 1.0;
  auto barrier = [&](const Vector& z, double tz) {
    const Vector g = all_values(z);
    double v = s * (tz + 0.5 * reg * z.squaredNorm());
    for (Eigen::Index i = 0; i < n; ++i) {
      const double slack = tz - g[i];
      if (!(slack > 0.0)) return kInfinity;
      v -= std::log(slack);
    }
    return v;
  };
  while (double(n) / s > 1e-10) {
    for (int it = 0; it < 200; ++it) {
      const Vector g = all_values(x);
      Vector grad = Vector::Zero(p + 1);
      Matrix hess = Matrix::Zero(p + 1, p + 1);
      grad.head(p) = s * reg * x;
      grad[p] = s;
      hess.topLeftCorner(p, p) = s * reg * Matrix::Identity(p, p);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double inv = 1.0 / (t - g[i]);
        Vector a(p + 1);
        a.head(p) = groups.Gradient(i, x);
        a[p] = -1.0;
        grad += inv * a;
        hess += inv * inv * a * a.transpose();
        hess.topLeftCorner(p, p) += inv * groups.Hessian(i, x);
      }
      const Vector dz = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(dz);
      if (decrement < 1e-20) break;
      const double f0 = barrier(x, t);
      double step = 1.0;
      while (step > 1e-14 && !(barrier(x + step * dz.head(p), t + step * dz[p]) <=
                               f0 - 0.25 * step * decrement)) {
        step *= 0.5;
      }
      x += step * dz.head(p);
      t += step * dz[p];
    }
    s *= 10.0;
  }
  s /= 10.0;
  Vector y(n);
  {
    const Vector g = all_values(x);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = 1.0 / (s * (t - g[i]));
    y /= y.sum();
  }

  // Newton on the KKT system restricted to the apparent active set.
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] > 1e-6) active.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(active.size());
  Vector xk = x;
  double tk = t;
  Vector yk(m);
  for (Eigen::Index a = 0; a < m; ++a) yk[a] = y[active[a]];
  for (int it = 0; it < 50; ++it) {
    const Eigen::Index dim = p + 1 + m;
    Vector residual(dim);
    Matrix jac = Matrix::Zero(dim, dim);
    residual.head(p) = reg * xk;
    jac.topLeftCorner(p, p) = reg * Matrix::Identity(p, p);
    double ysum = 0.0;
    for (Eigen::Index a = 0; a < m; ++a) {
      const Eigen::Index i = active[a];
      const Vector grad = groups.Gradient(i, xk);
      residual.head(p) += yk[a] * grad;
      jac.topLeftCorner(p, p) += yk[a] * groups.Hessian(i, xk);
      jac.block(0, p + 1 + a, p, 1) = grad;
      residual[p + a] = groups.Value(i, xk) - tk;
      jac.block(p + a, 0, 1, p) = grad.transpose();
      jac(p + a, p) = -1.0;
      ysum += yk[a];
      jac(p + m, p + 1 + a) = 1.0;
    }
    // Rows: p stationarity, m active constraints, 1 multiplier sum.
    Vector r(dim);
    r.head(p + m) = residual.head(p + m);
    r[p + m] = ysum - 1.0;
    if (r.lpNorm<Eigen::Infinity>() < 1e-15) break;
    // Column p is t, columns p+1.. are the multipliers.
    const Vector delta = jac.fullPivLu().solve(-r);
    if (!delta.allFinite()) break;
    xk += delta.head(p);
    tk += delta[p];
    yk += delta.tail(m);
  }
  Vector y_polished = Vector::Zero(n);
  for (Eigen::Index a = 0; a < m; ++a) y_polished[active[a]] = yk[a];

  auto primal = [&](const Vector& z) {
    return 0.5 * reg * z.squaredNorm() + all_values(z).maxCoeff();
  };
  KnownOptimum opt;
  opt.method = "kkt";
  const bool polished_ok = xk.allFinite() && y_polished.minCoeff() >= 0.0;
  const Vector& x_best = polished_ok && primal(xk) <= primal(x) ? xk : x;
  const Vector& y_best = polished_ok ? y_polished : y;
  opt.x = x_best;
  opt.y = y_best;
  opt.value = primal(x_best);
  const double lower = LagrangianLowerBound(groups, reg, y_best, x_best);
  opt.accuracy = std::max(opt.value - lower, 0.0) + 1e-14;
  return opt;
}

std::optional<KnownOptimum> ConeQpKktOracle(const Matrix& Q, const Vector& q,
                                            const Matrix& K,
                                            const Vector& bvec, Cone cone) {
  const Eigen::Index p = Q.rows();
  const Eigen::Index m = K.rows();
  auto objective = [&](const Vector& x) { return 0.5 * x.dot(Q * x) + q.dot(x); };
  auto solve_active = [&](const std::vector<Eigen::Index>& rows,
                          Vector& x, Vector& y) {
    const auto k = static_cast<Eigen::Index>(rows.size());
    Matrix kkt = Matrix::Zero(p + k, p + k);
    Vector rhs(p + k);
    kkt.topLeftCorner(p, p) = Q;
    rhs.head(p) = -q;
    for (Eigen::Index a = 0; a < k; ++a) {
      kkt.block(0, p + a, p, 1) = K.row(rows[a]).transpose();
      kkt.block(p + a, 0, 1, p) = K.row(rows[a]);
      rhs[p + a] = bvec[rows[a]];
    }
    Eigen::FullPivLU<Matrix> lu(kkt);
    const Vector sol = lu.solve(rhs);
    if (!sol.allFinite() || (kkt * sol - rhs).norm() >
                                1e-10 * std::max(1.0, rhs.norm())) {
      return false;
    }
    x = sol.head(p);
    y = Vector::Zero(m);
    for (Eigen::Index a = 0; a < k; ++a) y[rows[a]] = sol[p + a];
    return true;
  };

  KnownOptimum opt;
  opt.method = "kkt";
  opt.accuracy = 1e-12;
  switch (cone) {
    case Cone::kSecondOrder:
      return std::nullopt;
    case Cone::kFree:
    case Cone::kZero: {
      std::vector<Eigen::Index> rows;
      if (cone == Cone::kZero) {
        for (Eigen::Index i = 0; i < m; ++i) rows.push_back(i);
      }
      if (!solve_active(rows, opt.x, opt.y)) return std::nullopt;
      opt.value = objective(opt.x);
      return opt;
    }
    case Cone::kNonnegativeOrthant: {
      if (m > 20) return std::nullopt;
      bool found = false;
      for (unsigned long mask = 0; mask < (1ul << m); ++mask) {
        std::vector<Eigen::Index> rows;
        for (Eigen::Index i = 0; i < m; ++i) {
          if (mask & (1ul << i)) rows.push_back(i);
        }
        Vector x, y;
        if (!solve_active(rows, x, y)) continue;
        if (y.size() > 0 && y.minCoeff() < -1e-12) continue;
        if ((K * x - bvec).maxCoeff() > 1e-12) continue;
        const double value = objective(x);
        if (!found || value < opt.value) {
          found = true;
          opt.x = x;
          opt.y = y;
          opt.value = value;
        }
      }
      if (!found) return std::nullopt;
      return opt;
    }
  }
  return std::nullopt;
}

}  // namespace pdcomp
