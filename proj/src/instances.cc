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

#include "pdcomp/instances.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <utility>

#include "Eigen/Dense"

namespace pdcomp {
namespace {

constexpr double kSimplexTolerance = 1e-9;

// log(1 + exp(u)) without overflow.
double Softplus(double u) {
  return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

double Sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

bool InSimplex(const Vector& v) {
  return v.minCoeff() >= -kSimplexTolerance &&
         std::abs(v.sum() - 1.0) <= kSimplexTolerance;
}

Vector SampleSimplex(Rng& rng, Eigen::Index n) {
  std::exponential_distribution<double> exponential(1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = exponential(rng);
  return v / v.sum();
}

Vector SampleGaussian(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

// H(u) = max_i u_i with H* the simplex indicator.
ProxTerm MaxCoordinates() {
  ProxTerm H;
  H.value = [](const Vector& u) { return u.maxCoeff(); };
  H.prox = ProxMaxCoords;
  H.lipschitz = 1.0;
  H.conjugate_value = [](const Vector& y) {
    return InSimplex(y) ? 0.0 : kInfinity;
  };
  return H;
}

ProxTerm ZeroFunction() {
  ProxTerm h;
  h.value = [](const Vector&) { return 0.0; };
  h.prox = [](const Vector& v, double) { return v; };
  h.lipschitz = 0.0;
  return h;
}

SmoothTerm ZeroSmooth() {
  SmoothTerm f;
  f.value = [](const Vector&) { return 0.0; };
  f.gradient = [](const Vector& x) { return Vector::Zero(x.size()); };
  return f;
}

double ParseDouble(std::string_view token, std::size_t line,
                   const char* what) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  // LIBSVM files commonly write positive labels as "+1".
  if (end - begin > 1 && begin[0] == '+' && begin[1] != '-') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError("malformed " + std::string(what) + " '" +
                         std::string(token) + "'",
                     line);
  }
  return value;
}

}  // namespace

Dataset ParseLibsvm(std::istream& in) {
  struct Row {
    double label;
    std::vector<std::pair<long, double>> entries;
  };
  std::vector<Row> rows;
  long max_index = 0;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    std::istringstream tokens(text);
    std::string token;
    if (!(tokens >> token)) continue;
    Row row;
    row.label = ParseDouble(token, line, "label");
    long previous = 0;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) {
        throw ParseError("malformed token '" + token + "'", line);
      }
      long index = 0;
      const std::string_view head(token.data(), colon);
      auto [ptr, ec] =
          std::from_chars(head.data(), head.data() + head.size(), index);
      if (ec != std::errc() || ptr != head.data() + head.size()) {
        throw ParseError("malformed index in '" + token + "'", line);
      }
      if (index < 1) {
        throw ParseError("index must be >= 1 in '" + token + "'", line);
      }
      if (index <= previous) {
        throw ParseError("indices must be ascending at '" + token + "'", line);
      }
      previous = index;
      const double value = ParseDouble(
          std::string_view(token).substr(colon + 1), line, "value");
      row.entries.emplace_back(index, value);
      max_index = std::max(max_index, index);
    }
    rows.push_back(std::move(row));
  }
  Dataset data;
  data.features = Matrix::Zero(static_cast<Eigen::Index>(rows.size()),
                               static_cast<Eigen::Index>(max_index));
  data.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    data.labels[i] = rows[r].label;
    for (const auto& [index, value] : rows[r].entries) {
      data.features(i, index - 1) = value;
    }
  }
  return data;
}

Dataset ReadLibsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open LIBSVM file '" + path + "'");
  return ParseLibsvm(in);
}

std::vector<Dataset> SynthData(int p, int n_groups, int N_per_group,
                               std::uint64_t seed) {
  if (p <= 0 || n_groups <= 0 || N_per_group <= 0) {
    throw InvalidInputError("synthetic data sizes must be positive");
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Vector rule = SampleGaussian(rng, p) / std::sqrt(double(p));
  std::vector<Dataset> groups;
  groups.reserve(static_cast<std::size_t>(n_groups));
  for (int gi = 0; gi < n_groups; ++gi) {
    // Means on distinct axes scaled so that any two are 3 apart; groups past
    // p are pushed further along the first axis.
    Vector mean = Vector::Zero(p);
    mean[gi % p] = 3.0 / std::sqrt(2.0);
    mean[0] += 3.0 * (gi / p);
    Dataset data;
    data.features.resize(N_per_group, p);
    data.labels.resize(N_per_group);
    for (int j = 0; j < N_per_group; ++j) {
      for (int c = 0; c < p; ++c) data.features(j, c) = mean[c] + normal(rng);
      const double score =
          rule.dot(data.features.row(j).transpose()) + 0.5 * normal(rng);
      data.labels[j] = score >= 0.0 ? 1.0 : -1.0;
    }
    groups.push_back(std::move(data));
  }
  return groups;
}

CompositeProblem BuildMultidistLogistic(const std::vector<Dataset>& datasets,
                                        double reg) {
  if (datasets.empty()) throw InvalidInputError("no datasets given");
  if (!(reg >= 0.0) || !std::isfinite(reg)) {
    throw InvalidInputError("regularization must be nonnegative");
  }
  const Eigen::Index p = datasets.front().features.cols();
  std::vector<Matrix> signed_rows;
  std::vector<double> M_gi, L_gi;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const Dataset& d = datasets[i];
    if (d.features.rows() == 0) {
      throw InvalidInputError("dataset " + std::to_string(i) + " is empty");
    }
    if (d.features.cols() != p || d.labels.size() != d.features.rows()) {
      throw InvalidInputError("dataset " + std::to_string(i) +
                              " has mismatched dimensions");
    }
    Matrix A = d.labels.asDiagonal() * d.features;
    const double N = static_cast<double>(A.rows());
    M_gi.push_back(A.rowwise().norm().maxCoeff());
    L_gi.push_back(A.squaredNorm() / (4.0 * N));
    signed_rows.push_back(std::move(A));
  }
  if (p == 0) throw InvalidInputError("datasets have no features");
  const auto n = static_cast<Eigen::Index>(datasets.size());

  CompositeProblem prob;
  prob.name = "classification";
  prob.dimension_p = p;
  prob.dimension_n = n;
  prob.f.value = [reg](const Vector& x) { return 0.5 * reg * x.squaredNorm(); };
  prob.f.gradient = [reg](const Vector& x) -> Vector { return reg * x; };
  prob.f.lipschitz = reg;
  prob.f.strong_convexity = reg;
  prob.h = ZeroFunction();
  prob.H = MaxCoordinates();
  prob.g.apply = [signed_rows, n](const Vector& x) {
    Vector out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Matrix& A = signed_rows[static_cast<std::size_t>(i)];
      const Vector u = (A * x).array() + 1.0;
      double sum = 0.0;
      for (Eigen::Index j = 0; j < u.size(); ++j) sum += Softplus(u[j]);
      out[i] = sum / static_cast<double>(A.rows());
    }
    return out;
  };
  prob.g.jacobian_transpose_apply = [signed_rows, n, p](const Vector& x,
                                                        const Vector& y) {
    Vector out = Vector::Zero(p);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (y[i] == 0.0) continue;
      const Matrix& A = signed_rows[static_cast<std::size_t>(i)];
      Vector s = (A * x).array() + 1.0;
      for (Eigen::Index j = 0; j < s.size(); ++j) s[j] = Sigmoid(s[j]);
      out += (y[i] / static_cast<double>(A.rows())) * (A.transpose() * s);
    }
    return out;
  };
  prob.g.component_lipschitz = M_gi;
  prob.g.component_gradient_lipschitz = L_gi;
  prob.sampler.primal = [p](Rng& rng) { return SampleGaussian(rng, p); };
  prob.sampler.dual = [n](Rng& rng) { return SampleSimplex(rng, n); };
  prob.default_x0 = Vector::Zero(p);
  prob.default_y0 = Vector::Constant(n, 1.0 / static_cast<double>(n));
  return FinalizeProblem(std::move(prob));
}

CompositeProblem BuildGame(const Matrix& A, const Vector& b) {
  const Eigen::Index p = A.cols();
  const Eigen::Index n = b.size();
  if (A.rows() == 0 || p == 0 || n == 0) {
    throw InvalidInputError("game needs a nonempty A and b");
  }
  if (n > p) throw InvalidInputError("game needs size(b) <= columns of A");
  if (!A.allFinite() || !b.allFinite()) {
    throw InvalidInputError("game data must be finite");
  }
  if (b.minCoeff() < 0.0) {
    throw InvalidInputError(
        "game needs b >= 0, otherwise <y, g(x)> is not convex");
  }
  const double N = static_cast<double>(A.rows());
  Eigen::JacobiSVD<Matrix> svd(A);
  const double spectral = svd.singularValues()[0];

  CompositeProblem prob;
  prob.name = "game";
  prob.dimension_p = p;
  prob.dimension_n = n;
  prob.f.value = [A, N](const Vector& x) {
    const Vector u = A * x;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < u.size(); ++j) sum += Softplus(u[j]);
    return sum / N;
  };
  prob.f.gradient = [A, N](const Vector& x) -> Vector {
    Vector s = A * x;
    for (Eigen::Index j = 0; j < s.size(); ++j) s[j] = Sigmoid(s[j]);
    return A.transpose() * s / N;
  };
  prob.f.lipschitz = spectral * spectral / (4.0 * N);
  prob.h.value = [](const Vector& x) { return InSimplex(x) ? 0.0 : kInfinity; };
  prob.h.prox = [](const Vector& v, double) { return ProjectSimplex(v); };
  prob.H = MaxCoordinates();
  prob.g.apply = [b, n](const Vector& x) {
    Vector out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      out[i] = x[i] > -1.0 ? b[i] / (1.0 + x[i]) : kInfinity;
    }
    return out;
  };
  prob.g.jacobian_transpose_apply = [b, n, p](const Vector& x,
                                              const Vector& y) {
    Vector out = Vector::Zero(p);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = 1.0 + x[i];
      out[i] = -b[i] * y[i] / (d * d);
    }
    return out;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    prob.g.component_lipschitz.push_back(b[i]);
    prob.g.component_gradient_lipschitz.push_back(2.0 * b[i]);
  }
  prob.g.bound = b.norm();
  prob.m_Fstar = 1.0;
  prob.sampler.primal = [p](Rng& rng) { return SampleSimplex(rng, p); };
  prob.sampler.dual = [n](Rng& rng) { return SampleSimplex(rng, n); };
  prob.default_x0 = Vector::Constant(p, 1.0 / static_cast<double>(p));
  prob.default_y0 = Vector::Constant(n, 1.0 / static_cast<double>(n));
  return FinalizeProblem(std::move(prob));
}

CompositeProblem BuildBilinearToy() {
  CompositeProblem prob;
  prob.name = "toy";
  prob.dimension_p = 1;
  prob.dimension_n = 1;
  prob.f = ZeroSmooth();
  prob.h = ZeroFunction();
  prob.H.value = [](const Vector& s) { return 0.5 * s.squaredNorm(); };
  prob.H.prox = [](const Vector& v, double lambda) -> Vector {
    return v / (1.0 + lambda);
  };
  prob.H.conjugate_value = [](const Vector& y) {
    return 0.5 * y.squaredNorm();
  };
  prob.H.subgradient = [](const Vector& s) { return s; };
  prob.g.apply = [](const Vector& x) { return x; };
  prob.g.jacobian_transpose_apply = [](const Vector&, const Vector& y) {
    return y;
  };
  prob.g.component_lipschitz = {1.0};
  prob.g.component_gradient_lipschitz = {0.0};
  prob.g.is_affine = true;
  prob.default_x0 = Vector::Ones(1);
  prob.default_y0 = Vector::Zero(1);
  KnownOptimum opt;
  opt.x = Vector::Zero(1);
  opt.y = Vector::Zero(1);
  opt.method = "analytic";
  prob.known_optimum = opt;
  return FinalizeProblem(std::move(prob));
}

CompositeProblem BuildMaxToy() {
  CompositeProblem prob;
  prob.name = "toy_max";
  prob.dimension_p = 1;
  prob.dimension_n = 2;
  prob.f = ZeroSmooth();
  prob.h = ZeroFunction();
  prob.H = MaxCoordinates();
  prob.g.apply = [](const Vector& x) {
    Vector out(2);
    out << x[0], -x[0];
    return out;
  };
  prob.g.jacobian_transpose_apply = [](const Vector&, const Vector& y) {
    Vector out(1);
    out[0] = y[0] - y[1];
    return out;
  };
  prob.g.component_lipschitz = {1.0, 1.0};
  prob.g.component_gradient_lipschitz = {0.0, 0.0};
  prob.g.is_affine = true;
  prob.sampler.dual = [](Rng& rng) { return SampleSimplex(rng, 2); };
  prob.default_x0 = Vector::Ones(1);
  prob.default_y0 = Vector::Constant(2, 0.5);
  KnownOptimum opt;
  opt.x = Vector::Zero(1);
  opt.y = Vector::Constant(2, 0.5);
  opt.method = "analytic";
  prob.known_optimum = opt;
  return FinalizeProblem(std::move(prob));
}

CompositeProblem BuildConeQP(const Matrix& Q, const Vector& q,
                             const Matrix& K, const Vector& bvec, Cone cone) {
  const Eigen::Index p = Q.rows();
  const Eigen::Index m = K.rows();
  if (p == 0 || Q.cols() != p || q.size() != p || K.cols() != p ||
      bvec.size() != m || m == 0) {
    throw InvalidInputError("cone QP data have inconsistent sizes");
  }
  if (!Q.allFinite() || !q.allFinite() || !K.allFinite() ||
      !bvec.allFinite()) {
    throw InvalidInputError("cone QP data must be finite");
  }
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, Q.cwiseAbs().maxCoeff())) {
    throw InvalidInputError("Q must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Q);
  const Vector lambda = eig.eigenvalues();
  if (lambda.minCoeff() < -1e-12 * std::max(1.0, lambda.cwiseAbs().maxCoeff())) {
    throw InvalidInputError("Q must be positive semidefinite");
  }

  CompositeProblem prob;
  prob.name = "cone_qp";
  prob.dimension_p = p;
  prob.dimension_n = m;
  prob.f.value = [Q, q](const Vector& x) {
    return 0.5 * x.dot(Q * x) + q.dot(x);
  };
  prob.f.gradient = [Q, q](const Vector& x) -> Vector { return Q * x + q; };
  prob.f.lipschitz = std::max(lambda.maxCoeff(), 0.0);
  prob.f.strong_convexity = std::max(lambda.minCoeff(), 0.0);
  prob.h = ZeroFunction();
  prob.H.value = [cone](const Vector& s) {
    return DistanceToCone(-s, cone) <= 1e-9 ? 0.0 : kInfinity;
  };
  prob.H.prox = [cone](const Vector& v, double) -> Vector {
    return -ProjectCone(-v, cone);
  };
  const Cone dual = DualCone(cone);
  prob.H.conjugate_value = [dual](const Vector& y) {
    return DistanceToCone(y, dual) <= 1e-9 ? 0.0 : kInfinity;
  };
  prob.g.apply = [K, bvec](const Vector& x) -> Vector { return K * x - bvec; };
  prob.g.jacobian_transpose_apply = [K](const Vector&, const Vector& y) {
    return Vector(K.transpose() * y);
  };
  for (Eigen::Index i = 0; i < m; ++i) {
    prob.g.component_lipschitz.push_back(K.row(i).norm());
    prob.g.component_gradient_lipschitz.push_back(0.0);
  }
  prob.g.is_affine = true;
  prob.cone = cone;
  prob.sampler.dual = [m, dual](Rng& rng) {
    return ProjectCone(SampleGaussian(rng, m), dual);
  };
  return FinalizeProblem(std::move(prob));
}

namespace {

CompositeProblem BuildFaultInstance() {
  CompositeProblem prob = BuildBilinearToy();
  prob.name = "fault_nan";
  prob.f.gradient = [](const Vector& x) {
    return Vector::Constant(x.size(), std::nan(""));
  };
  return prob;
}

struct GameData {
  Matrix A;
  Vector b;
};

GameData SynthGame(int p, int n, int N, std::uint64_t seed) {
  if (p <= 0 || n <= 0 || N <= 0) {
    throw InvalidInputError("game sizes must be positive");
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  GameData data;
  data.A.resize(N, p);
  for (int j = 0; j < N; ++j) {
    for (int c = 0; c < p; ++c) data.A(j, c) = normal(rng);
  }
  data.b.resize(n);
  for (int i = 0; i < n; ++i) data.b[i] = uniform(rng);
  return data;
}

std::string CacheKey(const InstanceSpec& spec) {
  std::ostringstream key;
  key.precision(17);
  key << spec.name << '|' << spec.p << '|' << spec.n << '|' << spec.N << '|'
      << spec.seed << '|' << spec.reg;
  for (const auto& path : spec.datasets) key << '|' << path;
  return key.str();
}

std::optional<KnownOptimum> CachedOptimum(
    const std::string& key,
    const std::function<std::optional<KnownOptimum>()>& compute) {
  static std::mutex mutex;
  static std::map<std::string, std::optional<KnownOptimum>> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  std::optional<KnownOptimum> value = compute();
  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(key, value);
  return value;
}

struct ConeQpData {
  Matrix Q, K;
  Vector q, b;
};

ConeQpData DefaultConeQp() {
  ConeQpData d;
  d.Q = Matrix::Identity(2, 2);
  d.q = Vector::Constant(2, -1.0);
  d.K = Matrix::Ones(1, 2);
  d.b = Vector::Ones(1);
  return d;
}

}  // namespace

std::vector<std::string> RegisteredInstances() {
  return {"toy", "toy_max", "game", "classification", "cone_qp", "fault_nan"};
}

InstanceSpec DefaultInstanceSpec(const std::string& name) {
  InstanceSpec spec;
  spec.name = name;
  if (name == "toy" || name == "fault_nan") {
    spec.p = spec.n = 1;
  } else if (name == "toy_max") {
    spec.p = 1;
    spec.n = 2;
  } else if (name == "game") {
    spec.p = 3;
    spec.n = 3;
    spec.N = 20;
    spec.seed = 11;
  } else if (name == "classification") {
    spec.p = 10;
    spec.n = 3;
    spec.N = 50;
    spec.seed = 7;
  } else if (name == "cone_qp") {
    spec.p = 2;
    spec.n = 1;
  } else {
    throw InvalidInputError("unknown instance '" + name + "'");
  }
  return spec;
}

CompositeProblem BuildInstance(const InstanceSpec& spec) {
  const std::string& name = spec.name;
  if (name == "toy") return BuildBilinearToy();
  if (name == "toy_max") return BuildMaxToy();
  if (name == "fault_nan") return BuildFaultInstance();
  if (name == "game") {
    const GameData data = SynthGame(spec.p, spec.n, spec.N, spec.seed);
    CompositeProblem prob = BuildGame(data.A, data.b);
    prob.known_optimum = CachedOptimum(CacheKey(spec), [&] {
      return std::optional<KnownOptimum>(GameGridOracle(prob));
    });
    return prob;
  }
  if (name == "classification") {
    std::vector<Dataset> datasets;
    if (spec.datasets.empty()) {
      datasets = SynthData(spec.p, spec.n, spec.N, spec.seed);
    } else {
      for (const auto& path : spec.datasets) {
        datasets.push_back(ReadLibsvm(path));
      }
      // Pad to a common feature dimension.
      Eigen::Index p = 0;
      for (const auto& d : datasets) p = std::max(p, d.features.cols());
      for (auto& d : datasets) {
        Matrix padded = Matrix::Zero(d.features.rows(), p);
        padded.leftCols(d.features.cols()) = d.features;
        d.features = std::move(padded);
      }
    }
    CompositeProblem prob = BuildMultidistLogistic(datasets, spec.reg);
    prob.known_optimum = CachedOptimum(CacheKey(spec), [&] {
      return std::optional<KnownOptimum>(LogisticKktOracle(datasets, spec.reg));
    });
    return prob;
  }
  if (name == "cone_qp") {
    const ConeQpData d = DefaultConeQp();
    CompositeProblem prob =
        BuildConeQP(d.Q, d.q, d.K, d.b, Cone::kNonnegativeOrthant);
    prob.known_optimum = ConeQpKktOracle(d.Q, d.q, d.K, d.b,
                                         Cone::kNonnegativeOrthant);
    return prob;
  }
  throw InvalidInputError("unknown instance '" + name + "'");
}

}  // namespace pdcomp
