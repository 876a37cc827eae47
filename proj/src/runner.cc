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

#include "pdcomp/runner.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "nlohmann/json.hpp"
#include "pdcomp/instances.h"
#include "pdcomp/invariants.h"

namespace pdcomp {
namespace {

using nlohmann::json;

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = {
      "instance", "variant",  "rho0",      "gamma",         "max_iters",
      "seed",     "trace_path", "certificate", "reg",        "datasets",
      "D_bound",  "metrics_every", "timing"};
  return keys;
}

[[noreturn]] void TypeError(const std::string& key, const char* expected) {
  throw ConfigError("config key '" + key + "' must be " + expected, key);
}

double GetNumber(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number()) TypeError(key, "a number");
  return v.get<double>();
}

std::uint64_t GetCount(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0)) {
    TypeError(key, "a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string GetString(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_string()) TypeError(key, "a string");
  return v.get<std::string>();
}

bool GetBool(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) TypeError(key, "a boolean");
  return v.get<bool>();
}

void AppendNumber(std::string& line, double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  line += buffer;
}

void AppendOptional(std::string& line, const std::optional<double>& value) {
  line += ',';
  if (value) AppendNumber(line, *value);
}

std::string Short(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

}  // namespace

RunConfig ParseConfig(std::string_view text) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what(), "");
  }
  if (!obj.is_object()) throw ConfigError("config must be a JSON object", "");
  for (const auto& [key, value] : obj.items()) {
    if (!KnownKeys().count(key)) {
      throw ConfigError("unknown config key '" + key + "'", key);
    }
  }
  for (const char* key : {"instance", "variant"}) {
    if (!obj.contains(key)) {
      throw ConfigError(std::string("missing required config key '") + key +
                            "'",
                        key);
    }
  }
  RunConfig config;
  config.instance = GetString(obj, "instance");
  try {
    DefaultInstanceSpec(config.instance);
  } catch (const InvalidInputError& e) {
    throw ConfigError(e.what(), "instance");
  }
  try {
    config.variant = ParseVariant(GetString(obj, "variant"));
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInputError& e) {
    throw ConfigError(e.what(), "variant");
  }
  if (obj.contains("rho0")) config.rho0 = GetNumber(obj, "rho0");
  if (obj.contains("gamma")) config.gamma = GetNumber(obj, "gamma");
  if (obj.contains("max_iters")) {
    config.max_iters = GetCount(obj, "max_iters");
    if (config.max_iters == 0) {
      throw ConfigError("config key 'max_iters' must be at least 1",
                        "max_iters");
    }
  }
  if (obj.contains("seed")) config.seed = GetCount(obj, "seed");
  if (obj.contains("trace_path")) config.trace_path = GetString(obj, "trace_path");
  if (obj.contains("certificate")) config.certificate = GetBool(obj, "certificate");
  if (obj.contains("reg")) config.reg = GetNumber(obj, "reg");
  if (obj.contains("datasets")) {
    const json& list = obj.at("datasets");
    if (!list.is_array()) TypeError("datasets", "an array of strings");
    for (const json& item : list) {
      if (!item.is_string()) TypeError("datasets", "an array of strings");
      config.datasets.push_back(item.get<std::string>());
    }
  }
  if (obj.contains("D_bound")) config.D_bound = GetNumber(obj, "D_bound");
  if (obj.contains("metrics_every")) {
    config.metrics_every = GetCount(obj, "metrics_every");
  }
  if (obj.contains("timing")) config.timing = GetBool(obj, "timing");

  if (!(config.rho0 > 0.0)) {
    throw ConfigError("config key 'rho0' must be positive", "rho0");
  }
  if (!(config.gamma > 0.0 && config.gamma < 1.0)) {
    throw ConfigError("config key 'gamma' must lie in (0, 1)", "gamma");
  }
  if (config.D_bound && !(*config.D_bound > 0.0)) {
    throw ConfigError("config key 'D_bound' must be positive", "D_bound");
  }
  if (config.reg && !(*config.reg > 0.0)) {
    throw ConfigError("config key 'reg' must be positive", "reg");
  }
  return config;
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'", "");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

void WriteTrace(const std::vector<TraceRecord>& records, std::ostream& out) {
  out << kTraceHeader << '\n';
  std::string line;
  for (const TraceRecord& r : records) {
    line.clear();
    line += std::to_string(r.k);
    for (double v : {r.tau, r.rho, r.eta, r.L, r.beta}) {
      line += ',';
      AppendNumber(line, v);
    }
    AppendOptional(line, r.primal_residual);
    AppendOptional(line, r.dual_residual);
    AppendOptional(line, r.pd_gap);
    AppendOptional(line, r.feasibility);
    AppendOptional(line, r.theorem_bound);
    line += ',';
    AppendNumber(line, r.wall_time_ms);
    out << line << '\n';
  }
}

void WriteTrace(const std::vector<TraceRecord>& records,
                const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open trace file '" + path + "'");
  WriteTrace(records, out);
  out.flush();
  if (!out) throw IoError("failed writing trace file '" + path + "'");
}

CertificateResult CheckCertificate(const std::vector<TraceRecord>& trace,
                                   double oracle_accuracy) {
  CertificateResult result;
  for (const TraceRecord& row : trace) {
    if (!row.primal_residual || !row.theorem_bound) continue;
    result.available = true;
    double measure = *row.primal_residual;
    if (row.feasibility) measure = std::max(measure, *row.feasibility);
    const double excess =
        measure - *row.theorem_bound - 2.0 * oracle_accuracy;
    result.worst_excess = std::max(result.worst_excess, excess);
    if (excess > 0.0) ++result.violations;
  }
  result.pass = result.available && result.violations == 0;
  return result;
}

ExperimentOutcome RunExperiment(const RunConfig& config) {
  ExperimentOutcome outcome;
  InstanceSpec spec = DefaultInstanceSpec(config.instance);
  if (config.seed) spec.seed = *config.seed;
  if (config.reg) spec.reg = *config.reg;
  spec.datasets = config.datasets;
  CompositeProblem prob = BuildInstance(spec);

  ScheduleParams params;
  params.variant = config.variant;
  params.rho0 = config.rho0;
  params.gamma = config.gamma;
  params.D_bound = config.D_bound;
  params.cone_mode = prob.cone.has_value();

  RunOptions options;
  options.max_iters = config.max_iters;
  options.trace.dual_every = config.metrics_every;
  options.trace.timing = config.timing;
  outcome.run =
      Run(prob, params, prob.default_x0, prob.default_y0, options);
  const RunResult& run = outcome.run;

  std::ostringstream summary;
  summary << "instance=" << prob.name << " variant=" << VariantName(config.variant)
          << " status=" << RunStatusName(run.status)
          << " iterations=" << run.iterations;
  if (run.status == RunStatus::kPreconditionFailed) {
    outcome.exit_code = 1;
    summary << " error=\"" << run.message << "\"";
    outcome.summary = summary.str();
    return outcome;
  }

  if (config.trace_path) {
    try {
      WriteTrace(run.trace, *config.trace_path);
    } catch (const IoError& e) {
      outcome.exit_code = 2;
      summary << " error=\"" << e.what() << "\"";
      outcome.summary = summary.str();
      return outcome;
    }
  }

  const TraceRecord& last = run.trace.back();
  if (last.primal_residual) {
    summary << " primal_residual=" << Short(*last.primal_residual);
  }
  if (last.feasibility) summary << " feasibility=" << Short(*last.feasibility);
  if (last.dual_residual) summary << " dual_residual=" << Short(*last.dual_residual);
  if (last.pd_gap) summary << " pd_gap=" << Short(*last.pd_gap);

  std::vector<std::pair<double, double>> series;
  for (const TraceRecord& row : run.trace) {
    if (row.k > 0 && row.primal_residual) {
      series.emplace_back(static_cast<double>(row.k), *row.primal_residual);
    }
  }
  const double k_end = static_cast<double>(run.iterations);
  try {
    outcome.slope = FitRateSlope(series, std::max(1.0, k_end / 100.0), k_end);
    summary << " slope=" << Short(*outcome.slope);
  } catch (const InvalidInputError&) {
    summary << " slope=n/a";
  }

  if (config.certificate) {
    const double accuracy =
        prob.known_optimum ? prob.known_optimum->accuracy : 0.0;
    outcome.certificate = CheckCertificate(run.trace, accuracy);
    if (!outcome.certificate.available) {
      summary << " certificate=unavailable";
    } else {
      summary << " certificate=" << (outcome.certificate.pass ? "pass" : "fail");
    }
  }
  for (const auto& warning : run.warnings) {
    summary << " warning=\"" << warning << "\"";
  }
  if (run.status == RunStatus::kDiverged) {
    outcome.exit_code = 2;
    summary << " error=\"" << run.message << "\"";
  }
  outcome.summary = summary.str();
  return outcome;
}

int SolveCommand(const std::string& config_path, std::ostream& out,
                 std::ostream& err) {
  RunConfig config;
  try {
    config = LoadConfig(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  }
  try {
    ExperimentOutcome outcome = RunExperiment(config);
    (outcome.exit_code == 0 ? out : err) << outcome.summary << '\n';
    return outcome.exit_code;
  } catch (const InvalidInputError& e) {
    err << "invalid input: " << e.what() << '\n';
    return 1;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int BatchCommand(const std::string& dir, unsigned jobs, std::ostream& out,
                 std::ostream& err) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    err << "not a directory: " << dir << '\n';
    return 1;
  }
  std::vector<std::string> configs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      configs.push_back(entry.path().string());
    }
  }
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) {
    err << "no *.json configs in " << dir << '\n';
    return 1;
  }
  // Each config writes its own trace; outputs are collected and printed in
  // name order.
  std::vector<std::string> outputs(configs.size());
  std::vector<std::string> errors(configs.size());
  std::vector<int> codes(configs.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      std::ostringstream o, e;
      codes[i] = SolveCommand(configs[i], o, e);
      outputs[i] = o.str();
      errors[i] = e.str();
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, configs.size()));
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  int worst = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    out << configs[i] << ": " << outputs[i];
    err << errors[i];
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

int CheckCommand(std::ostream& out) {
  bool all = true;
  for (const CheckResult& r : RunInvariantSuite()) {
    out << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.pass;
  }
  return all ? 0 : 2;
}

}  // namespace pdcomp
