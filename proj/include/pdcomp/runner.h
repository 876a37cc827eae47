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

#ifndef PDCOMP_RUNNER_H_
#define PDCOMP_RUNNER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pdcomp/core.h"
#include "pdcomp/metrics.h"
#include "pdcomp/schedule.h"
#include "pdcomp/solver.h"

namespace pdcomp {

// Invalid configuration; key() names the offending key when there is one.
class ConfigError : public InvalidInputError {
 public:
  ConfigError(const std::string& what, std::string key)
      : InvalidInputError(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Raised when a trace cannot be written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
  std::string instance;
  Variant variant = Variant::kErgodicConvex;
  double rho0 = kDefaultRho0;
  double gamma = kDefaultGamma;
  std::size_t max_iters = 10000;
  // Overrides the instance's data seed when set.
  std::optional<std::uint64_t> seed;
  std::optional<std::string> trace_path;
  bool certificate = false;
  // Optional instance parameters.
  std::optional<double> reg;
  std::vector<std::string> datasets;
  std::optional<double> D_bound;
  // Stride for dual residual and gap columns (0 disables them).
  std::size_t metrics_every = 0;
  // When false, wall_time_ms is written as 0 so traces are byte-identical.
  bool timing = true;
};

// Parses a JSON object. Required: instance, variant. Unknown keys, missing
// required keys and type mismatches raise ConfigError naming the key.
RunConfig ParseConfig(std::string_view text);
RunConfig LoadConfig(const std::string& path);

inline constexpr std::string_view kTraceHeader =
    "k,tau,rho,eta,L,beta,primal_residual,dual_residual,pd_gap,feasibility,"
    "theorem_bound,wall_time_ms";

void WriteTrace(const std::vector<TraceRecord>& records, std::ostream& out);
// Throws IoError when the file cannot be written.
void WriteTrace(const std::vector<TraceRecord>& records,
                const std::string& path);

struct CertificateResult {
  bool available = false;
  bool pass = false;
  std::size_t violations = 0;
  // Largest residual - bound - 2 * oracle accuracy over the trace.
  double worst_excess = -kInfinity;
};

// Checks the reported residual against theorem_bound on every row with
// both values, allowing twice the oracle accuracy.
CertificateResult CheckCertificate(const std::vector<TraceRecord>& trace,
                                   double oracle_accuracy);

struct ExperimentOutcome {
  int exit_code = 0;
  RunResult run;
  std::optional<double> slope;
  CertificateResult certificate;
  std::string summary;
};

// Builds the instance, runs the solver, writes the trace and composes the
// one-line summary. Exit codes: 0 success, 1 invalid configuration or
// failed precondition, 2 numerical failure or I/O error.
ExperimentOutcome RunExperiment(const RunConfig& config);

// CLI entry points; messages go to `out` and `err`.
int SolveCommand(const std::string& config_path, std::ostream& out,
                 std::ostream& err);
// Runs every *.json in `dir` (sorted by name) on up to `jobs` threads.
// Returns the largest exit code.
int BatchCommand(const std::string& dir, unsigned jobs, std::ostream& out,
                 std::ostream& err);
int CheckCommand(std::ostream& out);

}  // namespace pdcomp

#endif  // PDCOMP_RUNNER_H_
