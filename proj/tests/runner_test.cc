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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"

namespace pdcomp {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("pdcomp_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string ConfigErrorKey(const std::string& text) {
  try {
    ParseConfig(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

TEST(ParseConfig, DefaultsFilled) {
  const RunConfig c =
      ParseConfig(R"({"instance":"toy","variant":"thm1","max_iters":100})");
  EXPECT_EQ(c.instance, "toy");
  EXPECT_EQ(c.variant, Variant::kErgodicConvex);
  EXPECT_EQ(c.max_iters, 100u);
  EXPECT_EQ(c.rho0, 1.0);
  EXPECT_EQ(c.gamma, 0.5);
  EXPECT_FALSE(c.certificate);
  EXPECT_FALSE(c.trace_path.has_value());
  EXPECT_EQ(ParseConfig(R"({"instance":"toy","variant":"thm3"})").max_iters,
            10000u);
}

TEST(ParseConfig, OptionalKeys) {
  const RunConfig c = ParseConfig(
      R"({"instance":"classification","variant":"thm4","rho0":1e-5,)"
      R"("gamma":0.25,"seed":3,"trace_path":"t.csv","certificate":true,)"
      R"("reg":0.1,"metrics_every":10,"timing":false,"D_bound":4})");
  EXPECT_EQ(c.variant, Variant::kSemiErgodicStronglyConvex);
  EXPECT_EQ(c.rho0, 1e-5);
  EXPECT_EQ(c.gamma, 0.25);
  EXPECT_EQ(*c.seed, 3u);
  EXPECT_EQ(*c.trace_path, "t.csv");
  EXPECT_TRUE(c.certificate);
  EXPECT_EQ(*c.reg, 0.1);
  EXPECT_EQ(c.metrics_every, 10u);
  EXPECT_FALSE(c.timing);
  EXPECT_EQ(*c.D_bound, 4.0);
}

TEST(ParseConfig, Errors) {
  EXPECT_EQ(ConfigErrorKey(R"({"instance":"toy","varaint":"thm1"})"),
            "varaint");
  EXPECT_EQ(ConfigErrorKey(R"({"variant":"thm1"})"), "instance");
  EXPECT_EQ(ConfigErrorKey(R"({"instance":"toy"})"), "variant");
  EXPECT_EQ(ConfigErrorKey(R"({"instance":"toy","variant":"thm1",)"
                           R"("max_iters":"ten"})"),
            "max_iters");
  EXPECT_EQ(ConfigErrorKey(R"({"instance":"toy","variant":"thm1",)"
                           R"("max_iters":0})"),
            "max_iters");
  EXPECT_EQ(ConfigErrorKey(R"({"instance":"toy","variant":"thm9"})"),
            "variant");
  EXPECT_THROW(ParseConfig("[1, 2]"), ConfigError);
  EXPECT_THROW(ParseConfig("{not json"), ConfigError);
}

TEST(RunExperiment, Thm4RhoBoundOnGame) {
  RunConfig c = ParseConfig(
      R"({"instance":"game","variant":"thm4","rho0":100,"max_iters":10})");
  const ExperimentOutcome out = RunExperiment(c);
  EXPECT_EQ(out.exit_code, 1);
  EXPECT_EQ(out.run.status, RunStatus::kPreconditionFailed);
}

TEST(RunExperiment, Thm4RhoBoundOnClassification) {
  RunConfig c = ParseConfig(
      R"({"instance":"classification","variant":"thm4","rho0":100,)"
      R"("max_iters":10})");
  const ExperimentOutcome out = RunExperiment(c);
  EXPECT_EQ(out.exit_code, 1);
  EXPECT_NE(out.summary.find("rho0"), std::string::npos);
}

TEST(RunExperiment, ToyCertificate) {
  RunConfig c = ParseConfig(
      R"({"instance":"toy","variant":"thm1","max_iters":10000,)"
      R"("certificate":true})");
  const ExperimentOutcome out = RunExperiment(c);
  EXPECT_EQ(out.exit_code, 0);
  EXPECT_TRUE(out.certificate.available);
  EXPECT_TRUE(out.certificate.pass);
  EXPECT_NE(out.summary.find("certificate=pass"), std::string::npos);
}

TEST(WriteTrace, HeaderRowsAndEmptyFields) {
  std::vector<TraceRecord> rows(3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].k = i;
    rows[i].tau = 1.0;
    rows[i].primal_residual = 0.5 / (i + 1.0);
  }
  std::ostringstream out;
  WriteTrace(rows, out);
  std::istringstream in(out.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0],
            "k,tau,rho,eta,L,beta,primal_residual,dual_residual,pd_gap,"
            "feasibility,theorem_bound,wall_time_ms");
  EXPECT_EQ(lines[1], "0,1,0,0,0,0,0.5,,,,,0");
  EXPECT_NE(lines[2].find("0.25,,,"), std::string::npos);
}

TEST(WriteTrace, UnwritablePath) {
  EXPECT_THROW(WriteTrace({}, "/nonexistent-dir/trace.csv"), IoError);
}

TEST(WriteTrace, RerunIsByteIdentical) {
  const fs::path dir = Scratch("rerun");
  const std::string a = (dir / "a.csv").string();
  const std::string b = (dir / "b.csv").string();
  for (const std::string& path : {a, b}) {
    RunConfig c = ParseConfig(
        R"({"instance":"game","variant":"thm3","max_iters":200,)"
        R"("metrics_every":50,"timing":false})");
    c.trace_path = path;
    EXPECT_EQ(RunExperiment(c).exit_code, 0);
  }
  const std::string text = Slurp(a);
  EXPECT_EQ(text, Slurp(b));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 202);
}

TEST(CheckCertificate, Excess) {
  std::vector<TraceRecord> rows(2);
  rows[0].primal_residual = 1.0;
  rows[1].primal_residual = 0.3;
  rows[1].theorem_bound = 0.2;
  CertificateResult r = CheckCertificate(rows, 0.01);
  EXPECT_TRUE(r.available);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.worst_excess, 0.08, 1e-15);
  r = CheckCertificate(rows, 0.06);
  EXPECT_TRUE(r.pass);
  rows[1].theorem_bound.reset();
  EXPECT_FALSE(CheckCertificate(rows, 0.0).available);
}

#ifdef PDCOMP_CLI_PATH
int Cli(const std::string& args) {
  const std::string cmd =
      std::string(PDCOMP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  const fs::path dir = Scratch("cli");
  WriteFile(dir / "ok.json",
            R"({"instance":"toy","variant":"thm1","max_iters":10000,)"
            R"("certificate":true})");
  WriteFile(dir / "mu.json",
            R"({"instance":"toy","variant":"thm2","max_iters":10})");
  WriteFile(dir / "nan.json",
            R"({"instance":"fault_nan","variant":"thm1","max_iters":10})");
  WriteFile(dir / "typo.json", R"({"instance":"toy","varaint":"thm1"})");
  EXPECT_EQ(Cli("solve " + (dir / "ok.json").string()), 0);
  EXPECT_EQ(Cli("solve " + (dir / "mu.json").string()), 1);
  EXPECT_EQ(Cli("solve " + (dir / "nan.json").string()), 2);
  EXPECT_EQ(Cli("solve " + (dir / "typo.json").string()), 1);
  EXPECT_EQ(Cli("solve " + (dir / "missing.json").string()), 1);
  EXPECT_EQ(Cli("batch " + dir.string()), 2);
}

TEST(Cli, BatchWritesEveryTrace) {
  const fs::path dir = Scratch("batch");
  for (const char* v : {"thm1", "thm3"}) {
    WriteFile(dir / (std::string(v) + ".json"),
              std::string(R"({"instance":"game","max_iters":100,"variant":")") +
                  v + R"(","timing":false,"trace_path":")" +
                  (dir / (std::string(v) + ".csv")).string() + R"("})");
  }
  EXPECT_EQ(Cli("batch -j 2 " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "thm1.csv"));
  EXPECT_TRUE(fs::exists(dir / "thm3.csv"));
}
#endif

}  // namespace
}  // namespace pdcomp
