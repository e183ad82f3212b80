//
// Copyright 2026 The DC-SGD Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dcsgd/cli.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dcsgd/accountant.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"

namespace dcsgd {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult RunDcsgd(std::vector<std::string> args) {
  args.insert(args.begin(), "dcsgd");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code =
      RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// key=value lines printed by account and calibrate.
std::map<std::string, double> ParseReport(const std::string& text) {
  std::map<std::string, double> values;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    values[line.substr(0, eq)] = std::strtod(line.c_str() + eq + 1, nullptr);
  }
  return values;
}

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("dcsgd_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(AccountCommandTest, MatchesLibraryExactly) {
  CliResult r = RunDcsgd({"account", "--q", "0.004267", "--sigma", "1.1",
                     "--steps", "2340", "--delta", "1.667e-5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  absl::StatusOr<DpGuarantee> dp = SgmEpsilon(0.004267, 1.1, 2340, 1.667e-5);
  ASSERT_TRUE(dp.ok());
  std::map<std::string, double> report = ParseReport(r.out);
  EXPECT_EQ(report["epsilon"], dp->epsilon);
  EXPECT_EQ(report["alpha"], dp->alpha);
}

TEST(AccountCommandTest, TuningCost) {
  CliResult r = RunDcsgd({"account", "--lt", "--eps1", "0.5", "--delta1", "1e-10",
                     "--gamma", "0.0056", "--delta2", "1e-20"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::map<std::string, double> report = ParseReport(r.out);
  const double runs = std::log(1e20) / 0.0056;
  const double radical = 3.0 * std::sqrt(2e-10);
  EXPECT_NEAR(report["T"], runs, 1e-12 * runs);
  EXPECT_NEAR(report["eps_prime"], 1.5 + radical, 1e-15);
  EXPECT_NEAR(report["delta_prime"], radical * runs + 1e-20, 1e-15);
}

TEST(AccountCommandTest, MissingFlagPrintsUsage) {
  CliResult r = RunDcsgd({"account", "--q", "0.01", "--sigma", "1.0"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_THAT(r.err, HasSubstr("--steps"));
  EXPECT_THAT(r.err, HasSubstr("Usage"));
}

TEST(AccountCommandTest, InvalidDomainIsUsageError) {
  CliResult r = RunDcsgd({"account", "--q", "2", "--sigma", "1", "--steps", "10",
                     "--delta", "1e-5"});
  EXPECT_EQ(r.code, kExitUsage);
}

TEST(CliTest, NoSubcommandIsUsageError) {
  EXPECT_EQ(RunDcsgd({}).code, kExitUsage);
  EXPECT_EQ(RunDcsgd({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(RunDcsgd({"--help"}).code, kExitOk);
  CliResult version = RunDcsgd({"--version"});
  EXPECT_EQ(version.code, kExitOk);
  EXPECT_THAT(version.out, HasSubstr(kVersion));
}

TEST(CalibrateCommandTest, NoiseSplitIdentity) {
  CliResult r = RunDcsgd({"calibrate", "--epsilon", "8", "--batch", "256", "--n",
                     "60000", "--epochs", "10"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::map<std::string, double> v = ParseReport(r.out);
  const double lhs = std::pow(v["sigma_T"], -2) + std::pow(v["sigma_H"], -2);
  const double rhs = std::pow(v["sigma"], -2);
  EXPECT_NEAR(lhs, rhs, 1e-12 * rhs);
  EXPECT_EQ(v["sigma_H"], AutoSigmaH(v["sigma"]));
}

TEST(CalibrateCommandTest, HugeHistogramNoiseLeavesGradientNoise) {
  CliResult r = RunDcsgd({"calibrate", "--epsilon", "8", "--batch", "256", "--n",
                     "60000", "--epochs", "10", "--sigma-h", "1e9"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::map<std::string, double> v = ParseReport(r.out);
  EXPECT_NEAR(v["sigma_T"], v["sigma"], 1e-6);
}

TEST(CalibrateCommandTest, HistogramNoiseBelowTotalIsInfeasible) {
  EXPECT_EQ(RunDcsgd({"calibrate", "--epsilon", "8", "--batch", "256", "--n",
                 "60000", "--epochs", "10", "--sigma-h", "0.2"})
                .code,
            kExitInfeasible);
  EXPECT_EQ(RunDcsgd({"calibrate", "--epsilon", "0.001", "--q", "0.5", "--steps",
                 "10000", "--delta", "1e-5"})
                .code,
            kExitInfeasible);
}

TEST(CalibrateCommandTest, MissingScheduleIsUsageError) {
  EXPECT_EQ(RunDcsgd({"calibrate", "--epsilon", "8", "--q", "0.01"}).code,
            kExitUsage);
}

TEST(SimulateNormsCommandTest, PercentileSweepWritesNineFiles) {
  const fs::path dir = FreshDir("fig2");
  CliResult r = RunDcsgd({"simulate-norms", "--out-dir", dir.string(), "--seed",
                     "4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    ++files;
    const std::string text = ReadFile(entry.path());
    EXPECT_THAT(text, ::testing::StartsWith("p,estimated,exact\n"));
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 10);
  }
  EXPECT_EQ(files, 9);
  EXPECT_TRUE(fs::exists(dir / "percentile_b20_sh5.csv"));
}

TEST(SimulateNormsCommandTest, DeterministicUnderSeed) {
  const fs::path a = FreshDir("seed_a");
  const fs::path b = FreshDir("seed_b");
  for (const fs::path& dir : {a, b}) {
    ASSERT_EQ(RunDcsgd({"simulate-norms", "--mode", "error", "--out-dir",
                   dir.string(), "--seed", "9", "--write-histograms"})
                  .code,
              kExitOk);
  }
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(ReadFile(entry.path()), ReadFile(b / entry.path().filename()));
  }
}

TEST(SimulateNormsCommandTest, ErrorSweepColumns) {
  const fs::path dir = FreshDir("fig3");
  CliResult r = RunDcsgd({"simulate-norms", "--mode", "error", "--out-dir",
                     dir.string(), "--bins", "20", "--sigma-h", "5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string text = ReadFile(dir / "error_b20_sh5.csv");
  EXPECT_THAT(text, ::testing::StartsWith(
                        "C,variance,bias,total,exact_bias,exact_total\n"));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 240);
}

TEST(SimulateNormsCommandTest, SingleConstantNorm) {
  const fs::path dir = FreshDir("const");
  CliResult r = RunDcsgd({"simulate-norms", "--dist", "constant", "--c", "5",
                     "--n", "1", "--bins", "10", "--sigma-h", "0",
                     "--out-dir", dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(ReadFile(dir / "percentile_b10_sh0.csv"));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const size_t c1 = line.find(',');
    const size_t c2 = line.find(',', c1 + 1);
    EXPECT_EQ(std::stod(line.substr(c1 + 1, c2 - c1 - 1)), 7.5);
    EXPECT_EQ(std::stod(line.substr(c2 + 1)), 5.0);
  }
  EXPECT_EQ(rows, 9);
}

TEST(SimulateNormsCommandTest, InvalidGridIsUsageError) {
  const fs::path dir = FreshDir("invalid");
  const std::vector<std::vector<std::string>> cases = {
      {"--bins", "1"},
      {"--sigma-h", "-1"},
      {"--p", "1.5"},
      {"--p", "0.5,0"},
      {"--mode", "other"},
      {"--mode", "error", "--c-step", "0"},
  };
  for (std::vector<std::string> args : cases) {
    args.insert(args.begin(), {"simulate-norms", "--out-dir", dir.string()});
    EXPECT_EQ(RunDcsgd(args).code, kExitUsage) << args[3];
  }
  EXPECT_TRUE(fs::is_empty(dir));
}

class TrainCommandTest : public ::testing::Test {
 protected:
  CliResult Train(const std::string& name, std::vector<std::string> extra) {
    dir_ = FreshDir(name);
    std::vector<std::string> args = {
        "train",       "--blobs-n", "2000", "--epochs", "2", "--batch", "64",
        "--seed",      "5",         "--metrics", (dir_ / "m.csv").string(),
        "--summary", (dir_ / "s.json").string()};
    args.insert(args.end(), extra.begin(), extra.end());
    return RunDcsgd(args);
  }
  nlohmann::json Summary() {
    return nlohmann::json::parse(ReadFile(dir_ / "s.json"));
  }
  std::vector<double> ClipColumn() {
    std::istringstream in(ReadFile(dir_ / "m.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line,
              "t,C_t,R_t,batch_size,train_loss,variance_term,bias_term,"
              "eps_spent");
    std::vector<double> clips;
    while (std::getline(in, line)) {
      const size_t c1 = line.find(',');
      clips.push_back(std::stod(line.substr(c1 + 1)));
    }
    return clips;
  }

  fs::path dir_;
};

TEST_F(TrainCommandTest, StaticAndExpectedErrorSpendTheSameEpsilon) {
  ASSERT_EQ(Train("static", {"--strategy", "static", "--C", "1"}).code,
            kExitOk);
  const nlohmann::json s = Summary();
  ASSERT_EQ(Train("error", {"--strategy", "expected-error"}).code, kExitOk);
  const nlohmann::json e = Summary();
  EXPECT_EQ(s["epsilon"].get<double>(), e["epsilon"].get<double>());
  EXPECT_EQ(s["sigma"].get<double>(), e["sigma"].get<double>());
  EXPECT_TRUE(s["sigma_H"].is_null());
  EXPECT_GT(e["sigma_H"].get<double>(), e["sigma"].get<double>());
}

TEST_F(TrainCommandTest, SummaryKeysAndEcho) {
  CliResult r = Train("keys", {"--strategy", "percentile", "--p", "0.7"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(r.out, HasSubstr("final_accuracy="));
  const nlohmann::json s = Summary();
  for (const char* key : {"strategy", "seed", "final_accuracy", "epsilon",
                          "delta", "sigma", "sigma_H", "sigma_T",
                          "config_echo"}) {
    EXPECT_TRUE(s.contains(key)) << key;
  }
  EXPECT_EQ(s["strategy"], "percentile");
  EXPECT_EQ(s["seed"], 5);
  EXPECT_EQ(s["delta"].get<double>(), 1.0 / 1600.0);
  const nlohmann::json& echo = s["config_echo"];
  EXPECT_EQ(echo["p"].get<double>(), 0.7);
  EXPECT_EQ(echo["epochs"], 2);
  EXPECT_EQ(echo["provenance"]["version"], kVersion);
  EXPECT_TRUE(echo["provenance"]["config_file"].is_null());
}

TEST_F(TrainCommandTest, PercentileThresholdMoves) {
  ASSERT_EQ(Train("pct", {"--strategy", "percentile", "--p", "0.7"}).code,
            kExitOk);
  const std::vector<double> clips = ClipColumn();
  ASSERT_GT(clips.size(), 2u);
  EXPECT_NE(*std::min_element(clips.begin(), clips.end()),
            *std::max_element(clips.begin(), clips.end()));
}

TEST_F(TrainCommandTest, UnknownStrategyListsValidSet) {
  CliResult r = Train("bad", {"--strategy", "adaptive"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_THAT(r.err, HasSubstr("static"));
  EXPECT_THAT(r.err, HasSubstr("percentile"));
  EXPECT_THAT(r.err, HasSubstr("expected-error"));
}

TEST_F(TrainCommandTest, DataErrorsExitFour) {
  EXPECT_EQ(Train("nofile", {"--csv", "/nonexistent.csv"}).code,
            kExitDataError);
  const fs::path csv = FreshDir("csvdir") / "bad.csv";
  std::ofstream(csv) << "a,b\n1,2\n";
  CliResult r = Train("nolabel", {"--csv", csv.string()});
  EXPECT_EQ(r.code, kExitDataError);
  EXPECT_THAT(r.err, HasSubstr("'label'"));
}

TEST_F(TrainCommandTest, InfeasibleBudgetExitsThree) {
  EXPECT_EQ(Train("infeasible", {"--epsilon", "1e-4"}).code, kExitInfeasible);
  EXPECT_EQ(Train("lowsh", {"--sigma-h", "0.1"}).code, kExitInfeasible);
}

TEST_F(TrainCommandTest, ConfigFileWithFlagOverride) {
  const fs::path cfg = FreshDir("cfgdir") / "run.ini";
  std::ofstream(cfg) << "# run settings\nstrategy = static\nepochs = 3\n"
                        "C = 0.5\n";
  CliResult r = Train("cfg", {"--config", cfg.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const nlohmann::json s = Summary();
  EXPECT_EQ(s["strategy"], "static");
  // The fixture passes --epochs 2 on the command line.
  EXPECT_EQ(s["config_echo"]["epochs"], 2);
  EXPECT_EQ(s["config_echo"]["C0"].get<double>(), 0.5);
  EXPECT_EQ(s["config_echo"]["provenance"]["config_file"], cfg.string());
  for (double c : ClipColumn()) EXPECT_EQ(c, 0.5);
}

TEST_F(TrainCommandTest, ConfigFileUnknownKeyIsUsageError) {
  const fs::path cfg = FreshDir("cfgbad") / "run.ini";
  std::ofstream(cfg) << "learning_speed = 3\n";
  EXPECT_EQ(Train("cfgbad_run", {"--config", cfg.string()}).code, kExitUsage);
}

TEST_F(TrainCommandTest, ReproducibleUnderSeed) {
  ASSERT_EQ(Train("rep_a", {}).code, kExitOk);
  const std::string first = ReadFile(dir_ / "m.csv");
  ASSERT_EQ(Train("rep_b", {}).code, kExitOk);
  EXPECT_EQ(first, ReadFile(dir_ / "m.csv"));
}

}  // namespace
}  // namespace dcsgd
