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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dcsgd/accountant.h"
#include "dcsgd/data.h"
#include "dcsgd/histogram.h"
#include "dcsgd/norm_simulation.h"
#include "dcsgd/strategy.h"
#include "dcsgd/trainer.h"
#include "json.hpp"

namespace dcsgd {
namespace {

using Json = nlohmann::ordered_json;

int Fail(std::ostream& err, int code, const absl::Status& status) {
  err << "error: " << status.message() << "\n";
  return code;
}

// Usage errors for domain problems, infeasible for privacy parameters that
// cannot be met.
int PrivacyExitCode(const absl::Status& status) {
  return status.code() == absl::StatusCode::kFailedPrecondition
             ? kExitInfeasible
             : kExitUsage;
}

uint64_t MixSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------- account

struct AccountArgs {
  std::optional<double> q, sigma, delta;
  std::optional<int64_t> steps;
  bool lt = false;
  std::optional<double> eps1, delta1, gamma, delta2;
};

void AddAccount(CLI::App& app, AccountArgs& a) {
  app.add_option("--q", a.q, "Poisson sampling rate");
  app.add_option("--sigma", a.sigma, "Total noise multiplier");
  app.add_option("--steps", a.steps, "Number of DP-SGD steps");
  app.add_option("--delta", a.delta, "Target delta");
  app.add_flag("--lt", a.lt,
               "Report the cost of random-stopping hyperparameter tuning");
  app.add_option("--eps1", a.eps1, "Per-run epsilon (--lt)");
  app.add_option("--delta1", a.delta1, "Per-run delta (--lt)");
  app.add_option("--gamma", a.gamma, "Stopping probability (--lt)");
  app.add_option("--delta2", a.delta2, "Tuning failure probability (--lt)");
}

int RunAccount(const AccountArgs& a, const CLI::App& cmd, std::ostream& out,
               std::ostream& err) {
  auto missing = [&](std::initializer_list<std::pair<const char*, bool>> req) {
    for (const auto& [flag, present] : req) {
      if (!present) {
        err << "account: missing required flag " << flag << "\n"
            << cmd.help();
        return true;
      }
    }
    return false;
  };

  if (a.lt) {
    if (missing({{"--eps1", a.eps1.has_value()},
                 {"--delta1", a.delta1.has_value()},
                 {"--gamma", a.gamma.has_value()},
                 {"--delta2", a.delta2.has_value()}})) {
      return kExitUsage;
    }
    absl::StatusOr<TuningCost> cost =
        LtTuningCost(*a.eps1, *a.delta1, *a.gamma, *a.delta2);
    if (!cost.ok()) return Fail(err, kExitUsage, cost.status());
    out << absl::StrFormat("eps_prime=%.17g\ndelta_prime=%.17g\nT=%.17g\n",
                           cost->epsilon, cost->delta, cost->max_runs);
    return kExitOk;
  }

  if (missing({{"--q", a.q.has_value()},
               {"--sigma", a.sigma.has_value()},
               {"--steps", a.steps.has_value()},
               {"--delta", a.delta.has_value()}})) {
    return kExitUsage;
  }
  absl::StatusOr<DpGuarantee> dp = SgmEpsilon(*a.q, *a.sigma, *a.steps,
                                              *a.delta);
  if (!dp.ok()) return Fail(err, kExitUsage, dp.status());
  out << absl::StrFormat("epsilon=%.17g\nalpha=%.17g\n", dp->epsilon,
                         dp->alpha);
  return kExitOk;
}

// -------------------------------------------------------------- calibrate

struct CalibrateArgs {
  double epsilon = 0.0;
  std::optional<double> delta, q, batch, sigma_h;
  std::optional<int64_t> n, steps;
  std::optional<int> epochs;
};

void AddCalibrate(CLI::App& app, CalibrateArgs& a) {
  app.add_option("--epsilon", a.epsilon, "Target epsilon")->required();
  app.add_option("--delta", a.delta, "Target delta (default 1/N)");
  app.add_option("--q", a.q, "Sampling rate (or give --batch and --n)");
  app.add_option("--batch", a.batch, "Expected batch size");
  app.add_option("--n", a.n, "Training set size");
  app.add_option("--steps", a.steps, "Number of steps (or give --epochs)");
  app.add_option("--epochs", a.epochs, "Number of epochs");
  app.add_option("--sigma-h", a.sigma_h,
                 "Histogram noise multiplier (default: automatic)");
}

int RunCalibrate(const CalibrateArgs& a, const CLI::App& cmd,
                 std::ostream& out, std::ostream& err) {
  auto usage = [&](const std::string& msg) {
    err << "calibrate: " << msg << "\n" << cmd.help();
    return kExitUsage;
  };
  double q = 0.0;
  if (a.q.has_value()) {
    q = *a.q;
  } else if (a.batch.has_value() && a.n.has_value()) {
    q = *a.batch / static_cast<double>(*a.n);
  } else {
    return usage("need --q, or --batch together with --n");
  }
  int64_t steps = 0;
  if (a.steps.has_value()) {
    steps = *a.steps;
  } else if (a.epochs.has_value() && a.batch.has_value() && a.n.has_value()) {
    absl::StatusOr<TrainingSchedule> schedule = MakeSchedule(
        static_cast<size_t>(std::max<int64_t>(*a.n, 0)), *a.batch, *a.epochs);
    if (!schedule.ok()) return Fail(err, kExitUsage, schedule.status());
    steps = schedule->steps;
  } else {
    return usage("need --steps, or --epochs with --batch and --n");
  }
  double delta = 0.0;
  if (a.delta.has_value()) {
    delta = *a.delta;
  } else if (a.n.has_value() && *a.n > 0) {
    delta = 1.0 / static_cast<double>(*a.n);
  } else {
    return usage("need --delta, or --n to default it to 1/N");
  }

  absl::StatusOr<PrivacyBudget> budget =
      MakePrivacyBudget(a.epsilon, delta, q, steps, true, a.sigma_h);
  if (!budget.ok()) return Fail(err, PrivacyExitCode(budget.status()),
                                budget.status());
  out << absl::StrFormat("sigma=%.17g\nsigma_H=%.17g\nsigma_T=%.17g\n",
                         budget->sigma, *budget->sigma_h, budget->sigma_t);
  return kExitOk;
}

// --------------------------------------------------------- simulate-norms

struct SimulateArgs {
  std::string mode = "percentile";
  std::string dist = "gaussian";
  double mu = 100.0;
  double s = 20.0;
  double c = 1.0;
  int n = 256;
  std::optional<double> range;
  std::vector<int> bins = {10, 20, 50};
  std::vector<double> sigma_h = {1.0, 5.0, 10.0};
  std::vector<double> p = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double sigma_t = 1.0;
  double batch = 256.0;
  double dim = 100000.0;
  double c_step = 0.5;
  std::optional<double> c_max;
  uint64_t seed = 0;
  std::string out_dir = ".";
  bool write_histograms = false;
};

void AddSimulate(CLI::App& app, SimulateArgs& a) {
  app.add_option("--mode", a.mode,
                 "percentile: estimated vs exact quantiles; error: expected "
                 "squared error curves")
      ->check(CLI::IsMember({"percentile", "error"}))
      ->capture_default_str();
  app.add_option("--dist", a.dist, "Norm distribution")
      ->check(CLI::IsMember({"gaussian", "lognormal", "constant"}))
      ->capture_default_str();
  app.add_option("--mu", a.mu, "Location (gaussian mean, lognormal mu)")
      ->capture_default_str();
  app.add_option("--s", a.s, "Scale (gaussian stddev, lognormal sigma)")
      ->capture_default_str();
  app.add_option("--c", a.c, "Value of the constant distribution")
      ->capture_default_str();
  app.add_option("--n", a.n, "Norms per population")->capture_default_str();
  app.add_option("--range", a.range,
                 "Histogram range (default 150 for percentile, 120 for "
                 "error)");
  app.add_option("--bins", a.bins, "Bin counts, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--sigma-h", a.sigma_h,
                 "Histogram noise multipliers, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--p", a.p, "Percentiles in (0, 1), comma separated")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--sigma-t", a.sigma_t, "Gradient noise multiplier (error)")
      ->capture_default_str();
  app.add_option("--batch", a.batch, "Expected batch size (error)")
      ->capture_default_str();
  app.add_option("--dim", a.dim, "Model dimension (error)")
      ->capture_default_str();
  app.add_option("--c-step", a.c_step, "Threshold grid step (error)")
      ->capture_default_str();
  app.add_option("--c-max", a.c_max, "Threshold grid end (default: range)");
  app.add_option("--seed", a.seed, "Random seed")->capture_default_str();
  app.add_option("--out-dir", a.out_dir, "Output directory")
      ->capture_default_str();
  app.add_flag("--write-histograms", a.write_histograms,
               "Also write hist_b<b>_sh<sigma>.csv for every cell");
}

int RunSimulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const bool error_mode = a.mode == "error";
  const double range = a.range.value_or(error_mode ? 120.0 : 150.0);
  if (a.bins.empty() || a.sigma_h.empty() || (!error_mode && a.p.empty())) {
    return Fail(err, kExitUsage,
                absl::InvalidArgumentError("sweep grid must not be empty"));
  }
  for (int b : a.bins) {
    if (b < 2) {
      return Fail(err, kExitUsage, absl::InvalidArgumentError(absl::StrFormat(
                                       "bin count must be >= 2, got %d", b)));
    }
  }
  for (double sh : a.sigma_h) {
    if (!(sh >= 0.0)) {
      return Fail(err, kExitUsage,
                  absl::InvalidArgumentError(absl::StrFormat(
                      "histogram noise multiplier must be >= 0, got %g", sh)));
    }
  }
  if (!error_mode) {
    for (double p : a.p) {
      if (!(p > 0.0 && p < 1.0)) {
        return Fail(err, kExitUsage,
                    absl::InvalidArgumentError(absl::StrFormat(
                        "percentiles must lie in (0, 1), got %g", p)));
      }
    }
  }
  std::vector<double> thresholds;
  if (error_mode) {
    const double c_max = a.c_max.value_or(range);
    if (!(a.c_step > 0.0) || !(c_max >= a.c_step)) {
      return Fail(err, kExitUsage,
                  absl::InvalidArgumentError("need 0 < --c-step <= --c-max"));
    }
    const auto count = static_cast<int64_t>(std::floor(c_max / a.c_step + 1e-9));
    for (int64_t i = 1; i <= count; ++i) thresholds.push_back(i * a.c_step);
  }

  NormDistribution dist = NormDistribution::Constant(a.c);
  if (a.dist == "gaussian") dist = NormDistribution::Gaussian(a.mu, a.s);
  if (a.dist == "lognormal") dist = NormDistribution::LogNormal(a.mu, a.s);

  std::error_code ec;
  std::filesystem::create_directories(a.out_dir, ec);
  if (ec) {
    return Fail(err, kExitFailure,
                absl::InternalError(absl::StrFormat(
                    "cannot create '%s': %s", a.out_dir, ec.message())));
  }

  uint64_t cell = 0;
  for (int bins : a.bins) {
    for (double sigma_h : a.sigma_h) {
      const uint64_t cell_seed = MixSeed(a.seed, cell++);
      absl::StatusOr<NormPopulation> pop = GenerateNorms(dist, a.n, cell_seed);
      if (!pop.ok()) return Fail(err, kExitUsage, pop.status());
      std::mt19937_64 rng(MixSeed(cell_seed, 1));
      absl::StatusOr<NormHistogram> hist =
          BuildHistogram(pop->values, range, bins, sigma_h, rng);
      if (!hist.ok()) return Fail(err, kExitUsage, hist.status());

      const std::string stem = absl::StrFormat("b%d_sh%g", bins, sigma_h);
      const std::filesystem::path path =
          std::filesystem::path(a.out_dir) /
          ((error_mode ? "error_" : "percentile_") + stem + ".csv");
      std::ostringstream csv;
      if (error_mode) {
        absl::StatusOr<std::vector<ErrorCurvePoint>> curve = ErrorCurve(
            *hist, pop->values, thresholds, a.sigma_t, a.batch, a.dim);
        if (!curve.ok()) return Fail(err, kExitUsage, curve.status());
        WriteErrorCurveCsv(*curve, csv);
      } else {
        absl::StatusOr<std::vector<PercentilePoint>> curve =
            PercentileCurve(*hist, pop->values, a.p);
        if (!curve.ok()) return Fail(err, kExitUsage, curve.status());
        WritePercentileCurveCsv(*curve, csv);
      }
      std::ofstream file(path);
      if (!(file << csv.str())) {
        return Fail(err, kExitFailure,
                    absl::InternalError("cannot write " + path.string()));
      }
      out << path.string() << "\n";

      if (a.write_histograms) {
        const std::filesystem::path hist_path =
            std::filesystem::path(a.out_dir) / ("hist_" + stem + ".csv");
        std::ofstream hist_file(hist_path);
        WriteHistogramCsv(*hist, hist_file);
        out << hist_path.string() << "\n";
      }
    }
  }
  return kExitOk;
}

// ------------------------------------------------------------------ train

struct TrainArgs {
  std::string config_file;
  std::string strategy = "expected-error";
  double p = 0.5;
  double clip0 = 1.0;
  std::optional<double> range0;
  int bins = 20;
  double epsilon = 8.0;
  std::optional<double> delta;
  std::optional<double> sigma_h;
  double batch = 256.0;
  int epochs = 10;
  std::string optimizer = "adam";
  std::optional<double> lr;
  double momentum = 0.9;
  int hidden = 0;
  std::string csv;
  std::string label_column = "label";
  bool no_standardize = false;
  int blobs_n = 10000;
  int blobs_dim = 20;
  int blobs_classes = 2;
  double blobs_separation = 5.0;
  uint64_t seed = 0;
  std::string metrics_path = "metrics.csv";
  std::string summary_path = "summary.json";
};

void AddTrain(CLI::App& app, TrainArgs& a) {
  app.add_option("--config", a.config_file,
                 "Flat key = value config file; command-line flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_option("--strategy", a.strategy, "Clipping strategy")
      ->check(CLI::IsMember({"static", "percentile", "expected-error"}))
      ->capture_default_str();
  app.add_option("--p", a.p, "Target unclipped fraction (percentile)")
      ->capture_default_str();
  app.add_option("--C", a.clip0, "Initial clipping threshold")
      ->capture_default_str();
  app.add_option("--R", a.range0,
                 "Initial histogram range (default 1 for percentile, bins "
                 "for expected-error)");
  app.add_option("--bins", a.bins, "Histogram bins")->capture_default_str();
  app.add_option("--epsilon", a.epsilon, "Target epsilon")
      ->capture_default_str();
  app.add_option("--delta", a.delta, "Target delta (default 1/N)");
  app.add_option("--sigma-h", a.sigma_h,
                 "Histogram noise multiplier (default: automatic)");
  app.add_option("--batch", a.batch, "Expected batch size")
      ->capture_default_str();
  app.add_option("--epochs", a.epochs, "Epochs")->capture_default_str();
  app.add_option("--optimizer", a.optimizer, "Optimizer")
      ->check(CLI::IsMember({"adam", "sgd"}))
      ->capture_default_str();
  app.add_option("--lr", a.lr,
                 "Learning rate (default 0.001 for adam, 0.05 for sgd)");
  app.add_option("--momentum", a.momentum, "SGD momentum")
      ->capture_default_str();
  app.add_option("--hidden", a.hidden, "Hidden units (0: logistic regression)")
      ->capture_default_str();
  app.add_option("--csv", a.csv, "Labeled CSV dataset (default: blobs)");
  app.add_option("--label-column", a.label_column, "Label column of --csv")
      ->capture_default_str();
  app.add_flag("--no-standardize", a.no_standardize,
               "Keep CSV features as read");
  app.add_option("--blobs-n", a.blobs_n, "Synthetic blob examples")
      ->capture_default_str();
  app.add_option("--blobs-dim", a.blobs_dim, "Synthetic blob dimension")
      ->capture_default_str();
  app.add_option("--blobs-classes", a.blobs_classes, "Synthetic blob classes")
      ->capture_default_str();
  app.add_option("--blobs-separation", a.blobs_separation,
                 "Distance between blob centres")
      ->capture_default_str();
  app.add_option("--seed", a.seed, "Random seed")->capture_default_str();
  app.add_option("--metrics", a.metrics_path, "Per-iteration metrics CSV")
      ->capture_default_str();
  app.add_option("--summary", a.summary_path, "JSON run summary")
      ->capture_default_str();
}

int RunTrain(const TrainArgs& a, const std::vector<std::string>& command_line,
             std::ostream& out, std::ostream& err) {
  absl::StatusOr<ClipStrategy> strategy = ParseClipStrategy(a.strategy);
  if (!strategy.ok()) return Fail(err, kExitUsage, strategy.status());
  if (*strategy == ClipStrategy::kPercentile && !(a.p > 0.0 && a.p < 1.0)) {
    return Fail(err, kExitUsage,
                absl::InvalidArgumentError(absl::StrFormat(
                    "--p must lie in (0, 1), got %g", a.p)));
  }
  if (!(a.clip0 > 0.0) || (a.range0.has_value() && !(*a.range0 > 0.0))) {
    return Fail(err, kExitUsage,
                absl::InvalidArgumentError("--C and --R must be positive"));
  }

  absl::StatusOr<Dataset> dataset =
      a.csv.empty()
          ? GenerateBlobs(a.blobs_n, a.blobs_dim, a.blobs_classes,
                          a.blobs_separation, a.seed)
          : LoadCsv(a.csv, CsvOptions{.label_column = a.label_column,
                                      .standardize = !a.no_standardize,
                                      .split_seed = a.seed});
  if (!dataset.ok()) return Fail(err, kExitDataError, dataset.status());
  if (absl::Status s = ValidateDataset(*dataset); !s.ok()) {
    return Fail(err, kExitDataError, s);
  }
  if (dataset->num_classes < 2) {
    return Fail(err, kExitDataError,
                absl::InvalidArgumentError("dataset has fewer than 2 classes"));
  }

  const double delta =
      a.delta.value_or(1.0 / static_cast<double>(dataset->train.size()));
  absl::StatusOr<PrivacyBudget> budget = CalibrateForTraining(
      *dataset, a.batch, a.epochs, a.epsilon, delta, *strategy, a.sigma_h);
  if (!budget.ok()) {
    return Fail(err, PrivacyExitCode(budget.status()), budget.status());
  }

  TrainConfig config;
  config.batch_size = a.batch;
  config.epochs = a.epochs;
  config.optimizer.kind = a.optimizer == "sgd"
                              ? OptimizerConfig::Kind::kSgdMomentum
                              : OptimizerConfig::Kind::kAdam;
  config.optimizer.learning_rate =
      a.lr.value_or(a.optimizer == "sgd" ? 0.05 : 1e-3);
  config.optimizer.momentum = a.momentum;
  config.budget = *budget;
  config.clip = InitialClipState(*strategy, a.clip0, a.bins, a.p);
  if (a.range0.has_value()) config.clip.range = *a.range0;
  config.bins = a.bins;
  config.hidden = a.hidden;
  config.seed = a.seed;

  absl::StatusOr<TrainResult> result = Train(*dataset, config);
  if (!result.ok()) {
    const absl::StatusCode code = result.status().code();
    return Fail(err,
                code == absl::StatusCode::kInvalidArgument ? kExitUsage
                                                           : kExitFailure,
                result.status());
  }
  const RunMetrics& metrics = result->metrics;

  std::ofstream metrics_file(a.metrics_path);
  if (!metrics_file) {
    return Fail(err, kExitFailure,
                absl::InternalError("cannot write " + a.metrics_path));
  }
  WriteMetricsCsv(metrics, metrics_file);

  Json echo = {
      {"strategy", a.strategy},
      {"p", a.p},
      {"C0", config.clip.clip},
      {"R0", config.clip.range},
      {"bins", a.bins},
      {"epsilon_target", a.epsilon},
      {"delta", delta},
      {"sigma_h_override", a.sigma_h ? Json(*a.sigma_h) : Json(nullptr)},
      {"batch", a.batch},
      {"epochs", a.epochs},
      {"steps", budget->steps},
      {"q", budget->q},
      {"optimizer", a.optimizer},
      {"lr", config.optimizer.learning_rate},
      {"momentum", a.momentum},
      {"adam_betas", {config.optimizer.beta1, config.optimizer.beta2}},
      {"adam_epsilon", config.optimizer.epsilon},
      {"hidden", a.hidden},
      {"data",
       a.csv.empty()
           ? Json{{"source", "blobs"},
                  {"n", a.blobs_n},
                  {"dim", a.blobs_dim},
                  {"classes", a.blobs_classes},
                  {"separation", a.blobs_separation}}
           : Json{{"source", "csv"},
                  {"path", a.csv},
                  {"label_column", a.label_column},
                  {"standardize", !a.no_standardize}}},
      {"train_examples", dataset->train.size()},
      {"test_examples", dataset->test.size()},
      {"seed", a.seed},
      {"metrics_path", a.metrics_path},
      {"summary_path", a.summary_path},
      {"provenance",
       {{"config_file", a.config_file.empty() ? Json(nullptr)
                                              : Json(a.config_file)},
        {"command_line", command_line},
        {"version", kVersion}}},
  };
  const Json summary = {
      {"strategy", a.strategy},
      {"seed", a.seed},
      {"final_accuracy", metrics.final_accuracy},
      {"epsilon", metrics.final_epsilon},
      {"delta", delta},
      {"sigma", budget->sigma},
      {"sigma_H", budget->sigma_h ? Json(*budget->sigma_h) : Json(nullptr)},
      {"sigma_T", budget->sigma_t},
      {"config_echo", echo},
  };
  std::ofstream summary_file(a.summary_path);
  if (!summary_file) {
    return Fail(err, kExitFailure,
                absl::InternalError("cannot write " + a.summary_path));
  }
  summary_file << summary.dump(2) << "\n";

  out << absl::StrFormat("final_accuracy=%.6f\nepsilon=%.17g\n",
                         metrics.final_accuracy, metrics.final_epsilon);
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Differentially private SGD with dynamic clipping thresholds",
               "dcsgd"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  AccountArgs account_args;
  CLI::App* account = app.add_subcommand(
      "account", "Epsilon of DP-SGD, or the cost of hyperparameter tuning");
  AddAccount(*account, account_args);

  CalibrateArgs calibrate_args;
  CLI::App* calibrate = app.add_subcommand(
      "calibrate", "Noise multipliers for a target (epsilon, delta)");
  AddCalibrate(*calibrate, calibrate_args);

  SimulateArgs simulate_args;
  CLI::App* simulate = app.add_subcommand(
      "simulate-norms",
      "Histogram threshold estimates on synthetic norm populations");
  AddSimulate(*simulate, simulate_args);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "Run DP training");
  AddTrain(*train, train_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*account) return RunAccount(account_args, *account, out, err);
  if (*calibrate) return RunCalibrate(calibrate_args, *calibrate, out, err);
  if (*simulate) return RunSimulate(simulate_args, out, err);

  if (!train_args.config_file.empty()) {
    std::ifstream config(train_args.config_file);
    if (!config) {
      return Fail(err, kExitUsage,
                  absl::NotFoundError("cannot open config file '" +
                                      train_args.config_file + "'"));
    }
    try {
      train->parse_from_stream(config);
    } catch (const CLI::ParseError& e) {
      err << "error: " << train_args.config_file << ": " << e.what() << "\n";
      return kExitUsage;
    }
  }
  std::vector<std::string> command_line(argv, argv + argc);
  return RunTrain(train_args, command_line, out, err);
}

}  // namespace dcsgd
