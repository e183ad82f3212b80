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

// DP-SGD with dynamic clipping.
//
// Each iteration Poisson-samples a batch, clips per-example gradients at the
// threshold currently in force, adds N(0, sigma_t^2 C^2 I) to their sum and
// feeds sum / B to the optimizer. Unless the strategy is static it then
// releases a noisy histogram of the unclipped norms and derives the threshold
// and histogram range for the next iteration from it.
//
// Random stream contract (one std::mt19937_64 per run, seeded from
// `seed ^ kTrainingStreamSalt`; parameters are initialized from `seed`):
//   1. one 53-bit uniform per training example for Poisson sampling,
//   2. one standard normal per parameter from a run-scoped
//      std::normal_distribution<double>(0, 1), scaled by sigma_t * C,
//   3. histogram noise via BuildHistogram (non-static strategies only).

#ifndef DCSGD_TRAINER_H_
#define DCSGD_TRAINER_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dcsgd/accountant.h"
#include "dcsgd/data.h"
#include "dcsgd/models.h"
#include "dcsgd/strategy.h"

namespace dcsgd {

inline constexpr uint64_t kTrainingStreamSalt = 0x9e3779b97f4a7c15ULL;

struct OptimizerConfig {
  enum class Kind { kSgdMomentum, kAdam };
  Kind kind = Kind::kAdam;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Heavy-ball SGD (v = mu v + g; theta -= lr v) or Adam with bias correction.
class Optimizer {
 public:
  Optimizer(const OptimizerConfig& config, size_t dimension);

  void Step(std::span<double> params, std::span<const double> direction);

 private:
  OptimizerConfig config_;
  int64_t steps_ = 0;
  std::vector<double> first_;
  std::vector<double> second_;
};

// Engine plus the run-scoped standard normal used for gradient noise.
class TrainingRng {
 public:
  explicit TrainingRng(uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) from the top 53 bits of one engine output.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double StandardNormal() { return standard_normal_(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> standard_normal_{0.0, 1.0};
};

// Includes each of [0, n) independently with probability q.
std::vector<size_t> PoissonSample(size_t n, double q, TrainingRng& rng);

// g / max(1, |g|_2 / clip).
GradientVector Clip(std::span<const double> g, double clip);

// Private descent step: params <- optimizer((clipped_sum + N(0,
// (sigma_t clip)^2 I)) / batch_size). Returns the noisy direction handed to
// the optimizer.
std::vector<double> DpStep(std::span<double> params,
                           std::span<const double> clipped_sum, double clip,
                           double sigma_t, double batch_size,
                           Optimizer& optimizer, TrainingRng& rng);

struct TrainingSchedule {
  size_t examples = 0;
  double q = 0.0;
  int64_t steps = 0;
};

// q = batch / n and steps = epochs * ceil(n / batch).
absl::StatusOr<TrainingSchedule> MakeSchedule(size_t train_examples,
                                              double batch_size, int epochs);

struct TrainConfig {
  double batch_size = 256;
  int epochs = 10;
  OptimizerConfig optimizer;
  PrivacyBudget budget;
  ClipState clip;
  int bins = 20;
  // Hidden units; 0 trains logistic regression.
  int hidden = 0;
  uint64_t seed = 0;
  // Epsilon spent is re-accounted every this many iterations and at the end.
  int checkpoint_every = 50;
};

struct IterationMetrics {
  int64_t t = 0;
  // Threshold and range in force during iteration t.
  double clip = 0.0;
  double range = 0.0;
  size_t batch_size = 0;
  // Mean loss over the batch before the update; NaN for an empty batch.
  double train_loss = 0.0;
  // Expected-error terms of the threshold selected for t + 1; NaN unless the
  // expected-error strategy produced a selection.
  double variance_term = 0.0;
  double bias_term = 0.0;
  double eps_spent = 0.0;
  // Batch members whose gradient norm did not exceed `clip`.
  size_t unclipped = 0;
};

struct RunMetrics {
  std::vector<IterationMetrics> rows;
  double final_accuracy = 0.0;
  double final_epsilon = 0.0;
};

// Columns: t,C_t,R_t,batch_size,train_loss,variance_term,bias_term,eps_spent.
// NaN cells are left empty.
void WriteMetricsCsv(const RunMetrics& metrics, std::ostream& out);

struct TrainResult {
  ModelParams params;
  RunMetrics metrics;
};

double Accuracy(const ModelParams& params, const Dataset& dataset,
                std::span<const size_t> indices);

// Calibrates the budget for training on `dataset`'s train split. `sigma_h`
// overrides the automatic histogram multiplier for non-static strategies.
absl::StatusOr<PrivacyBudget> CalibrateForTraining(
    const Dataset& dataset, double batch_size, int epochs, double epsilon,
    double delta, ClipStrategy strategy, std::optional<double> sigma_h);

// Runs budget.steps iterations on the train split and reports accuracy on the
// test split.
absl::StatusOr<TrainResult> Train(const Dataset& dataset,
                                  const TrainConfig& config);

}  // namespace dcsgd

#endif  // DCSGD_TRAINER_H_
