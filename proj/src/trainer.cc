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

#include "dcsgd/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_format.h"
#include "dcsgd/histogram.h"

namespace dcsgd {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string Cell(double v) {
  return std::isnan(v) ? std::string() : absl::StrFormat("%.17g", v);
}

}  // namespace

Optimizer::Optimizer(const OptimizerConfig& config, size_t dimension)
    : config_(config), first_(dimension, 0.0) {
  if (config_.kind == OptimizerConfig::Kind::kAdam) {
    second_.assign(dimension, 0.0);
  }
}

void Optimizer::Step(std::span<double> params,
                     std::span<const double> direction) {
  ++steps_;
  const double lr = config_.learning_rate;
  if (config_.kind == OptimizerConfig::Kind::kSgdMomentum) {
    for (size_t j = 0; j < params.size(); ++j) {
      first_[j] = config_.momentum * first_[j] + direction[j];
      params[j] -= lr * first_[j];
    }
    return;
  }
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (size_t j = 0; j < params.size(); ++j) {
    const double g = direction[j];
    first_[j] = b1 * first_[j] + (1.0 - b1) * g;
    second_[j] = b2 * second_[j] + (1.0 - b2) * g * g;
    const double m_hat = first_[j] / correction1;
    const double v_hat = second_[j] / correction2;
    params[j] -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
}

std::vector<size_t> PoissonSample(size_t n, double q, TrainingRng& rng) {
  std::vector<size_t> batch;
  batch.reserve(static_cast<size_t>(static_cast<double>(n) * q * 1.2) + 8);
  for (size_t i = 0; i < n; ++i) {
    if (rng.Uniform() < q) batch.push_back(i);
  }
  return batch;
}

GradientVector Clip(std::span<const double> g, double clip) {
  const double scale = std::max(1.0, L2Norm(g) / clip);
  GradientVector out(g.size());
  for (size_t j = 0; j < g.size(); ++j) out[j] = g[j] / scale;
  return out;
}

std::vector<double> DpStep(std::span<double> params,
                           std::span<const double> clipped_sum, double clip,
                           double sigma_t, double batch_size,
                           Optimizer& optimizer, TrainingRng& rng) {
  const double noise_std = sigma_t * clip;
  std::vector<double> direction(clipped_sum.size());
  for (size_t j = 0; j < direction.size(); ++j) {
    direction[j] =
        (clipped_sum[j] + noise_std * rng.StandardNormal()) / batch_size;
  }
  optimizer.Step(params, direction);
  return direction;
}

absl::StatusOr<TrainingSchedule> MakeSchedule(size_t train_examples,
                                              double batch_size, int epochs) {
  if (train_examples == 0) {
    return absl::InvalidArgumentError("training split is empty");
  }
  if (!(batch_size >= 1.0) ||
      batch_size > static_cast<double>(train_examples)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "expected batch size must lie in [1, %d], got %g", train_examples,
        batch_size));
  }
  if (epochs < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epochs must be >= 1, got %d", epochs));
  }
  const double n = static_cast<double>(train_examples);
  return TrainingSchedule{
      .examples = train_examples,
      .q = batch_size / n,
      .steps = epochs * static_cast<int64_t>(std::ceil(n / batch_size)),
  };
}

void WriteMetricsCsv(const RunMetrics& metrics, std::ostream& out) {
  out << "t,C_t,R_t,batch_size,train_loss,variance_term,bias_term,eps_spent\n";
  for (const IterationMetrics& row : metrics.rows) {
    out << row.t << ',' << Cell(row.clip) << ',' << Cell(row.range) << ','
        << row.batch_size << ',' << Cell(row.train_loss) << ','
        << Cell(row.variance_term) << ',' << Cell(row.bias_term) << ','
        << Cell(row.eps_spent) << '\n';
  }
}

double Accuracy(const ModelParams& params, const Dataset& dataset,
                std::span<const size_t> indices) {
  if (indices.empty()) return kNaN;
  size_t correct = 0;
  for (size_t i : indices) {
    const Example& e = dataset.examples[i];
    if (Predict(params, e.features) == e.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

absl::StatusOr<PrivacyBudget> CalibrateForTraining(
    const Dataset& dataset, double batch_size, int epochs, double epsilon,
    double delta, ClipStrategy strategy, std::optional<double> sigma_h) {
  absl::StatusOr<TrainingSchedule> schedule =
      MakeSchedule(dataset.train.size(), batch_size, epochs);
  if (!schedule.ok()) return schedule.status();
  return MakePrivacyBudget(epsilon, delta, schedule->q, schedule->steps,
                           strategy != ClipStrategy::kStatic, sigma_h);
}

absl::StatusOr<TrainResult> Train(const Dataset& dataset,
                                  const TrainConfig& config) {
  if (absl::Status s = ValidateDataset(dataset); !s.ok()) return s;
  absl::StatusOr<TrainingSchedule> schedule =
      MakeSchedule(dataset.train.size(), config.batch_size, config.epochs);
  if (!schedule.ok()) return schedule.status();

  const PrivacyBudget& budget = config.budget;
  if (budget.steps != schedule->steps ||
      std::abs(budget.q - schedule->q) > 1e-12 * schedule->q) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "privacy budget was calibrated for q=%g over %d steps but the run "
        "uses q=%g over %d steps",
        budget.q, budget.steps, schedule->q, schedule->steps));
  }
  const ClipStrategy strategy = config.clip.strategy;
  const bool dynamic = strategy != ClipStrategy::kStatic;
  if (dynamic && !budget.sigma_h.has_value()) {
    return absl::FailedPreconditionError(
        "dynamic clipping needs a histogram noise multiplier in the budget");
  }
  if (!(config.clip.clip > 0.0) || !(config.clip.range > 0.0)) {
    return absl::InvalidArgumentError(
        "initial clipping threshold and histogram range must be positive");
  }
  if (dynamic && config.bins < 2) {
    return absl::InvalidArgumentError("histogram needs at least 2 bins");
  }

  const Architecture arch{.inputs = dataset.feature_dim(),
                          .hidden = config.hidden,
                          .classes = dataset.num_classes};
  absl::StatusOr<ModelParams> init = InitParams(arch, config.seed);
  if (!init.ok()) return init.status();
  TrainResult result{.params = *std::move(init)};
  ModelParams& params = result.params;
  const size_t dim = params.values.size();

  absl::StatusOr<RdpCurve> step_rdp = SgmRdpCurve(budget.q, budget.sigma);
  if (!step_rdp.ok()) return step_rdp.status();

  Optimizer optimizer(config.optimizer, dim);
  TrainingRng rng(config.seed ^ kTrainingStreamSalt);
  ClipState clip_state = config.clip;
  GradientVector grad(dim);
  std::vector<double> clipped_sum(dim);
  std::vector<double> norms;
  double eps_spent = 0.0;

  result.metrics.rows.reserve(budget.steps);
  for (int64_t t = 0; t < budget.steps; ++t) {
    const std::vector<size_t> batch =
        PoissonSample(dataset.train.size(), budget.q, rng);
    IterationMetrics row{.t = t,
                         .clip = clip_state.clip,
                         .range = clip_state.range,
                         .batch_size = batch.size(),
                         .train_loss = kNaN,
                         .variance_term = kNaN,
                         .bias_term = kNaN};

    std::fill(clipped_sum.begin(), clipped_sum.end(), 0.0);
    norms.clear();
    double loss_sum = 0.0;
    for (size_t pos : batch) {
      const Example& e = dataset.examples[dataset.train[pos]];
      const double loss = LossAndGradient(params, e.features, e.label, grad);
      if (!std::isfinite(loss)) {
        return absl::InternalError(absl::StrFormat(
            "non-finite loss %g at iteration %d on training example %d "
            "(clip=%g, sigma_t=%g, lr=%g)",
            loss, t, dataset.train[pos], clip_state.clip, budget.sigma_t,
            config.optimizer.learning_rate));
      }
      loss_sum += loss;
      const double norm = L2Norm(grad);
      norms.push_back(norm);
      if (norm <= clip_state.clip) ++row.unclipped;
      const double scale = std::max(1.0, norm / clip_state.clip);
      for (size_t j = 0; j < dim; ++j) clipped_sum[j] += grad[j] / scale;
    }
    if (!batch.empty()) loss_sum /= static_cast<double>(batch.size());
    row.train_loss = batch.empty() ? kNaN : loss_sum;

    DpStep(params.values, clipped_sum, clip_state.clip, budget.sigma_t,
           config.batch_size, optimizer, rng);

    if (dynamic) {
      absl::StatusOr<NormHistogram> hist =
          BuildHistogram(norms, clip_state.range, config.bins,
                         *budget.sigma_h, rng.engine());
      if (!hist.ok()) return hist.status();
      if (strategy == ClipStrategy::kPercentile) {
        absl::StatusOr<ClipState> next =
            PercentileThreshold(*hist, clip_state.percentile, clip_state);
        if (!next.ok()) return next.status();
        clip_state = *next;
      } else {
        absl::StatusOr<ErrorMinimizingUpdate> next =
            ErrorMinimizingThreshold(*hist, clip_state, budget.sigma_t,
                                     config.batch_size,
                                     static_cast<double>(dim));
        if (!next.ok()) return next.status();
        clip_state = next->state;
        if (next->selected.has_value()) {
          row.variance_term = next->selected->variance;
          row.bias_term = next->selected->bias;
        }
      }
    }

    const bool checkpoint = (t + 1) % std::max(config.checkpoint_every, 1) == 0 ||
                            t + 1 == budget.steps;
    if (checkpoint) {
      absl::StatusOr<RdpCurve> total = Compose(*step_rdp, t + 1);
      if (!total.ok()) return total.status();
      absl::StatusOr<DpGuarantee> dp = RdpToDp(*total, budget.delta);
      if (!dp.ok()) return dp.status();
      eps_spent = dp->epsilon;
    }
    row.eps_spent = eps_spent;
    result.metrics.rows.push_back(row);
  }

  result.metrics.final_epsilon = eps_spent;
  result.metrics.final_accuracy = Accuracy(params, dataset, dataset.test);
  return result;
}

}  // namespace dcsgd
