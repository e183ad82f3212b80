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

// Softmax classifiers with analytic per-example gradients.
//
// Parameters live in one flat vector so that clipping and noising act on a
// single contiguous buffer. Layouts (row-major weights):
//   logistic regression: W[classes x inputs], b[classes]
//   one-hidden-layer MLP: W1[hidden x inputs], b1[hidden],
//                         W2[classes x hidden], b2[classes]
// The MLP uses tanh hidden units. The loss is cross-entropy.

#ifndef DCSGD_MODELS_H_
#define DCSGD_MODELS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dcsgd {

struct Architecture {
  int inputs = 0;
  // 0 selects multinomial logistic regression.
  int hidden = 0;
  int classes = 2;
};

absl::Status ValidateArchitecture(const Architecture& arch);
size_t ParameterCount(const Architecture& arch);

using GradientVector = std::vector<double>;

struct ModelParams {
  Architecture arch;
  std::vector<double> values;
};

struct Example {
  std::vector<double> features;
  int label = 0;
};

// Entries drawn uniformly from (-a, a) with a = 1 / sqrt(fan_in) of the layer
// that owns them.
absl::StatusOr<ModelParams> InitParams(const Architecture& arch,
                                       uint64_t seed);

absl::Status ValidateExample(const Architecture& arch, const Example& example);

absl::StatusOr<double> Loss(const ModelParams& params, const Example& example);
absl::StatusOr<GradientVector> PerExampleGradient(const ModelParams& params,
                                                  const Example& example);

// Unchecked fast path: writes the gradient into `grad` (size
// ParameterCount) and returns the loss. Shapes must already be validated.
double LossAndGradient(const ModelParams& params,
                       std::span<const double> features, int label,
                       std::span<double> grad);

// Class logits for `features`; shapes must already be validated.
std::vector<double> Logits(const ModelParams& params,
                           std::span<const double> features);

int Predict(const ModelParams& params, std::span<const double> features);

double L2Norm(std::span<const double> v);

}  // namespace dcsgd

#endif  // DCSGD_MODELS_H_
