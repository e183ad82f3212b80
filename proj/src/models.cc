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

#include "dcsgd/models.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "absl/strings/str_format.h"

namespace dcsgd {
namespace {

// Offsets of each block inside the flat parameter vector.
struct Layout {
  size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0, total = 0;
};

Layout MakeLayout(const Architecture& arch) {
  const size_t in = arch.inputs, h = arch.hidden, k = arch.classes;
  Layout l;
  if (h == 0) {
    l.w2 = 0;
    l.b2 = k * in;
    l.total = l.b2 + k;
    return l;
  }
  l.w1 = 0;
  l.b1 = h * in;
  l.w2 = l.b1 + h;
  l.b2 = l.w2 + k * h;
  l.total = l.b2 + k;
  return l;
}

// out[r] = bias[r] + sum_c w[r * cols + c] * x[c]
void Affine(std::span<const double> w, std::span<const double> bias,
            std::span<const double> x, std::span<double> out) {
  const size_t cols = x.size();
  for (size_t r = 0; r < out.size(); ++r) {
    double acc = bias[r];
    const double* row = w.data() + r * cols;
    for (size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    out[r] = acc;
  }
}

double LogSumExp(std::span<const double> v) {
  const double hi = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - hi);
  return hi + std::log(sum);
}

}  // namespace

absl::Status ValidateArchitecture(const Architecture& arch) {
  if (arch.inputs < 1 || arch.hidden < 0 || arch.classes < 2) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "invalid architecture (inputs=%d, hidden=%d, classes=%d)",
        arch.inputs, arch.hidden, arch.classes));
  }
  return absl::OkStatus();
}

size_t ParameterCount(const Architecture& arch) {
  return MakeLayout(arch).total;
}

absl::StatusOr<ModelParams> InitParams(const Architecture& arch,
                                       uint64_t seed) {
  if (absl::Status s = ValidateArchitecture(arch); !s.ok()) return s;
  const Layout l = MakeLayout(arch);
  ModelParams params{.arch = arch, .values = std::vector<double>(l.total)};
  std::mt19937_64 rng(seed);
  auto fill = [&](size_t begin, size_t end, int fan_in) {
    const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-a, a);
    for (size_t i = begin; i < end; ++i) params.values[i] = dist(rng);
  };
  if (arch.hidden == 0) {
    fill(0, l.total, arch.inputs);
  } else {
    fill(l.w1, l.w2, arch.inputs);
    fill(l.w2, l.total, arch.hidden);
  }
  return params;
}

absl::Status ValidateExample(const Architecture& arch, const Example& example) {
  if (static_cast<int>(example.features.size()) != arch.inputs) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "example has %d features, model expects %d", example.features.size(),
        arch.inputs));
  }
  if (example.label < 0 || example.label >= arch.classes) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "label %d outside [0, %d)", example.label, arch.classes));
  }
  return absl::OkStatus();
}

namespace {

absl::Status ValidatePair(const ModelParams& params, const Example& example) {
  if (absl::Status s = ValidateArchitecture(params.arch); !s.ok()) return s;
  if (params.values.size() != ParameterCount(params.arch)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "parameter vector has %d entries, architecture needs %d",
        params.values.size(), ParameterCount(params.arch)));
  }
  return ValidateExample(params.arch, example);
}

}  // namespace

std::vector<double> Logits(const ModelParams& params,
                           std::span<const double> features) {
  const Architecture& arch = params.arch;
  const Layout l = MakeLayout(arch);
  std::span<const double> theta(params.values);
  std::vector<double> logits(arch.classes);
  if (arch.hidden == 0) {
    Affine(theta.subspan(l.w2, l.b2 - l.w2), theta.subspan(l.b2, arch.classes),
           features, logits);
    return logits;
  }
  std::vector<double> hidden(arch.hidden);
  Affine(theta.subspan(l.w1, l.b1 - l.w1), theta.subspan(l.b1, arch.hidden),
         features, hidden);
  for (double& h : hidden) h = std::tanh(h);
  Affine(theta.subspan(l.w2, l.b2 - l.w2), theta.subspan(l.b2, arch.classes),
         hidden, logits);
  return logits;
}

double LossAndGradient(const ModelParams& params,
                       std::span<const double> features, int label,
                       std::span<double> grad) {
  const Architecture& arch = params.arch;
  const Layout l = MakeLayout(arch);
  std::span<const double> theta(params.values);
  const size_t k = arch.classes;

  std::vector<double> hidden;
  std::span<const double> top_input = features;
  if (arch.hidden > 0) {
    hidden.resize(arch.hidden);
    Affine(theta.subspan(l.w1, l.b1 - l.w1), theta.subspan(l.b1, arch.hidden),
           features, hidden);
    for (double& h : hidden) h = std::tanh(h);
    top_input = hidden;
  }
  std::vector<double> logits(k);
  Affine(theta.subspan(l.w2, l.b2 - l.w2), theta.subspan(l.b2, k), top_input,
         logits);

  const double lse = LogSumExp(logits);
  const double loss = lse - logits[label];

  // Residual softmax(z) - onehot(y), stored in place.
  std::vector<double>& residual = logits;
  for (size_t c = 0; c < k; ++c) residual[c] = std::exp(residual[c] - lse);
  residual[label] -= 1.0;

  const size_t m = top_input.size();
  for (size_t c = 0; c < k; ++c) {
    double* row = grad.data() + l.w2 + c * m;
    for (size_t j = 0; j < m; ++j) row[j] = residual[c] * top_input[j];
    grad[l.b2 + c] = residual[c];
  }
  if (arch.hidden == 0) return loss;

  const size_t in = features.size();
  for (int h = 0; h < arch.hidden; ++h) {
    double back = 0.0;
    for (size_t c = 0; c < k; ++c) back += theta[l.w2 + c * m + h] * residual[c];
    const double dz = back * (1.0 - hidden[h] * hidden[h]);
    double* row = grad.data() + l.w1 + h * in;
    for (size_t j = 0; j < in; ++j) row[j] = dz * features[j];
    grad[l.b1 + h] = dz;
  }
  return loss;
}

absl::StatusOr<double> Loss(const ModelParams& params, const Example& example) {
  if (absl::Status s = ValidatePair(params, example); !s.ok()) return s;
  const std::vector<double> logits = Logits(params, example.features);
  return LogSumExp(logits) - logits[example.label];
}

absl::StatusOr<GradientVector> PerExampleGradient(const ModelParams& params,
                                                  const Example& example) {
  if (absl::Status s = ValidatePair(params, example); !s.ok()) return s;
  GradientVector grad(params.values.size());
  LossAndGradient(params, example.features, example.label, grad);
  return grad;
}

int Predict(const ModelParams& params, std::span<const double> features) {
  const std::vector<double> logits = Logits(params, features);
  return static_cast<int>(std::max_element(logits.begin(), logits.end()) -
                          logits.begin());
}

double L2Norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

}  // namespace dcsgd
