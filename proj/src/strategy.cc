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

#include "dcsgd/strategy.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "absl/strings/str_format.h"

namespace dcsgd {
namespace {

constexpr std::array<std::pair<ClipStrategy, std::string_view>, 3>
    kStrategyNames = {{
        {ClipStrategy::kStatic, "static"},
        {ClipStrategy::kPercentile, "percentile"},
        {ClipStrategy::kExpectedError, "expected-error"},
    }};

absl::Status ValidateHistogram(const NormHistogram& hist) {
  if (hist.bins < 2 || static_cast<int>(hist.counts.size()) != hist.bins ||
      !(hist.range > 0.0)) {
    return absl::InvalidArgumentError("malformed norm histogram");
  }
  return absl::OkStatus();
}

}  // namespace

std::string_view ClipStrategyName(ClipStrategy strategy) {
  for (const auto& [value, name] : kStrategyNames) {
    if (value == strategy) return name;
  }
  return "unknown";
}

absl::StatusOr<ClipStrategy> ParseClipStrategy(std::string_view name) {
  for (const auto& [value, known] : kStrategyNames) {
    if (known == name) return value;
  }
  return absl::InvalidArgumentError(absl::StrFormat(
      "unknown strategy '%s'; expected one of: static, percentile, "
      "expected-error",
      std::string(name)));
}

ClipState InitialClipState(ClipStrategy strategy, double clip, int bins,
                           double percentile) {
  ClipState state{.clip = clip,
                  .range = 2.0 * clip,
                  .strategy = strategy,
                  .percentile = percentile};
  if (strategy == ClipStrategy::kPercentile) state.range = 1.0;
  if (strategy == ClipStrategy::kExpectedError) state.range = bins;
  return state;
}

absl::StatusOr<ClipState> PercentileThreshold(const NormHistogram& hist,
                                              double percentile,
                                              const ClipState& state) {
  if (!(percentile > 0.0 && percentile < 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "percentile must lie in (0, 1), got %g", percentile));
  }
  if (absl::Status s = ValidateHistogram(hist); !s.ok()) return s;

  const double total = TotalCount(hist);
  if (!(total > 0.0)) return state;

  const double target = percentile * total;
  double running = 0.0;
  int stop = hist.bins - 1;
  for (int i = 0; i < hist.bins; ++i) {
    running += hist.counts[i];
    if (running >= target) {
      stop = i;
      break;
    }
  }

  ClipState next = state;
  next.clip = hist.bin_mid(stop);
  next.range = 2.0 * next.clip;
  return next;
}

absl::StatusOr<ErrorEstimate> ExpectedSquaredError(const NormHistogram& hist,
                                                   double clip, double sigma_t,
                                                   double batch_size,
                                                   double dimension) {
  if (!(clip > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("candidate threshold must be positive, got %g", clip));
  }
  if (!(batch_size >= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("expected batch size must be >= 1, got %g",
                        batch_size));
  }
  if (!(dimension >= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("model dimension must be >= 1, got %g", dimension));
  }
  if (!(sigma_t >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("gradient noise multiplier must be >= 0, got %g",
                        sigma_t));
  }
  if (absl::Status s = ValidateHistogram(hist); !s.ok()) return s;

  ErrorEstimate estimate;
  estimate.clip = clip;
  estimate.variance =
      sigma_t * sigma_t * clip * clip * dimension / (batch_size * batch_size);
  double excess = 0.0;
  for (int i = 0; i < hist.bins; ++i) {
    const double over = std::max(hist.bin_mid(i) - clip, 0.0);
    excess += hist.counts[i] * over * over;
  }
  estimate.bias = excess / std::max(TotalCount(hist), 1.0);
  estimate.total = estimate.variance + estimate.bias;
  return estimate;
}

absl::StatusOr<ErrorMinimizingUpdate> ErrorMinimizingThreshold(
    const NormHistogram& hist, const ClipState& state, double sigma_t,
    double batch_size, double dimension) {
  if (absl::Status s = ValidateHistogram(hist); !s.ok()) return s;
  ErrorMinimizingUpdate update;
  update.state = state;
  const double total = TotalCount(hist);
  if (!(total > 0.0)) return update;

  double center = state.clip;
  ErrorEstimate best;
  for (;;) {
    int best_index = -1;
    for (int i = 1; i <= kCandidateCount; ++i) {
      absl::StatusOr<ErrorEstimate> e = ExpectedSquaredError(
          hist, i * center / 10.0, sigma_t, batch_size, dimension);
      if (!e.ok()) return e.status();
      // Strict comparison keeps the smaller candidate on ties.
      if (best_index < 0 || e->total < best.total) {
        best = *e;
        best_index = i;
      }
    }
    const bool on_boundary = best_index == 1 || best_index == kCandidateCount;
    if (!on_boundary || update.recenterings == kMaxRecenterings) break;
    center = best.clip;
    ++update.recenterings;
  }
  update.state.clip = best.clip;
  update.selected = best;

  double right_half = 0.0;
  for (int i = hist.bins / 2; i < hist.bins; ++i) right_half += hist.counts[i];
  if (hist.counts[hist.bins - 1] >= 0.5 * total) {
    update.state.range = 2.0 * state.range;
  } else if (right_half <= total / hist.bins) {
    update.state.range = 0.5 * state.range;
  }
  return update;
}

}  // namespace dcsgd
