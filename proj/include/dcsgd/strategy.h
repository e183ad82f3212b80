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

// Clipping-threshold selection from a noisy gradient-norm histogram.
//
// Everything here is post-processing of an already-private histogram and
// consumes no privacy budget. A threshold selected from iteration t's
// histogram is meant to be used at iteration t + 1.

#ifndef DCSGD_STRATEGY_H_
#define DCSGD_STRATEGY_H_

#include <optional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "dcsgd/histogram.h"

namespace dcsgd {

enum class ClipStrategy {
  kStatic,
  kPercentile,
  kExpectedError,
};

std::string_view ClipStrategyName(ClipStrategy strategy);
absl::StatusOr<ClipStrategy> ParseClipStrategy(std::string_view name);

struct ClipState {
  // Clipping threshold in force.
  double clip = 1.0;
  // Range of the next histogram.
  double range = 1.0;
  ClipStrategy strategy = ClipStrategy::kStatic;
  // Target unclipped fraction in (0, 1); percentile strategy only.
  double percentile = 0.5;
};

// Initial state with the default range for `strategy`: 1 for percentile,
// `bins` for expected-error, 2 * clip otherwise.
ClipState InitialClipState(ClipStrategy strategy, double clip, int bins,
                           double percentile = 0.5);

// Percentile rule. Accumulates noisy counts left to right until the running
// sum reaches percentile * TotalCount(hist); the stopping bin's midpoint
// becomes the new threshold and the new range is twice that. When the noisy
// total is <= 0 the state is returned unchanged.
absl::StatusOr<ClipState> PercentileThreshold(const NormHistogram& hist,
                                              double percentile,
                                              const ClipState& state);

// Expected squared error of one privatized gradient at threshold `clip`,
// estimated from the histogram with bin midpoints standing in for norms.
struct ErrorEstimate {
  double clip = 0.0;
  // sigma_t^2 clip^2 dim / batch^2
  double variance = 0.0;
  // sum_i count_i max(mid_i - clip, 0)^2 / max(total, 1)
  double bias = 0.0;
  double total = 0.0;
};

absl::StatusOr<ErrorEstimate> ExpectedSquaredError(const NormHistogram& hist,
                                                   double clip, double sigma_t,
                                                   double batch_size,
                                                   double dimension);

struct ErrorMinimizingUpdate {
  ClipState state;
  // Unset when the histogram total was <= 0 and the state was kept.
  std::optional<ErrorEstimate> selected;
  int recenterings = 0;
};

inline constexpr int kCandidateCount = 20;
inline constexpr int kMaxRecenterings = 10;

// Expected-error rule. Scores the 20 candidates 0.1C, 0.2C, ..., 2.0C and
// keeps the argmin (ties to the smaller candidate). If the argmin is an end
// of the grid the grid is re-centred on it, at most kMaxRecenterings times.
// The histogram range then doubles when the last bin holds at least half the
// noisy total, or halves when the right half of the bins holds at most
// total / bins.
absl::StatusOr<ErrorMinimizingUpdate> ErrorMinimizingThreshold(
    const NormHistogram& hist, const ClipState& state, double sigma_t,
    double batch_size, double dimension);

}  // namespace dcsgd

#endif  // DCSGD_STRATEGY_H_
