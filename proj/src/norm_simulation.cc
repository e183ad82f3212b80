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

#include "dcsgd/norm_simulation.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"

namespace dcsgd {

double EmpiricalQuantile(std::span<const double> norms, double p) {
  std::vector<double> sorted(norms.begin(), norms.end());
  std::sort(sorted.begin(), sorted.end());
  const double rank = std::ceil(p * static_cast<double>(sorted.size()));
  const size_t index =
      std::clamp<size_t>(static_cast<size_t>(std::max(rank, 1.0)) - 1, 0,
                         sorted.size() - 1);
  return sorted[index];
}

ErrorEstimate ExactExpectedSquaredError(std::span<const double> norms,
                                        double clip, double sigma_t,
                                        double batch_size, double dimension) {
  ErrorEstimate e{.clip = clip};
  e.variance =
      sigma_t * sigma_t * clip * clip * dimension / (batch_size * batch_size);
  double sum = 0.0;
  for (double g : norms) {
    const double over = std::max(g - clip, 0.0);
    sum += over * over;
  }
  e.bias = norms.empty() ? 0.0 : sum / static_cast<double>(norms.size());
  e.total = e.variance + e.bias;
  return e;
}

absl::StatusOr<std::vector<PercentilePoint>> PercentileCurve(
    const NormHistogram& hist, std::span<const double> norms,
    std::span<const double> percentiles) {
  if (norms.empty()) {
    return absl::InvalidArgumentError("norm population is empty");
  }
  const ClipState state{.clip = hist.range / 2.0,
                        .range = hist.range,
                        .strategy = ClipStrategy::kPercentile};
  std::vector<PercentilePoint> curve;
  for (double p : percentiles) {
    absl::StatusOr<ClipState> next = PercentileThreshold(hist, p, state);
    if (!next.ok()) return next.status();
    curve.push_back({p, next->clip, EmpiricalQuantile(norms, p)});
  }
  return curve;
}

absl::StatusOr<std::vector<ErrorCurvePoint>> ErrorCurve(
    const NormHistogram& hist, std::span<const double> norms,
    std::span<const double> thresholds, double sigma_t, double batch_size,
    double dimension) {
  std::vector<ErrorCurvePoint> curve;
  for (double c : thresholds) {
    absl::StatusOr<ErrorEstimate> est =
        ExpectedSquaredError(hist, c, sigma_t, batch_size, dimension);
    if (!est.ok()) return est.status();
    curve.push_back({*est, ExactExpectedSquaredError(norms, c, sigma_t,
                                                     batch_size, dimension)});
  }
  return curve;
}

void WritePercentileCurveCsv(std::span<const PercentilePoint> curve,
                             std::ostream& out) {
  out << "p,estimated,exact\n";
  for (const PercentilePoint& pt : curve) {
    out << absl::StrFormat("%.17g,%.17g,%.17g\n", pt.p, pt.estimated,
                           pt.exact);
  }
}

void WriteErrorCurveCsv(std::span<const ErrorCurvePoint> curve,
                        std::ostream& out) {
  out << "C,variance,bias,total,exact_bias,exact_total\n";
  for (const ErrorCurvePoint& pt : curve) {
    out << absl::StrFormat("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                           pt.estimated.clip, pt.estimated.variance,
                           pt.estimated.bias, pt.estimated.total,
                           pt.exact.bias, pt.exact.total);
  }
}

}  // namespace dcsgd
