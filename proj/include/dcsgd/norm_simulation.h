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

// Histogram-estimated versus exact threshold curves over a fixed norm
// population, as emitted by `dcsgd simulate-norms`.

#ifndef DCSGD_NORM_SIMULATION_H_
#define DCSGD_NORM_SIMULATION_H_

#include <ostream>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dcsgd/histogram.h"
#include "dcsgd/strategy.h"

namespace dcsgd {

// Smallest sample v with #{x <= v} >= p * n, i.e. the ceil(p n)-th order
// statistic.
double EmpiricalQuantile(std::span<const double> norms, double p);

// Expected squared error at `clip` computed on the raw norms:
// variance as in ExpectedSquaredError, bias = mean(max(norm - clip, 0)^2).
ErrorEstimate ExactExpectedSquaredError(std::span<const double> norms,
                                        double clip, double sigma_t,
                                        double batch_size, double dimension);

struct PercentilePoint {
  double p;
  double estimated;
  double exact;
};

absl::StatusOr<std::vector<PercentilePoint>> PercentileCurve(
    const NormHistogram& hist, std::span<const double> norms,
    std::span<const double> percentiles);

struct ErrorCurvePoint {
  ErrorEstimate estimated;
  ErrorEstimate exact;
};

absl::StatusOr<std::vector<ErrorCurvePoint>> ErrorCurve(
    const NormHistogram& hist, std::span<const double> norms,
    std::span<const double> thresholds, double sigma_t, double batch_size,
    double dimension);

// p,estimated,exact
void WritePercentileCurveCsv(std::span<const PercentilePoint> curve,
                             std::ostream& out);
// C,variance,bias,total,exact_bias,exact_total
void WriteErrorCurveCsv(std::span<const ErrorCurvePoint> curve,
                        std::ostream& out);

}  // namespace dcsgd

#endif  // DCSGD_NORM_SIMULATION_H_
