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

// Privacy calculus for DP-SGD with Poisson subsampling: Renyi DP of the
// subsampled Gaussian mechanism, composition, conversion to (epsilon, delta),
// noise calibration, and splitting a noise multiplier between the gradient
// release and the gradient-norm histogram release.
//
// All functions are pure and thread-compatible.

#ifndef DCSGD_ACCOUNTANT_H_
#define DCSGD_ACCOUNTANT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dcsgd {

// Renyi DP guarantee of a mechanism, tabulated over a grid of orders.
// `orders` is strictly increasing with every entry > 1; `values[i]` is the
// RDP (in nats) at `orders[i]`.
struct RdpCurve {
  std::vector<double> orders;
  std::vector<double> values;
};

// Checks the RdpCurve invariants (equal lengths, non-empty, strictly
// increasing orders > 1, finite non-negative values).
absl::Status ValidateRdpCurve(const RdpCurve& curve);

// Integers 2..512 plus {1.25, 1.5, 1.75}, ascending.
const std::vector<double>& DefaultRdpOrders();

// RDP of one step of the Poisson-subsampled Gaussian mechanism with sampling
// rate `q` and noise multiplier `sigma`, at order `alpha`. Integer orders use
// the exact binomial expansion in log space. A fractional order is bounded by
// the value at its ceiling, which never under-reports the privacy loss.
absl::StatusOr<double> RdpSgm(double q, double sigma, double alpha);

// RdpSgm over every order in `orders` (DefaultRdpOrders() when empty).
absl::StatusOr<RdpCurve> SgmRdpCurve(double q, double sigma,
                                     std::span<const double> orders = {});

// RDP composes additively over `steps` identical mechanisms.
absl::StatusOr<RdpCurve> Compose(const RdpCurve& curve, int64_t steps);

struct DpGuarantee {
  double epsilon;
  // Order at which the conversion bound is tightest.
  double alpha;
};

// Converts an RDP curve to (epsilon, delta)-DP, minimizing
//   rho(a) + log((a - 1) / a) - (log(delta) + log(a)) / (a - 1)
// over the curve's orders. Epsilon is floored at zero.
absl::StatusOr<DpGuarantee> RdpToDp(const RdpCurve& curve, double delta);

// End-to-end accounting for `steps` iterations of the subsampled Gaussian
// mechanism over the default order grid.
absl::StatusOr<DpGuarantee> SgmEpsilon(double q, double sigma, int64_t steps,
                                       double delta);

struct CalibrationOptions {
  double min_sigma = 0.1;
  double max_sigma = 100.0;
  double tolerance = 1e-3;
};

// Smallest noise multiplier (to within `tolerance`, rounded up) for which
// `steps` subsampled Gaussian steps at rate `q` satisfy (epsilon, delta)-DP.
// Returns `min_sigma` when even that is private enough, and
// FailedPreconditionError when `max_sigma` is not.
absl::StatusOr<double> CalibrateSigma(double epsilon, double delta, double q,
                                      int64_t steps,
                                      const CalibrationOptions& options = {});

// Gradient noise multiplier left after spending `sigma_h` on the histogram:
// (sigma^-2 - sigma_h^-2)^(-1/2). Joint release of gradient and one-hot
// histogram at (sigma_t, sigma_h) costs the same as a single release at
// `sigma`. FailedPreconditionError when sigma_h <= sigma.
absl::StatusOr<double> SplitNoise(double sigma, double sigma_h);

// Inverse of SplitNoise: (sigma_t^-2 + sigma_h^-2)^(-1/2).
double CombineNoise(double sigma_t, double sigma_h);

// Default histogram noise multiplier for a total multiplier `sigma`:
// 5 below 2, 8 on [2, 3], 12 above 3.
double AutoSigmaH(double sigma);

struct TuningCost {
  double epsilon;
  double delta;
  // Hard cap on the number of tuning runs.
  double max_runs;
};

// Privacy of random-stopping hyperparameter tuning with stopping probability
// `gamma` when every run is (eps1, delta1)-DP:
//   T = ln(1 / delta2) / gamma
//   eps' = 3 eps1 + 3 sqrt(2 delta1)
//   delta' = 3 sqrt(2 delta1) T + delta2
absl::StatusOr<TuningCost> LtTuningCost(double eps1, double delta1,
                                        double gamma, double delta2);

// Everything the training loop needs to know about its privacy parameters.
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;
  double q = 0.0;
  int64_t steps = 0;
  // Total noise multiplier, as accounted.
  double sigma = 0.0;
  // Histogram noise multiplier; nullopt when no histogram is released.
  std::optional<double> sigma_h;
  // Gradient noise multiplier; equals `sigma` when `sigma_h` is unset.
  double sigma_t = 0.0;
};

// Calibrates sigma for the target (epsilon, delta) and, if `with_histogram`,
// splits it using `sigma_h` (AutoSigmaH(sigma) when unset).
absl::StatusOr<PrivacyBudget> MakePrivacyBudget(
    double epsilon, double delta, double q, int64_t steps, bool with_histogram,
    std::optional<double> sigma_h = std::nullopt,
    const CalibrationOptions& options = {});

}  // namespace dcsgd

#endif  // DCSGD_ACCOUNTANT_H_
