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

#include "dcsgd/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_format.h"

namespace dcsgd {
namespace {

constexpr int kMaxIntegerOrder = 512;

double LogAddExp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

// log A_alpha for integer alpha, where
//   A_alpha = sum_k C(alpha, k) (1 - q)^(alpha - k) q^k exp((k^2 - k) / 2s^2)
// is E_{x ~ N(0, s^2)}[(P(x) / Q(x))^alpha] for the mixture P.
double LogMomentIntegerOrder(double q, double sigma, int64_t alpha) {
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  const double lgamma_alpha = std::lgamma(static_cast<double>(alpha) + 1.0);
  double log_a = -std::numeric_limits<double>::infinity();
  for (int64_t k = 0; k <= alpha; ++k) {
    const double kd = static_cast<double>(k);
    const double log_binom = lgamma_alpha - std::lgamma(kd + 1.0) -
                             std::lgamma(static_cast<double>(alpha - k) + 1.0);
    const double term = log_binom + static_cast<double>(alpha - k) * log_1mq +
                        kd * log_q + (kd * kd - kd) * inv_two_var;
    log_a = LogAddExp(log_a, term);
  }
  return log_a;
}

absl::Status ValidateDelta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  return absl::OkStatus();
}

absl::Status ValidateSgmParameters(double q, double sigma) {
  if (!(q > 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sampling rate q must lie in (0, 1], got %g", q));
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "noise multiplier sigma must be positive and finite, got %g", sigma));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status ValidateRdpCurve(const RdpCurve& curve) {
  if (curve.orders.empty()) {
    return absl::InvalidArgumentError("RDP curve has no orders");
  }
  if (curve.orders.size() != curve.values.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "RDP curve has %d orders but %d values", curve.orders.size(),
        curve.values.size()));
  }
  for (size_t i = 0; i < curve.orders.size(); ++i) {
    if (!(curve.orders[i] > 1.0) || !std::isfinite(curve.orders[i])) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "RDP order must be finite and > 1, got %g", curve.orders[i]));
    }
    if (i > 0 && !(curve.orders[i] > curve.orders[i - 1])) {
      return absl::InvalidArgumentError(
          "RDP orders must be strictly increasing");
    }
    if (!(curve.values[i] >= 0.0)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "RDP value at order %g is negative or NaN", curve.orders[i]));
    }
  }
  return absl::OkStatus();
}

const std::vector<double>& DefaultRdpOrders() {
  static const std::vector<double>* const kOrders = [] {
    auto* orders = new std::vector<double>{1.25, 1.5, 1.75};
    for (int a = 2; a <= kMaxIntegerOrder; ++a) orders->push_back(a);
    return orders;
  }();
  return *kOrders;
}

absl::StatusOr<double> RdpSgm(double q, double sigma, double alpha) {
  if (absl::Status s = ValidateSgmParameters(q, sigma); !s.ok()) return s;
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("RDP order must be finite and > 1, got %g", alpha));
  }
  if (q == 1.0) return alpha / (2.0 * sigma * sigma);

  const auto order = static_cast<int64_t>(std::ceil(alpha));
  const double rho = LogMomentIntegerOrder(q, sigma, order) /
                     static_cast<double>(order - 1);
  // Round-off can leave tiny negative values when q is very small.
  return std::max(rho, 0.0);
}

absl::StatusOr<RdpCurve> SgmRdpCurve(double q, double sigma,
                                     std::span<const double> orders) {
  if (orders.empty()) orders = DefaultRdpOrders();
  RdpCurve curve;
  curve.orders.assign(orders.begin(), orders.end());
  curve.values.reserve(orders.size());
  for (double alpha : orders) {
    absl::StatusOr<double> rho = RdpSgm(q, sigma, alpha);
    if (!rho.ok()) return rho.status();
    curve.values.push_back(*rho);
  }
  if (absl::Status s = ValidateRdpCurve(curve); !s.ok()) return s;
  return curve;
}

absl::StatusOr<RdpCurve> Compose(const RdpCurve& curve, int64_t steps) {
  if (absl::Status s = ValidateRdpCurve(curve); !s.ok()) return s;
  if (steps < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("step count must be >= 1, got %d", steps));
  }
  RdpCurve composed = curve;
  for (double& v : composed.values) v *= static_cast<double>(steps);
  return composed;
}

absl::StatusOr<DpGuarantee> RdpToDp(const RdpCurve& curve, double delta) {
  if (absl::Status s = ValidateDelta(delta); !s.ok()) return s;
  if (absl::Status s = ValidateRdpCurve(curve); !s.ok()) return s;

  const double log_delta = std::log(delta);
  DpGuarantee best{std::numeric_limits<double>::infinity(), curve.orders[0]};
  for (size_t i = 0; i < curve.orders.size(); ++i) {
    const double a = curve.orders[i];
    const double eps = curve.values[i] + std::log1p(-1.0 / a) -
                       (log_delta + std::log(a)) / (a - 1.0);
    if (eps < best.epsilon) best = {eps, a};
  }
  best.epsilon = std::max(best.epsilon, 0.0);
  return best;
}

absl::StatusOr<DpGuarantee> SgmEpsilon(double q, double sigma, int64_t steps,
                                       double delta) {
  absl::StatusOr<RdpCurve> step = SgmRdpCurve(q, sigma);
  if (!step.ok()) return step.status();
  absl::StatusOr<RdpCurve> total = Compose(*step, steps);
  if (!total.ok()) return total.status();
  return RdpToDp(*total, delta);
}

absl::StatusOr<double> CalibrateSigma(double epsilon, double delta, double q,
                                      int64_t steps,
                                      const CalibrationOptions& options) {
  if (!(epsilon > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("target epsilon must be positive, got %g", epsilon));
  }
  if (absl::Status s = ValidateDelta(delta); !s.ok()) return s;
  if (absl::Status s = ValidateSgmParameters(q, 1.0); !s.ok()) return s;
  if (steps < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("step count must be >= 1, got %d", steps));
  }
  if (!(options.min_sigma > 0.0 && options.min_sigma < options.max_sigma &&
        options.tolerance > 0.0)) {
    return absl::InvalidArgumentError("invalid calibration options");
  }

  auto private_enough = [&](double sigma) -> absl::StatusOr<bool> {
    absl::StatusOr<DpGuarantee> g = SgmEpsilon(q, sigma, steps, delta);
    if (!g.ok()) return g.status();
    return g->epsilon <= epsilon;
  };

  absl::StatusOr<bool> at_min = private_enough(options.min_sigma);
  if (!at_min.ok()) return at_min.status();
  if (*at_min) return options.min_sigma;

  absl::StatusOr<bool> at_max = private_enough(options.max_sigma);
  if (!at_max.ok()) return at_max.status();
  if (!*at_max) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "(epsilon=%g, delta=%g) is unreachable with q=%g over %d steps: "
        "sigma would exceed %g",
        epsilon, delta, q, steps, options.max_sigma));
  }

  // Invariant: lo is not private enough, hi is.
  double lo = options.min_sigma;
  double hi = options.max_sigma;
  while (hi - lo > options.tolerance) {
    const double mid = 0.5 * (lo + hi);
    absl::StatusOr<bool> ok = private_enough(mid);
    if (!ok.ok()) return ok.status();
    (*ok ? hi : lo) = mid;
  }
  return hi;
}

absl::StatusOr<double> SplitNoise(double sigma, double sigma_h) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "total noise multiplier must be positive, got %g", sigma));
  }
  if (!(sigma_h > sigma)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "histogram noise multiplier %g must exceed the total multiplier %g",
        sigma_h, sigma));
  }
  const double inv_var = 1.0 / (sigma * sigma) - 1.0 / (sigma_h * sigma_h);
  return 1.0 / std::sqrt(inv_var);
}

double CombineNoise(double sigma_t, double sigma_h) {
  return 1.0 / std::sqrt(1.0 / (sigma_t * sigma_t) +
                         1.0 / (sigma_h * sigma_h));
}

double AutoSigmaH(double sigma) {
  if (sigma < 2.0) return 5.0;
  if (sigma <= 3.0) return 8.0;
  return 12.0;
}

absl::StatusOr<TuningCost> LtTuningCost(double eps1, double delta1,
                                        double gamma, double delta2) {
  if (!(eps1 > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("per-run epsilon must be positive, got %g", eps1));
  }
  if (!(delta1 >= 0.0 && delta1 < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("per-run delta must lie in [0, 1), got %g", delta1));
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("gamma must lie in (0, 1], got %g", gamma));
  }
  if (!(delta2 > 0.0 && delta2 < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta2 must lie in (0, 1), got %g", delta2));
  }
  const double max_runs = std::log(1.0 / delta2) / gamma;
  const double radical = 3.0 * std::sqrt(2.0 * delta1);
  return TuningCost{
      .epsilon = 3.0 * eps1 + radical,
      .delta = radical * max_runs + delta2,
      .max_runs = max_runs,
  };
}

absl::StatusOr<PrivacyBudget> MakePrivacyBudget(
    double epsilon, double delta, double q, int64_t steps, bool with_histogram,
    std::optional<double> sigma_h, const CalibrationOptions& options) {
  absl::StatusOr<double> sigma =
      CalibrateSigma(epsilon, delta, q, steps, options);
  if (!sigma.ok()) return sigma.status();

  PrivacyBudget budget{
      .epsilon = epsilon,
      .delta = delta,
      .q = q,
      .steps = steps,
      .sigma = *sigma,
      .sigma_h = std::nullopt,
      .sigma_t = *sigma,
  };
  if (!with_histogram) return budget;

  const double histogram_sigma = sigma_h.value_or(AutoSigmaH(*sigma));
  absl::StatusOr<double> sigma_t = SplitNoise(*sigma, histogram_sigma);
  if (!sigma_t.ok()) return sigma_t.status();
  budget.sigma_h = histogram_sigma;
  budget.sigma_t = *sigma_t;
  return budget;
}

}  // namespace dcsgd
