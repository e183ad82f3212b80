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

#ifndef DCSGD_HISTOGRAM_H_
#define DCSGD_HISTOGRAM_H_

#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dcsgd {

// Histogram of per-example gradient norms over [0, range) with `bins` equal
// bins. The last bin also absorbs every norm >= range. After noise injection
// the counts are real-valued and may be negative.
struct NormHistogram {
  std::vector<double> counts;
  double range = 0.0;
  int bins = 0;
  double sigma_h = 0.0;

  double bin_width() const { return range / bins; }
  double bin_low(int i) const { return i * range / bins; }
  double bin_high(int i) const { return (i + 1) * range / bins; }
  double bin_mid(int i) const { return (i + 0.5) * range / bins; }
};

// Bin receiving a norm: min(bins - 1, floor(bins * norm / range)), with
// bin boundaries resolved against bin_low() so a norm equal to a boundary
// always lands in the upper bin.
int BinIndex(double norm, double range, int bins);

// Bins `norms` and adds independent N(0, sigma_h^2) noise to every bin, drawn
// in bin order from `rng`. With sigma_h == 0 no randomness is consumed.
// Adding or removing one norm changes the pre-noise counts by a one-hot
// vector, so the L2 sensitivity is 1.
absl::StatusOr<NormHistogram> BuildHistogram(std::span<const double> norms,
                                             double range, int bins,
                                             double sigma_h,
                                             std::mt19937_64& rng);

// Sum of the (noisy) counts; the DP estimate of the batch size.
double TotalCount(const NormHistogram& hist);

// Writes `bin_lo,bin_hi,count` rows with a header.
void WriteHistogramCsv(const NormHistogram& hist, std::ostream& out);

}  // namespace dcsgd

#endif  // DCSGD_HISTOGRAM_H_
