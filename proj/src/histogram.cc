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

#include "dcsgd/histogram.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_format.h"

namespace dcsgd {

int BinIndex(double norm, double range, int bins) {
  if (norm >= range) return bins - 1;
  int index = static_cast<int>(std::floor(bins * norm / range));
  index = std::clamp(index, 0, bins - 1);
  // floor(bins * norm / range) can be off by one next to a boundary.
  NormHistogram geometry;
  geometry.range = range;
  geometry.bins = bins;
  if (index + 1 < bins && norm >= geometry.bin_low(index + 1)) ++index;
  if (index > 0 && norm < geometry.bin_low(index)) --index;
  return index;
}

absl::StatusOr<NormHistogram> BuildHistogram(std::span<const double> norms,
                                             double range, int bins,
                                             double sigma_h,
                                             std::mt19937_64& rng) {
  if (!(range > 0.0) || !std::isfinite(range)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("histogram range must be positive, got %g", range));
  }
  if (bins < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("histogram needs at least 2 bins, got %d", bins));
  }
  if (!(sigma_h >= 0.0) || !std::isfinite(sigma_h)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "histogram noise multiplier must be >= 0, got %g", sigma_h));
  }

  NormHistogram hist{
      .counts = std::vector<double>(bins, 0.0),
      .range = range,
      .bins = bins,
      .sigma_h = sigma_h,
  };
  for (size_t i = 0; i < norms.size(); ++i) {
    const double norm = norms[i];
    if (!(norm >= 0.0)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "gradient norm %d is negative or NaN (%g)", i, norm));
    }
    hist.counts[BinIndex(norm, range, bins)] += 1.0;
  }

  if (sigma_h > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma_h);
    for (double& count : hist.counts) count += noise(rng);
  }
  return hist;
}

double TotalCount(const NormHistogram& hist) {
  return std::accumulate(hist.counts.begin(), hist.counts.end(), 0.0);
}

void WriteHistogramCsv(const NormHistogram& hist, std::ostream& out) {
  out << "bin_lo,bin_hi,count\n";
  for (int i = 0; i < hist.bins; ++i) {
    out << absl::StrFormat("%.17g,%.17g,%.17g\n", hist.bin_low(i),
                           hist.bin_high(i), hist.counts[i]);
  }
}

}  // namespace dcsgd
