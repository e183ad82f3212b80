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

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "dcsgd/data.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_oracles.h"

namespace dcsgd {
namespace {

using ::testing::ElementsAre;

NormHistogram MustBuild(const std::vector<double>& norms, double range,
                        int bins, double sigma_h, uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  absl::StatusOr<NormHistogram> h =
      BuildHistogram(norms, range, bins, sigma_h, rng);
  EXPECT_TRUE(h.ok()) << h.status();
  return *h;
}

TEST(BuildHistogramTest, OutlierLandsInLastBin) {
  // Width 0.5: 0.5 opens bin 1, 1.5 opens bin 3, 99 is clamped into bin 3.
  NormHistogram h = MustBuild({0.5, 1.5, 99.0}, 2.0, 4, 0.0);
  EXPECT_THAT(h.counts, ElementsAre(0.0, 1.0, 0.0, 2.0));
  // Width 0.75 separates all three.
  NormHistogram wide = MustBuild({0.5, 1.5, 99.0}, 3.0, 4, 0.0);
  EXPECT_THAT(wide.counts, ElementsAre(1.0, 0.0, 1.0, 1.0));
}

TEST(BuildHistogramTest, EmptyInputGivesZeroCounts) {
  NormHistogram h = MustBuild({}, 3.0, 5, 0.0);
  EXPECT_THAT(h.counts, ElementsAre(0.0, 0.0, 0.0, 0.0, 0.0));
  EXPECT_EQ(TotalCount(h), 0.0);
}

TEST(BuildHistogramTest, BinEdgesAreHalfOpen) {
  NormHistogram h = MustBuild({0.0, 1.0, 2.0, 2.9999, 3.0}, 3.0, 3, 0.0);
  EXPECT_THAT(h.counts, ElementsAre(1.0, 1.0, 3.0));
  for (int b : {3, 7, 10, 49}) {
    for (int i = 0; i < b; ++i) {
      EXPECT_EQ(BinIndex(i * 1.3 / b, 1.3, b), i) << "b=" << b << " i=" << i;
    }
  }
}

TEST(BuildHistogramTest, MatchesSortAndBucketOracle) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    absl::StatusOr<NormPopulation> pop =
        GenerateNorms(NormDistribution::Gaussian(100.0, 20.0), 256, seed);
    ASSERT_TRUE(pop.ok());
    NormHistogram h = MustBuild(pop->values, 150.0, 20, 0.0);
    EXPECT_EQ(h.counts, testing::SortAndBucket(pop->values, 150.0, 20));
    EXPECT_EQ(TotalCount(h), 256.0);
  }
}

TEST(BuildHistogramTest, NoiseHasConfiguredVariance) {
  absl::StatusOr<NormPopulation> pop =
      GenerateNorms(NormDistribution::Gaussian(100.0, 20.0), 256, 11);
  ASSERT_TRUE(pop.ok());
  const std::vector<double> clean =
      testing::SortAndBucket(pop->values, 150.0, 20);
  double sum = 0.0;
  double sum_sq = 0.0;
  int n = 0;
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    NormHistogram h = MustBuild(pop->values, 150.0, 20, 5.0, seed);
    for (int i = 0; i < 20; ++i) {
      const double d = h.counts[i] - clean[i];
      sum += d;
      sum_sq += d * d;
      ++n;
    }
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  EXPECT_NEAR(var, 25.0, 0.3 * 25.0);
}

TEST(BuildHistogramTest, NoNoiseLeavesRngUntouched) {
  std::mt19937_64 rng(3);
  std::mt19937_64 reference(3);
  ASSERT_TRUE(BuildHistogram(std::vector<double>{1.0, 2.0}, 4.0, 4, 0.0, rng).ok());
  EXPECT_EQ(rng(), reference());
}

TEST(BuildHistogramTest, DeterministicUnderSeed) {
  NormHistogram a = MustBuild({1.0, 2.0, 3.0}, 4.0, 8, 2.0, 42);
  NormHistogram b = MustBuild({1.0, 2.0, 3.0}, 4.0, 8, 2.0, 42);
  EXPECT_EQ(a.counts, b.counts);
}

TEST(BuildHistogramTest, RejectsInvalidArguments) {
  std::mt19937_64 rng(0);
  EXPECT_FALSE(BuildHistogram(std::vector<double>{1.0}, 0.0, 4, 0.0, rng).ok());
  EXPECT_FALSE(BuildHistogram(std::vector<double>{1.0}, 1.0, 1, 0.0, rng).ok());
  EXPECT_FALSE(BuildHistogram(std::vector<double>{1.0}, 1.0, 4, -1.0, rng).ok());
  EXPECT_FALSE(BuildHistogram(std::vector<double>{-1.0}, 1.0, 4, 0.0, rng).ok());
  EXPECT_FALSE(BuildHistogram(std::vector<double>{NAN}, 1.0, 4, 0.0, rng).ok());
}

TEST(TotalCountTest, SumsNoisyValues) {
  NormHistogram h{.counts = {3.0, -1.0, 2.0}, .range = 3.0, .bins = 3};
  EXPECT_EQ(TotalCount(h), 4.0);
}

TEST(WriteHistogramCsvTest, OneRowPerBin) {
  NormHistogram h = MustBuild({0.5, 1.5}, 2.0, 2, 0.0);
  std::ostringstream out;
  WriteHistogramCsv(h, out);
  EXPECT_EQ(out.str(), "bin_lo,bin_hi,count\n0,1,1\n1,2,1\n");
}

}  // namespace
}  // namespace dcsgd
