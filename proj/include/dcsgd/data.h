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

#ifndef DCSGD_DATA_H_
#define DCSGD_DATA_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dcsgd/models.h"

namespace dcsgd {

struct NormDistribution {
  enum class Kind { kGaussian, kLogNormal, kConstant };
  Kind kind = Kind::kConstant;
  // Gaussian / log-normal: location and scale. Constant: value in `location`.
  double location = 0.0;
  double scale = 0.0;

  static NormDistribution Gaussian(double mean, double stddev) {
    return {Kind::kGaussian, mean, stddev};
  }
  static NormDistribution LogNormal(double mu, double s) {
    return {Kind::kLogNormal, mu, s};
  }
  static NormDistribution Constant(double value) {
    return {Kind::kConstant, value, 0.0};
  }
};

struct NormPopulation {
  std::vector<double> values;
  NormDistribution distribution;
  uint64_t seed = 0;
};

// `n` i.i.d. non-negative draws. Negative Gaussian draws are redrawn, not
// truncated.
absl::StatusOr<NormPopulation> GenerateNorms(const NormDistribution& dist,
                                             int n, uint64_t seed);

struct Dataset {
  std::vector<Example> examples;
  int num_classes = 0;
  std::vector<size_t> train;
  std::vector<size_t> test;

  int feature_dim() const {
    return examples.empty() ? 0
                            : static_cast<int>(examples[0].features.size());
  }
};

inline constexpr double kDefaultTestFraction = 0.2;

// Seeded shuffle of [0, n) split into train and test parts; test receives
// floor(n * test_fraction) indices.
void AssignSplit(Dataset& dataset, double test_fraction, uint64_t seed);

absl::Status ValidateDataset(const Dataset& dataset);

// `n` points from `classes` unit-variance Gaussian clusters in `dim`
// dimensions. Centres are `separation` apart pairwise (scaled basis vectors),
// labels are balanced, and the 80/20 split is drawn from `seed`.
absl::StatusOr<Dataset> GenerateBlobs(int n, int dim, int classes,
                                      double separation, uint64_t seed);

struct CsvOptions {
  std::string label_column = "label";
  // Rescale every feature column to zero mean and unit variance.
  bool standardize = true;
  double test_fraction = kDefaultTestFraction;
  uint64_t split_seed = 0;
};

// Header row, comma separator, `.` decimals. Every non-label column is a
// feature; labels must be non-negative integers and define the class count.
absl::StatusOr<Dataset> LoadCsv(const std::string& path,
                                const CsvOptions& options = {});
absl::StatusOr<Dataset> ParseCsv(std::istream& in,
                                 const CsvOptions& options = {});

// Writes features as f0..f{d-1} followed by `label_column`, 17 significant
// digits.
void WriteCsv(const Dataset& dataset, std::ostream& out,
              const std::string& label_column = "label");

}  // namespace dcsgd

#endif  // DCSGD_DATA_H_
