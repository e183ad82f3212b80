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

#include "dcsgd/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string_view>

#include "absl/strings/str_format.h"

namespace dcsgd {
namespace {

constexpr int kMaxRedraws = 1000000;

std::string_view Trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n";
  const size_t begin = s.find_first_not_of(kSpace);
  if (begin == std::string_view::npos) return {};
  return s.substr(begin, s.find_last_not_of(kSpace) - begin + 1);
}

std::vector<std::string_view> SplitRow(std::string_view line) {
  std::vector<std::string_view> fields;
  for (;;) {
    const size_t comma = line.find(',');
    fields.push_back(Trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

bool ParseDouble(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty();
}

}  // namespace

absl::StatusOr<NormPopulation> GenerateNorms(const NormDistribution& dist,
                                             int n, uint64_t seed) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("norm count must be >= 1, got %d", n));
  }
  if (!(dist.scale >= 0.0) || !std::isfinite(dist.scale) ||
      !std::isfinite(dist.location)) {
    return absl::InvalidArgumentError(
        "distribution parameters must be finite with a non-negative scale");
  }
  NormPopulation pop{.distribution = dist, .seed = seed};
  pop.values.reserve(n);
  std::mt19937_64 rng(seed);

  switch (dist.kind) {
    case NormDistribution::Kind::kConstant:
      if (dist.location < 0.0) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "constant norm must be >= 0, got %g", dist.location));
      }
      pop.values.assign(n, dist.location);
      break;
    case NormDistribution::Kind::kLogNormal: {
      std::lognormal_distribution<double> draw(dist.location, dist.scale);
      for (int i = 0; i < n; ++i) pop.values.push_back(draw(rng));
      break;
    }
    case NormDistribution::Kind::kGaussian: {
      std::normal_distribution<double> draw(dist.location, dist.scale);
      for (int i = 0; i < n; ++i) {
        double v = draw(rng);
        for (int tries = 0; v < 0.0; ++tries) {
          if (tries == kMaxRedraws) {
            return absl::InvalidArgumentError(absl::StrFormat(
                "gaussian(%g, %g) almost never yields a non-negative norm",
                dist.location, dist.scale));
          }
          v = draw(rng);
        }
        pop.values.push_back(v);
      }
      break;
    }
  }
  return pop;
}

void AssignSplit(Dataset& dataset, double test_fraction, uint64_t seed) {
  const size_t n = dataset.examples.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto test_count =
      static_cast<size_t>(std::floor(static_cast<double>(n) * test_fraction));
  dataset.test.assign(order.begin(), order.begin() + test_count);
  dataset.train.assign(order.begin() + test_count, order.end());
  std::sort(dataset.test.begin(), dataset.test.end());
  std::sort(dataset.train.begin(), dataset.train.end());
}

absl::Status ValidateDataset(const Dataset& dataset) {
  if (dataset.examples.empty()) {
    return absl::InvalidArgumentError("dataset is empty");
  }
  const int dim = dataset.feature_dim();
  for (size_t i = 0; i < dataset.examples.size(); ++i) {
    const Example& e = dataset.examples[i];
    if (static_cast<int>(e.features.size()) != dim) {
      return absl::InvalidArgumentError(
          absl::StrFormat("example %d has %d features, expected %d", i,
                          e.features.size(), dim));
    }
    if (e.label < 0 || e.label >= dataset.num_classes) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "example %d has label %d outside [0, %d)", i, e.label,
          dataset.num_classes));
    }
  }
  std::vector<char> seen(dataset.examples.size(), 0);
  for (const auto* part : {&dataset.train, &dataset.test}) {
    for (size_t idx : *part) {
      if (idx >= seen.size() || seen[idx]) {
        return absl::InvalidArgumentError(
            "train/test split is not a partition of the examples");
      }
      seen[idx] = 1;
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    return absl::InvalidArgumentError(
        "train/test split does not cover every example");
  }
  return absl::OkStatus();
}

absl::StatusOr<Dataset> GenerateBlobs(int n, int dim, int classes,
                                      double separation, uint64_t seed) {
  if (classes < 2 || n < classes) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need n >= classes >= 2, got n=%d classes=%d", n, classes));
  }
  if (dim < classes) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "blob centres need dim >= classes, got dim=%d classes=%d", dim,
        classes));
  }
  if (!(separation >= 0.0) || !std::isfinite(separation)) {
    return absl::InvalidArgumentError("separation must be finite and >= 0");
  }

  // Scaled basis vectors: |c_i - c_j| = separation for all i != j.
  const double offset = separation / std::sqrt(2.0);
  Dataset dataset{.num_classes = classes};
  dataset.examples.reserve(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    Example e{.features = std::vector<double>(dim), .label = i % classes};
    for (int j = 0; j < dim; ++j) e.features[j] = noise(rng);
    e.features[e.label] += offset;
    dataset.examples.push_back(std::move(e));
  }
  AssignSplit(dataset, kDefaultTestFraction, seed);
  return dataset;
}

absl::StatusOr<Dataset> ParseCsv(std::istream& in, const CsvOptions& options) {
  std::string line;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError("CSV input is empty; expected a header");
  }
  std::vector<std::string> header;
  for (std::string_view f : SplitRow(line)) header.emplace_back(f);
  const auto label_it =
      std::find(header.begin(), header.end(), options.label_column);
  if (label_it == header.end()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "label column '%s' not found in CSV header", options.label_column));
  }
  const size_t label_col = label_it - header.begin();
  if (header.size() < 2) {
    return absl::InvalidArgumentError("CSV has no feature columns");
  }

  Dataset dataset;
  int max_label = -1;
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (Trim(line).empty()) continue;
    const std::vector<std::string_view> fields = SplitRow(line);
    if (fields.size() != header.size()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: expected %d fields, got %d", row,
                          header.size(), fields.size()));
    }
    Example e;
    e.features.reserve(header.size() - 1);
    for (size_t c = 0; c < fields.size(); ++c) {
      double value = 0.0;
      if (!ParseDouble(fields[c], value)) {
        return absl::InvalidArgumentError(
            absl::StrFormat("line %d, column '%s': cannot parse '%s' as a number",
                            row, header[c], std::string(fields[c])));
      }
      if (c != label_col) {
        e.features.push_back(value);
        continue;
      }
      if (!(value >= 0.0) || value != std::floor(value) || value > 1e9) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "line %d, column '%s': label '%s' is not a non-negative integer",
            row, header[c], std::string(fields[c])));
      }
      e.label = static_cast<int>(value);
      max_label = std::max(max_label, e.label);
    }
    dataset.examples.push_back(std::move(e));
  }
  if (dataset.examples.empty()) {
    return absl::InvalidArgumentError("CSV has a header but no rows");
  }
  dataset.num_classes = max_label + 1;

  if (options.standardize) {
    const size_t dim = dataset.examples[0].features.size();
    const double n = static_cast<double>(dataset.examples.size());
    for (size_t j = 0; j < dim; ++j) {
      double mean = 0.0;
      for (const Example& e : dataset.examples) mean += e.features[j];
      mean /= n;
      double var = 0.0;
      for (const Example& e : dataset.examples) {
        var += (e.features[j] - mean) * (e.features[j] - mean);
      }
      const double sd = std::sqrt(var / n);
      for (Example& e : dataset.examples) {
        e.features[j] -= mean;
        if (sd > 0.0) e.features[j] /= sd;
      }
    }
  }
  AssignSplit(dataset, options.test_fraction, options.split_seed);
  return dataset;
}

absl::StatusOr<Dataset> LoadCsv(const std::string& path,
                                const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrFormat("cannot open '%s'", path));
  }
  absl::StatusOr<Dataset> dataset = ParseCsv(in, options);
  if (!dataset.ok()) {
    return absl::Status(dataset.status().code(),
                        absl::StrFormat("%s: %s", path,
                                        dataset.status().message()));
  }
  return dataset;
}

void WriteCsv(const Dataset& dataset, std::ostream& out,
              const std::string& label_column) {
  const int dim = dataset.feature_dim();
  for (int j = 0; j < dim; ++j) out << 'f' << j << ',';
  out << label_column << '\n';
  for (const Example& e : dataset.examples) {
    for (double v : e.features) out << absl::StrFormat("%.17g,", v);
    out << e.label << '\n';
  }
}

}  // namespace dcsgd
