// Copyright 2026 The rcraf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RCRAF_DATA_HPP_
#define RCRAF_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rcraf/matrix.hpp"

namespace rcraf {

// Labelled samples: n x d features, n labels in [0, num_classes).
class Dataset {
 public:
  // Throws std::domain_error if n == 0, a label is out of range, or a
  // feature is non-finite.
  Dataset(Matrix features, std::vector<int> labels, int num_classes);

  const Matrix& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  int num_classes() const { return num_classes_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t dims() const { return features_.cols(); }

  // max_j ||x_j||_2, the input norm bound c.
  double max_norm() const;

  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  Matrix features_;
  std::vector<int> labels_;
  int num_classes_;
};

// Two interleaved half circles: label 0 on the upper unit half circle,
// label 1 on the lower one shifted by (1, 0.5). floor(n/2) points go to the
// first moon. noise is the std-dev of additive Gaussian noise.
Dataset two_moons(std::size_t n, double noise, std::uint64_t seed);

// n points split as evenly as possible between the centers (earlier centers
// take the remainder); label i for center i.
Dataset gaussian_blobs(std::size_t n, const std::vector<std::vector<double>>& centers,
                       double sigma, std::uint64_t seed);

// Concentric circles of radius 1 (label 0) and factor (label 1).
Dataset circles(std::size_t n, double noise, double factor, std::uint64_t seed);

class CsvParseError : public std::runtime_error {
 public:
  CsvParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Rows are `label,f1,...,fd`. A first line whose first token is not a
// number is a header and is skipped. num_classes defaults to max label + 1.
Dataset load_csv(const std::filesystem::path& path, std::optional<int> num_classes = std::nullopt);
Dataset parse_csv(const std::string& text, std::optional<int> num_classes = std::nullopt);
void save_csv(const Dataset& data, const std::filesystem::path& path);
std::string to_csv(const Dataset& data);

// Seeded shuffle, then the first round(fraction * n) rows form the train set.
std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed);

// Zero-mean, unit-variance rescaling with statistics from one dataset.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Dataset& data);
  Dataset apply(const Dataset& data) const;
};

}  // namespace rcraf

#endif  // RCRAF_DATA_HPP_
