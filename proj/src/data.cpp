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

#include "rcraf/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string_view>

#include "rcraf/random.hpp"
#include "rcraf/report.hpp"

namespace rcraf {

Dataset::Dataset(Matrix features, std::vector<int> labels, int num_classes)
    : features_(std::move(features)), labels_(std::move(labels)), num_classes_(num_classes) {
  if (labels_.empty()) throw std::domain_error("Dataset: no samples");
  if (features_.rows() != labels_.size()) {
    throw std::domain_error("Dataset: feature rows and labels differ in count");
  }
  if (features_.cols() == 0) throw std::domain_error("Dataset: zero feature dimensions");
  if (num_classes_ < 1) throw std::domain_error("Dataset: num_classes must be >= 1");
  for (int y : labels_) {
    if (y < 0 || y >= num_classes_) throw std::domain_error("Dataset: label out of range");
  }
  for (double v : features_.values()) {
    if (!std::isfinite(v)) throw std::domain_error("Dataset: non-finite feature");
  }
}

double Dataset::max_norm() const {
  double best = 0.0;
  for (std::size_t r = 0; r < features_.rows(); ++r) {
    double sq = 0.0;
    for (double v : features_.row(r)) sq += v * v;
    best = std::max(best, std::sqrt(sq));
  }
  return best;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<int> labels;
  labels.reserve(indices.size());
  for (std::size_t i : indices) labels.push_back(labels_.at(i));
  return Dataset(gather_rows(features_, indices), std::move(labels), num_classes_);
}

Dataset two_moons(std::size_t n, double noise, std::uint64_t seed) {
  if (n < 2) throw std::domain_error("two_moons: n must be >= 2");
  if (!(noise >= 0.0)) throw std::domain_error("two_moons: noise must be non-negative");
  const std::size_t n_upper = n / 2;
  const std::size_t n_lower = n - n_upper;
  const CounterRng rng(seed, Stream::kData);

  Matrix x(n, 2);
  std::vector<int> y(n);
  auto angle = [](std::size_t i, std::size_t count) {
    return count > 1 ? std::numbers::pi * static_cast<double>(i) / static_cast<double>(count - 1)
                     : 0.0;
  };
  for (std::size_t i = 0; i < n_upper; ++i) {
    const double t = angle(i, n_upper);
    x(i, 0) = std::cos(t);
    x(i, 1) = std::sin(t);
    y[i] = 0;
  }
  for (std::size_t i = 0; i < n_lower; ++i) {
    const double t = angle(i, n_lower);
    x(n_upper + i, 0) = 1.0 - std::cos(t);
    x(n_upper + i, 1) = 0.5 - std::sin(t);
    y[n_upper + i] = 1;
  }
  if (noise > 0.0) {
    for (std::size_t k = 0; k < x.size(); ++k) x.values()[k] += noise * rng.normal(k);
  }
  return Dataset(std::move(x), std::move(y), 2);
}

Dataset gaussian_blobs(std::size_t n, const std::vector<std::vector<double>>& centers,
                       double sigma, std::uint64_t seed) {
  if (centers.empty()) throw std::domain_error("gaussian_blobs: no centers");
  if (n < centers.size()) throw std::domain_error("gaussian_blobs: fewer points than centers");
  if (!(sigma >= 0.0)) throw std::domain_error("gaussian_blobs: sigma must be non-negative");
  const std::size_t d = centers.front().size();
  if (d == 0) throw std::domain_error("gaussian_blobs: zero-dimensional centers");
  for (const auto& c : centers) {
    if (c.size() != d) throw std::domain_error("gaussian_blobs: centers differ in dimension");
  }
  const std::size_t k = centers.size();
  const CounterRng rng(seed, Stream::kData);

  Matrix x(n, d);
  std::vector<int> y(n);
  std::size_t row = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t count = n / k + (c < n % k ? 1 : 0);
    for (std::size_t i = 0; i < count; ++i, ++row) {
      for (std::size_t j = 0; j < d; ++j) {
        x(row, j) = centers[c][j] + (sigma > 0.0 ? sigma * rng.normal(row * d + j) : 0.0);
      }
      y[row] = static_cast<int>(c);
    }
  }
  return Dataset(std::move(x), std::move(y), static_cast<int>(k));
}

Dataset circles(std::size_t n, double noise, double factor, std::uint64_t seed) {
  if (n < 2) throw std::domain_error("circles: n must be >= 2");
  if (!(factor > 0.0 && factor < 1.0)) throw std::domain_error("circles: need 0 < factor < 1");
  if (!(noise >= 0.0)) throw std::domain_error("circles: noise must be non-negative");
  const std::size_t n_outer = n / 2;
  const std::size_t n_inner = n - n_outer;
  const CounterRng rng(seed, Stream::kData);

  Matrix x(n, 2);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n_outer; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_outer);
    x(i, 0) = std::cos(t);
    x(i, 1) = std::sin(t);
    y[i] = 0;
  }
  for (std::size_t i = 0; i < n_inner; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_inner);
    x(n_outer + i, 0) = factor * std::cos(t);
    x(n_outer + i, 1) = factor * std::sin(t);
    y[n_outer + i] = 1;
  }
  if (noise > 0.0) {
    for (std::size_t k = 0; k < x.size(); ++k) x.values()[k] += noise * rng.normal(k);
  }
  return Dataset(std::move(x), std::move(y), 2);
}

CsvParseError::CsvParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Dataset parse_csv(const std::string& text, std::optional<int> num_classes) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::size_t dims = 0;
  std::vector<double> values;
  std::vector<int> labels;
  bool first_content = true;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (first_content) {
      first_content = false;
      double probe;
      if (!parse_double(fields.front(), probe)) continue;  // header
    }
    if (fields.size() < 2) throw CsvParseError(line_no, "expected label and at least one feature");
    if (dims == 0) dims = fields.size() - 1;
    if (fields.size() - 1 != dims) {
      throw CsvParseError(line_no, "expected " + std::to_string(dims) + " features, found " +
                                       std::to_string(fields.size() - 1));
    }
    int label = 0;
    const auto lf = fields.front();
    const auto [ptr, ec] = std::from_chars(lf.data(), lf.data() + lf.size(), label);
    if (ec != std::errc() || ptr != lf.data() + lf.size() || label < 0) {
      throw CsvParseError(line_no, "label is not a non-negative integer");
    }
    if (num_classes && label >= *num_classes) {
      throw CsvParseError(line_no, "label " + std::to_string(label) + " >= class count " +
                                       std::to_string(*num_classes));
    }
    for (std::size_t j = 1; j < fields.size(); ++j) {
      double v;
      if (!parse_double(fields[j], v) || !std::isfinite(v)) {
        throw CsvParseError(line_no, "feature " + std::to_string(j) + " is not a finite number");
      }
      values.push_back(v);
    }
    labels.push_back(label);
  }
  if (labels.empty()) throw CsvParseError(line_no, "no data rows");
  const int classes = num_classes.value_or(*std::max_element(labels.begin(), labels.end()) + 1);
  const std::size_t n = labels.size();
  return Dataset(Matrix(n, dims, std::move(values)), std::move(labels), classes);
}

Dataset load_csv(const std::filesystem::path& path, std::optional<int> num_classes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_csv(text.str(), num_classes);
}

std::string to_csv(const Dataset& data) {
  std::string out = "label";
  for (std::size_t j = 0; j < data.dims(); ++j) out += ",f" + std::to_string(j + 1);
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += std::to_string(data.labels()[i]);
    for (double v : data.features().row(i)) {
      out += ',';
      out += format_real(v);
    }
    out += '\n';
  }
  return out;
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  write_text_file(path, to_csv(data));
}

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::domain_error("split: fraction must lie in (0, 1)");
  }
  const std::size_t n = data.size();
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) throw std::domain_error("split: one side would be empty");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  SequentialRng rng(seed, Stream::kSplit);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.next_below(i + 1)]);

  const std::span<const std::size_t> all(order);
  return {data.subset(all.first(n_train)), data.subset(all.subspan(n_train))};
}

Standardizer Standardizer::fit(const Dataset& data) {
  const std::size_t d = data.dims();
  const auto n = static_cast<double>(data.size());
  Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += data.features()(i, j);
  }
  for (double& m : s.mean) m /= n;
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = data.features()(i, j) - s.mean[j];
      var[j] += delta * delta;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / n);
    s.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Dataset Standardizer::apply(const Dataset& data) const {
  if (data.dims() != mean.size()) throw std::domain_error("Standardizer: dimension mismatch");
  Matrix x = data.features();
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) = (x(i, j) - mean[j]) / scale[j];
  }
  return Dataset(std::move(x), data.labels(), data.num_classes());
}

}  // namespace rcraf
