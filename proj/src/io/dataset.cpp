/*
 * Copyright 2026 The hefine Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "hefine/io/dataset.hpp"

#include <cmath>
#include "json.hpp"

#include "hefine/common/error.hpp"
#include "hefine/common/prng.hpp"

namespace hefine::io {
namespace {

void shuffle(std::vector<std::size_t>& v, Prng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.uniform_below(i)]);
}

}  // namespace

Split stratified_split(std::span<const std::uint16_t> labels, std::size_t classes,
                       const SplitSpec& spec, std::uint64_t seed) {
  if (spec.train < 0 || spec.val < 0 || spec.test < 0 ||
      std::abs(spec.train + spec.val + spec.test - 1.0) > 1e-9) {
    throw InvalidArgument("split fractions must be non-negative and sum to 1");
  }
  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= classes) throw InvalidArgument("stratified_split: label out of range");
    by_class[labels[i]].push_back(i);
  }
  const Prng root(seed, "split");
  Split out;
  for (std::size_t k = 0; k < classes; ++k) {
    auto& rows = by_class[k];
    auto rng = root.fork("class", k);
    shuffle(rows, rng);
    const double n = static_cast<double>(rows.size());
    const auto a = static_cast<std::size_t>(std::llround(spec.train * n));
    const auto b = std::min(rows.size(), static_cast<std::size_t>(std::llround((spec.train + spec.val) * n)));
    out.train.insert(out.train.end(), rows.begin(), rows.begin() + a);
    out.val.insert(out.val.end(), rows.begin() + a, rows.begin() + b);
    out.test.insert(out.test.end(), rows.begin() + b, rows.end());
  }
  auto r1 = root.fork("order", 0), r2 = root.fork("order", 1), r3 = root.fork("order", 2);
  shuffle(out.train, r1);
  shuffle(out.val, r2);
  shuffle(out.test, r3);
  return out;
}

FeatureSet subset(const FeatureSet& fs, std::span<const std::size_t> idx) {
  FeatureSet out;
  out.classes = fs.classes;
  out.x = Matrix(idx.size(), fs.dim());
  out.labels.reserve(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= fs.rows()) throw InvalidArgument("subset: row index out of range");
    const auto src = fs.x.row(idx[i]);
    std::copy(src.begin(), src.end(), out.x.row(i).begin());
    out.labels.push_back(fs.labels[idx[i]]);
  }
  return out;
}

Standardizer Standardizer::fit(const Matrix& x, double clip_norm) {
  if (x.rows == 0) throw InvalidArgument("Standardizer: no rows to fit");
  if (!(clip_norm > 0)) throw InvalidArgument("Standardizer: clip norm must be positive");
  Standardizer s;
  s.clip_norm = clip_norm;
  s.mean.assign(x.cols, 0.0);
  s.stddev.assign(x.cols, 0.0);
  const double n = static_cast<double>(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) s.mean[j] += x(i, j) / n;
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) s.stddev[j] += (x(i, j) - s.mean[j]) * (x(i, j) - s.mean[j]) / n;
  for (std::size_t j = 0; j < x.cols; ++j) {
    const double sd = std::sqrt(s.stddev[j]);
    s.stddev[j] = sd > 1e-12 * std::max(1.0, std::abs(s.mean[j])) ? sd : 1.0;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols != mean.size()) {
    throw InvalidArgument("Standardizer: fitted on " + std::to_string(mean.size()) + " features, got " +
                          std::to_string(x.cols));
  }
  Matrix out(x.rows, x.cols + 1);
  for (std::size_t i = 0; i < x.rows; ++i) {
    double norm = 0;
    for (std::size_t j = 0; j < x.cols; ++j) {
      out(i, j) = (x(i, j) - mean[j]) / stddev[j];
      norm += out(i, j) * out(i, j);
    }
    norm = std::sqrt(norm);
    if (norm > clip_norm) {
      for (std::size_t j = 0; j < x.cols; ++j) out(i, j) *= clip_norm / norm;
    }
    out(i, x.cols) = 1.0;
  }
  return out;
}

std::string Standardizer::to_json() const {
  nlohmann::json j = {{"format", "hefine-stats"}, {"version", 1},          {"mean", mean},
                      {"stddev", stddev},         {"clip_norm", clip_norm}, {"bias", true}};
  return j.dump(2) + "\n";
}

Standardizer Standardizer::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "hefine-stats" || j.at("version") != 1) throw FormatError("stats: unknown format");
    Standardizer s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.stddev = j.at("stddev").get<std::vector<double>>();
    s.clip_norm = j.at("clip_norm").get<double>();
    if (s.mean.size() != s.stddev.size() || !(s.clip_norm > 0) || !j.at("bias").get<bool>()) {
      throw FormatError("stats: inconsistent fields");
    }
    for (double v : s.stddev) {
      if (!(v > 0)) throw FormatError("stats: non-positive stddev");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("stats: ") + e.what());
  }
}

}  // namespace hefine::io
