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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hefine {

/// Dense row-major matrix of doubles; the plaintext currency of the
/// hospital side and of every test oracle.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

  bool empty() const noexcept { return rows == 0 || cols == 0; }
};

Matrix identity(std::size_t n);
Matrix transpose(const Matrix& a);
/// Throws InvalidArgument on an inner-dimension mismatch.
Matrix multiply(const Matrix& a, const Matrix& b);
/// a^T b without forming the transpose.
Matrix multiply_at_b(const Matrix& a, const Matrix& b);
/// Rows [begin, end) of a.
Matrix slice_rows(const Matrix& a, std::size_t begin, std::size_t end);
/// max |a - b| over all entries; shapes must match.
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace hefine
