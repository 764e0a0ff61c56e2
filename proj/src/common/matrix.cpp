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

#include "hefine/common/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hefine/common/error.hpp"

namespace hefine {

Matrix identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) {
    throw InvalidArgument("multiply: " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                          " times " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
  }
  Matrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double x = a(i, k);
      if (x == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += x * b(k, j);
    }
  }
  return out;
}

Matrix multiply_at_b(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) throw InvalidArgument("multiply_at_b: row counts differ");
  Matrix out(a.cols, b.cols);
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (std::size_t i = 0; i < a.cols; ++i) {
      const double x = a(r, i);
      if (x == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += x * b(r, j);
    }
  }
  return out;
}

Matrix slice_rows(const Matrix& a, std::size_t begin, std::size_t end) {
  if (begin > end || end > a.rows) throw InvalidArgument("slice_rows: range out of bounds");
  Matrix out(end - begin, a.cols);
  std::copy(a.data.begin() + static_cast<std::ptrdiff_t>(begin * a.cols),
            a.data.begin() + static_cast<std::ptrdiff_t>(end * a.cols), out.data.begin());
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw InvalidArgument("max_abs_diff: shapes differ");
  double m = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace hefine
