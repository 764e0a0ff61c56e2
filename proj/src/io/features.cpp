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

#include "hefine/io/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hefine/common/error.hpp"
#include "hefine/common/prng.hpp"

namespace hefine::io {

void validate(const FeatureSet& fs) {
  if (fs.labels.size() != fs.x.rows) {
    throw InvalidArgument("feature set: " + std::to_string(fs.labels.size()) + " labels for " +
                          std::to_string(fs.x.rows) + " rows");
  }
  if (fs.classes == 0 || fs.classes > 0xffff) throw InvalidArgument("feature set: class count out of range");
  for (auto l : fs.labels) {
    if (l >= fs.classes) throw InvalidArgument("feature set: label " + std::to_string(l) + " out of range");
  }
  for (double v : fs.x.data) {
    if (!std::isfinite(v)) throw InvalidArgument("feature set: non-finite feature value");
  }
}

Bytes encode_efv(const FeatureSet& fs) {
  validate(fs);
  ByteWriter w;
  w.magic("EFV1");
  w.u8(kEfvVersion);
  w.u32(static_cast<std::uint32_t>(fs.rows()));
  w.u32(static_cast<std::uint32_t>(fs.dim()));
  w.u16(static_cast<std::uint16_t>(fs.classes));
  w.u8(2);
  w.u8(0);
  for (double v : fs.x.data) w.f32(static_cast<float>(v));
  for (auto l : fs.labels) w.u16(l);
  return w.take();
}

FeatureSet decode_efv(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "EFV1");
  r.expect_magic("EFV1");
  if (const auto v = r.u8(); v != kEfvVersion) throw FormatError("EFV1: unsupported version " + std::to_string(v));
  const std::uint64_t rows = r.u32(), dim = r.u32();
  const std::size_t classes = r.u16();
  if (const auto lw = r.u8(); lw != 2) throw FormatError("EFV1: label width " + std::to_string(lw) + ", expected 2");
  if (const auto dt = r.u8(); dt != 0) throw FormatError("EFV1: unknown dtype " + std::to_string(dt));
  if (classes == 0) throw FormatError("EFV1: class count is zero");
  if (rows != 0 && dim == 0) throw FormatError("EFV1: rows without features");
  const std::uint64_t expected = kEfvHeaderSize + rows * dim * 4 + rows * 2;
  if (bytes.size() != expected) {
    throw FormatError("EFV1: file is " + std::to_string(bytes.size()) + " bytes, header implies " +
                      std::to_string(expected));
  }
  FeatureSet fs;
  fs.classes = classes;
  fs.x = Matrix(rows, dim);
  for (auto& v : fs.x.data) {
    v = r.f32();
    if (!std::isfinite(v)) throw FormatError("EFV1: non-finite feature value");
  }
  fs.labels.resize(rows);
  for (auto& l : fs.labels) {
    l = r.u16();
    if (l >= classes) throw FormatError("EFV1: label " + std::to_string(l) + " not below class count");
  }
  return fs;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read " + path.string());
  return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

FeatureSet load_efv(const std::filesystem::path& path) { return decode_efv(read_file(path)); }

void save_efv(const std::filesystem::path& path, const FeatureSet& fs) { write_file(path, encode_efv(fs)); }

FeatureSet parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::vector<std::uint16_t> labels;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> fields;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used == 0 || used != cell.size()) {
        throw FormatError("CSV line " + std::to_string(lineno) + ": '" + cell + "' is not a number");
      }
      fields.push_back(v);
    }
    if (fields.size() < 2) throw FormatError("CSV line " + std::to_string(lineno) + ": need features and a label");
    const double label = fields.back();
    if (label < 0 || label > 65534 || label != std::floor(label)) {
      throw FormatError("CSV line " + std::to_string(lineno) + ": label must be an integer in [0, 65534]");
    }
    fields.pop_back();
    if (!rows.empty() && fields.size() != rows.front().size()) {
      throw FormatError("CSV line " + std::to_string(lineno) + ": expected " +
                        std::to_string(rows.front().size()) + " features");
    }
    rows.push_back(std::move(fields));
    labels.push_back(static_cast<std::uint16_t>(label));
  }
  if (rows.empty()) throw FormatError("CSV: no data rows");
  FeatureSet fs;
  fs.x = Matrix(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), fs.x.row(i).begin());
  fs.labels = std::move(labels);
  fs.classes = *std::max_element(fs.labels.begin(), fs.labels.end()) + 1u;
  try {
    validate(fs);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("CSV: ") + e.what());
  }
  return fs;
}

FeatureSet gen_blobs(std::size_t classes, std::size_t dim, std::size_t rows, std::uint64_t seed,
                     double separation) {
  if (classes < 2 || classes > 0xffff || dim == 0 || rows == 0) {
    throw InvalidArgument("gen_blobs: need classes >= 2, dim >= 1 and rows >= 1");
  }
  const Prng root(seed, "gen_blobs");
  // Points at distance separation / sqrt(2) from the origin along
  // orthogonal axes are exactly `separation` apart.
  const double radius = separation / std::sqrt(2.0);
  Matrix centroids(classes, dim);
  auto crng = root.fork("centroids");
  for (std::size_t k = 0; k < classes; ++k) {
    if (classes <= dim) {
      centroids(k, k) = radius;
      continue;
    }
    double norm = 0;
    for (auto& v : centroids.row(k)) {
      v = crng.normal();
      norm += v * v;
    }
    for (auto& v : centroids.row(k)) v *= radius / std::sqrt(norm);
  }

  std::vector<std::uint16_t> labels(rows);
  for (std::size_t i = 0; i < rows; ++i) labels[i] = static_cast<std::uint16_t>(i % classes);
  auto srng = root.fork("shuffle");
  for (std::size_t i = rows; i > 1; --i) std::swap(labels[i - 1], labels[srng.uniform_below(i)]);

  FeatureSet fs;
  fs.classes = classes;
  fs.labels = labels;
  fs.x = Matrix(rows, dim);
  auto nrng = root.fork("noise");
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < dim; ++j) fs.x(i, j) = centroids(labels[i], j) + nrng.normal();
  return fs;
}

}  // namespace hefine::io
