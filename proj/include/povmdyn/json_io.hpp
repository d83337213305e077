// Copyright 2026 The povmdyn Authors
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

// JSON encodings of the measurement types.
//
//   complex        [re, im]
//   matrix         array of rows of complex
//   Povm           {"n", "d", "effects": [matrix, ...]}
//   BlockMatrix    {"rows", "cols", "d", "blocks": [[matrix, ...], ...]}
//   DensityMatrix  {"d", "matrix": matrix}

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "povmdyn/error.hpp"
#include "povmdyn/linalg.hpp"
#include "povmdyn/povm.hpp"

namespace povmdyn::json {

using Json = nlohmann::json;

class FormatError : public Error {
 public:
  using Error::Error;
};

inline Json encode(const HermitianMatrix& h) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < h.dim(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < h.dim(); ++j) row.push_back({h(i, j).real(), h(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json encode(const Povm& p) {
  Json e = Json::array();
  for (const auto& x : p.effects()) e.push_back(encode(x));
  return {{"n", p.n()}, {"d", p.d()}, {"effects", std::move(e)}};
}

inline Json encode(const BlockMatrix& b) {
  Json blocks = Json::array();
  for (std::size_t i = 0; i < b.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < b.cols(); ++j) row.push_back(encode(b(i, j)));
    blocks.push_back(std::move(row));
  }
  return {{"rows", b.rows()}, {"cols", b.cols()}, {"d", b.d()}, {"blocks", std::move(blocks)}};
}

inline Json encode(const DensityMatrix& r) { return {{"d", r.dim()}, {"matrix", encode(r.matrix())}}; }

namespace detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

inline std::size_t count(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw FormatError(std::string("field \"") + key + "\" must be a nonnegative integer");
  return v.get<std::size_t>();
}

}  // namespace detail

inline Complex decode_complex(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw FormatError("complex scalar must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

/// Hermitian part is taken on construction.
inline HermitianMatrix decode_matrix(const Json& j) {
  if (!j.is_array() || j.empty()) throw FormatError("matrix must be a non-empty array of rows");
  const auto d = static_cast<Eigen::Index>(j.size());
  ComplexMatrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) throw FormatError("matrix must be square");
    for (Eigen::Index k = 0; k < d; ++k) m(i, k) = decode_complex(row[static_cast<std::size_t>(k)]);
  }
  return HermitianMatrix(m);
}

inline std::vector<HermitianMatrix> decode_effects(const Json& j) {
  const std::size_t n = detail::count(j, "n"), d = detail::count(j, "d");
  const Json& e = detail::field(j, "effects");
  if (!e.is_array() || e.size() != n) throw FormatError("\"effects\" must hold n matrices");
  std::vector<HermitianMatrix> out;
  for (const auto& m : e) {
    out.push_back(decode_matrix(m));
    if (out.back().dim() != d) throw FormatError("effect dimension differs from \"d\"");
  }
  return out;
}

inline Povm decode_povm(const Json& j, double tol = kSumTol) { return validate_povm(decode_effects(j), tol); }

inline std::vector<std::vector<HermitianMatrix>> decode_grid(const Json& j) {
  const std::size_t r = detail::count(j, "rows"), c = detail::count(j, "cols"), d = detail::count(j, "d");
  const Json& b = detail::field(j, "blocks");
  if (!b.is_array() || b.size() != r) throw FormatError("\"blocks\" must hold rows block rows");
  std::vector<std::vector<HermitianMatrix>> g;
  for (const auto& row : b) {
    if (!row.is_array() || row.size() != c) throw FormatError("block row must hold cols matrices");
    g.emplace_back();
    for (const auto& m : row) {
      g.back().push_back(decode_matrix(m));
      if (g.back().back().dim() != d) throw FormatError("block dimension differs from \"d\"");
    }
  }
  return g;
}

inline BlockMatrix decode_block(const Json& j, double tol = kPsdTol) { return validate_block(decode_grid(j), tol); }

inline DensityMatrix decode_density(const Json& j) {
  const std::size_t d = detail::count(j, "d");
  HermitianMatrix m = decode_matrix(detail::field(j, "matrix"));
  if (m.dim() != d) throw FormatError("matrix dimension differs from \"d\"");
  return DensityMatrix(std::move(m));
}

inline Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace povmdyn::json
