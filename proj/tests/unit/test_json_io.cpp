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

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "povmdyn/json_io.hpp"
#include "povmdyn/sampling.hpp"
#include "test_util.hpp"

namespace povmdyn {
namespace {

using json::Json;
using testing::Near;

TEST(JsonIo, PovmRoundTrip) {
  SeededRng rng(1);
  const Povm p = random_povm(3, 2, PovmMethod::kGinibreRenormalized, rng);
  const Json j = Json::parse(json::encode(p).dump());
  EXPECT_EQ(j["n"], 3);
  EXPECT_TRUE(Near(json::decode_povm(j), p, 0.0));
}

TEST(JsonIo, BlockRoundTrip) {
  SeededRng rng(2);
  const BlockMatrix b = random_stochastic(2, 3, rng);
  const BlockMatrix c = json::decode_block(Json::parse(json::encode(b).dump()));
  EXPECT_EQ(max_abs_diff(b, c), 0.0);
}

TEST(JsonIo, DensityRoundTrip) {
  SeededRng rng(3);
  const DensityMatrix r = random_density(2, rng);
  const DensityMatrix s = json::decode_density(Json::parse(json::encode(r).dump()));
  EXPECT_TRUE(Near(r.matrix(), s.matrix(), 0.0));
}

TEST(JsonIo, ComplexEntries) {
  const HermitianMatrix m = json::decode_matrix(Json::parse("[[[1,0],[0,-0.5]],[[0,0.5],[2,0]]]"));
  EXPECT_EQ(m(0, 1), Complex(0.0, -0.5));
  EXPECT_EQ(m(1, 0), Complex(0.0, 0.5));
}

TEST(JsonIo, FormatErrors) {
  EXPECT_THROW(json::decode_complex(Json::parse("[1]")), json::FormatError);
  EXPECT_THROW(json::decode_matrix(Json::parse("[[[1,0]],[[0,0]]]")), json::FormatError);
  EXPECT_THROW(json::decode_matrix(Json::parse("[]")), json::FormatError);
  EXPECT_THROW(json::decode_povm(Json::parse(R"({"d":1,"effects":[[[[1,0]]]]})")), json::FormatError);
  EXPECT_THROW(json::decode_povm(Json::parse(R"({"n":2,"d":1,"effects":[[[[1,0]]]]})")), json::FormatError);
  EXPECT_THROW(json::decode_povm(Json::parse(R"({"n":-1,"d":1,"effects":[]})")), json::FormatError);
  EXPECT_THROW(json::decode_povm(Json::parse(R"({"n":1,"d":2,"effects":[[[[1,0]]]]})")), json::FormatError);
  EXPECT_THROW(json::decode_block(Json::parse(R"({"rows":1,"cols":2,"d":1,"blocks":[[[[[1,0]]]]]})")),
               json::FormatError);
}

TEST(JsonIo, ContentIsValidated) {
  const Json p = Json::parse(R"({"n":2,"d":1,"effects":[[[[0.5,0]]],[[[0.6,0]]]]})");
  EXPECT_THROW(json::decode_povm(p), ValidationError);
  const Json b = Json::parse(R"({"rows":1,"cols":1,"d":1,"blocks":[[[[[-1,0]]]]]})");
  EXPECT_THROW(json::decode_block(b), ValidationError);
}

TEST(JsonIo, ReadFile) {
  const std::string path = ::testing::TempDir() + "povmdyn_json_io.json";
  {
    std::ofstream out(path);
    out << json::encode(pauli_povms().x).dump();
  }
  EXPECT_TRUE(Near(json::decode_povm(json::read_file(path)), pauli_povms().x, 0.0));
  {
    std::ofstream out(path);
    out << "{not json";
  }
  EXPECT_THROW(json::read_file(path), json::FormatError);
  std::remove(path.c_str());
  EXPECT_THROW(json::read_file(path), json::FormatError);
}

}  // namespace
}  // namespace povmdyn
