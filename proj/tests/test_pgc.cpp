// Copyright 2026 The fasa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <random>

#include "fasa/pgc.hpp"

using namespace fasa;

namespace {

std::vector<std::string> Words(std::size_t n, const std::string& stem = "w") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

std::string Text(std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += (i ? " " : "") + std::string("x") + std::to_string(i);
  return out;
}

AlignmentRecord Aligned(std::string id, std::size_t gt_len) {
  AlignmentRecord r;
  r.segment_id = std::move(id);
  r.status = Status::kAligned;
  r.gt_text = Words(gt_len);
  return r;
}

void AddSecond(HypothesisSet& set, const std::string& id, const std::string& text) {
  double t = static_cast<double>(set.segments.size());
  set.segments.push_back({id, t, t + 1.0, text, std::nullopt});
}

}  // namespace

TEST_CASE("pgc examples") {
  HypothesisSet second{"a", std::nullopt, {}};
  AddSecond(second, "long", Text(7));
  AddSecond(second, "same", Text(5));
  std::vector<AlignmentRecord> recs{Aligned("long", 5), Aligned("same", 5)};
  auto report = PgcFilter(recs, second, 1);
  CHECK(report.removed == std::vector<std::string>{"long"});
  CHECK(report.kept == std::vector<std::string>{"same"});
  CHECK(report.removed_count == 1);
  CHECK(report.lengths[0] == PgcLengths{"long", 5, 7});
  CHECK(report.lengths[1] == PgcLengths{"same", 5, 5});
}

TEST_CASE("pgc boundary: delta equal to tolerance is kept") {
  HypothesisSet second{"a", std::nullopt, {}};
  AddSecond(second, "plus1", Text(6));
  AddSecond(second, "minus1", Text(4));
  AddSecond(second, "minus2", "Hello, there... !");
  std::vector<AlignmentRecord> recs{Aligned("plus1", 5), Aligned("minus1", 5), Aligned("minus2", 4)};
  auto report = PgcFilter(recs, second, 1);
  CHECK(report.kept == std::vector<std::string>{"plus1", "minus1"});
  CHECK(report.removed == std::vector<std::string>{"minus2"});
}

TEST_CASE("20 records with 4 injected length deltas") {
  HypothesisSet second{"a", std::nullopt, {}};
  std::vector<AlignmentRecord> recs;
  std::vector<std::string> injected;
  for (int i = 0; i < 20; ++i) {
    std::string id = "r" + std::to_string(i);
    std::size_t len = 6 + static_cast<std::size_t>(i % 5);
    recs.push_back(Aligned(id, len));
    bool inject = i % 5 == 2;
    std::size_t second_len = inject ? len + 3 : len + static_cast<std::size_t>(i % 2);
    if (inject) injected.push_back(id);
    AddSecond(second, id, Text(second_len));
  }
  auto report = PgcFilter(recs, second, 1);
  CHECK(report.removed_count == 4);
  CHECK(report.removed == injected);
  CHECK(report.kept.size() == 16);
}

TEST_CASE("non-aligned records and missing second-pass entries") {
  HypothesisSet second{"a", std::nullopt, {}};
  AddSecond(second, "v", Text(20));
  std::vector<AlignmentRecord> recs{Aligned("missing", 3)};
  AlignmentRecord verify = Aligned("v", 3);
  verify.status = Status::kVerify;
  recs.push_back(verify);
  auto report = PgcFilter(recs, second, 1);
  CHECK(report.kept == std::vector<std::string>{"missing"});
  CHECK(report.missing == std::vector<std::string>{"missing"});
  CHECK(report.removed.empty());
  CHECK(report.lengths.size() == 1);
  CHECK_FALSE(report.lengths[0].second_len.has_value());

  auto j = report.ToJson();
  CHECK(j["removed_count"] == 0);
  CHECK(j["kept"] == nlohmann::json::array({"missing"}));
}

TEST_CASE("pgc properties (random)") {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 200; ++iter) {
    HypothesisSet second{"a", std::nullopt, {}};
    std::vector<AlignmentRecord> recs;
    std::size_t n = rng() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      std::string id = "r" + std::to_string(i);
      recs.push_back(Aligned(id, 1 + rng() % 12));
      if (rng() % 10) AddSecond(second, id, Text(rng() % 15));
    }
    std::vector<std::vector<std::string>> removed_by_tol;
    for (std::size_t tol = 0; tol <= 6; ++tol) {
      auto report = PgcFilter(recs, second, tol);
      CHECK(report.kept.size() + report.removed.size() == n);
      CHECK(report.removed_count == report.removed.size());
      for (const auto& id : report.removed) {
        CHECK(std::find(report.kept.begin(), report.kept.end(), id) == report.kept.end());
      }
      // Each decision depends only on its own record.
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<AlignmentRecord> single{recs[i]};
        auto solo = PgcFilter(single, second, tol);
        bool removed = std::find(report.removed.begin(), report.removed.end(), recs[i].segment_id) !=
                       report.removed.end();
        CHECK(solo.removed.size() == (removed ? 1u : 0u));
      }
      removed_by_tol.push_back(report.removed);
    }
    for (std::size_t t = 1; t < removed_by_tol.size(); ++t) {
      for (const auto& id : removed_by_tol[t]) {
        CHECK(std::find(removed_by_tol[t - 1].begin(), removed_by_tol[t - 1].end(), id) !=
              removed_by_tol[t - 1].end());
      }
    }
    CHECK(PgcFilter(recs, second, kNoPgcLimit).removed.empty());
  }
}
