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

#include "fasa/pgc.hpp"

#include <spdlog/spdlog.h>

#include "fasa/transcript.hpp"

namespace fasa {

PgcReport PgcFilter(std::span<const AlignmentRecord> records, const HypothesisSet& second_pass,
                    std::size_t tolerance) {
  PgcReport report;
  for (const auto& rec : records) {
    if (rec.status != Status::kAligned) continue;
    PgcLengths lens{rec.segment_id, GtTokens(rec).size(), std::nullopt};
    const HypothesisSegment* second = second_pass.Find(rec.segment_id);
    if (!second) {
      spdlog::warn("pgc: no second-pass prediction for '{}'; keeping it", rec.segment_id);
      report.missing.push_back(rec.segment_id);
      report.kept.push_back(rec.segment_id);
      report.lengths.push_back(std::move(lens));
      continue;
    }
    lens.second_len = NormalizeText(second->text).size();
    std::size_t delta = lens.gt_len > *lens.second_len ? lens.gt_len - *lens.second_len
                                                       : *lens.second_len - lens.gt_len;
    if (delta > tolerance) {
      report.removed.push_back(rec.segment_id);
    } else {
      report.kept.push_back(rec.segment_id);
    }
    report.lengths.push_back(std::move(lens));
  }
  report.removed_count = report.removed.size();
  return report;
}

nlohmann::json PgcReport::ToJson() const {
  nlohmann::json j;
  j["kept"] = kept;
  j["removed"] = removed;
  j["removed_count"] = removed_count;
  j["missing"] = missing;
  auto& arr = j["lengths"] = nlohmann::json::array();
  for (const auto& l : lengths) {
    nlohmann::json e{{"id", l.id}, {"gt_len", l.gt_len}};
    if (l.second_len) e["second_len"] = *l.second_len;
    arr.push_back(std::move(e));
  }
  return j;
}

}  // namespace fasa
