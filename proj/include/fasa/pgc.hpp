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

// Post-generation checking: drops aligned records whose second-pass
// prediction differs from the aligned transcription by more than a tolerance
// in normalized token count.

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fasa/core.hpp"
#include "fasa/hypothesis.hpp"

namespace fasa {

inline constexpr std::size_t kNoPgcLimit = std::numeric_limits<std::size_t>::max();

struct PgcLengths {
  std::string id;
  std::size_t gt_len = 0;
  // Absent when the second pass had no segment for this record.
  std::optional<std::size_t> second_len;

  friend bool operator==(const PgcLengths&, const PgcLengths&) = default;
};

struct PgcReport {
  std::vector<std::string> kept;
  std::vector<std::string> removed;
  std::size_t removed_count = 0;
  std::vector<PgcLengths> lengths;  // one per Aligned input record, input order
  std::vector<std::string> missing;  // ids kept because the second pass lacked them

  nlohmann::json ToJson() const;
};

// Only records with status Aligned take part. A record is removed iff
// | |gt tokens| - |normalize(second prediction)| | > tolerance.
PgcReport PgcFilter(std::span<const AlignmentRecord> records, const HypothesisSet& second_pass,
                    std::size_t tolerance);

}  // namespace fasa
