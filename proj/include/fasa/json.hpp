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

// JSON (de)serialization for the domain types. Field names here are the
// on-disk contract for hypothesis files, manifests and truth files.

#pragma once

#include <json.hpp>

#include "fasa/core.hpp"

namespace fasa {

void to_json(nlohmann::json& j, const TokenSeq& t);
void from_json(const nlohmann::json& j, TokenSeq& t);

void to_json(nlohmann::json& j, const WordStamp& w);
void from_json(const nlohmann::json& j, WordStamp& w);

void to_json(nlohmann::json& j, const HypothesisSegment& s);
void from_json(const nlohmann::json& j, HypothesisSegment& s);

void to_json(nlohmann::json& j, const AlignmentRecord& r);
void from_json(const nlohmann::json& j, AlignmentRecord& r);

void to_json(nlohmann::json& j, const AlignConfig& c);
void from_json(const nlohmann::json& j, AlignConfig& c);

void to_json(nlohmann::json& j, const ManifestEntry& e);
void from_json(const nlohmann::json& j, ManifestEntry& e);

// Reads `key` from `j` as T, rethrowing any type or presence problem as a
// ParseError that names the field.
template <typename T>
T RequireField(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad field '") + key + "': " + e.what());
  }
}

template <typename T>
std::optional<T> OptionalField(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return RequireField<T>(j, key);
}

}  // namespace fasa
