#pragma once

// TowerFileV1: the JSON form of a TowerResult, plus small file helpers.

#include "emtower/tower.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace emtower {

/// Deterministic text: fixed key order, two-space indent, trailing newline.
/// Integers beyond int64 are written as decimal strings.
std::string tower_to_json(const TowerResult& tower);

/// Throws EngineError(Parse) naming the byte offset for malformed JSON and
/// the JSON pointer for schema violations. `source` prefixes messages.
TowerResult tower_from_json(std::string_view text, std::string_view source = "<input>");

/// Fiber input for the next stage: the Determined prefix, reliable no
/// further than the tower itself.
GradedGroups fiber_from_tower(const TowerResult& tower);

std::string read_text_file(const std::filesystem::path& path);
/// Write to a sibling temp file, then rename over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace emtower
