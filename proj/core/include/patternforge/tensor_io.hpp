#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "patternforge/tensor.hpp"

namespace pforge {

// Text format:
//   dims: n1 n2 ... nd
//   i1 i2 ... id        one line per 1-entry, 1-based
// '#' starts a comment, blank lines are ignored, duplicates are errors.
TensorMatrix parse_tensor(std::string_view text);
std::string serialize_tensor(const TensorMatrix& a);

// JSON format: {"dims":[...],"ones":[[...],...]}
TensorMatrix tensor_from_json(const nlohmann::json& j);
nlohmann::json tensor_to_json(const TensorMatrix& a);

// Dispatches on the first non-blank character: '{' means JSON.
TensorMatrix parse_tensor_any(std::string_view text);
TensorMatrix load_tensor_file(const std::filesystem::path& path);

}  // namespace pforge
