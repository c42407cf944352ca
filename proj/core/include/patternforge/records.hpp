#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patternforge/containment.hpp"
#include "patternforge/extremal.hpp"

namespace pforge {

nlohmann::json record_to_json(const ExtremalRecord& r);
ExtremalRecord record_from_json(const nlohmann::json& j);

/// Cache key: kind, n, d, canonical pattern serialization, config fingerprint.
std::string record_key(ExtremalKind kind, int n, const TensorMatrix& pattern, const std::string& fingerprint);
std::string record_key(const ExtremalRecord& r);

/// Re-checks a record's invariants: witness shape and count, avoidance under
/// the record's containment notion and, for f with a pattern of two or more
/// ones, n^{d-1} <= value <= n^d. Returns one message per violation.
std::vector<std::string> verify_record(const ExtremalRecord& r, Budget budget = {});

/// Append-only JSONL store, one record per line, in `<dir>/records.jsonl`.
class RecordStore {
 public:
  explicit RecordStore(std::filesystem::path dir);

  const std::filesystem::path& file() const noexcept { return file_; }

  /// All records in file order. Throws ParseError naming the bad line.
  std::vector<ExtremalRecord> load() const;

  void append(const ExtremalRecord& r) const;

  /// Best verified record for the key: an exact one if present, otherwise
  /// the lower bound with the largest value.
  std::optional<ExtremalRecord> lookup(ExtremalKind kind, int n, const TensorMatrix& pattern,
                                       const std::string& fingerprint) const;

 private:
  std::filesystem::path dir_;
  std::filesystem::path file_;
};

}  // namespace pforge
