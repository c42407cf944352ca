#include "patternforge/records.hpp"

#include <fstream>
#include <sstream>

#include "patternforge/errors.hpp"
#include "patternforge/tensor_io.hpp"

namespace pforge {

nlohmann::json record_to_json(const ExtremalRecord& r) {
  return {
      {"kind", to_string(r.kind)},
      {"n", r.n},
      {"d", r.d},
      {"pattern", tensor_to_json(r.pattern)},
      {"value", r.value},
      {"witness", tensor_to_json(r.witness)},
      {"status", to_string(r.status)},
      {"elapsed_ms", r.elapsed.count()},
      {"nodes", r.nodes},
      {"fingerprint", r.fingerprint},
  };
}

ExtremalRecord record_from_json(const nlohmann::json& j) {
  try {
    ExtremalRecord r;
    r.kind = parse_kind(j.at("kind").get<std::string>());
    r.n = j.at("n").get<int>();
    r.d = j.at("d").get<int>();
    r.pattern = tensor_from_json(j.at("pattern"));
    r.value = j.at("value").get<std::uint64_t>();
    r.witness = tensor_from_json(j.at("witness"));
    r.status = parse_status(j.at("status").get<std::string>());
    r.elapsed = std::chrono::milliseconds(j.value("elapsed_ms", std::int64_t{0}));
    r.nodes = j.value("nodes", std::uint64_t{0});
    r.fingerprint = j.at("fingerprint").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed record: ") + e.what());
  }
}

std::string record_key(ExtremalKind kind, int n, const TensorMatrix& pattern, const std::string& fingerprint) {
  return to_string(kind) + "|" + std::to_string(n) + "|" + std::to_string(pattern.dimension()) + "|" +
         serialize_tensor(pattern) + "|" + fingerprint;
}

std::string record_key(const ExtremalRecord& r) { return record_key(r.kind, r.n, r.pattern, r.fingerprint); }

std::vector<std::string> verify_record(const ExtremalRecord& r, Budget budget) {
  std::vector<std::string> problems;
  if (r.d != r.pattern.dimension()) problems.push_back("d does not match pattern dimension");
  if (r.witness.dims() != std::vector<int>(r.pattern.dimension(), r.n)) {
    problems.push_back("witness extents are not n x ... x n");
    return problems;
  }
  if (r.witness.ones_count() != r.value) problems.push_back("witness ones count differs from value");
  const Verdict v = r.kind == ExtremalKind::kF ? contains_pattern(r.witness, r.pattern, budget).verdict
                                               : contains_interval_minor(r.witness, r.pattern, budget).verdict;
  if (v == Verdict::kContains) problems.push_back("witness contains the pattern");
  if (v == Verdict::kUndecided) problems.push_back("avoidance of the witness undecided within budget");
  if (r.kind == ExtremalKind::kF && r.status == RecordStatus::kExact && r.pattern.ones_count() >= 2) {
    std::uint64_t lower = 1;
    for (int i = 1; i < r.d; ++i) lower *= static_cast<std::uint64_t>(r.n);
    const std::uint64_t upper = lower * static_cast<std::uint64_t>(r.n);
    if (r.value < lower || r.value > upper) problems.push_back("value outside n^{d-1} <= f <= n^d");
  }
  return problems;
}

RecordStore::RecordStore(std::filesystem::path dir) : dir_(std::move(dir)), file_(dir_ / "records.jsonl") {}

std::vector<ExtremalRecord> RecordStore::load() const {
  std::vector<ExtremalRecord> out;
  std::ifstream in(file_);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw ParseError(line_no, std::string("bad record in ") + file_.string() + ": " + e.what());
    }
  }
  return out;
}

void RecordStore::append(const ExtremalRecord& r) const {
  std::filesystem::create_directories(dir_);
  std::ofstream out(file_, std::ios::app);
  if (!out) throw std::runtime_error("cannot open record store " + file_.string());
  out << record_to_json(r).dump() << '\n';
}

std::optional<ExtremalRecord> RecordStore::lookup(ExtremalKind kind, int n, const TensorMatrix& pattern,
                                                  const std::string& fingerprint) const {
  const std::string key = record_key(kind, n, pattern, fingerprint);
  std::optional<ExtremalRecord> best;
  for (ExtremalRecord& r : load()) {
    if (record_key(r) != key || !verify_record(r).empty()) continue;
    const bool better = !best || (r.status == RecordStatus::kExact && best->status != RecordStatus::kExact) ||
                        (r.status == best->status && r.value > best->value);
    if (better) best = std::move(r);
  }
  return best;
}

}  // namespace pforge
