#include "patternforge/tensor_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "patternforge/errors.hpp"

namespace pforge {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<int> parse_ints(std::string_view s, std::size_t line) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    if (pos >= s.size()) break;
    std::size_t end = pos;
    while (end < s.size() && s[end] != ' ' && s[end] != '\t') ++end;
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + end, v);
    if (ec != std::errc{} || ptr != s.data() + end) {
      throw ParseError(line, "not an integer: '" + std::string(s.substr(pos, end - pos)) + "'");
    }
    out.push_back(v);
    pos = end;
  }
  return out;
}

std::string coord_string(const Coord& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(c[i]);
  }
  return s;
}

}  // namespace

TensorMatrix parse_tensor(std::string_view text) {
  std::vector<int> dims;
  bool have_header = false;
  std::vector<Coord> ones;
  std::set<Coord> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (!have_header) {
      constexpr std::string_view kPrefix = "dims:";
      if (line.substr(0, kPrefix.size()) != kPrefix) {
        throw ParseError(line_no, "expected header 'dims: n1 ... nd'");
      }
      dims = parse_ints(line.substr(kPrefix.size()), line_no);
      if (dims.empty()) throw ParseError(line_no, "header lists no extents");
      for (int n : dims) {
        if (n < 1) throw ParseError(line_no, "extents must be positive");
      }
      have_header = true;
      continue;
    }

    Coord c = parse_ints(line, line_no);
    if (c.size() != dims.size()) {
      throw ParseError(line_no, "coordinate has " + std::to_string(c.size()) + " components, expected " +
                                    std::to_string(dims.size()));
    }
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] < 1 || c[i] > dims[i]) {
        throw ParseError(line_no, "coordinate (" + coord_string(c) + ") out of range");
      }
    }
    if (!seen.insert(c).second) {
      throw ParseError(line_no, "duplicate coordinate (" + coord_string(c) + ")");
    }
    ones.push_back(std::move(c));
  }
  if (!have_header) throw ParseError(line_no == 0 ? 1 : line_no, "missing 'dims:' header");
  return TensorMatrix(std::move(dims), ones);
}

std::string serialize_tensor(const TensorMatrix& a) {
  std::string out = "dims:";
  for (int n : a.dims()) out += ' ' + std::to_string(n);
  out += '\n';
  for (const Coord& c : a.ones()) {
    out += coord_string(c);
    out += '\n';
  }
  return out;
}

TensorMatrix tensor_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("ones")) {
    throw ParseError(1, "tensor JSON needs \"dims\" and \"ones\"");
  }
  const auto& jd = j.at("dims");
  if (!jd.is_array() || jd.empty()) throw ParseError(1, "\"dims\" must be a non-empty array");
  std::vector<int> dims;
  for (const auto& v : jd) {
    if (!v.is_number_integer() || v.get<long long>() < 1) {
      throw ParseError(1, "\"dims\" entries must be positive integers");
    }
    dims.push_back(v.get<int>());
  }
  const auto& jo = j.at("ones");
  if (!jo.is_array()) throw ParseError(1, "\"ones\" must be an array");
  std::vector<Coord> ones;
  std::set<Coord> seen;
  for (std::size_t idx = 0; idx < jo.size(); ++idx) {
    const auto& jc = jo[idx];
    const std::string where = "ones[" + std::to_string(idx) + "]: ";
    if (!jc.is_array() || jc.size() != dims.size()) {
      throw ParseError(1, where + "expected " + std::to_string(dims.size()) + " integers");
    }
    Coord c;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (!jc[i].is_number_integer()) throw ParseError(1, where + "non-integer component");
      const long long v = jc[i].get<long long>();
      if (v < 1 || v > dims[i]) throw ParseError(1, where + "coordinate out of range");
      c.push_back(static_cast<int>(v));
    }
    if (!seen.insert(c).second) throw ParseError(1, where + "duplicate coordinate");
    ones.push_back(std::move(c));
  }
  return TensorMatrix(std::move(dims), ones);
}

nlohmann::json tensor_to_json(const TensorMatrix& a) {
  nlohmann::json ones = nlohmann::json::array();
  for (const Coord& c : a.ones()) ones.push_back(c);
  return {{"dims", a.dims()}, {"ones", std::move(ones)}};
}

TensorMatrix parse_tensor_any(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      // Translate the byte offset into a line number.
      const auto upto = std::min<std::size_t>(e.byte, text.size());
      const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
      throw ParseError(line, "invalid JSON");
    }
    return tensor_from_json(j);
  }
  return parse_tensor(text);
}

TensorMatrix load_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tensor file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_tensor_any(ss.str());
}

}  // namespace pforge
