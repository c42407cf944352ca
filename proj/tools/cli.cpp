#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "patternforge/constructions.hpp"
#include "patternforge/containment.hpp"
#include "patternforge/errors.hpp"
#include "patternforge/extremal.hpp"
#include "patternforge/probability.hpp"
#include "patternforge/records.hpp"
#include "patternforge/tensor.hpp"
#include "patternforge/tensor_io.hpp"

namespace pforge::cli {
namespace {

using nlohmann::json;

constexpr const char* kAllOnesPrefix = "allones:";

struct Globals {
  std::string format = "text";
  unsigned threads = 1;

  bool json() const { return format == "json"; }
};

// Thrown for bad option values that CLI11 cannot validate on its own.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw UsageError("bad integer '" + item + "' in " + what);
    values.push_back(v);
  }
  if (values.empty()) throw UsageError("empty list in " + what);
  return values;
}

TensorMatrix load_tensor_arg(const std::string& arg) {
  if (arg.rfind(kAllOnesPrefix, 0) == 0) {
    const std::vector<int> dims = parse_int_list(arg.substr(std::char_traits<char>::length(kAllOnesPrefix)), arg);
    for (int k : dims) {
      if (k < 1) throw UsageError("allones extents must be positive: " + arg);
    }
    return TensorMatrix::all_ones(dims);
  }
  if (!std::filesystem::exists(arg)) throw UsageError("cannot read tensor file '" + arg + "'");
  return load_tensor_file(arg);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read JSON file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::string coord_text(const Coord& c) {
  std::string s = "(";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(c[i]);
  }
  return s + ")";
}

std::string witness_text(const GridWitness& w) {
  std::string s;
  for (std::size_t a = 0; a < w.axes.size(); ++a) {
    s += "axis " + std::to_string(a + 1) + ":";
    for (const Interval& iv : w.axes[a]) {
      s += " [" + std::to_string(iv.lo) + "," + std::to_string(iv.hi) + "]";
    }
    s += "\n";
  }
  return s;
}

std::string embedding_text(const Embedding& e) {
  std::string s;
  for (std::size_t a = 0; a < e.axis_maps.size(); ++a) {
    s += "axis " + std::to_string(a + 1) + ":";
    for (int v : e.axis_maps[a]) s += " " + std::to_string(v);
    s += "\n";
  }
  return s;
}

std::string rational_text(const Rational& r) { return to_string(r); }

std::string fixed(double v, int digits = 6) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

int verdict_status(Verdict v) {
  switch (v) {
    case Verdict::kContains: return kSuccess;
    case Verdict::kAvoids: return kNegative;
    case Verdict::kUndecided: return kUndecided;
  }
  return kUndecided;
}

void emit_tensor(std::ostream& out, const Globals& g, const TensorMatrix& t) {
  if (g.json()) {
    out << tensor_to_json(t).dump(2) << '\n';
  } else {
    out << serialize_tensor(t);
  }
}

void emit_construction(std::ostream& out, const Globals& g, const TensorMatrix& t, const std::string& verification) {
  if (g.json()) {
    out << json{{"tensor", tensor_to_json(t)}, {"verification", verification}}.dump(2) << '\n';
  } else {
    out << "# verification: " << verification << '\n' << serialize_tensor(t);
  }
}

std::optional<std::filesystem::path> cache_dir_from(const std::string& flag) {
  if (!flag.empty()) return std::filesystem::path(flag);
  if (const char* env = std::getenv("PATTERNFORGE_CACHE"); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return std::nullopt;
}

json record_payload(const ExtremalRecord& r) {
  json j = record_to_json(r);
  // Timing and node counts vary between runs and thread counts.
  j.erase("elapsed_ms");
  j.erase("nodes");
  return j;
}

// Each subcommand registers its options and stores its action here.
using Action = std::function<int()>;

struct Wiring {
  CLI::App& app;
  Globals& g;
  std::ostream& out;
  Action& action;
};

void add_contains(Wiring w) {
  auto* cmd = w.app.add_subcommand("contains", "Decide ordinary pattern containment of P in A");
  auto a = std::make_shared<std::string>();
  auto p = std::make_shared<std::string>();
  auto nodes = std::make_shared<std::uint64_t>(Budget{}.max_nodes);
  cmd->add_option("--a", *a, "Host tensor file")->required();
  cmd->add_option("--p", *p, "Pattern tensor file or allones:k1,...,kd")->required();
  cmd->add_option("--budget-nodes", *nodes, "Search node budget")->check(CLI::PositiveNumber);
  cmd->callback([=, &g = w.g, &out = w.out, &action = w.action] {
    action = [=, &g, &out] {
      const PatternDecision d = contains_pattern(load_tensor_arg(*a), load_tensor_arg(*p), Budget{*nodes});
      if (g.json()) {
        json j{{"verdict", to_string(d.verdict)}};
        j["embedding"] = d.embedding ? embedding_to_json(*d.embedding) : json(nullptr);
        out << j.dump(2) << '\n';
      } else {
        out << to_string(d.verdict) << '\n';
        if (d.embedding) out << embedding_text(*d.embedding);
      }
      return verdict_status(d.verdict);
    };
  });
}

void add_minor(Wiring w) {
  auto* cmd = w.app.add_subcommand("minor", "Decide interval-minor containment of B in A");
  auto a = std::make_shared<std::string>();
  auto b = std::make_shared<std::string>();
  auto nodes = std::make_shared<std::uint64_t>(Budget{}.max_nodes);
  cmd->add_option("--a", *a, "Host tensor file")->required();
  cmd->add_option("--b", *b, "Minor tensor file or allones:k1,...,kd")->required();
  cmd->add_option("--budget-nodes", *nodes, "Search node budget")->check(CLI::PositiveNumber);
  cmd->callback([=, &g = w.g, &out = w.out, &action = w.action] {
    action = [=, &g, &out] {
      const MinorDecision d = contains_interval_minor(load_tensor_arg(*a), load_tensor_arg(*b), Budget{*nodes});
      if (g.json()) {
        json j{{"verdict", to_string(d.verdict)}};
        j["witness"] = d.witness ? witness_to_json(*d.witness) : json(nullptr);
        out << j.dump(2) << '\n';
      } else {
        out << to_string(d.verdict) << '\n';
        if (d.witness) out << witness_text(*d.witness);
      }
      return verdict_status(d.verdict);
    };
  });
}

void add_contract(Wiring w) {
  auto* cmd = w.app.add_subcommand("contract", "Contract the cross sections lo..hi of one axis");
  auto a = std::make_shared<std::string>();
  auto axis = std::make_shared<int>(1);
  auto lo = std::make_shared<int>(1);
  auto hi = std::make_shared<int>(1);
  cmd->add_option("--a", *a, "Tensor file")->required();
  cmd->add_option("--axis", *axis, "Axis, 1-based")->required();
  cmd->add_option("--lo", *lo, "First cross section")->required();
  cmd->add_option("--hi", *hi, "Last cross section")->required();
  cmd->callback([=, &g = w.g, &out = w.out, &action = w.action] {
    action = [=, &g, &out] {
      emit_tensor(out, g, contract(load_tensor_arg(*a), *axis, *lo, *hi));
      return int{kSuccess};
    };
  });
}

void add_kron(Wiring w) {
  auto* cmd = w.app.add_subcommand("kron", "Kronecker product M (x) N");
  auto m = std::make_shared<std::string>();
  auto n = std::make_shared<std::string>();
  cmd->add_option("--m", *m, "Outer tensor file or allones:...")->required();
  cmd->add_option("--n", *n, "Inner tensor file or allones:...")->required();
  cmd->callback([=, &g = w.g, &out = w.out, &action = w.action] {
    action = [=, &g, &out] {
      emit_tensor(out, g, kronecker(load_tensor_arg(*m), load_tensor_arg(*n)));
      return int{kSuccess};
    };
  });
}

void add_construct(Wiring w) {
  auto* cmd = w.app.add_subcommand("construct", "Build a tensor from a named construction");
  cmd->require_subcommand(1);
  Globals& g = w.g;
  std::ostream& out = w.out;
  Action& action = w.action;

  {
    auto* sub = cmd->add_subcommand("antidiag", "Ones at coordinates summing to s+d-1");
    auto s = std::make_shared<int>(1);
    auto d = std::make_shared<int>(2);
    sub->add_option("--s", *s, "Side length")->required()->check(CLI::PositiveNumber);
    sub->add_option("--d", *d, "Dimension")->required()->check(CLI::PositiveNumber);
    sub->callback([=, &g, &out, &action] {
      action = [=, &g, &out] {
        emit_tensor(out, g, antidiagonal(*s, *d));
        return int{kSuccess};
      };
    });
  }
  {
    auto* sub = cmd->add_subcommand("identity", "Identity permutation tensor");
    auto k = std::make_shared<int>(1);
    auto d = std::make_shared<int>(2);
    sub->add_option("--k", *k, "Side length")->required()->check(CLI::PositiveNumber);
    sub->add_option("--d", *d, "Dimension")->required()->check(CLI::PositiveNumber);
    sub->callback([=, &g, &out, &action] {
      action = [=, &g, &out] {
        emit_tensor(out, g, identity_permutation(*k, *d).matrix());
        return int{kSuccess};
      };
    });
  }
  {
    auto* sub = cmd->add_subcommand("random-perm", "Random permutation tensor from d-1 uniform permutations");
    auto k = std::make_shared<int>(1);
    auto d = std::make_shared<int>(2);
    auto seed = std::make_shared<std::uint64_t>(0);
    sub->add_option("--k", *k, "Side length")->required()->check(CLI::PositiveNumber);
    sub->add_option("--d", *d, "Dimension")->required()->check(CLI::PositiveNumber);
    sub->add_option("--seed", *seed, "Unsigned 64-bit seed")->required();
    sub->callback([=, &g, &out, &action] {
      action = [=, &g, &out] {
        emit_tensor(out, g, random_permutation(*k, *d, *seed).matrix());
        return int{kSuccess};
      };
    });
  }
  {
    auto* sub = cmd->add_subcommand("homo1", "Antidiagonal (x) N avoider of the k-grid");
    auto s = std::make_shared<int>(1);
    auto n = std::make_shared<std::string>();
    auto k = std::make_shared<int>(2);
    auto no_verify = std::make_shared<bool>(false);
    sub->add_option("--s", *s, "Antidiagonal side length")->required()->check(CLI::PositiveNumber);
    sub->add_option("--n", *n, "Tensor N avoiding the (k-1)-grid")->required();
    sub->add_option("--k", *k, "Grid size")->required()->check(CLI::PositiveNumber);
    sub->add_flag("--no-verify", *no_verify, "Skip output verification");
    sub->callback([=, &g, &out, &action] {
      action = [=, &g, &out] {
        ConstructionOptions opts;
        opts.verify = !*no_verify;
        const ConstructionResult r = homo1_avoider(*s, load_tensor_arg(*n), *k, opts);
        emit_construction(out, g, r.matrix, to_string(r.verification));
        return r.verification == VerificationStatus::kUndecided ? int{kUndecided} : int{kSuccess};
      };
    });
  }
  {
    auto* sub = cmd->add_subcommand("scale", "Reflected antidiagonal (x) A avoider of P");
    auto s = std::make_shared<int>(1);
    auto a = std::make_shared<std::string>();
    auto p = std::make_shared<std::string>();
    auto no_verify = std::make_shared<bool>(false);
    sub->add_option("--s", *s, "Antidiagonal side length")->required()->check(CLI::PositiveNumber);
    sub->add_option("--a", *a, "Tensor A avoiding P")->required();
    sub->add_option("--p", *p, "Pattern with a corner one")->required();
    sub->add_flag("--no-verify", *no_verify, "Skip output verification");
    sub->callback([=, &g, &out, &action] {
      action = [=, &g, &out] {
        ConstructionOptions opts;
        opts.verify = !*no_verify;
        const ConstructionResult r = scale_avoider(*s, load_tensor_arg(*a), load_tensor_arg(*p), opts);
        emit_construction(out, g, r.matrix, to_string(r.verification));
        return r.verification == VerificationStatus::kUndecided ? int{kUndecided} : int{kSuccess};
      };
    });
  }
  {
    auto* sub = cmd->add_subcommand("corner-reduce", "Reduce a permutation along a grid witness");
    auto p = std::make_shared<std::string>();
    auto witness = std::make_shared<std::string>();
    auto ell = std::make_shared<int>(0);
    auto nodes = std::make_shared<std::uint64_t>(Budget{}.max_nodes);
    sub->add_option("--p", *p, "Permutation tensor file")->required();
    auto* wopt = sub->add_option("--witness", *witness, "Grid witness JSON file");
    auto* lopt = sub->add_option("--ell", *ell, "Grid size; the lex-least witness is used")->check(CLI::Range(2, 1 << 20));
    wopt->excludes(lopt);
    sub->add_option("--budget-nodes", *nodes, "Search node budget")->check(CLI::PositiveNumber);
    sub->callback([=, &g, &out, &action] {
      action = [=, &g, &out]() -> int {
        const PermutationTensor perm(load_tensor_arg(*p));
        GridWitness gw;
        if (!witness->empty()) {
          gw = witness_from_json(load_json_file(*witness));
        } else if (*ell >= 2) {
          const std::vector<int> dims(perm.dimension(), *ell);
          const MinorDecision d = contains_interval_minor(perm.matrix(), TensorMatrix::all_ones(dims), Budget{*nodes});
          if (d.verdict == Verdict::kUndecided) throw UndecidedError("grid witness search undecided within budget");
          if (!d.witness) throw PreconditionError("permutation avoids the requested grid; no witness exists");
          gw = *d.witness;
        } else {
          throw UsageError("corner-reduce needs --witness or --ell");
        }
        const CornerReduction r = corner_reduce(perm, gw, Budget{*nodes});
        if (g.json()) {
          json del = json::array();
          for (const Coord& c : r.deleted_off_corner) del.push_back(c);
          json j{
              {"tensor", tensor_to_json(r.reduced)},
              {"partition", witness_to_json(r.partition)},
              {"deleted_off_corner", del},
              {"deleted_center", r.deleted_center},
              {"center_candidates", r.center_candidates},
              {"center_tie_break", "lexicographically least"},
              {"contains_smaller_grid", r.contains_smaller_grid},
              {"has_corner_one", r.has_corner_one},
              {"claims_hold", r.claims_hold()},
          };
          j["smaller_grid_witness"] = r.smaller_grid_witness ? witness_to_json(*r.smaller_grid_witness) : json(nullptr);
          out << j.dump(2) << '\n';
        } else {
          out << "# partition\n";
          std::istringstream ws(witness_text(r.partition));
          for (std::string line; std::getline(ws, line);) out << "#   " << line << '\n';
          out << "# deleted off-corner ones: " << r.deleted_off_corner.size() << '\n';
          out << "# deleted center one: " << coord_text(r.deleted_center) << " (lex-least of "
              << r.center_candidates << ")\n";
          out << "# contains smaller grid: " << (r.contains_smaller_grid ? "yes" : "no") << '\n';
          out << "# corner one: " << (r.has_corner_one ? "yes" : "no") << '\n';
          out << serialize_tensor(r.reduced);
        }
        return r.claims_hold() ? kSuccess : kNegative;
      };
    });
  }
}

struct ExtremalOptions {
  int n = 1;
  std::string pattern;
  std::uint64_t budget_nodes = SearchConfig{}.node_budget;
  double budget_secs = SearchConfig{}.time_budget.count();
  std::string cache_dir;
  bool no_verify = false;
  bool symmetry = false;

  SearchConfig config(const Globals& g) const {
    SearchConfig cfg;
    cfg.node_budget = budget_nodes;
    cfg.time_budget = std::chrono::duration<double>(budget_secs);
    if (auto dir = cache_dir_from(cache_dir)) cfg.cache_dir = *dir;
    cfg.threads = g.threads;
    cfg.verify = !no_verify;
    cfg.symmetry_pruning = symmetry;
    return cfg;
  }
};

void add_search_options(CLI::App* sub, ExtremalOptions& o) {
  sub->add_option("--pattern", o.pattern, "Pattern tensor file or allones:k1,...,kd")->required();
  sub->add_option("--budget-nodes", o.budget_nodes, "Search node budget")->check(CLI::PositiveNumber);
  sub->add_option("--budget-secs", o.budget_secs, "Wall-clock budget in seconds")->check(CLI::PositiveNumber);
  sub->add_option("--cache-dir", o.cache_dir, "Record store directory (default: $PATTERNFORGE_CACHE)");
  sub->add_flag("--no-verify", o.no_verify, "Skip witness verification");
  sub->add_flag("--symmetry", o.symmetry, "Prune with pattern-preserving axis reflections");
}

void add_extremal(Wiring w) {
  auto* cmd = w.app.add_subcommand("extremal", "Exact extremal numbers f (ordinary) or m (interval minor)");
  cmd->require_subcommand(1);
  for (const ExtremalKind kind : {ExtremalKind::kF, ExtremalKind::kM}) {
    auto* sub = cmd->add_subcommand(to_string(kind), kind == ExtremalKind::kF
                                                         ? "Maximum ones in an n^d matrix avoiding P"
                                                         : "Maximum ones in an n^d matrix avoiding B as interval minor");
    auto o = std::make_shared<ExtremalOptions>();
    sub->add_option("--n", o->n, "Side length")->required()->check(CLI::PositiveNumber);
    add_search_options(sub, *o);
    sub->callback([=, &g = w.g, &out = w.out, &action = w.action] {
      action = [=, &g, &out] {
        const ExtremalRecord r = extremal_exact(kind, o->n, load_tensor_arg(o->pattern), o->config(g));
        if (g.json()) {
          out << record_payload(r).dump(2) << '\n';
        } else {
          out << to_string(kind) << "(" << r.n << ", P, " << r.d << ") "
              << (r.status == RecordStatus::kExact ? "= " : ">= ") << r.value << '\n';
          out << "status: " << to_string(r.status) << '\n';
          out << "# witness\n" << serialize_tensor(r.witness);
        }
        return r.status == RecordStatus::kExact ? int{kSuccess} : int{kUndecided};
      };
    });
  }
}

void add_ratio_seq(Wiring w) {
  auto* cmd = w.app.add_subcommand("ratio-seq", "Exact ratio sequence value / n^(d-1)");
  auto o = std::make_shared<ExtremalOptions>();
  auto kind = std::make_shared<std::string>("f");
  auto first = std::make_shared<int>(1);
  auto last = std::make_shared<int>(1);
  auto csv = std::make_shared<bool>(false);
  cmd->add_option("--kind", *kind, "f or m")->check(CLI::IsMember({"f", "m"}));
  cmd->add_option("--from", *first, "First n")->check(CLI::PositiveNumber);
  cmd->add_option("--to", *last, "Last n")->required()->check(CLI::PositiveNumber);
  cmd->add_flag("--csv", *csv, "Emit CSV");
  add_search_options(cmd, *o);
  cmd->callback([=, &g = w.g, &out = w.out, &action = w.action] {
    action = [=, &g, &out] {
      if (*first > *last) throw UsageError("--from must not exceed --to");
      const auto rows = ratio_sequence(parse_kind(*kind), load_tensor_arg(o->pattern), *first, *last, o->config(g));
      bool all_exact = true;
      for (const RatioRow& r : rows) all_exact = all_exact && r.status == RecordStatus::kExact;
      if (*csv) {
        out << "n,value,ratio,ratio_decimal,status\n";
        for (const RatioRow& r : rows) {
          out << r.n << ',' << r.value << ',' << rational_text(r.ratio) << ',' << fixed(to_double(r.ratio)) << ','
              << to_string(r.status) << '\n';
        }
      } else if (g.json()) {
        json arr = json::array();
        for (const RatioRow& r : rows) {
          arr.push_back({{"n", r.n},
                         {"value", r.value},
                         {"ratio", rational_text(r.ratio)},
                         {"ratio_decimal", to_double(r.ratio)},
                         {"status", to_string(r.status)}});
        }
        out << json{{"kind", *kind}, {"rows", arr}}.dump(2) << '\n';
      } else {
        out << std::left << std::setw(6) << "n" << std::setw(10) << "value" << std::setw(14) << "ratio"
            << "status\n";
        for (const RatioRow& r : rows) {
          out << std::left << std::setw(6) << r.n << std::setw(10) << r.value << std::setw(14)
              << fixed(to_double(r.ratio)) << to_string(r.status) << '\n';
        }
      }
      return all_exact ? int{kSuccess} : int{kUndecided};
    };
  });
}

json estimate_json(const EstimateReport& r) {
  return {{"k", r.k},
          {"ell", r.ell},
          {"d", r.d},
          {"trials", r.trials},
          {"avoid_count", r.avoid_count},
          {"undecided", r.undecided},
          {"estimate", r.estimate},
          {"radius99", r.radius},
          {"upper99", r.upper()},
          {"seed", r.seed}};
}

void add_prob(Wiring w) {
  auto* cmd = w.app.add_subcommand("prob", "Probability bounds and Monte Carlo experiments");
  cmd->require_subcommand(1);
  Globals& g = w.g;
  std::ostream& out = w.out;
  Action& action = w.action;

  {
    auto* sub = cmd->add_subcommand("estimate", "Estimate the probability a random permutation avoids the ell-grid");
    auto ks = std::make_shared<std::string>();
    auto ell = std::make_shared<int>(2);
    auto d = std::make_shared<int>(2);
    auto trials = std::make_shared<std::uint64_t>(1000);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto nodes = std::make_shared<std::uint64_t>(Budget{}.max_nodes);
    auto csv = std::make_shared<bool>(false);
    sub->add_option("--k", *ks, "Side length, or a comma list for a sweep")->required();
    sub->add_option("--ell", *ell, "Grid size")->required()->check(CLI::PositiveNumber);
    sub->add_option("--d", *d, "Dimension")->required()->check(CLI::Range(2, 64));
    sub->add_option("--trials", *trials, "Number of trials")->check(CLI::PositiveNumber);
    sub->add_option("--seed", *seed, "Master seed")->required();
    sub->add_option("--budget-nodes", *nodes, "Per-trial node budget")->check(CLI::PositiveNumber);
    sub->add_flag("--csv", *csv, "Emit CSV");
    sub->callback([=, &g, &out, &action] {
      action = [=, &g, &out] {
        std::vector<EstimateReport> reports;
        for (int k : parse_int_list(*ks, "--k")) {
          if (k < 1) throw UsageError("--k entries must be positive");
          reports.push_back(avoid_probability(k, *ell, *d, *trials, *seed, g.threads, Budget{*nodes}));
        }
        bool undecided = false;
        for (const auto& r : reports) undecided = undecided || r.undecided > 0;
        if (*csv) {
          out << "k,ell,d,trials,avoid_count,undecided,estimate,radius99,upper99,seed\n";
          for (const auto& r : reports) {
            out << r.k << ',' << r.ell << ',' << r.d << ',' << r.trials << ',' << r.avoid_count << ','
                << r.undecided << ',' << fixed(r.estimate) << ',' << fixed(r.radius) << ',' << fixed(r.upper())
                << ',' << r.seed << '\n';
          }
        } else if (g.json()) {
          if (reports.size() == 1) {
            out << estimate_json(reports.front()).dump(2) << '\n';
          } else {
            json arr = json::array();
            for (const auto& r : reports) arr.push_back(estimate_json(r));
            out << json{{"reports", arr}}.dump(2) << '\n';
          }
        } else {
          out << std::left << std::setw(8) << "k" << std::setw(6) << "ell" << std::setw(4) << "d" << std::setw(9)
              << "trials" << std::setw(8) << "avoid" << std::setw(10) << "undecided" << std::setw(11) << "estimate"
              << std::setw(11) << "radius99" << "upper99\n";
          for (const auto& r : reports) {
            out << std::left << std::setw(8) << r.k << std::setw(6) << r.ell << std::setw(4) << r.d << std::setw(9)
                << r.trials << std::setw(8) << r.avoid_count << std::setw(10) << r.undecided << std::setw(11)
                << fixed(r.estimate) << std::setw(11) << fixed(r.radius) << fixed(r.upper()) << '\n';
          }
        }
        return undecided ? int{kUndecided} : int{kSuccess};
      };
    });
  }
  {
    auto* sub = cmd->add_subcommand("threshold", "Smallest k with k >= (d+1)(2 ell)^d ln ell");
    auto ell = std::make_shared<int>(2);
    auto d = std::make_shared<int>(2);
    sub->add_option("--ell", *ell, "Grid size")->required();
    sub->add_option("--d", *d, "Dimension")->required();
    sub->callback([=, &g, &out, &action] {
      action = [=, &g, &out] {
        const std::int64_t k = lemma_threshold(*ell, *d);
        if (g.json()) {
          out << json{{"ell", *ell}, {"d", *d}, {"threshold", k}}.dump(2) << '\n';
        } else {
          out << "threshold(ell=" << *ell << ", d=" << *d << ") = " << k << '\n';
        }
        return int{kSuccess};
      };
    });
  }
  {
    auto* sub = cmd->add_subcommand("ell", "Grid size ell(k, d) and its threshold premise");
    auto k = std::make_shared<std::int64_t>(3);
    auto d = std::make_shared<int>(2);
    sub->add_option("--k", *k, "Side length")->required();
    sub->add_option("--d", *d, "Dimension")->required();
    sub->callback([=, &g, &out, &action] {
      action = [=, &g, &out] {
        const EllOfK r = ell_of_k(*k, *d);
        if (g.json()) {
          json j{{"k", *k}, {"d", *d}, {"ell", r.ell}, {"inner", r.inner}, {"degenerate", r.degenerate}};
          j["threshold"] = r.ell >= 2 ? json(r.threshold) : json(nullptr);
          j["premise_holds"] = r.premise_holds;
          out << j.dump(2) << '\n';
        } else {
          out << "ell(k=" << *k << ", d=" << *d << ") = " << r.ell << (r.degenerate ? " (degenerate)" : "") << '\n';
          out << "inner: " << fixed(r.inner) << '\n';
          if (r.ell >= 2) {
            out << "threshold: " << r.threshold << '\n';
            out << "premise k >= threshold: " << (r.premise_holds ? "yes" : "no") << '\n';
          }
        }
        return int{kSuccess};
      };
    });
  }
  {
    auto* sub = cmd->add_subcommand("chain", "Evaluate the four-term probability chain");
    auto k = std::make_shared<std::int64_t>(4);
    auto ell = std::make_shared<int>(2);
    auto d = std::make_shared<int>(2);
    sub->add_option("--k", *k, "Side length")->required();
    sub->add_option("--ell", *ell, "Grid size")->required();
    sub->add_option("--d", *d, "Dimension")->required();
    sub->callback([=, &g, &out, &action] {
      action = [=, &g, &out] {
        const ProbabilityChain c = probability_chain(*k, *ell, *d);
        if (g.json()) {
          json j{{"k", *k},
                 {"ell", *ell},
                 {"d", *d},
                 {"values", c.values},
                 {"strict", c.strict},
                 {"ordered", c.ordered()},
                 {"tail_exact", rational_text(c.tail)},
                 {"tail_matches_double", c.tail_matches_double},
                 {"union_bound_exact", c.union_bound_exact}};
          out << j.dump(2) << '\n';
        } else {
          static const char* const names[] = {"(1-(1/l-1/k)^(d-1))^(k/l-1)", "(1-1/(2l)^(d-1))^(k/(2l))",
                                              "exp(-k/(2l)^d)", "l^-(d+1)"};
          for (int i = 0; i < 4; ++i) {
            out << std::left << std::setw(30) << names[i] << std::setprecision(12) << c.values[i] << '\n';
            if (i < 3) out << (c.strict[i] ? "  <\n" : "  NOT <\n");
          }
          out << "ordered: " << (c.ordered() ? "yes" : "no") << '\n';
          out << "tail exact: " << rational_text(c.tail) << '\n';
          out << "l^d * l^-(d+1) == 1/l: " << (c.union_bound_exact ? "yes" : "no") << '\n';
        }
        return c.ordered() ? int{kSuccess} : int{kNegative};
      };
    });
  }
}

void add_records(Wiring w) {
  auto* cmd = w.app.add_subcommand("records", "Inspect the extremal record store");
  cmd->require_subcommand(1);
  auto dir = std::make_shared<std::string>();
  cmd->add_option("--cache-dir", *dir, "Record store directory (default: $PATTERNFORGE_CACHE)");
  auto store_dir = [dir] {
    auto d = cache_dir_from(*dir);
    if (!d) throw UsageError("no record store: pass --cache-dir or set PATTERNFORGE_CACHE");
    return *d;
  };
  Globals& g = w.g;
  std::ostream& out = w.out;
  Action& action = w.action;

  auto* list = cmd->add_subcommand("list", "List stored records");
  list->callback([=, &g, &out, &action] {
    action = [=, &g, &out] {
      const auto records = RecordStore(store_dir()).load();
      if (g.json()) {
        json arr = json::array();
        for (const auto& r : records) arr.push_back(record_to_json(r));
        out << json{{"records", arr}}.dump(2) << '\n';
      } else {
        for (const auto& r : records) {
          out << to_string(r.kind) << " n=" << r.n << " d=" << r.d << " value=" << r.value << " "
              << to_string(r.status) << " " << r.fingerprint << '\n';
        }
      }
      return int{kSuccess};
    };
  });

  auto* verify = cmd->add_subcommand("verify", "Re-verify every stored record");
  verify->callback([=, &g, &out, &action] {
    action = [=, &g, &out] {
      const auto records = RecordStore(store_dir()).load();
      json arr = json::array();
      std::size_t bad = 0;
      for (std::size_t i = 0; i < records.size(); ++i) {
        const auto problems = verify_record(records[i]);
        if (!problems.empty()) ++bad;
        arr.push_back({{"index", i + 1}, {"ok", problems.empty()}, {"problems", problems}});
        if (!g.json()) {
          out << "record " << (i + 1) << ": " << (problems.empty() ? "ok" : "FAILED") << '\n';
          for (const auto& p : problems) out << "  " << p << '\n';
        }
      }
      if (g.json()) {
        out << json{{"records", arr}, {"failed", bad}}.dump(2) << '\n';
      } else {
        out << records.size() << " records, " << bad << " failed\n";
      }
      return bad == 0 ? int{kSuccess} : int{kNegative};
    };
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Forbidden pattern and interval-minor toolkit for d-dimensional 0-1 matrices", "patternforge"};
  app.require_subcommand(1);
  // Inherited by subcommands, so global options work after a subcommand name too.
  app.fallthrough();
  Globals g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--threads", g.threads, "Parallel width cap")->check(CLI::Range(1u, 1024u));

  Action action;
  Wiring w{app, g, out, action};
  add_contains(w);
  add_minor(w);
  add_contract(w);
  add_kron(w);
  add_construct(w);
  add_extremal(w);
  add_ratio_seq(w);
  add_prob(w);
  add_records(w);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  if (!action) {
    err << app.help();
    return kUsage;
  }
  try {
    return action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const pforge::ParseError& e) {
    err << "error: parse: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: out of range: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const RefusalError& e) {
    err << "error: refused: " << e.what() << '\n';
    return kUsage;
  } catch (const UndecidedError& e) {
    err << "undecided: " << e.what() << '\n';
    return kUndecided;
  } catch (const VerificationFailure& e) {
    err << "verification failure: " << e.what() << '\n';
    return kVerificationFailed;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kVerificationFailed;
  }
}

}  // namespace pforge::cli
