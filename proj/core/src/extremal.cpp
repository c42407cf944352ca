#include "patternforge/extremal.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <mutex>
#include <optional>
#include <thread>

#include "patternforge/containment.hpp"
#include "patternforge/errors.hpp"
#include "patternforge/records.hpp"

namespace pforge {

std::string to_string(ExtremalKind k) { return k == ExtremalKind::kF ? "f" : "m"; }

std::string to_string(RecordStatus s) { return s == RecordStatus::kExact ? "exact" : "lower-bound-only"; }

ExtremalKind parse_kind(const std::string& s) {
  if (s == "f") return ExtremalKind::kF;
  if (s == "m") return ExtremalKind::kM;
  throw StructuralError("unknown extremal kind '" + s + "'");
}

RecordStatus parse_status(const std::string& s) {
  if (s == "exact") return RecordStatus::kExact;
  if (s == "lower-bound-only") return RecordStatus::kLowerBoundOnly;
  throw StructuralError("unknown record status '" + s + "'");
}

std::string SearchConfig::fingerprint() const {
  return std::string("bnb-lex-v1;sym=") + (symmetry_pruning ? "1" : "0");
}

namespace {

using Clock = std::chrono::steady_clock;

// Budget for each avoidance check inside the search.
constexpr Budget kCheckBudget{200'000'000};

struct Prefix {
  std::vector<char> bits;
  std::vector<std::uint64_t> ones;
  std::uint64_t next = 0;  // first undecided cell
};

struct TaskResult {
  std::uint64_t value = 0;
  std::vector<std::uint64_t> ones;
  bool improved = false;
};

// Depth-first branch and bound over cells in lexicographic order, trying
// "1" before "0". Leaves are therefore met in decreasing bitstring order and
// the first optimum found is the lexicographically greatest optimal avoider.
class Solver {
 public:
  Solver(ExtremalKind kind, int n, const TensorMatrix& pattern, const SearchConfig& cfg)
      : kind_(kind), pattern_(pattern), cfg_(cfg), dims_(pattern.dimension(), n) {
    shape_ = TensorMatrix::zeros(dims_);
    cells_ = shape_.cell_count();
    if (cfg.symmetry_pruning) build_symmetries();
  }

  // Runs the search; results strictly better than `floor` replace the seed.
  void solve(std::uint64_t floor, const TensorMatrix& floor_witness) {
    start_ = Clock::now();
    global_best_.store(floor);
    floor_ = floor;

    const unsigned threads = std::max(1u, cfg_.threads);
    std::vector<Prefix> tasks;
    if (threads == 1) {
      tasks.push_back(Prefix{std::vector<char>(cells_, 0), {}, 0});
    } else {
      const auto depth = std::min<std::uint64_t>(cells_, std::bit_width(threads) + 3);
      Prefix p{std::vector<char>(cells_, 0), {}, 0};
      split(p, 0, depth, tasks);
    }

    std::vector<TaskResult> results(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) {
        Prefix state = tasks[t];
        TaskResult& res = results[t];
        res.value = floor_;
        dfs(state, state.next, res);
      }
    };
    if (threads == 1 || tasks.size() <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned i = 0; i < std::min<std::size_t>(threads, tasks.size()); ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    value_ = floor;
    witness_ = floor_witness;
    for (const TaskResult& r : results) {
      if (r.improved && r.value > value_) {
        value_ = r.value;
        witness_ = TensorMatrix::from_linear(dims_, r.ones);
      }
    }
  }

  std::uint64_t value() const { return value_; }
  const TensorMatrix& witness() const { return witness_; }
  bool exact() const { return !exhausted_.load() && !inexact_.load(); }
  std::uint64_t nodes() const { return nodes_.load(); }

 private:
  void split(Prefix& p, std::uint64_t i, std::uint64_t depth, std::vector<Prefix>& out) {
    if (i == depth) {
      out.push_back(p);
      out.back().next = depth;
      return;
    }
    if (can_add(p, i)) {
      p.bits[i] = 1;
      p.ones.push_back(i);
      if (canonical(p, i)) split(p, i + 1, depth, out);
      p.ones.pop_back();
      p.bits[i] = 0;
    }
    if (canonical(p, i)) split(p, i + 1, depth, out);
  }

  bool can_add(const Prefix& p, std::uint64_t cell) {
    std::vector<std::uint64_t> ones = p.ones;
    ones.push_back(cell);
    const TensorMatrix a = TensorMatrix::from_linear(dims_, std::move(ones));
    Verdict v;
    if (kind_ == ExtremalKind::kF) {
      v = contains_pattern_through(a, pattern_, cell, kCheckBudget).verdict;
    } else {
      v = contains_interval_minor(a, pattern_, kCheckBudget).verdict;
    }
    if (v == Verdict::kUndecided) inexact_.store(true);
    return v == Verdict::kAvoids;
  }

  // False when some symmetry maps the decided prefix to a strictly greater
  // bitstring; such a branch is never the lexicographic maximum of its orbit.
  bool canonical(const Prefix& p, std::uint64_t decided) const {
    for (const auto& inv : inverse_maps_) {
      for (std::uint64_t j = 0; j <= decided; ++j) {
        const std::uint64_t src = inv[j];
        if (src > decided) break;
        if (p.bits[j] == p.bits[src]) continue;
        if (p.bits[j] < p.bits[src]) return false;
        break;
      }
    }
    return true;
  }

  bool out_of_budget() {
    const std::uint64_t n = nodes_.fetch_add(1, std::memory_order_relaxed) + 1;
    if (n > cfg_.node_budget) exhausted_.store(true);
    if ((n & 1023) == 0 && Clock::now() - start_ > cfg_.time_budget) exhausted_.store(true);
    return exhausted_.load(std::memory_order_relaxed);
  }

  void dfs(Prefix& p, std::uint64_t i, TaskResult& res) {
    if (out_of_budget()) return;
    const std::uint64_t bound = p.ones.size() + (cells_ - i);
    if (bound <= res.value || bound < global_best_.load(std::memory_order_relaxed)) return;
    if (i == cells_) {
      res.value = p.ones.size();
      res.ones = p.ones;
      res.improved = true;
      std::uint64_t g = global_best_.load();
      while (g < res.value && !global_best_.compare_exchange_weak(g, res.value)) {
      }
      return;
    }
    if (can_add(p, i)) {
      p.bits[i] = 1;
      p.ones.push_back(i);
      if (canonical(p, i)) dfs(p, i + 1, res);
      p.ones.pop_back();
      p.bits[i] = 0;
    }
    if (canonical(p, i)) dfs(p, i + 1, res);
  }

  void build_symmetries() {
    const int d = static_cast<int>(dims_.size());
    for (unsigned mask = 1; mask < (1u << d); ++mask) {
      std::vector<bool> axes(d);
      for (int i = 0; i < d; ++i) axes[i] = (mask >> i) & 1;
      if (!(reflect(pattern_, axes) == pattern_)) continue;
      // A reflection is an involution, so it is its own inverse.
      std::vector<std::uint64_t> map(cells_);
      for (std::uint64_t c = 0; c < cells_; ++c) {
        Coord x = shape_.delinearize(c);
        for (int i = 0; i < d; ++i) {
          if (axes[i]) x[i] = dims_[i] + 1 - x[i];
        }
        map[c] = shape_.linearize(x);
      }
      inverse_maps_.push_back(std::move(map));
    }
  }

  ExtremalKind kind_;
  const TensorMatrix& pattern_;
  const SearchConfig& cfg_;
  std::vector<int> dims_;
  TensorMatrix shape_ = TensorMatrix::zeros({1});
  std::uint64_t cells_ = 0;
  std::vector<std::vector<std::uint64_t>> inverse_maps_;

  Clock::time_point start_;
  std::uint64_t floor_ = 0;
  std::atomic<std::uint64_t> global_best_{0};
  std::atomic<std::uint64_t> nodes_{0};
  std::atomic<bool> exhausted_{false};
  std::atomic<bool> inexact_{false};

  std::uint64_t value_ = 0;
  TensorMatrix witness_ = TensorMatrix::zeros({1});
};

bool witness_avoids(ExtremalKind kind, const TensorMatrix& a, const TensorMatrix& p) {
  const Verdict v = kind == ExtremalKind::kF ? contains_pattern(a, p).verdict : contains_interval_minor(a, p).verdict;
  return v == Verdict::kAvoids;
}

}  // namespace

ExtremalRecord extremal_exact(ExtremalKind kind, int n, const TensorMatrix& pattern, const SearchConfig& cfg) {
  if (n < 1) throw PreconditionError("n must be at least 1");
  if (pattern.dimension() < 2) throw PreconditionError("pattern dimension must be at least 2");
  if (pattern.is_zero()) throw PreconditionError("pattern must have at least one 1");
  if (cfg.node_budget == 0 || cfg.time_budget.count() <= 0) throw PreconditionError("budgets must be positive");

  const auto started = Clock::now();
  const std::string fp = cfg.fingerprint();
  std::optional<RecordStore> store;
  std::optional<ExtremalRecord> cached;
  if (!cfg.cache_dir.empty()) {
    store.emplace(cfg.cache_dir);
    cached = store->lookup(kind, n, pattern, fp);
    if (cached && cached->status == RecordStatus::kExact) return *cached;
  }

  const std::vector<int> dims(pattern.dimension(), n);
  // The zero matrix avoids every nonzero pattern. A cached lower bound v
  // resumes with floor v - 1, so the lexicographically greatest optimum is
  // still the witness reported.
  std::uint64_t floor = 0;
  TensorMatrix floor_witness = TensorMatrix::zeros(dims);
  if (cached && cached->value > 0) {
    floor = cached->value - 1;
    floor_witness = cached->witness;
  }

  Solver solver(kind, n, pattern, cfg);
  solver.solve(floor, floor_witness);

  ExtremalRecord rec;
  rec.kind = kind;
  rec.n = n;
  rec.d = pattern.dimension();
  rec.pattern = pattern;
  rec.value = solver.value();
  rec.witness = solver.witness();
  if (cached && rec.value < cached->value) {
    rec.value = cached->value;
    rec.witness = cached->witness;
  }
  rec.status = solver.exact() ? RecordStatus::kExact : RecordStatus::kLowerBoundOnly;
  rec.nodes = solver.nodes();
  rec.fingerprint = fp;
  rec.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);

  if (cfg.verify) {
    if (rec.witness.ones_count() != rec.value || rec.witness.dims() != dims ||
        !witness_avoids(kind, rec.witness, pattern)) {
      throw VerificationFailure("extremal search produced a witness that does not certify its value");
    }
  }
  if (store) store->append(rec);
  return rec;
}

ExtremalRecord f_exact(int n, const TensorMatrix& p, const SearchConfig& cfg) {
  return extremal_exact(ExtremalKind::kF, n, p, cfg);
}

ExtremalRecord m_exact(int n, const TensorMatrix& b, const SearchConfig& cfg) {
  return extremal_exact(ExtremalKind::kM, n, b, cfg);
}

std::vector<RatioRow> ratio_sequence(ExtremalKind kind, const TensorMatrix& pattern, int n_first, int n_last,
                                     const SearchConfig& cfg) {
  if (n_first < 1 || n_last < n_first) throw PreconditionError("invalid n range");
  std::vector<RatioRow> rows;
  for (int n = n_first; n <= n_last; ++n) {
    const ExtremalRecord r = extremal_exact(kind, n, pattern, cfg);
    BigInt denom = 1;
    for (int i = 1; i < pattern.dimension(); ++i) denom *= n;
    rows.push_back({n, r.value, Rational(BigInt(r.value), denom), r.status});
  }
  return rows;
}

}  // namespace pforge
