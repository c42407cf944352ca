#include "patternforge/containment.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <utility>

#include "patternforge/errors.hpp"

namespace pforge {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kContains: return "contains";
    case Verdict::kAvoids: return "avoids";
    case Verdict::kUndecided: return "undecided";
  }
  return "undecided";
}

bool PatternDecision::contains() const {
  if (verdict == Verdict::kUndecided) throw UndecidedError("pattern containment undecided within budget");
  return verdict == Verdict::kContains;
}

bool MinorDecision::contains() const {
  if (verdict == Verdict::kUndecided) throw UndecidedError("interval-minor containment undecided within budget");
  return verdict == Verdict::kContains;
}

namespace {

void check_same_dimension(const TensorMatrix& a, const TensorMatrix& p) {
  if (a.dimension() != p.dimension()) {
    throw StructuralError("containment needs equal dimensions (" + std::to_string(a.dimension()) +
                          " vs " + std::to_string(p.dimension()) + ")");
  }
}

bool fits(const TensorMatrix& a, const TensorMatrix& p) {
  for (int i = 0; i < a.dimension(); ++i) {
    if (p.dims()[i] > a.dims()[i]) return false;
  }
  return true;
}

// Backtracking over the ones of P in lexicographic order. Monotone index
// maps preserve lexicographic order, so the image of the t-th one of P is
// searched strictly after the image of the (t-1)-th.
class PatternMatcher {
 public:
  PatternMatcher(const TensorMatrix& a, const TensorMatrix& p, Budget budget)
      : a_(a), p_(p), d_(a.dimension()), budget_(budget), aones_(a.linear_ones()) {
    pones_.reserve(p.ones_count());
    for (std::uint64_t cell : p.linear_ones()) {
      std::vector<int> c(d_);
      for (int i = 0; i < d_; ++i) c[i] = p.component0(cell, i);
      pones_.push_back(std::move(c));
    }
    img_.resize(d_);
    for (int i = 0; i < d_; ++i) img_[i].assign(p.dims()[i], -1);
    chosen_.assign(pones_.size(), 0);
  }

  PatternDecision run(std::optional<std::uint64_t> forced_last) {
    PatternDecision out;
    if (!fits(a_, p_)) {
      out.verdict = Verdict::kAvoids;
      return out;
    }
    bool found = false;
    if (pones_.empty()) {
      found = true;
    } else if (forced_last) {
      const auto it = std::lower_bound(aones_.begin(), aones_.end(), *forced_last);
      if (it != aones_.end() && *it == *forced_last) {
        const std::size_t last = pones_.size() - 1;
        const auto pos = static_cast<std::size_t>(it - aones_.begin());
        end_ = pos;
        std::vector<int> undo;
        ++nodes_;
        if (apply(last, *forced_last, undo)) {
          chosen_[last] = pos;
          found = assign(0, 0, last);
        }
      }
    } else {
      end_ = aones_.size();
      found = assign(0, 0, pones_.size());
    }
    out.nodes = nodes_;
    if (found) {
      out.verdict = Verdict::kContains;
      out.embedding = complete_embedding();
    } else {
      out.verdict = exhausted_ ? Verdict::kUndecided : Verdict::kAvoids;
    }
    return out;
  }

 private:
  // Tries to bind P-index `pi` of `axis` to A-index `x`; 0-based.
  bool consistent(int axis, int pi, int x) const {
    const std::vector<int>& m = img_[axis];
    if (m[pi] >= 0) return m[pi] == x;
    const int k = static_cast<int>(m.size());
    const int n = a_.dims()[axis];
    if (x < pi || x > n - k + pi) return false;
    for (int j = pi - 1; j >= 0; --j) {
      if (m[j] >= 0) {
        if (x - m[j] < pi - j) return false;
        break;
      }
    }
    for (int j = pi + 1; j < k; ++j) {
      if (m[j] >= 0) {
        if (m[j] - x < j - pi) return false;
        break;
      }
    }
    return true;
  }

  bool apply(std::size_t t, std::uint64_t cell, std::vector<int>& undo) {
    for (int i = 0; i < d_; ++i) {
      if (!consistent(i, pones_[t][i], a_.component0(cell, i))) {
        revert(t, undo);
        return false;
      }
      if (img_[i][pones_[t][i]] < 0) {
        img_[i][pones_[t][i]] = a_.component0(cell, i);
        undo.push_back(i);
      }
    }
    return true;
  }

  void revert(std::size_t t, std::vector<int>& undo) {
    for (int i : undo) img_[i][pones_[t][i]] = -1;
    undo.clear();
  }

  // Assigns pones_[t..limit) using A ones at positions >= from.
  bool assign(std::size_t t, std::size_t from, std::size_t limit) {
    if (t == limit) return true;
    if (exhausted_) return false;

    // Fully determined image: one lookup instead of a scan.
    bool determined = true;
    std::uint64_t target = 0;
    for (int i = 0; i < d_ && determined; ++i) {
      const int x = img_[i][pones_[t][i]];
      determined = x >= 0;
      if (determined) target += static_cast<std::uint64_t>(x) * a_.stride0(i);
    }
    if (determined) {
      if (++nodes_ > budget_.max_nodes) {
        exhausted_ = true;
        return false;
      }
      const auto it = std::lower_bound(aones_.begin() + from, aones_.begin() + end_, target);
      if (it == aones_.begin() + end_ || *it != target) return false;
      const auto pos = static_cast<std::size_t>(it - aones_.begin());
      chosen_[t] = pos;
      return assign(t + 1, pos + 1, limit);
    }

    std::vector<int> undo;
    for (std::size_t pos = from; pos < end_; ++pos) {
      if (++nodes_ > budget_.max_nodes) {
        exhausted_ = true;
        return false;
      }
      if (!apply(t, aones_[pos], undo)) continue;
      chosen_[t] = pos;
      if (assign(t + 1, pos + 1, limit)) return true;
      revert(t, undo);
      if (exhausted_) return false;
    }
    return false;
  }

  Embedding complete_embedding() const {
    Embedding e;
    e.axis_maps.resize(d_);
    for (int i = 0; i < d_; ++i) {
      const std::vector<int>& m = img_[i];
      std::vector<int>& out = e.axis_maps[i];
      out.resize(m.size());
      int prev = -1;
      for (std::size_t j = 0; j < m.size(); ++j) {
        prev = m[j] >= 0 ? m[j] : prev + 1;
        out[j] = prev + 1;
      }
    }
    return e;
  }

  const TensorMatrix& a_;
  const TensorMatrix& p_;
  int d_;
  Budget budget_;
  std::span<const std::uint64_t> aones_;
  std::vector<std::vector<int>> pones_;
  std::vector<std::vector<int>> img_;
  std::vector<std::size_t> chosen_;
  std::size_t end_ = 0;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
};

// Grid-witness search. The lexicographically least witness never has a gap
// before or between intervals (closing a gap keeps blocks nonempty and
// lowers the flattened endpoint list), so only the interval ends are free.
// Axes 1..d-1 are enumerated in lexicographic order; the last axis is then
// decided greedily: closing each interval as early as possible is optimal
// and also lexicographically least.
class MinorSearch {
 public:
  MinorSearch(const TensorMatrix& a, const TensorMatrix& b, Budget budget)
      : a_(a), b_(b), d_(a.dimension()), budget_(budget) {}

  MinorDecision run() {
    MinorDecision out;
    if (!fits(a_, b_) || b_.ones_count() > a_.ones_count()) {
      out.verdict = Verdict::kAvoids;
      return out;
    }
    prepare();
    const bool found = d_ == 1 ? leaf() : descend(0, 0, 0);
    out.nodes = nodes_;
    if (found) {
      out.verdict = Verdict::kContains;
      GridWitness w;
      w.axes.resize(d_);
      for (int i = 0; i < d_; ++i) {
        int lo = 1;
        for (int end : ends_[i]) {
          w.axes[i].push_back({lo, end + 1});
          lo = end + 2;
        }
      }
      out.witness = std::move(w);
    } else {
      out.verdict = exhausted_ ? Verdict::kUndecided : Verdict::kAvoids;
    }
    return out;
  }

 private:
  void prepare() {
    const int last = d_ - 1;
    ends_.resize(d_);
    for (int i = 0; i < d_; ++i) ends_[i].assign(b_.dims()[i], -1);
    group_.resize(d_);
    for (int i = 0; i < last; ++i) group_[i].assign(a_.dims()[i], -1);

    // ones-per-index prefix sums for pruning empty slabs
    prefix_.resize(d_);
    b_used_.resize(d_);
    for (int i = 0; i < d_; ++i) {
      prefix_[i].assign(a_.dims()[i] + 1, 0);
      for (std::uint64_t cell : a_.linear_ones()) ++prefix_[i][a_.component0(cell, i) + 1];
      for (int x = 0; x < a_.dims()[i]; ++x) prefix_[i][x + 1] += prefix_[i][x];
      b_used_[i].assign(b_.dims()[i], 0);
      for (std::uint64_t cell : b_.linear_ones()) b_used_[i][b_.component0(cell, i)] = 1;
    }

    blocks_ = 1;
    for (int i = 0; i < last; ++i) blocks_ *= static_cast<std::size_t>(b_.dims()[i]);

    // A ones bucketed by last coordinate.
    by_last_.assign(a_.dims()[last], {});
    for (std::uint64_t cell : a_.linear_ones()) by_last_[a_.component0(cell, last)].push_back(cell);

    // Required prefix blocks per last-axis group of B.
    const int kl = b_.dims()[last];
    required_.assign(static_cast<std::size_t>(kl) * blocks_, 0);
    need_.assign(kl, 0);
    for (std::uint64_t cell : b_.linear_ones()) {
      std::size_t id = 0;
      for (int i = 0; i < last; ++i) id = id * b_.dims()[i] + b_.component0(cell, i);
      const int g = b_.component0(cell, last);
      char& r = required_[static_cast<std::size_t>(g) * blocks_ + id];
      if (!r) {
        r = 1;
        ++need_[g];
      }
    }
    stamp_.assign(blocks_, 0);
  }

  bool slab_ok(int axis, int j, int lo, int hi) const {
    return !b_used_[axis][j] || prefix_[axis][hi + 1] - prefix_[axis][lo] > 0;
  }

  bool tick() {
    if (++nodes_ > budget_.max_nodes) exhausted_ = true;
    return !exhausted_;
  }

  // Chooses the end of interval j on axis `axis`, given it starts at `lo`.
  bool descend(int axis, int j, int lo) {
    if (!tick()) return false;
    const int k = b_.dims()[axis];
    const int n = a_.dims()[axis];
    const int max_end = n - (k - j);
    const bool last_dfs_axis = axis == d_ - 2;

    if (last_dfs_axis && j == k - 1) {
      // Feasibility is monotone in this end: binary search for the least.
      auto feasible = [&](int end) {
        set_interval(axis, j, lo, end);
        return leaf();
      };
      if (!slab_ok(axis, j, lo, max_end) || !feasible(max_end)) {
        clear_interval(axis, lo, max_end);
        return false;
      }
      int good = max_end;
      int bad = lo - 1;
      while (good - bad > 1) {
        const int mid = bad + (good - bad) / 2;
        clear_interval(axis, lo, max_end);
        if (slab_ok(axis, j, lo, mid) && feasible(mid)) {
          good = mid;
        } else {
          bad = mid;
        }
        if (exhausted_) return false;
      }
      clear_interval(axis, lo, max_end);
      set_interval(axis, j, lo, good);
      const bool ok = leaf();  // recompute ends_ for the last axis
      if (!ok) clear_interval(axis, lo, good);
      return ok;
    }

    for (int end = lo; end <= max_end; ++end) {
      if (!slab_ok(axis, j, lo, end)) continue;
      set_interval(axis, j, lo, end);
      const bool ok = j + 1 < k ? descend(axis, j + 1, end + 1)
                                : (axis + 1 < d_ - 1 ? descend(axis + 1, 0, 0) : leaf());
      if (ok) return true;
      clear_interval(axis, lo, end);
      if (exhausted_) return false;
    }
    return false;
  }

  void set_interval(int axis, int j, int lo, int end) {
    ends_[axis][j] = end;
    for (int x = lo; x <= end; ++x) group_[axis][x] = j;
  }

  void clear_interval(int axis, int lo, int end) {
    for (int x = lo; x <= end; ++x) group_[axis][x] = -1;
  }

  // Greedy decision on the last axis for the current prefix intervals.
  bool leaf() {
    if (!tick()) return false;
    const int last = d_ - 1;
    const int kl = b_.dims()[last];
    const int nl = a_.dims()[last];
    int g = 0;
    int have = 0;
    ++generation_;
    for (int x = 0; x < nl && g < kl; ++x) {
      if (need_[g] > 0) {
        for (std::uint64_t cell : by_last_[x]) {
          std::size_t id = 0;
          bool inside = true;
          for (int i = 0; i < last && inside; ++i) {
            const int gi = group_[i][a_.component0(cell, i)];
            inside = gi >= 0;
            id = id * b_.dims()[i] + static_cast<std::size_t>(gi);
          }
          if (!inside || !required_[static_cast<std::size_t>(g) * blocks_ + id]) continue;
          if (stamp_[id] != generation_) {
            stamp_[id] = generation_;
            ++have;
          }
        }
      }
      if (have == need_[g]) {
        ends_[last][g] = x;
        ++g;
        have = 0;
        ++generation_;
      }
    }
    return g == kl;
  }

  const TensorMatrix& a_;
  const TensorMatrix& b_;
  int d_;
  Budget budget_;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;

  std::vector<std::vector<int>> ends_;
  std::vector<std::vector<int>> group_;
  std::vector<std::vector<int>> prefix_;
  std::vector<std::vector<char>> b_used_;
  std::size_t blocks_ = 1;
  std::vector<std::vector<std::uint64_t>> by_last_;
  std::vector<char> required_;
  std::vector<int> need_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t generation_ = 0;
};

}  // namespace

PatternDecision contains_pattern(const TensorMatrix& a, const TensorMatrix& p, Budget budget) {
  check_same_dimension(a, p);
  return PatternMatcher(a, p, budget).run(std::nullopt);
}

PatternDecision contains_pattern_through(const TensorMatrix& a, const TensorMatrix& p,
                                         std::uint64_t cell, Budget budget) {
  check_same_dimension(a, p);
  if (p.is_zero()) return PatternMatcher(a, p, budget).run(std::nullopt);
  return PatternMatcher(a, p, budget).run(cell);
}

MinorDecision contains_interval_minor(const TensorMatrix& a, const TensorMatrix& b, Budget budget) {
  check_same_dimension(a, b);
  return MinorSearch(a, b, budget).run();
}

void validate_witness(const TensorMatrix& a, const TensorMatrix& b, const GridWitness& w) {
  check_same_dimension(a, b);
  if (static_cast<int>(w.axes.size()) != a.dimension()) {
    throw StructuralError("witness has " + std::to_string(w.axes.size()) + " axes, expected " +
                          std::to_string(a.dimension()));
  }
  for (int i = 0; i < a.dimension(); ++i) {
    const auto& ivs = w.axes[i];
    if (static_cast<int>(ivs.size()) != b.dims()[i]) {
      throw StructuralError("witness axis " + std::to_string(i + 1) + " has " +
                            std::to_string(ivs.size()) + " intervals, pattern extent is " +
                            std::to_string(b.dims()[i]));
    }
    int prev_hi = 0;
    for (const Interval& iv : ivs) {
      if (iv.lo < 1 || iv.hi < iv.lo || iv.hi > a.dims()[i] || iv.lo <= prev_hi) {
        throw StructuralError("witness axis " + std::to_string(i + 1) +
                              " intervals are not disjoint, increasing and in range");
      }
      prev_hi = iv.hi;
    }
  }
}

bool verify_witness(const TensorMatrix& a, const TensorMatrix& b, const GridWitness& w) {
  validate_witness(a, b, w);
  const int d = a.dimension();
  std::vector<std::vector<int>> group(d);
  for (int i = 0; i < d; ++i) {
    group[i].assign(a.dims()[i], -1);
    for (std::size_t j = 0; j < w.axes[i].size(); ++j) {
      for (int x = w.axes[i][j].lo; x <= w.axes[i][j].hi; ++x) group[i][x - 1] = static_cast<int>(j);
    }
  }
  // Block ids share B's linearisation.
  std::vector<char> hit(b.cell_count(), 0);
  for (std::uint64_t cell : a.linear_ones()) {
    std::uint64_t id = 0;
    bool inside = true;
    for (int i = 0; i < d && inside; ++i) {
      const int g = group[i][a.component0(cell, i)];
      inside = g >= 0;
      id += static_cast<std::uint64_t>(g) * b.stride0(i);
    }
    if (inside) hit[id] = 1;
  }
  for (std::uint64_t cell : b.linear_ones()) {
    if (!hit[cell]) return false;
  }
  return true;
}

GridWitness extend_to_partition(const GridWitness& w, const std::vector<int>& dims) {
  if (w.axes.size() != dims.size()) throw StructuralError("witness arity does not match dims");
  GridWitness out = w;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    auto& ivs = out.axes[i];
    if (ivs.empty()) continue;
    ivs.front().lo = 1;
    for (std::size_t j = 0; j + 1 < ivs.size(); ++j) ivs[j].hi = ivs[j + 1].lo - 1;
    ivs.back().hi = dims[i];
  }
  return out;
}

Coord block_of(const GridWitness& partition, const Coord& c) {
  if (c.size() != partition.axes.size()) throw StructuralError("coordinate arity does not match witness");
  Coord out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& ivs = partition.axes[i];
    const auto it = std::find_if(ivs.begin(), ivs.end(),
                                 [&](const Interval& iv) { return iv.lo <= c[i] && c[i] <= iv.hi; });
    if (it == ivs.end()) throw RangeError("coordinate not covered by witness");
    out[i] = static_cast<int>(it - ivs.begin()) + 1;
  }
  return out;
}

bool contains_via_contraction_oracle(const TensorMatrix& a, const TensorMatrix& b) {
  check_same_dimension(a, b);
  if (a.cell_count() > kContractionOracleCellLimit) {
    throw RefusalError("contraction oracle refuses tensors with more than " +
                       std::to_string(kContractionOracleCellLimit) + " cells");
  }
  using Key = std::pair<std::vector<int>, std::vector<std::uint64_t>>;
  auto key = [](const TensorMatrix& t) {
    return Key{t.dims(), {t.linear_ones().begin(), t.linear_ones().end()}};
  };
  std::set<Key> seen{key(a)};
  std::deque<TensorMatrix> queue{a};
  while (!queue.empty()) {
    const TensorMatrix cur = std::move(queue.front());
    queue.pop_front();
    if (!fits(cur, b)) continue;  // contractions only shrink extents
    if (contains_pattern(cur, b).contains()) return true;
    for (int axis = 1; axis <= cur.dimension(); ++axis) {
      const int n = cur.dims()[axis - 1];
      for (int lo = 1; lo < n; ++lo) {
        for (int hi = lo + 1; hi <= n; ++hi) {
          TensorMatrix next = contract(cur, axis, lo, hi);
          if (seen.insert(key(next)).second) queue.push_back(std::move(next));
        }
      }
    }
  }
  return false;
}

nlohmann::json witness_to_json(const GridWitness& w) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& ivs : w.axes) {
    nlohmann::json axis = nlohmann::json::array();
    for (const Interval& iv : ivs) axis.push_back({iv.lo, iv.hi});
    axes.push_back(std::move(axis));
  }
  return {{"axes", std::move(axes)}};
}

GridWitness witness_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("axes") || !j.at("axes").is_array()) {
    throw StructuralError("witness JSON needs an \"axes\" array");
  }
  GridWitness w;
  for (const auto& axis : j.at("axes")) {
    if (!axis.is_array()) throw StructuralError("witness axis must be an array of [lo,hi] pairs");
    std::vector<Interval> ivs;
    for (const auto& iv : axis) {
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number_integer() || !iv[1].is_number_integer()) {
        throw StructuralError("witness interval must be [lo,hi]");
      }
      ivs.push_back({iv[0].get<int>(), iv[1].get<int>()});
    }
    w.axes.push_back(std::move(ivs));
  }
  return w;
}

nlohmann::json embedding_to_json(const Embedding& e) { return {{"axis_maps", e.axis_maps}}; }

}  // namespace pforge
