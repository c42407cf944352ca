#include "patternforge/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <string>

#include "patternforge/errors.hpp"

namespace pforge {
namespace {

std::atomic<std::uint64_t> g_dense_limit{kDefaultDenseCellLimit};

void check_axis(const TensorMatrix& a, int axis) {
  if (axis < 1 || axis > a.dimension()) {
    throw RangeError("axis " + std::to_string(axis) + " outside 1.." +
                     std::to_string(a.dimension()));
  }
}

}  // namespace

std::uint64_t dense_cell_limit() noexcept { return g_dense_limit.load(std::memory_order_relaxed); }

void set_dense_cell_limit(std::uint64_t cells) noexcept {
  g_dense_limit.store(cells, std::memory_order_relaxed);
}

TensorMatrix::TensorMatrix(std::vector<int> dims, const std::vector<Coord>& ones)
    : dims_(std::move(dims)) {
  init_shape();
  ones_.reserve(ones.size());
  for (const Coord& c : ones) {
    if (static_cast<int>(c.size()) != dimension()) {
      throw StructuralError("coordinate has " + std::to_string(c.size()) +
                            " components, expected " + std::to_string(dimension()));
    }
    if (!in_bounds(c)) throw RangeError("coordinate outside tensor extents");
    ones_.push_back(linearize(c));
  }
  std::sort(ones_.begin(), ones_.end());
  if (std::adjacent_find(ones_.begin(), ones_.end()) != ones_.end()) {
    throw StructuralError("duplicate coordinate");
  }
  build_index();
}

TensorMatrix::TensorMatrix(Trusted, std::vector<int> dims, std::vector<std::uint64_t> sorted_cells)
    : dims_(std::move(dims)), ones_(std::move(sorted_cells)) {
  init_shape();
  build_index();
}

TensorMatrix TensorMatrix::zeros(std::vector<int> dims) {
  return TensorMatrix(Trusted{}, std::move(dims), {});
}

TensorMatrix TensorMatrix::all_ones(std::vector<int> dims) {
  TensorMatrix t = zeros(std::move(dims));
  std::vector<std::uint64_t> cells(t.cells_);
  for (std::uint64_t i = 0; i < t.cells_; ++i) cells[i] = i;
  return TensorMatrix(Trusted{}, t.dims_, std::move(cells));
}

TensorMatrix TensorMatrix::from_linear(std::vector<int> dims, std::vector<std::uint64_t> cells) {
  std::sort(cells.begin(), cells.end());
  if (std::adjacent_find(cells.begin(), cells.end()) != cells.end()) {
    throw StructuralError("duplicate coordinate");
  }
  TensorMatrix t(Trusted{}, std::move(dims), {});
  if (!cells.empty() && cells.back() >= t.cells_) throw RangeError("cell index outside tensor");
  t.ones_ = std::move(cells);
  t.build_index();
  return t;
}

void TensorMatrix::init_shape() {
  if (dims_.empty()) throw StructuralError("tensor needs at least one axis");
  for (int n : dims_) {
    if (n < 1) throw StructuralError("tensor extents must be positive");
  }
  strides_.assign(dims_.size(), 1);
  std::uint64_t total = 1;
  for (std::size_t i = dims_.size(); i-- > 0;) {
    strides_[i] = total;
    const auto n = static_cast<std::uint64_t>(dims_[i]);
    if (total > std::numeric_limits<std::uint64_t>::max() / n) {
      throw StructuralError("tensor cell count overflows 64 bits");
    }
    total *= n;
  }
  cells_ = total;
}

void TensorMatrix::build_index() {
  bits_.clear();
  if (cells_ <= dense_cell_limit()) {
    bits_.assign((cells_ + 63) / 64, 0);
    for (std::uint64_t c : ones_) bits_[c >> 6] |= std::uint64_t{1} << (c & 63);
  }
}

int TensorMatrix::extent(int axis) const {
  check_axis(*this, axis);
  return dims_[axis - 1];
}

bool TensorMatrix::at_linear(std::uint64_t cell) const noexcept {
  if (cell >= cells_) return false;
  if (!bits_.empty()) return (bits_[cell >> 6] >> (cell & 63)) & 1;
  return std::binary_search(ones_.begin(), ones_.end(), cell);
}

bool TensorMatrix::at(const Coord& c) const {
  if (static_cast<int>(c.size()) != dimension()) throw StructuralError("coordinate arity mismatch");
  if (!in_bounds(c)) throw RangeError("coordinate outside tensor extents");
  return at_linear(linearize(c));
}

bool TensorMatrix::in_bounds(const Coord& c) const noexcept {
  if (c.size() != dims_.size()) return false;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] < 1 || c[i] > dims_[i]) return false;
  }
  return true;
}

std::uint64_t TensorMatrix::linearize(const Coord& c) const {
  std::uint64_t cell = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    cell += static_cast<std::uint64_t>(c[i] - 1) * strides_[i];
  }
  return cell;
}

Coord TensorMatrix::delinearize(std::uint64_t cell) const {
  Coord c(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) c[i] = component0(cell, static_cast<int>(i)) + 1;
  return c;
}

std::vector<Coord> TensorMatrix::ones() const {
  std::vector<Coord> out;
  out.reserve(ones_.size());
  for (std::uint64_t c : ones_) out.push_back(delinearize(c));
  return out;
}

bool is_permutation(const TensorMatrix& m) {
  const int k = m.dims().front();
  for (int n : m.dims()) {
    if (n != k) return false;
  }
  if (m.ones_count() != static_cast<std::size_t>(k)) return false;
  // k ones with pairwise distinct coordinates on every axis hit every
  // cross section exactly once.
  for (int axis = 0; axis < m.dimension(); ++axis) {
    std::vector<char> seen(k, 0);
    for (std::uint64_t cell : m.linear_ones()) {
      char& s = seen[m.component0(cell, axis)];
      if (s) return false;
      s = 1;
    }
  }
  return true;
}

PermutationTensor::PermutationTensor(TensorMatrix m) : matrix_(std::move(m)) {
  if (!is_permutation(matrix_)) {
    throw StructuralError("not a permutation tensor: some cross section does not hold exactly one 1");
  }
}

TensorMatrix cross_section(const TensorMatrix& a, int axis, int index) {
  check_axis(a, axis);
  if (index < 1 || index > a.dims()[axis - 1]) {
    throw RangeError("cross section index " + std::to_string(index) + " outside 1.." +
                     std::to_string(a.dims()[axis - 1]));
  }
  if (a.dimension() == 1) throw StructuralError("cross section of a 1-dimensional tensor");
  std::vector<int> dims = a.dims();
  dims.erase(dims.begin() + (axis - 1));
  std::vector<Coord> ones;
  for (Coord c : a.ones()) {
    if (c[axis - 1] != index) continue;
    c.erase(c.begin() + (axis - 1));
    ones.push_back(std::move(c));
  }
  return TensorMatrix(std::move(dims), ones);
}

TensorMatrix contract(const TensorMatrix& a, int axis, int lo, int hi) {
  check_axis(a, axis);
  const int n = a.dims()[axis - 1];
  if (lo < 1 || hi < lo || hi > n) {
    throw RangeError("invalid contraction interval [" + std::to_string(lo) + "," +
                     std::to_string(hi) + "] on axis of extent " + std::to_string(n));
  }
  std::vector<int> dims = a.dims();
  dims[axis - 1] = n - (hi - lo);
  const TensorMatrix shape = TensorMatrix::zeros(dims);
  std::vector<std::uint64_t> cells;
  cells.reserve(a.ones_count());
  for (Coord c : a.ones()) {
    int& i = c[axis - 1];
    if (i > hi) {
      i -= hi - lo;
    } else if (i > lo) {
      i = lo;
    }
    cells.push_back(shape.linearize(c));
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return TensorMatrix::from_linear(std::move(dims), std::move(cells));
}

TensorMatrix kronecker(const TensorMatrix& m, const TensorMatrix& n) {
  if (m.dimension() != n.dimension()) {
    throw StructuralError("kronecker product needs equal dimensions (" +
                          std::to_string(m.dimension()) + " vs " + std::to_string(n.dimension()) +
                          ")");
  }
  const int d = m.dimension();
  std::vector<int> dims(d);
  for (int i = 0; i < d; ++i) dims[i] = m.dims()[i] * n.dims()[i];
  const TensorMatrix shape = TensorMatrix::zeros(dims);
  std::vector<std::uint64_t> cells;
  cells.reserve(m.ones_count() * n.ones_count());
  Coord c(d);
  for (const Coord& block : m.ones()) {
    for (const Coord& inner : n.ones()) {
      for (int i = 0; i < d; ++i) c[i] = (block[i] - 1) * n.dims()[i] + inner[i];
      cells.push_back(shape.linearize(c));
    }
  }
  return TensorMatrix::from_linear(std::move(dims), std::move(cells));
}

TensorMatrix reflected_antidiagonal(int s, int d, const std::vector<bool>& reflect_axes) {
  if (s < 1 || d < 1) throw StructuralError("antidiagonal needs s >= 1 and d >= 1");
  if (!reflect_axes.empty() && static_cast<int>(reflect_axes.size()) != d) {
    throw StructuralError("reflection mask has wrong arity");
  }
  std::vector<int> dims(d, s);
  const TensorMatrix shape = TensorMatrix::zeros(dims);
  std::vector<std::uint64_t> cells;
  // Enumerate compositions i_1 + ... + i_d = s + d - 1 with 1 <= i <= s.
  Coord c(d, 1);
  const int target = s + d - 1;
  auto rec = [&](auto&& self, int axis, int remaining) -> void {
    if (axis == d - 1) {
      if (remaining >= 1 && remaining <= s) {
        c[axis] = remaining;
        Coord r = c;
        for (int i = 0; i < d; ++i) {
          if (!reflect_axes.empty() && reflect_axes[i]) r[i] = s + 1 - r[i];
        }
        cells.push_back(shape.linearize(r));
      }
      return;
    }
    for (int v = 1; v <= s && v < remaining; ++v) {
      c[axis] = v;
      self(self, axis + 1, remaining - v);
    }
  };
  rec(rec, 0, target);
  return TensorMatrix::from_linear(std::move(dims), std::move(cells));
}

TensorMatrix antidiagonal(int s, int d) { return reflected_antidiagonal(s, d, {}); }

std::vector<Coord> corner_ones(const TensorMatrix& p) {
  std::vector<Coord> out;
  for (Coord c : p.ones()) {
    bool corner = true;
    for (int i = 0; i < p.dimension() && corner; ++i) {
      corner = c[i] == 1 || c[i] == p.dims()[i];
    }
    if (corner) out.push_back(std::move(c));
  }
  return out;
}

TensorMatrix reflect(const TensorMatrix& a, const std::vector<bool>& axes) {
  if (static_cast<int>(axes.size()) != a.dimension()) {
    throw StructuralError("reflection mask has wrong arity");
  }
  std::vector<Coord> ones = a.ones();
  for (Coord& c : ones) {
    for (int i = 0; i < a.dimension(); ++i) {
      if (axes[i]) c[i] = a.dims()[i] + 1 - c[i];
    }
  }
  return TensorMatrix(a.dims(), ones);
}

TensorMatrix remove_empty_cross_sections(const TensorMatrix& a) {
  if (a.is_zero()) throw StructuralError("a zero tensor has no nonempty cross section");
  const int d = a.dimension();
  std::vector<std::vector<int>> remap(d);
  std::vector<int> dims(d);
  for (int i = 0; i < d; ++i) {
    std::vector<char> used(a.dims()[i], 0);
    for (std::uint64_t cell : a.linear_ones()) used[a.component0(cell, i)] = 1;
    remap[i].assign(a.dims()[i], 0);
    int next = 0;
    for (int j = 0; j < a.dims()[i]; ++j) {
      if (used[j]) remap[i][j] = ++next;
    }
    dims[i] = next;
  }
  std::vector<Coord> ones = a.ones();
  for (Coord& c : ones) {
    for (int i = 0; i < d; ++i) c[i] = remap[i][c[i] - 1];
  }
  return TensorMatrix(std::move(dims), ones);
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

}  // namespace pforge
