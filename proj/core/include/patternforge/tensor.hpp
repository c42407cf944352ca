#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pforge {

/// A coordinate tuple. Every public API uses 1-based coordinates and axes.
using Coord = std::vector<int>;

/// Tensors with at most this many cells keep a dense bitset next to the
/// sorted ones list; larger ones answer lookups by binary search.
inline constexpr std::uint64_t kDefaultDenseCellLimit = std::uint64_t{1} << 24;

std::uint64_t dense_cell_limit() noexcept;
void set_dense_cell_limit(std::uint64_t cells) noexcept;

/// An immutable d-dimensional 0-1 matrix with arbitrary per-axis extents.
///
/// Cells are linearised row-major with axis 1 most significant, so the
/// numeric order of linear indices is the lexicographic order of coordinates.
class TensorMatrix {
 public:
  /// Validating constructor. Throws StructuralError on an empty or
  /// non-positive shape and on duplicate coordinates, RangeError on a
  /// coordinate outside `dims`.
  TensorMatrix(std::vector<int> dims, const std::vector<Coord>& ones);

  static TensorMatrix zeros(std::vector<int> dims);
  static TensorMatrix all_ones(std::vector<int> dims);

  /// Builds from linear cell indices; they are sorted and checked here.
  static TensorMatrix from_linear(std::vector<int> dims, std::vector<std::uint64_t> cells);

  int dimension() const noexcept { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const noexcept { return dims_; }
  int extent(int axis) const;
  std::uint64_t cell_count() const noexcept { return cells_; }
  std::size_t ones_count() const noexcept { return ones_.size(); }
  bool is_zero() const noexcept { return ones_.empty(); }
  bool is_dense() const noexcept { return !bits_.empty() || cells_ == 0; }

  bool at(const Coord& c) const;
  bool at_linear(std::uint64_t cell) const noexcept;

  /// Linear indices of the ones, ascending (= lexicographic).
  std::span<const std::uint64_t> linear_ones() const noexcept { return ones_; }
  std::vector<Coord> ones() const;

  std::uint64_t linearize(const Coord& c) const;
  Coord delinearize(std::uint64_t cell) const;
  /// 0-based component `axis0` of a linear index, without building a Coord.
  int component0(std::uint64_t cell, int axis0) const noexcept {
    return static_cast<int>((cell / strides_[axis0]) % static_cast<std::uint64_t>(dims_[axis0]));
  }
  std::uint64_t stride0(int axis0) const noexcept { return strides_[axis0]; }

  bool in_bounds(const Coord& c) const noexcept;

  friend bool operator==(const TensorMatrix& a, const TensorMatrix& b) {
    return a.dims_ == b.dims_ && a.ones_ == b.ones_;
  }

 private:
  struct Trusted {};
  TensorMatrix(Trusted, std::vector<int> dims, std::vector<std::uint64_t> sorted_cells);
  void init_shape();
  void build_index();

  std::vector<int> dims_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t cells_ = 0;
  std::vector<std::uint64_t> ones_;
  std::vector<std::uint64_t> bits_;
};

/// A k x ... x k tensor in which every cross section of every axis holds
/// exactly one 1.
class PermutationTensor {
 public:
  /// Throws StructuralError if `m` is not a permutation tensor.
  explicit PermutationTensor(TensorMatrix m);

  int k() const noexcept { return matrix_.dims().front(); }
  int dimension() const noexcept { return matrix_.dimension(); }
  const TensorMatrix& matrix() const noexcept { return matrix_; }

 private:
  TensorMatrix matrix_;
};

bool is_permutation(const TensorMatrix& m);

/// The (d-1)-dimensional slice with coordinate `axis` fixed to `index`.
TensorMatrix cross_section(const TensorMatrix& a, int axis, int index);

/// ORs the consecutive cross sections lo..hi of `axis` into one.
TensorMatrix contract(const TensorMatrix& a, int axis, int lo, int hi);

/// Block tensor whose block at each 1 of `m` is a copy of `n`.
TensorMatrix kronecker(const TensorMatrix& m, const TensorMatrix& n);

/// s x ... x s tensor with ones on the hyperplane i_1 + ... + i_d = s + d - 1.
TensorMatrix antidiagonal(int s, int d);

/// antidiagonal(s, d) with the listed axes reversed (i -> s + 1 - i).
TensorMatrix reflected_antidiagonal(int s, int d, const std::vector<bool>& reflect);

/// Ones whose every coordinate is 1 or the extent of its axis, in lex order.
std::vector<Coord> corner_ones(const TensorMatrix& p);

/// Reverses the chosen axes of `a`.
TensorMatrix reflect(const TensorMatrix& a, const std::vector<bool>& axes);

/// Drops every cross section (on every axis) that contains no 1.
TensorMatrix remove_empty_cross_sections(const TensorMatrix& a);

std::uint64_t binomial(int n, int k);

}  // namespace pforge
