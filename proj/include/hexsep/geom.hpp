#pragma once

#include <Eigen/Core>

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace hexsep {

template <typename Scalar>
using Point2T = Eigen::Matrix<Scalar, 2, 1>;

/// A point of the unit square.
using Point2 = Point2T<double>;

using PointList = std::vector<Point2, Eigen::aligned_allocator<Point2>>;

}  // namespace hexsep

namespace hexsep::geom {

/// Offset index of a hexagonal cell: `i` is the column, `j` the row.
struct HexIndex {
  std::int64_t i = 0;
  std::int64_t j = 0;

  friend auto operator<=>(const HexIndex&, const HexIndex&) = default;
};

/// Flat-top hexagonal partition of the plane restricted to the unit square.
///
/// Cell (i, j) is centred at
///   x = origin.x + 1.5 a i
///   y = origin.y + sqrt(3) a (j - (i mod 2) / 2)
/// where `a` is the circumradius; odd columns sit half a row lower than even
/// columns. Cells are the Voronoi regions of their centres, so every point
/// belongs to exactly one cell once boundary ties are broken towards the
/// lexicographically smallest index.
///
/// `cols` x `rows` is the index rectangle that covers the unit square. With
/// `torus` set, indices wrap modulo `cols` and `rows`; `cols` is then even so
/// that column parity (and hence the neighbour pattern) survives the wrap.
class HexGrid {
 public:
  /// Grid with cell (0, 0) centred at `origin`, sized to cover [0, 1]^2.
  explicit HexGrid(double circumradius, bool torus = false,
                   Point2 origin = Point2::Zero());

  /// Grid with an explicit index rectangle, mostly for torus arithmetic.
  /// A torus needs an even column count.
  HexGrid(double circumradius, std::int64_t cols, std::int64_t rows,
          bool torus, Point2 origin = Point2::Zero());

  double circumradius() const { return circumradius_; }
  const Point2& origin() const { return origin_; }
  bool torus() const { return torus_; }
  std::int64_t cols() const { return cols_; }
  std::int64_t rows() const { return rows_; }
  std::int64_t cell_count() const { return cols_ * rows_; }

  Point2 center(const HexIndex& idx) const;
  std::array<Point2, 6> vertices(const HexIndex& idx) const;

  /// Wraps an index into the rectangle when the grid is a torus.
  HexIndex wrap(const HexIndex& idx) const;

  /// Row-major slot of an in-rectangle index.
  std::int64_t linear(const HexIndex& idx) const { return idx.j * cols_ + idx.i; }

 private:
  double circumradius_;
  Point2 origin_;
  bool torus_;
  std::int64_t cols_;
  std::int64_t rows_;
};

/// Cell containing `p`. Throws std::domain_error when `p` is outside [0,1]^2.
HexIndex locate(const HexGrid& grid, const Point2& p);

/// |i - i'| + |j - j'|.
std::int64_t hamming(const HexIndex& a, const HexIndex& b);

/// Hamming distance with per-axis modular wrap on a torus grid.
std::int64_t hamming(const HexGrid& grid, const HexIndex& a, const HexIndex& b);

/// Literal per-axis rule: hamming <= 2 with |di| <= 1 and |dj| <= 1.
///
/// This admits the eight king moves, two of which are not geometric
/// neighbours in a hexagonal tiling.
bool are_per_axis_neighbors(const HexIndex& a, const HexIndex& b);

/// Same cell, or one of the six cells sharing an edge.
///
/// This is the per-axis rule minus the diagonal pair that does not touch:
/// from an even column (i, j) the excluded cells are (i +- 1, j - 1), from an
/// odd column (i +- 1, j + 1).
bool are_hex_neighbors(const HexIndex& a, const HexIndex& b);

/// Neighbour test honouring torus wrap.
bool are_hex_neighbors(const HexGrid& grid, const HexIndex& a, const HexIndex& b);

/// The six edge-sharing neighbours of `idx` (unwrapped).
std::array<HexIndex, 6> hex_neighbors(const HexIndex& idx);

/// Translation h(i, j) -> h(i + k, j + l) on a torus. Throws std::logic_error
/// when the grid is not a torus.
HexIndex torus_shift(const HexGrid& grid, const HexIndex& idx, std::int64_t k,
                     std::int64_t l);

}  // namespace hexsep::geom
