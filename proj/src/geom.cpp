#include "hexsep/geom.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hexsep::geom {
namespace {

constexpr double kSqrt3 = 1.7320508075688772;

std::int64_t parity(std::int64_t i) { return ((i % 2) + 2) % 2; }

std::int64_t wrap_axis(std::int64_t v, std::int64_t m) { return ((v % m) + m) % m; }

// Shortest signed offset from a to b on a cycle of length m.
std::int64_t cyclic_delta(std::int64_t a, std::int64_t b, std::int64_t m) {
  std::int64_t d = wrap_axis(b - a, m);
  if (2 * d > m) d -= m;
  return d;
}

bool in_unit_square(const Point2& p) {
  return p.x() >= 0.0 && p.x() <= 1.0 && p.y() >= 0.0 && p.y() <= 1.0;
}

}  // namespace

HexGrid::HexGrid(double circumradius, bool torus, Point2 origin)
    : circumradius_(circumradius), origin_(origin), torus_(torus) {
  if (!(circumradius > 0.0) || !std::isfinite(circumradius)) {
    throw std::domain_error("HexGrid: circumradius must be positive");
  }
  const double a = circumradius;
  const double row_h = kSqrt3 * a;
  const auto i_min = static_cast<std::int64_t>(std::ceil((-a - origin.x()) / (1.5 * a)));
  const auto i_max = static_cast<std::int64_t>(std::floor((1.0 + a - origin.x()) / (1.5 * a)));
  std::int64_t j_min = std::numeric_limits<std::int64_t>::max();
  std::int64_t j_max = std::numeric_limits<std::int64_t>::min();
  for (int p = 0; p < 2; ++p) {
    const double lo = (-0.5 * row_h - origin.y()) / row_h + 0.5 * p;
    const double hi = (1.0 + 0.5 * row_h - origin.y()) / row_h + 0.5 * p;
    j_min = std::min(j_min, static_cast<std::int64_t>(std::ceil(lo)));
    j_max = std::max(j_max, static_cast<std::int64_t>(std::floor(hi)));
  }
  if (i_min < 0 || j_min < 0) {
    throw std::domain_error("HexGrid: origin would place unit-square cells at negative indices");
  }
  cols_ = i_max + 1;
  rows_ = j_max + 1;
  if (torus_ && cols_ % 2 != 0) ++cols_;
}

HexGrid::HexGrid(double circumradius, std::int64_t cols, std::int64_t rows, bool torus,
                 Point2 origin)
    : circumradius_(circumradius), origin_(origin), torus_(torus), cols_(cols), rows_(rows) {
  if (!(circumradius > 0.0) || !std::isfinite(circumradius)) {
    throw std::domain_error("HexGrid: circumradius must be positive");
  }
  if (cols < 1 || rows < 1) throw std::domain_error("HexGrid: empty index rectangle");
  if (torus && cols % 2 != 0) {
    throw std::domain_error("HexGrid: a torus needs an even column count");
  }
}

Point2 HexGrid::center(const HexIndex& idx) const {
  const double a = circumradius_;
  return {origin_.x() + 1.5 * a * static_cast<double>(idx.i),
          origin_.y() + kSqrt3 * a * (static_cast<double>(idx.j) - 0.5 * static_cast<double>(parity(idx.i)))};
}

std::array<Point2, 6> HexGrid::vertices(const HexIndex& idx) const {
  const Point2 c = center(idx);
  const double a = circumradius_;
  const double h = 0.5 * kSqrt3 * a;
  return {Point2{c.x() + a, c.y()},        Point2{c.x() + 0.5 * a, c.y() + h},
          Point2{c.x() - 0.5 * a, c.y() + h}, Point2{c.x() - a, c.y()},
          Point2{c.x() - 0.5 * a, c.y() - h}, Point2{c.x() + 0.5 * a, c.y() - h}};
}

HexIndex HexGrid::wrap(const HexIndex& idx) const {
  if (!torus_) return idx;
  return {wrap_axis(idx.i, cols_), wrap_axis(idx.j, rows_)};
}

HexIndex locate(const HexGrid& grid, const Point2& p) {
  if (!in_unit_square(p)) throw std::domain_error("locate: point outside the unit square");

  const double a = grid.circumradius();
  const double row_h = kSqrt3 * a;
  const Point2 rel = p - grid.origin();
  const auto i0 = static_cast<std::int64_t>(std::llround(rel.x() / (1.5 * a)));

  // Hex cells are the Voronoi cells of their centres; the nearest centre is
  // within one column and one row of the rounded guess.
  HexIndex best{};
  double best_d2 = std::numeric_limits<double>::infinity();
  const double tie = 1e-12 * a * a;
  for (std::int64_t i = i0 - 1; i <= i0 + 1; ++i) {
    const double shift = 0.5 * static_cast<double>(parity(i));
    const auto j0 = static_cast<std::int64_t>(std::llround(rel.y() / row_h + shift));
    for (std::int64_t j = j0 - 1; j <= j0 + 1; ++j) {
      const HexIndex cand{i, j};
      const double d2 = (grid.center(cand) - p).squaredNorm();
      if (d2 < best_d2 - tie || (std::abs(d2 - best_d2) <= tie && cand < best)) {
        if (d2 < best_d2) best_d2 = d2;
        best = cand;
      }
    }
  }
  return best;
}

std::int64_t hamming(const HexIndex& a, const HexIndex& b) {
  return std::abs(a.i - b.i) + std::abs(a.j - b.j);
}

std::int64_t hamming(const HexGrid& grid, const HexIndex& a, const HexIndex& b) {
  if (!grid.torus()) return hamming(a, b);
  return std::abs(cyclic_delta(a.i, b.i, grid.cols())) +
         std::abs(cyclic_delta(a.j, b.j, grid.rows()));
}

bool are_per_axis_neighbors(const HexIndex& a, const HexIndex& b) {
  return hamming(a, b) <= 2 && std::abs(a.i - b.i) <= 1 && std::abs(a.j - b.j) <= 1;
}

bool are_hex_neighbors(const HexIndex& a, const HexIndex& b) {
  if (!are_per_axis_neighbors(a, b)) return false;
  const std::int64_t di = b.i - a.i;
  const std::int64_t dj = b.j - a.j;
  if (di == 0 || dj == 0) return true;
  // Diagonal step: only the row offset matching the column shift touches.
  return dj == (parity(a.i) == 0 ? 1 : -1);
}

bool are_hex_neighbors(const HexGrid& grid, const HexIndex& a, const HexIndex& b) {
  if (!grid.torus()) return are_hex_neighbors(a, b);
  const HexIndex aw = grid.wrap(a);
  const HexIndex bw = grid.wrap(b);
  const HexIndex b_near{aw.i + cyclic_delta(aw.i, bw.i, grid.cols()),
                        aw.j + cyclic_delta(aw.j, bw.j, grid.rows())};
  return are_hex_neighbors(aw, b_near);
}

std::array<HexIndex, 6> hex_neighbors(const HexIndex& idx) {
  const std::int64_t diag = parity(idx.i) == 0 ? 1 : -1;
  return {HexIndex{idx.i, idx.j - 1},        HexIndex{idx.i, idx.j + 1},
          HexIndex{idx.i - 1, idx.j},        HexIndex{idx.i + 1, idx.j},
          HexIndex{idx.i - 1, idx.j + diag}, HexIndex{idx.i + 1, idx.j + diag}};
}

HexIndex torus_shift(const HexGrid& grid, const HexIndex& idx, std::int64_t k, std::int64_t l) {
  if (!grid.torus()) throw std::logic_error("torus_shift: grid is not a torus");
  return grid.wrap(HexIndex{idx.i + k, idx.j + l});
}

}  // namespace hexsep::geom
