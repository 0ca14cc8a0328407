#include "hexsep/geom.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using hexsep::Point2;
using namespace hexsep::geom;

namespace {

// Convex polygon containment with a small outward tolerance.
bool inside_hexagon(const std::array<Point2, 6>& v, const Point2& p, double tol = 1e-12) {
  for (std::size_t k = 0; k < 6; ++k) {
    const Point2 a = v[k];
    const Point2 b = v[(k + 1) % 6];
    const double cross = (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
    if (cross < -tol) return false;
  }
  return true;
}

// Every cell of the covering rectangle (plus a margin) whose polygon holds p.
std::vector<HexIndex> containing_cells(const HexGrid& grid, const Point2& p) {
  std::vector<HexIndex> hits;
  for (std::int64_t i = -1; i <= grid.cols(); ++i) {
    for (std::int64_t j = -1; j <= grid.rows() + 1; ++j) {
      const HexIndex idx{i, j};
      if (inside_hexagon(grid.vertices(idx), p)) hits.push_back(idx);
    }
  }
  return hits;
}

}  // namespace

TEST_CASE("vertices wind counter-clockwise at the circumradius") {
  const HexGrid grid(0.1);
  for (const HexIndex idx : {HexIndex{0, 0}, HexIndex{3, 2}, HexIndex{4, 5}}) {
    const auto v = grid.vertices(idx);
    const Point2 c = grid.center(idx);
    double area = 0.0;
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK((v[k] - c).norm() == doctest::Approx(0.1).epsilon(1e-12));
      const Point2& a = v[k];
      const Point2& b = v[(k + 1) % 6];
      area += a.x() * b.y() - b.x() * a.y();
    }
    CHECK(area / 2.0 == doctest::Approx(1.5 * std::sqrt(3.0) * 0.01).epsilon(1e-12));
  }
}

TEST_CASE("locate maps a cell centre to its own cell") {
  const HexGrid grid(0.25);
  CHECK(locate(grid, Point2(0.0, 0.0)) == HexIndex{0, 0});
  for (std::int64_t i = 0; i < grid.cols(); ++i) {
    for (std::int64_t j = 0; j < grid.rows(); ++j) {
      const Point2 c = grid.center({i, j});
      if (c.x() < 0 || c.x() > 1 || c.y() < 0 || c.y() > 1) continue;
      CHECK(locate(grid, c) == HexIndex{i, j});
    }
  }
}

TEST_CASE("locate rejects points outside the unit square") {
  const HexGrid grid(0.25);
  CHECK_THROWS_AS(locate(grid, Point2(1.5, 0.0)), std::domain_error);
  CHECK_THROWS_AS(locate(grid, Point2(0.5, -1e-9)), std::domain_error);
  CHECK_THROWS_AS(locate(grid, Point2(std::nan(""), 0.5)), std::domain_error);
}

TEST_CASE("locate agrees with an exhaustive point-in-polygon scan") {
  const HexGrid grid(0.25);
  const Point2 p(0.9, 0.9);
  const auto hits = containing_cells(grid, p);
  REQUIRE(hits.size() == 1);
  CHECK(locate(grid, p) == hits.front());
}

TEST_CASE("partition property on random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double a : {0.25, 0.07, 0.013}) {
    const HexGrid grid(a);
    int failures = 0;
    for (int k = 0; k < 10000 / 3; ++k) {
      const Point2 p(u(rng), u(rng));
      const HexIndex idx = locate(grid, p);
      if (!inside_hexagon(grid.vertices(idx), p, 1e-12)) ++failures;
      if (idx.i < 0 || idx.j < 0 || idx.i >= grid.cols() || idx.j >= grid.rows()) ++failures;
    }
    CHECK(failures == 0);
  }
}

TEST_CASE("points on shared edges go to the smallest index") {
  const HexGrid grid(0.2);
  // Every vertex and edge midpoint of an interior cell touches several cells.
  const HexIndex idx{2, 2};
  const auto v = grid.vertices(idx);
  for (std::size_t k = 0; k < 6; ++k) {
    for (const Point2& p : {v[k], Point2((v[k] + v[(k + 1) % 6]) / 2.0)}) {
      const auto hits = containing_cells(grid, p);
      REQUIRE(hits.size() >= 2);
      CHECK(locate(grid, p) == hits.front());
    }
  }
}

TEST_CASE("hamming distance") {
  CHECK(hamming({0, 0}, {0, 0}) == 0);
  CHECK(hamming({1, 2}, {2, 3}) == 2);
  CHECK(hamming({0, 0}, {3, 1}) == 4);

  const HexGrid torus(0.1, 10, 10, true);
  CHECK(hamming(torus, {0, 0}, {9, 9}) == 2);
  CHECK(hamming(torus, {1, 2}, {2, 3}) == 2);
}

TEST_CASE("per-axis rule") {
  CHECK(are_per_axis_neighbors({0, 0}, {0, 0}));
  CHECK(are_per_axis_neighbors({0, 0}, {1, 1}));
  CHECK(are_per_axis_neighbors({0, 0}, {1, -1}));
  CHECK_FALSE(are_per_axis_neighbors({0, 0}, {2, 0}));
}

TEST_CASE("hex neighbours") {
  CHECK(are_hex_neighbors({0, 0}, {0, 0}));
  CHECK(are_hex_neighbors({0, 0}, {1, 1}));
  CHECK_FALSE(are_hex_neighbors({0, 0}, {2, 0}));
  CHECK_FALSE(are_hex_neighbors({0, 0}, {1, -1}));
  CHECK(are_hex_neighbors({1, 0}, {0, -1}));
  CHECK_FALSE(are_hex_neighbors({1, 0}, {0, 1}));
}

TEST_CASE("hex neighbours are exactly the cells at one centre spacing") {
  const double a = 0.1;
  const HexGrid grid(a);
  const double spacing = std::sqrt(3.0) * a;
  for (std::int64_t i = 0; i < 6; ++i) {
    for (std::int64_t j = 0; j < 6; ++j) {
      int count = 0;
      for (std::int64_t di = -2; di <= 2; ++di) {
        for (std::int64_t dj = -2; dj <= 2; ++dj) {
          const HexIndex p{i, j};
          const HexIndex q{i + di, j + dj};
          const double d = (grid.center(p) - grid.center(q)).norm();
          const bool geometric = d <= spacing * (1 + 1e-12);
          CHECK(are_hex_neighbors(p, q) == geometric);
          CHECK(are_hex_neighbors(p, q) == are_hex_neighbors(q, p));
          if (are_hex_neighbors(p, q)) CHECK(are_per_axis_neighbors(p, q));
          if (geometric && !(p == q)) ++count;
        }
      }
      CHECK(count == 6);
      for (const HexIndex& n : hex_neighbors({i, j})) {
        CHECK((grid.center(n) - grid.center({i, j})).norm() == doctest::Approx(spacing).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("points in neighbouring cells are within four circumradii") {
  // The bound behind graph containment at circumradius r/4.
  const double a = 0.05;
  const HexGrid grid(a);
  double worst = 0.0;
  for (const HexIndex& n : hex_neighbors({3, 3})) {
    for (const Point2& u : grid.vertices({3, 3})) {
      for (const Point2& v : grid.vertices(n)) worst = std::max(worst, (u - v).norm());
    }
  }
  CHECK(worst == doctest::Approx(std::sqrt(13.0) * a).epsilon(1e-12));
  CHECK(worst <= 4 * a);
}

TEST_CASE("torus shift") {
  const HexGrid ten(0.1, 10, 10, true);
  CHECK(torus_shift(ten, {9, 9}, 1, 1) == HexIndex{0, 0});
  CHECK(torus_shift(ten, {3, 4}, 0, 0) == HexIndex{3, 4});
  const HexGrid eight(0.1, 8, 8, true);
  CHECK(torus_shift(eight, {2, 7}, -3, 5) == HexIndex{7, 4});

  const HexGrid plain(0.1);
  CHECK_THROWS_AS(torus_shift(plain, {0, 0}, 1, 1), std::logic_error);
  CHECK_THROWS_AS(HexGrid(0.1, 7, 8, true), std::domain_error);
}

TEST_CASE("torus shift is a group action") {
  const HexGrid grid(0.1, 12, 9, true);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> shift(-40, 40);
  for (int t = 0; t < 500; ++t) {
    const HexIndex p{shift(rng) % 12 + 12, shift(rng) % 9 + 9};
    const HexIndex w = grid.wrap(p);
    const std::int64_t k = shift(rng);
    const std::int64_t l = shift(rng);
    CHECK(torus_shift(grid, torus_shift(grid, w, k, l), -k, -l) == w);
    const HexIndex s = torus_shift(grid, w, k, l);
    CHECK(s.i >= 0);
    CHECK(s.i < 12);
    CHECK(s.j >= 0);
    CHECK(s.j < 9);
  }
}

TEST_CASE("torus neighbours wrap across the seam") {
  const HexGrid grid(0.1, 8, 6, true);
  CHECK(are_hex_neighbors(grid, {0, 0}, {7, 0}));
  CHECK(are_hex_neighbors(grid, {0, 0}, {0, 5}));
  CHECK(are_hex_neighbors(grid, {7, 0}, {0, 0}));
  CHECK_FALSE(are_hex_neighbors(grid, {0, 0}, {6, 0}));
  for (std::int64_t i = 0; i < 8; ++i) {
    for (std::int64_t j = 0; j < 6; ++j) {
      int count = 0;
      for (std::int64_t i2 = 0; i2 < 8; ++i2) {
        for (std::int64_t j2 = 0; j2 < 6; ++j2) {
          if (!(i == i2 && j == j2) && are_hex_neighbors(grid, {i, j}, {i2, j2})) ++count;
          CHECK(are_hex_neighbors(grid, {i, j}, {i2, j2}) == are_hex_neighbors(grid, {i2, j2}, {i, j}));
        }
      }
      CHECK(count == 6);
    }
  }
}
