#include "hexsep/rgg.hpp"

#include "hexsep/union_find.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace hexsep::rgg {
namespace {

void require_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::domain_error("radius must be positive");
}

// Uniform bucket grid over the unit square with side >= r, so every r-edge
// joins points in the same or an adjacent bucket.
class BucketGrid {
 public:
  BucketGrid(std::span<const Point2> points, double r) {
    const auto cap = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(points.size()))));
    const double by_radius = std::floor(1.0 / r);
    side_ = std::max<std::size_t>(1, std::min<std::size_t>(cap, by_radius >= 1.0 ? static_cast<std::size_t>(by_radius) : 1));
    start_.assign(side_ * side_ + 1, 0);
    cell_of_.resize(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
      cell_of_[k] = cell(axis(points[k].x()), axis(points[k].y()));
      ++start_[cell_of_[k] + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    order_.resize(points.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t k = 0; k < points.size(); ++k) order_[fill[cell_of_[k]]++] = k;
  }

  // fn(a, b) returns false to stop the scan early.
  template <typename Fn>
  void for_each_candidate_pair(Fn&& fn) const {
    static constexpr int kForward[4][2] = {{1, -1}, {1, 0}, {1, 1}, {0, 1}};
    for (std::size_t cx = 0; cx < side_; ++cx) {
      for (std::size_t cy = 0; cy < side_; ++cy) {
        const std::size_t c = cell(cx, cy);
        for (std::size_t a = start_[c]; a < start_[c + 1]; ++a) {
          for (std::size_t b = a + 1; b < start_[c + 1]; ++b) {
            if (!fn(order_[a], order_[b])) return;
          }
        }
        for (const auto& d : kForward) {
          const auto nx = static_cast<std::ptrdiff_t>(cx) + d[0];
          const auto ny = static_cast<std::ptrdiff_t>(cy) + d[1];
          if (nx < 0 || ny < 0 || nx >= static_cast<std::ptrdiff_t>(side_) ||
              ny >= static_cast<std::ptrdiff_t>(side_)) {
            continue;
          }
          const std::size_t nc = cell(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny));
          for (std::size_t a = start_[c]; a < start_[c + 1]; ++a) {
            for (std::size_t b = start_[nc]; b < start_[nc + 1]; ++b) {
              if (!fn(order_[a], order_[b])) return;
            }
          }
        }
      }
    }
  }

 private:
  std::size_t axis(double v) const {
    const auto k = static_cast<std::ptrdiff_t>(std::floor(v * static_cast<double>(side_)));
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(side_) - 1));
  }
  std::size_t cell(std::size_t cx, std::size_t cy) const { return cx * side_ + cy; }

  std::size_t side_ = 1;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> cell_of_;
  std::vector<std::size_t> order_;
};

std::int64_t pack(const geom::HexIndex& idx) { return (idx.i << 32) ^ (idx.j & 0xffffffff); }

// Occupied cells of the r/4 grid in first-occupation order, plus the cell
// slot of every point.
struct CellOccupancy {
  std::vector<geom::HexIndex> cells;
  std::vector<std::size_t> point_cell;
  std::unordered_map<std::int64_t, std::size_t> slot;
};

CellOccupancy occupy(const geom::HexGrid& grid, std::span<const Point2> points) {
  CellOccupancy occ;
  occ.point_cell.reserve(points.size());
  for (const Point2& p : points) {
    const geom::HexIndex idx = grid.wrap(geom::locate(grid, p));
    auto [it, inserted] = occ.slot.try_emplace(pack(idx), occ.cells.size());
    if (inserted) occ.cells.push_back(idx);
    occ.point_cell.push_back(it->second);
  }
  return occ;
}

// Unites touching occupied cells.
DisjointSet cell_components(const geom::HexGrid& grid, const CellOccupancy& occ) {
  DisjointSet ds(occ.cells.size());
  for (std::size_t c = 0; c < occ.cells.size(); ++c) {
    for (const geom::HexIndex& nb : geom::hex_neighbors(occ.cells[c])) {
      const auto it = occ.slot.find(pack(grid.wrap(nb)));
      if (it != occ.slot.end()) ds.unite(c, it->second);
    }
  }
  return ds;
}

// Points in the largest H_r component: all points of a cell are connected,
// so it suffices to join touching occupied cells and weigh them.
std::size_t largest_hex_component(std::span<const Point2> points, double r) {
  const geom::HexGrid grid = hex_grid_for_radius(r);
  const CellOccupancy occ = occupy(grid, points);
  DisjointSet ds = cell_components(grid, occ);
  std::vector<std::size_t> weight(occ.cells.size(), 0);
  for (std::size_t c : occ.point_cell) ++weight[ds.find(c)];
  return *std::max_element(weight.begin(), weight.end());
}

}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::continuum ? "continuum" : "hex"; }

Mode parse_mode(std::string_view text) {
  if (text == "continuum") return Mode::continuum;
  if (text == "hex") return Mode::hex;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "'");
}

std::vector<std::vector<std::size_t>> ClusterSet::members() const {
  std::vector<std::vector<std::size_t>> out(sizes.size());
  for (std::size_t k = 0; k < assignment.size(); ++k) {
    out[static_cast<std::size_t>(assignment[k])].push_back(k);
  }
  return out;
}

ClusterSet make_cluster_set(std::span<const Point2> points, std::span<const int> labels) {
  if (points.size() != labels.size()) throw std::invalid_argument("label count mismatch");
  ClusterSet cs;
  cs.assignment.resize(labels.size());
  std::unordered_map<int, int> canonical;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    auto [it, inserted] = canonical.try_emplace(labels[k], static_cast<int>(cs.sizes.size()));
    if (inserted) {
      cs.sizes.push_back(0);
      cs.centers.push_back(Point2::Zero());
    }
    const int id = it->second;
    cs.assignment[k] = id;
    ++cs.sizes[static_cast<std::size_t>(id)];
    cs.centers[static_cast<std::size_t>(id)] += points[k];
  }
  for (std::size_t c = 0; c < cs.sizes.size(); ++c) {
    cs.centers[c] /= static_cast<double>(cs.sizes[c]);
  }
  return cs;
}

geom::HexGrid hex_grid_for_radius(double r, bool torus) {
  require_radius(r);
  return geom::HexGrid(r / 4.0, torus);
}

Graph build_graph(std::span<const Point2> points, double r, Mode mode) {
  require_radius(r);
  Graph g;
  g.points.assign(points.begin(), points.end());
  g.mode = mode;
  g.radius = r;

  if (mode == Mode::continuum) {
    const double r2 = r * r;
    BucketGrid buckets(points, r);
    buckets.for_each_candidate_pair([&](std::size_t a, std::size_t b) {
      if ((points[a] - points[b]).squaredNorm() <= r2) g.edges.emplace_back(std::min(a, b), std::max(a, b));
      return true;
    });
  } else {
    const geom::HexGrid grid = hex_grid_for_radius(r);
    const CellOccupancy occ = occupy(grid, points);
    std::vector<std::vector<std::size_t>> in_cell(occ.cells.size());
    for (std::size_t k = 0; k < points.size(); ++k) in_cell[occ.point_cell[k]].push_back(k);
    for (std::size_t c = 0; c < occ.cells.size(); ++c) {
      const auto& here = in_cell[c];
      for (std::size_t a = 0; a < here.size(); ++a) {
        for (std::size_t b = a + 1; b < here.size(); ++b) g.edges.emplace_back(here[a], here[b]);
      }
      for (const geom::HexIndex& nb : geom::hex_neighbors(occ.cells[c])) {
        const auto it = occ.slot.find(pack(nb));
        if (it == occ.slot.end() || it->second < c) continue;
        for (std::size_t a : here) {
          for (std::size_t b : in_cell[it->second]) g.edges.emplace_back(std::min(a, b), std::max(a, b));
        }
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

ClusterSet connected_components(const Graph& g) {
  DisjointSet ds(g.size());
  for (const auto& [a, b] : g.edges) ds.unite(a, b);
  std::vector<int> labels(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) labels[k] = static_cast<int>(ds.find(k));
  return make_cluster_set(g.points, labels);
}

double largest_fraction(const ClusterSet& cs) {
  if (cs.point_count() == 0) return 0.0;
  const std::size_t best = *std::max_element(cs.sizes.begin(), cs.sizes.end());
  return static_cast<double>(best) / static_cast<double>(cs.point_count());
}

bool holds_A(const ClusterSet& cs, double rho) {
  if (!(rho > 0.5 && rho < 1.0)) throw std::domain_error("rho must lie in (1/2, 1)");
  return largest_fraction(cs) >= rho;
}

double largest_component_fraction(std::span<const Point2> points, double r, Mode mode) {
  require_radius(r);
  if (points.empty()) return 0.0;
  std::size_t best = 1;
  if (mode == Mode::continuum) {
    const double r2 = r * r;
    DisjointSet ds(points.size());
    BucketGrid(points, r).for_each_candidate_pair([&](std::size_t a, std::size_t b) {
      if ((points[a] - points[b]).squaredNorm() <= r2) best = std::max(best, ds.unite(a, b));
      return true;
    });
  } else {
    best = largest_hex_component(points, r);
  }
  return static_cast<double>(best) / static_cast<double>(points.size());
}

bool component_reaches(std::span<const Point2> points, double r, Mode mode, std::size_t target) {
  require_radius(r);
  if (points.empty() || target > points.size()) return false;
  if (target <= 1) return true;
  if (mode == Mode::hex) return largest_hex_component(points, r) >= target;
  const double r2 = r * r;
  DisjointSet ds(points.size());
  bool reached = false;
  BucketGrid(points, r).for_each_candidate_pair([&](std::size_t a, std::size_t b) {
    if ((points[a] - points[b]).squaredNorm() <= r2 && ds.unite(a, b) >= target) reached = true;
    return !reached;
  });
  return reached;
}

double occupied_hex_fraction(std::span<const Point2> points, double r, bool torus) {
  require_radius(r);
  const geom::HexGrid wrapped = hex_grid_for_radius(r, true);
  const geom::HexGrid grid(wrapped.circumradius(), wrapped.cols(), wrapped.rows(), torus);
  if (points.empty()) return 0.0;
  const CellOccupancy occ = occupy(grid, points);
  DisjointSet ds = cell_components(grid, occ);
  std::size_t best = 0;
  for (std::size_t c = 0; c < occ.cells.size(); ++c) best = std::max(best, ds.size_of(c));
  return static_cast<double>(best) / static_cast<double>(grid.cell_count());
}

}  // namespace hexsep::rgg
