#pragma once

#include "hexsep/geom.hpp"

#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace hexsep::rgg {

enum class Mode {
  continuum,  ///< edge iff Euclidean distance <= r
  hex,        ///< edge iff the cells (circumradius r/4) coincide or touch
};

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

using Edge = std::pair<std::size_t, std::size_t>;

/// An r-graph or H_r-graph over a fixed point set. Edges are stored once,
/// with `first < second`, in lexicographic order.
struct Graph {
  PointList points;
  std::vector<Edge> edges;
  Mode mode = Mode::continuum;
  double radius = 0.0;

  std::size_t size() const { return points.size(); }
};

/// Partition of point indices into clusters.
///
/// Cluster ids are ordered by smallest member index, so cluster 0 always
/// holds point 0.
struct ClusterSet {
  std::vector<int> assignment;
  std::vector<std::size_t> sizes;
  PointList centers;

  std::size_t point_count() const { return assignment.size(); }
  std::size_t cluster_count() const { return sizes.size(); }
  std::vector<std::vector<std::size_t>> members() const;
};

/// Relabels an arbitrary labelling into canonical ids and computes member
/// means. `labels` may use any integer values.
ClusterSet make_cluster_set(std::span<const Point2> points, std::span<const int> labels);

/// Grid with circumradius r/4 on which H_r-connectivity is evaluated.
geom::HexGrid hex_grid_for_radius(double r, bool torus = false);

/// Throws std::domain_error when r <= 0.
Graph build_graph(std::span<const Point2> points, double r, Mode mode);

ClusterSet connected_components(const Graph& g);

/// Size of the largest cluster over the number of points (0 for no points).
double largest_fraction(const ClusterSet& cs);

/// Some cluster holds at least a `rho` share of the points; rho in (1/2, 1).
bool holds_A(const ClusterSet& cs, double rho);

/// Largest-component fraction computed without materialising the edge list.
/// Agrees exactly with largest_fraction(connected_components(build_graph(...))).
double largest_component_fraction(std::span<const Point2> points, double r, Mode mode);

/// Whether some component has at least `target` points; stops scanning edges
/// as soon as one does.
bool component_reaches(std::span<const Point2> points, double r, Mode mode, std::size_t target);

/// Size of the largest cluster of occupied cells divided by the total cell
/// count of the r/4 grid. With `torus` the grid wraps on both axes; both
/// variants share the same index rectangle so the torus value never falls
/// below the plain one.
double occupied_hex_fraction(std::span<const Point2> points, double r, bool torus);

}  // namespace hexsep::rgg
