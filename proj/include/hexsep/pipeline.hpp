#pragma once

#include "hexsep/geom.hpp"
#include "hexsep/rgg.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hexsep::pipeline {

/// Malformed or degenerate input data. `row`/`column` are 1-based when known.
class IngestError : public std::runtime_error {
 public:
  IngestError(const std::string& what, std::optional<std::size_t> row = {},
              std::optional<std::size_t> column = {})
      : std::runtime_error(what), row_(row), column_(column) {}
  std::optional<std::size_t> row() const { return row_; }
  std::optional<std::size_t> column() const { return column_; }

 private:
  std::optional<std::size_t> row_;
  std::optional<std::size_t> column_;
};

/// No anomalies: every point lies in one regular class, so there is nothing
/// to separate.
class NotSeparable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Affine map from raw rows to the unit square: centre, project on two
/// principal axes, then min-max scale (optionally after rank transform).
struct Transform {
  Eigen::VectorXd center;
  Eigen::Matrix<double, 2, Eigen::Dynamic> axes;  ///< rows are unit principal axes
  Eigen::Vector2d variances = Eigen::Vector2d::Zero();
  Eigen::Vector2d lower = Eigen::Vector2d::Zero();
  Eigen::Vector2d range = Eigen::Vector2d::Ones();  ///< 0 marks a collapsed axis
  bool rank_uniformized = false;
};

struct Dataset {
  Eigen::Index raw_dim = 0;
  Eigen::MatrixXd rows;  ///< one record per row
  PointList projected;
  Transform transform;
};

struct IngestOptions {
  bool rank_uniformize = false;
};

/// Projects rows onto their top two principal axes (power iteration from a
/// deterministic start, first non-zero axis component positive) and scales
/// each axis into [0, 1]. Throws IngestError for fewer than two columns,
/// non-finite values or zero total variance.
Dataset ingest(const Eigen::MatrixXd& rows, const IngestOptions& options = {});

/// Applies a fitted (non-rank) transform to a new row; the result is clamped
/// into the unit square.
Point2 project(const Transform& transform, const Eigen::VectorXd& row);

/// Dominant eigenpairs of a symmetric positive semi-definite matrix by power
/// iteration with deflation. Columns of the returned matrix are unit vectors.
struct PrincipalAxes {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
};
PrincipalAxes power_iteration(const Eigen::MatrixXd& symmetric, int count,
                              int max_iterations = 20000, double tolerance = 1e-13);

struct ClusterOptions {
  int max_iterations = 100;
};

/// Radius-bounded K-means with radius R(M, N).
///
/// A leader-follower pass (nearest running centre within R, else a new
/// cluster) is followed by rounds of: merge clusters whose union still fits
/// within R of its mean, reassign every point to its nearest centre within R
/// (else a fresh singleton), recentre. Rounds stop at an assignment fixed
/// point or after `max_iterations`. Members left farther than R from their
/// final centre become singletons.
rgg::ClusterSet cluster(std::span<const Point2> points, std::int64_t M, std::int64_t N,
                        const ClusterOptions& options = {});

/// Same procedure with an explicit radius bound.
rgg::ClusterSet cluster_within(std::span<const Point2> points, double radius,
                               const ClusterOptions& options = {});

/// Classes rebuilt under the observed class count: cluster with R(M, N),
/// take N0 = ceil(sqrt(class count)) (at most M) and re-cluster with R(M, N0).
struct Regularized {
  rgg::ClusterSet classes;
  std::int64_t first_pass_count = 0;
  std::int64_t N0 = 0;
  double R0 = 0.0;
};
Regularized regularize(std::span<const Point2> points, std::int64_t M, std::int64_t N,
                       const ClusterOptions& options = {});

/// The line w . z = theta with unit normal w.
template <typename Scalar>
struct HyperplaneT {
  Point2T<Scalar> w = Point2T<Scalar>(Scalar(0), Scalar(1));
  Scalar theta = Scalar(0);
};
using Hyperplane = HyperplaneT<double>;

template <typename Scalar>
Scalar signed_distance(const Point2T<Scalar>& p, const HyperplaneT<Scalar>& h) {
  return h.w.dot(p) - h.theta;
}

/// Orthogonal least-squares line: passes through the centroid with normal
/// along the minor axis of the scatter matrix. The normal is oriented with
/// a positive y component (positive x when vertical). Throws
/// std::invalid_argument when fewer than two distinct points are given.
Hyperplane fit_hyperplane(std::span<const Point2> points);

struct AnomalyReport {
  Hyperplane plane;
  double R0 = 0.0;
  std::vector<int> assignment;               ///< class of every point
  std::vector<double> distances;             ///< signed distance of every point
  std::vector<double> class_distances;       ///< signed distance of every class centre
  std::vector<int> anomalous_classes;        ///< ascending
  std::vector<std::size_t> anomalous;        ///< X, ascending
  std::vector<std::size_t> regular;          ///< complement of X, ascending

  bool separable() const { return !anomalous.empty(); }
};

/// Macro (class centre) and micro (point) anomalies at threshold R0: a class
/// or point is anomalous iff its |signed distance| >= R0.
AnomalyReport detect(std::span<const Point2> points, const rgg::ClusterSet& classes,
                     const Hyperplane& plane, double R0);

struct DetectorModel {
  Hyperplane base;
  double gamma = 0.5;
  double d_theta = 0.0;        ///< min over X of |d(x)| - |d(y_hat)|
  double theta_gamma = 0.0;    ///< |d(x_star)| - gamma * d_theta
  std::size_t x_star = 0;
  std::optional<std::size_t> y_hat;  ///< farthest regular point, if any
  Point2 w_shift = Point2::Zero();   ///< (1 + theta_gamma) w

  /// Side of the base plane holding x_star: the shifted plane is
  /// w . z = theta + side * theta_gamma.
  double side = 1.0;
};

/// Throws NotSeparable when X is empty, std::domain_error for gamma outside
/// (0, 1) and std::logic_error when the report does not separate
/// (d_theta <= 0).
DetectorModel compute_shift(const AnomalyReport& report, double gamma);

/// w_shift . y - (theta + theta_gamma).
double activation(const DetectorModel& model, const Point2& y);

/// The reflected unit: same form with theta_gamma replaced by -theta_gamma.
double reflected_activation(const DetectorModel& model, const Point2& y);

enum class Label { regular, anomalous };

std::string_view to_string(Label label);

/// Anomalous iff |signed distance to the base plane| >= theta_gamma, i.e.
/// outside the band bounded by the shifted plane and its reflection.
Label classify(const DetectorModel& model, const Point2& y);

/// Literal two-unit reading: regular iff activation <= 0 and reflected
/// activation > 0. Kept for comparison with classify.
Label band_classify(const DetectorModel& model, const Point2& y);

}  // namespace hexsep::pipeline
