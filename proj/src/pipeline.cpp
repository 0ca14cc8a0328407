#include "hexsep/pipeline.hpp"

#include "hexsep/thresh.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace hexsep::pipeline {
namespace {

// Flips v so that its first component with magnitude above `eps` is positive.
template <typename Derived>
void orient_first_positive(Eigen::MatrixBase<Derived>& v, double eps = 1e-12) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > eps) {
      if (v(k) < 0.0) v = -v;
      return;
    }
  }
}

std::vector<int> canonical(const std::vector<int>& labels) {
  std::unordered_map<int, int> ids;
  std::vector<int> out(labels.size());
  for (std::size_t k = 0; k < labels.size(); ++k) {
    out[k] = ids.try_emplace(labels[k], static_cast<int>(ids.size())).first->second;
  }
  return out;
}

// Cluster bookkeeping for the radius-bounded K-means passes.
class Partition {
 public:
  Partition(std::span<const Point2> points, double radius)
      : points_(points), r2_(radius * radius), labels_(points.size(), -1) {}

  void leader_pass() {
    for (std::size_t k = 0; k < points_.size(); ++k) {
      const int c = nearest_within(points_[k]);
      if (c < 0) {
        open(k);
      } else {
        labels_[k] = c;
        auto& cl = clusters_[static_cast<std::size_t>(c)];
        cl.sum += points_[k];
        ++cl.count;
        cl.center = cl.sum / static_cast<double>(cl.count);
      }
    }
  }

  // Repeatedly joins two clusters whose centres are within R when every
  // member of the union stays within R of the union mean.
  void merge_pass() {
    bool merged = true;
    while (merged) {
      merged = false;
      auto members = member_lists();
      for (std::size_t a = 0; a < clusters_.size() && !merged; ++a) {
        if (members[a].empty()) continue;
        for (std::size_t b = a + 1; b < clusters_.size() && !merged; ++b) {
          if (members[b].empty()) continue;
          if ((clusters_[a].center - clusters_[b].center).squaredNorm() > r2_) continue;
          const Point2 mean = (clusters_[a].sum + clusters_[b].sum) /
                              static_cast<double>(clusters_[a].count + clusters_[b].count);
          const auto fits = [&](const std::vector<std::size_t>& list) {
            return std::all_of(list.begin(), list.end(),
                               [&](std::size_t k) { return (points_[k] - mean).squaredNorm() <= r2_; });
          };
          if (fits(members[a]) && fits(members[b])) {
            for (std::size_t k : members[b]) labels_[k] = static_cast<int>(a);
            recenter();
            merged = true;
          }
        }
      }
    }
  }

  void reassign() {
    for (std::size_t k = 0; k < points_.size(); ++k) {
      const int c = nearest_within(points_[k]);
      if (c < 0) {
        open(k);
      } else {
        labels_[k] = c;
      }
    }
    recenter();
  }

  // Members farther than R from their centre become singletons; repeats
  // because each removal moves the centre.
  void enforce_radius() {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::size_t k = 0; k < points_.size(); ++k) {
        const auto& cl = clusters_[static_cast<std::size_t>(labels_[k])];
        if (cl.count > 1 && (points_[k] - cl.center).squaredNorm() > r2_) {
          open(k);
          moved = true;
        }
      }
      if (moved) recenter();
    }
  }

  // Recomputes means from labels and drops empty clusters.
  void recenter() {
    labels_ = canonical(labels_);
    std::size_t count = 0;
    for (int l : labels_) count = std::max(count, static_cast<std::size_t>(l) + 1);
    clusters_.assign(count, Cluster{});
    for (std::size_t k = 0; k < points_.size(); ++k) {
      auto& cl = clusters_[static_cast<std::size_t>(labels_[k])];
      cl.sum += points_[k];
      ++cl.count;
    }
    for (auto& cl : clusters_) cl.center = cl.sum / static_cast<double>(cl.count);
  }

  const std::vector<int>& labels() const { return labels_; }

 private:
  struct Cluster {
    Point2 sum = Point2::Zero();
    std::size_t count = 0;
    Point2 center = Point2::Zero();
  };

  int nearest_within(const Point2& p) const {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < clusters_.size(); ++c) {
      if (clusters_[c].count == 0) continue;
      const double d2 = (p - clusters_[c].center).squaredNorm();
      if (d2 <= r2_ && d2 < best_d2) {
        best_d2 = d2;
        best = static_cast<int>(c);
      }
    }
    return best;
  }

  void open(std::size_t k) {
    if (labels_[k] >= 0) {
      auto& old = clusters_[static_cast<std::size_t>(labels_[k])];
      old.sum -= points_[k];
      --old.count;
      if (old.count > 0) old.center = old.sum / static_cast<double>(old.count);
    }
    labels_[k] = static_cast<int>(clusters_.size());
    clusters_.push_back(Cluster{points_[k], 1, points_[k]});
  }

  std::vector<std::vector<std::size_t>> member_lists() const {
    std::vector<std::vector<std::size_t>> out(clusters_.size());
    for (std::size_t k = 0; k < labels_.size(); ++k) out[static_cast<std::size_t>(labels_[k])].push_back(k);
    return out;
  }

  std::span<const Point2> points_;
  double r2_;
  std::vector<int> labels_;
  std::vector<Cluster> clusters_;
};

}  // namespace

PrincipalAxes power_iteration(const Eigen::MatrixXd& symmetric, int count, int max_iterations,
                              double tolerance) {
  const Eigen::Index dim = symmetric.rows();
  if (symmetric.cols() != dim) throw std::invalid_argument("power_iteration: matrix must be square");
  if (count < 1 || count > dim) throw std::invalid_argument("power_iteration: bad eigenpair count");

  PrincipalAxes out{Eigen::MatrixXd::Zero(dim, count), Eigen::VectorXd::Zero(count)};
  Eigen::MatrixXd deflated = symmetric;
  const double scale = std::max(symmetric.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());

  for (int k = 0; k < count; ++k) {
    const auto project_out = [&](Eigen::VectorXd& v) {
      for (int prev = 0; prev < k; ++prev) v -= out.vectors.col(prev).dot(v) * out.vectors.col(prev);
    };

    // Start from the heaviest column of the deflated matrix; fall back to the
    // first basis vector not already spanned.
    Eigen::Index heaviest = 0;
    deflated.colwise().norm().maxCoeff(&heaviest);
    Eigen::VectorXd v = deflated.col(heaviest);
    project_out(v);
    if (v.norm() <= 1e-12 * scale) {
      for (Eigen::Index e = 0; e < dim; ++e) {
        v = Eigen::VectorXd::Unit(dim, e);
        project_out(v);
        if (v.norm() > 1e-6) break;
      }
    }
    v.normalize();

    for (int it = 0; it < max_iterations; ++it) {
      Eigen::VectorXd next = deflated * v;
      project_out(next);
      const double norm = next.norm();
      if (norm <= 1e-14 * scale) break;  // v spans a null direction
      next /= norm;
      const double change = std::min((next - v).norm(), (next + v).norm());
      v = next;
      if (change < tolerance) break;
    }
    orient_first_positive(v);
    const double lambda = v.dot(symmetric * v);
    out.vectors.col(k) = v;
    out.values(k) = lambda;
    deflated -= lambda * v * v.transpose();
  }
  return out;
}

Dataset ingest(const Eigen::MatrixXd& rows, const IngestOptions& options) {
  if (rows.cols() < 2) throw IngestError("need at least two numeric columns");
  if (rows.rows() < 1) throw IngestError("no data rows");
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      if (!std::isfinite(rows(r, c))) {
        throw IngestError("non-finite value", static_cast<std::size_t>(r + 1), static_cast<std::size_t>(c + 1));
      }
    }
  }

  Dataset ds;
  ds.raw_dim = rows.cols();
  ds.rows = rows;
  Transform& tf = ds.transform;
  tf.center = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - tf.center.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(rows.rows());
  if (!(cov.trace() > 0.0)) throw IngestError("degenerate data: zero variance");

  const PrincipalAxes pa = power_iteration(cov, 2);
  tf.axes = pa.vectors.transpose();
  tf.variances = pa.values;

  Eigen::MatrixXd proj = centered * pa.vectors;  // n x 2
  tf.rank_uniformized = options.rank_uniformize;
  if (options.rank_uniformize) {
    const auto n = proj.rows();
    for (Eigen::Index axis = 0; axis < 2; ++axis) {
      std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](Eigen::Index a, Eigen::Index b) { return proj(a, axis) < proj(b, axis); });
      for (Eigen::Index rank = 0; rank < n; ++rank) {
        proj(order[static_cast<std::size_t>(rank)], axis) = static_cast<double>(rank + 1) / static_cast<double>(n + 1);
      }
    }
  }

  tf.lower = proj.colwise().minCoeff().transpose();
  tf.range = proj.colwise().maxCoeff().transpose() - tf.lower;
  if (!(tf.range(0) > 0.0)) throw IngestError("degenerate data: zero spread on the principal axis");
  if (tf.range(1) <= 1e-9 * tf.range(0)) tf.range(1) = 0.0;

  ds.projected.resize(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    Point2 p;
    for (int axis = 0; axis < 2; ++axis) {
      p(axis) = tf.range(axis) > 0.0 ? (proj(r, axis) - tf.lower(axis)) / tf.range(axis) : 0.5;
    }
    ds.projected[static_cast<std::size_t>(r)] = p.cwiseMax(0.0).cwiseMin(1.0);
  }
  return ds;
}

Point2 project(const Transform& transform, const Eigen::VectorXd& row) {
  if (transform.rank_uniformized) {
    throw std::logic_error("project: rank-uniformized transforms apply to the ingested rows only");
  }
  if (row.size() != transform.center.size()) throw std::invalid_argument("project: dimension mismatch");
  const Eigen::Vector2d coords = transform.axes * (row - transform.center);
  Point2 p;
  for (int axis = 0; axis < 2; ++axis) {
    p(axis) = transform.range(axis) > 0.0 ? (coords(axis) - transform.lower(axis)) / transform.range(axis) : 0.5;
  }
  return p.cwiseMax(0.0).cwiseMin(1.0);
}

rgg::ClusterSet cluster_within(std::span<const Point2> points, double radius,
                               const ClusterOptions& options) {
  if (!(radius > 0.0)) throw std::domain_error("cluster radius must be positive");
  Partition part(points, radius);
  part.leader_pass();
  part.recenter();
  for (int it = 0; it < options.max_iterations; ++it) {
    const std::vector<int> before = part.labels();
    part.merge_pass();
    part.reassign();
    if (part.labels() == before) break;
  }
  part.enforce_radius();
  return rgg::make_cluster_set(points, part.labels());
}

rgg::ClusterSet cluster(std::span<const Point2> points, std::int64_t M, std::int64_t N,
                        const ClusterOptions& options) {
  return cluster_within(points, thresh::circumradius(M, N), options);
}

Regularized regularize(std::span<const Point2> points, std::int64_t M, std::int64_t N,
                       const ClusterOptions& options) {
  Regularized out;
  const rgg::ClusterSet first = cluster(points, M, N, options);
  out.first_pass_count = static_cast<std::int64_t>(first.cluster_count());
  auto n0 = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(out.first_pass_count))));
  out.N0 = std::clamp<std::int64_t>(n0, 1, M);
  out.R0 = thresh::circumradius(M, out.N0);
  out.classes = cluster_within(points, out.R0, options);
  return out;
}

Hyperplane fit_hyperplane(std::span<const Point2> points) {
  const bool distinct = std::any_of(points.begin(), points.end(),
                                    [&](const Point2& p) { return p != points.front(); });
  if (points.size() < 2 || !distinct) {
    throw std::invalid_argument("fit_hyperplane: need at least two distinct points");
  }
  Point2 centroid = Point2::Zero();
  for (const Point2& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (const Point2& p : points) scatter += (p - centroid) * (p - centroid).transpose();

  // Eigenvalues come back in increasing order; the minor axis is the normal.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(scatter);
  Point2 w = solver.eigenvectors().col(0).normalized();
  if (w.y() < -1e-15 || (std::abs(w.y()) <= 1e-15 && w.x() < 0.0)) w = -w;
  return Hyperplane{w, w.dot(centroid)};
}

AnomalyReport detect(std::span<const Point2> points, const rgg::ClusterSet& classes,
                     const Hyperplane& plane, double R0) {
  if (!(R0 > 0.0)) throw std::domain_error("R0 must be positive");
  if (classes.point_count() != points.size()) throw std::invalid_argument("detect: class/point count mismatch");
  AnomalyReport rep;
  rep.plane = plane;
  rep.R0 = R0;
  rep.assignment = classes.assignment;
  rep.distances.reserve(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double d = signed_distance(points[k], plane);
    rep.distances.push_back(d);
    (std::abs(d) >= R0 ? rep.anomalous : rep.regular).push_back(k);
  }
  for (std::size_t c = 0; c < classes.cluster_count(); ++c) {
    const double d = signed_distance(classes.centers[c], plane);
    rep.class_distances.push_back(d);
    if (std::abs(d) >= R0) rep.anomalous_classes.push_back(static_cast<int>(c));
  }
  return rep;
}

DetectorModel compute_shift(const AnomalyReport& report, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::domain_error("gamma must lie in (0, 1)");
  if (report.anomalous.empty()) throw NotSeparable("no anomalies: all points belong to one class");

  DetectorModel model;
  model.base = report.plane;
  model.gamma = gamma;

  double regular_max = 0.0;
  for (std::size_t k : report.regular) {
    const double d = std::abs(report.distances[k]);
    if (!model.y_hat || d > regular_max) {
      regular_max = d;
      model.y_hat = k;
    }
  }
  double anomaly_min = std::numeric_limits<double>::infinity();
  for (std::size_t k : report.anomalous) {
    const double d = std::abs(report.distances[k]);
    if (d < anomaly_min) {
      anomaly_min = d;
      model.x_star = k;
    }
  }
  model.d_theta = anomaly_min - regular_max;
  if (!(model.d_theta > 0.0)) throw std::logic_error("compute_shift: report does not separate (d_theta <= 0)");
  model.theta_gamma = anomaly_min - gamma * model.d_theta;
  model.w_shift = (1.0 + model.theta_gamma) * model.base.w;
  model.side = report.distances[model.x_star] >= 0.0 ? 1.0 : -1.0;
  return model;
}

double activation(const DetectorModel& model, const Point2& y) {
  return model.w_shift.dot(y) - (model.base.theta + model.theta_gamma);
}

double reflected_activation(const DetectorModel& model, const Point2& y) {
  const double reflected = -model.theta_gamma;
  return ((1.0 + reflected) * model.base.w).dot(y) - (model.base.theta + reflected);
}

std::string_view to_string(Label label) { return label == Label::regular ? "regular" : "anomalous"; }

Label classify(const DetectorModel& model, const Point2& y) {
  return std::abs(signed_distance(y, model.base)) >= model.theta_gamma ? Label::anomalous : Label::regular;
}

Label band_classify(const DetectorModel& model, const Point2& y) {
  return activation(model, y) <= 0.0 && reflected_activation(model, y) > 0.0 ? Label::regular
                                                                              : Label::anomalous;
}

}  // namespace hexsep::pipeline
