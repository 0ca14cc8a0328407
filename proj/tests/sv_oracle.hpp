#pragma once

// Brute-force re-simulation of the support-vector removal loops and a
// literal membership test for the equivalency class.

#include "hexsep/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace hexsep::sv_oracle {

inline constexpr double kTol = 1e-9;

// Smallest pairwise gap |d(x)| - |d(y)| over survivors x and all regular y,
// and the first x attaining it.
inline std::pair<double, std::size_t> minmax_pair(const pipeline::AnomalyReport& rep,
                                                  const std::vector<std::size_t>& xs) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = xs.front();
  for (std::size_t x : xs) {
    for (std::size_t y : rep.regular) {
      const double gap = std::abs(rep.distances[x]) - std::abs(rep.distances[y]);
      if (gap < best) {
        best = gap;
        arg = x;
      }
    }
    if (rep.regular.empty() && std::abs(rep.distances[x]) < best) {
      best = std::abs(rep.distances[x]);
      arg = x;
    }
  }
  return {best, arg};
}

template <typename Score>
std::vector<std::size_t> removal_loop(const pipeline::AnomalyReport& rep, std::vector<std::size_t> alive,
                                      std::int64_t rounds, Score score) {
  std::vector<std::size_t> out;
  for (std::int64_t round = 0; round < rounds && !alive.empty(); ++round) {
    std::vector<double> s(alive.size());
    for (std::size_t k = 0; k < alive.size(); ++k) s[k] = score(alive, alive[k]);
    double best = std::numeric_limits<double>::infinity();
    for (double v : s) best = std::min(best, v);
    std::vector<std::size_t> hits;
    for (std::size_t k = 0; k < alive.size(); ++k) {
      if (s[k] - best <= kTol) hits.push_back(alive[k]);
    }
    const int cls = rep.assignment[*std::min_element(hits.begin(), hits.end())];
    std::vector<std::size_t> next;
    for (std::size_t k : alive) {
      const bool hit = std::find(hits.begin(), hits.end(), k) != hits.end();
      if (!hit && rep.assignment[k] != cls) next.push_back(k);
    }
    out.insert(out.end(), hits.begin(), hits.end());
    alive = next;
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Each round re-solves the pairwise minimum over the surviving anomalies,
/// places the shifted plane and its reflection at +-theta_gamma, and harvests
/// the survivors nearest to either of them.
inline std::vector<std::size_t> anomaly_side(const pipeline::AnomalyReport& rep, double gamma, std::int64_t N0) {
  if (rep.anomalous.empty()) return {};
  return removal_loop(rep, rep.anomalous, N0 * N0, [&](const std::vector<std::size_t>& alive, std::size_t k) {
    const auto [d_theta, x] = minmax_pair(rep, alive);
    const double theta_gamma = std::abs(rep.distances[x]) - gamma * d_theta;
    const double d = rep.distances[k];
    return std::min(std::abs(d - theta_gamma), std::abs(d + theta_gamma));
  });
}

/// Each round harvests the surviving regular points farthest from the base
/// plane.
inline std::vector<std::size_t> regular_side(const pipeline::AnomalyReport& rep, std::int64_t N0) {
  return removal_loop(rep, rep.regular, N0 * N0, [&](const std::vector<std::size_t>&, std::size_t k) {
    return -std::abs(rep.distances[k]);
  });
}

/// Literal membership: y attains the pairwise minimum, or lies within d_theta
/// of the shifted plane on the side of x_star.
inline std::vector<std::size_t> equivalency_class(const pipeline::AnomalyReport& rep, double gamma) {
  if (rep.anomalous.empty()) return {};
  const auto [d_theta, x] = minmax_pair(rep, rep.anomalous);
  const double theta_gamma = std::abs(rep.distances[x]) - gamma * d_theta;
  const double side = rep.distances[x] >= 0 ? 1.0 : -1.0;
  const Point2 w = rep.plane.w;
  const double shifted_theta = rep.plane.theta + side * theta_gamma;
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < rep.distances.size(); ++y) {
    bool member = false;
    if (std::find(rep.anomalous.begin(), rep.anomalous.end(), y) != rep.anomalous.end()) {
      const auto single = minmax_pair(rep, {y});
      member = single.first - d_theta <= kTol;
    }
    // Distance to the line w . z = shifted_theta, from the point's own
    // coordinate along w.
    const double along = rep.distances[y] + rep.plane.theta;
    if (std::abs(along - shifted_theta) / w.norm() <= d_theta + kTol) member = true;
    if (member) out.push_back(y);
  }
  return out;
}

/// Random instance: up to `max_n` points with a few outliers, singleton-free
/// radius-bounded classes and an anomaly threshold R0. X may be empty.
inline pipeline::AnomalyReport random_report(std::mt19937_64& rng, std::size_t max_n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(3, max_n);
  const std::size_t n = size(rng);
  PointList pts;
  const double spread = 0.05 + 0.2 * u(rng);
  for (std::size_t k = 0; k < n; ++k) {
    if (u(rng) < 0.2) {
      pts.emplace_back(u(rng), u(rng));
    } else {
      pts.emplace_back(u(rng), 0.5 + spread * (u(rng) - 0.5));
    }
  }
  const double R0 = 0.05 + 0.1 * u(rng);
  const rgg::ClusterSet classes = pipeline::cluster_within(pts, R0);
  const pipeline::Hyperplane plane = pipeline::fit_hyperplane(pts);
  return pipeline::detect(pts, classes, plane, R0);
}

}  // namespace hexsep::sv_oracle
