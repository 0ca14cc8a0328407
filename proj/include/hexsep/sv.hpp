#pragma once

#include "hexsep/pipeline.hpp"

#include <cstdint>
#include <vector>

namespace hexsep::sv {

/// Absolute tolerance for distance ties, in unit-square units.
inline constexpr double kTieTolerance = 1e-9;

struct SupportVectorSet {
  std::vector<std::size_t> anomaly_side;       ///< subset of X
  std::vector<std::size_t> regular_side;       ///< subset of the complement of X
  std::vector<std::size_t> equivalency_class;  ///< [x_star]
  std::size_t x_star = 0;
};

/// Boundary harvest over X, at most N0^2 rounds. Each round takes the
/// surviving anomalies closest to the shifted band edge (those within
/// tolerance of the minimum), then removes them together with the surviving
/// members of the class of the first one. The base plane stays fixed.
/// Returns an empty set when X is empty.
std::vector<std::size_t> extract_anomaly_side(const pipeline::AnomalyReport& report, double gamma,
                                              std::int64_t N0);

/// The mirror harvest over the regular points: each round takes the
/// survivors farthest from the base plane.
std::vector<std::size_t> extract_regular_side(const pipeline::AnomalyReport& report, double gamma,
                                              std::int64_t N0);

/// [x]: the anomalies attaining the minimal distance, plus every point whose
/// distance to the shifted plane w . z = theta + side * theta_gamma is at
/// most d_theta.
std::vector<std::size_t> equivalency_class(const pipeline::AnomalyReport& report,
                                           const pipeline::DetectorModel& model);

/// All three sets; throws pipeline::NotSeparable when X is empty.
SupportVectorSet extract_support_vectors(const pipeline::AnomalyReport& report,
                                         const pipeline::DetectorModel& model, std::int64_t N0);

}  // namespace hexsep::sv
