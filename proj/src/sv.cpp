#include "hexsep/sv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hexsep::sv {
namespace {

void require_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::domain_error("gamma must lie in (0, 1)");
}

std::int64_t round_budget(std::int64_t N0) {
  if (N0 < 1) throw std::domain_error("N0 must be >= 1");
  return N0 * N0;
}

// One removal loop over `pool`. `score` ranks candidates (lower is better)
// and the attainers within tolerance of the best score are harvested.
template <typename Score>
std::vector<std::size_t> harvest(const pipeline::AnomalyReport& report, std::vector<std::size_t> pool,
                                 std::int64_t rounds, Score&& score) {
  std::vector<std::size_t> picked;
  for (std::int64_t round = 0; round < rounds && !pool.empty(); ++round) {
    const auto scores = score(pool);
    const double best = *std::min_element(scores.begin(), scores.end());
    std::vector<std::size_t> hits;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (scores[k] <= best + kTieTolerance) hits.push_back(pool[k]);
    }
    const int cls = report.assignment[hits.front()];
    picked.insert(picked.end(), hits.begin(), hits.end());
    std::erase_if(pool, [&](std::size_t k) {
      return report.assignment[k] == cls || std::binary_search(hits.begin(), hits.end(), k);
    });
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

std::vector<std::size_t> extract_anomaly_side(const pipeline::AnomalyReport& report, double gamma,
                                              std::int64_t N0) {
  require_gamma(gamma);
  const std::int64_t rounds = round_budget(N0);
  if (report.anomalous.empty()) return {};

  double regular_max = 0.0;
  for (std::size_t k : report.regular) regular_max = std::max(regular_max, std::abs(report.distances[k]));

  return harvest(report, report.anomalous, rounds, [&](const std::vector<std::size_t>& pool) {
    // Shift for this round's minimiser, then distance of each survivor to the
    // shifted plane on its own side.
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t k : pool) nearest = std::min(nearest, std::abs(report.distances[k]));
    const double theta_gamma = nearest - gamma * (nearest - regular_max);
    std::vector<double> scores;
    scores.reserve(pool.size());
    for (std::size_t k : pool) scores.push_back(std::abs(std::abs(report.distances[k]) - theta_gamma));
    return scores;
  });
}

std::vector<std::size_t> extract_regular_side(const pipeline::AnomalyReport& report, double gamma,
                                              std::int64_t N0) {
  require_gamma(gamma);
  const std::int64_t rounds = round_budget(N0);
  return harvest(report, report.regular, rounds, [&](const std::vector<std::size_t>& pool) {
    std::vector<double> scores;
    scores.reserve(pool.size());
    for (std::size_t k : pool) scores.push_back(-std::abs(report.distances[k]));
    return scores;
  });
}

std::vector<std::size_t> equivalency_class(const pipeline::AnomalyReport& report,
                                           const pipeline::DetectorModel& model) {
  if (report.anomalous.empty()) return {};
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t k : report.anomalous) nearest = std::min(nearest, std::abs(report.distances[k]));

  const double plane_offset = model.side * model.theta_gamma;
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < report.distances.size(); ++k) {
    const double d = report.distances[k];
    const bool in_x = std::binary_search(report.anomalous.begin(), report.anomalous.end(), k);
    const bool attains = in_x && std::abs(d) <= nearest + kTieTolerance;
    const bool near_shift = std::abs(d - plane_offset) <= model.d_theta + kTieTolerance;
    if (attains || near_shift) out.push_back(k);
  }
  return out;
}

SupportVectorSet extract_support_vectors(const pipeline::AnomalyReport& report,
                                         const pipeline::DetectorModel& model, std::int64_t N0) {
  if (report.anomalous.empty()) throw pipeline::NotSeparable("no anomalies: nothing to support");
  SupportVectorSet out;
  out.anomaly_side = extract_anomaly_side(report, model.gamma, N0);
  out.regular_side = extract_regular_side(report, model.gamma, N0);
  out.equivalency_class = equivalency_class(report, model);
  out.x_star = model.x_star;
  return out;
}

}  // namespace hexsep::sv
