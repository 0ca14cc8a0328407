#pragma once

// Seeded planted-anomaly instances shared by unit and acceptance tests.

#include "hexsep/geom.hpp"
#include "hexsep/pipeline.hpp"
#include "hexsep/thresh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace hexsep::synthetic {

struct Instance {
  PointList points;
  std::vector<std::size_t> planted;  ///< indices of planted anomalies, ascending
  std::int64_t M = 0;
  std::int64_t N = 0;
  double R0 = 0.0;  ///< R(M, N0) the instance was designed for
};

/// A band of regular points of half-width R0/2 around a random line through
/// the centre of the square, plus a few anomalies at distance in
/// [2 R0, 6 R0] from it, all scaled by the given `R0`.
inline Instance planted_band_at(std::uint64_t seed, std::int64_t M, std::int64_t N, double R0) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Instance inst;
  inst.M = M;
  inst.N = N;
  inst.R0 = R0;

  const double angle = (u(rng) - 0.5) * 0.6;
  const Point2 dir(std::cos(angle), std::sin(angle));
  const Point2 normal(-dir.y(), dir.x());
  const Point2 centre(0.5, 0.5);

  const auto count = static_cast<int>(M * M);
  for (int k = 0; k < count; ++k) {
    const double t = (u(rng) - 0.5) * 0.8;
    const double s = (2 * u(rng) - 1) * 0.5 * R0;
    inst.points.push_back(centre + t * dir + s * normal);
  }
  const int anomalies = 2 + static_cast<int>(seed % 4);
  for (int k = 0; k < anomalies; ++k) {
    const double t = (u(rng) - 0.5) * 0.6;
    const double side = u(rng) < 0.5 ? -1.0 : 1.0;
    const double s = side * (2.0 * R0 + u(rng) * 4.0 * R0);
    const auto at = static_cast<std::size_t>(u(rng) * static_cast<double>(inst.points.size()));
    inst.points.insert(inst.points.begin() + static_cast<std::ptrdiff_t>(at), centre + t * dir + s * normal);
    for (std::size_t& p : inst.planted) {
      if (p >= at) ++p;
    }
    inst.planted.push_back(at);
  }
  std::sort(inst.planted.begin(), inst.planted.end());
  return inst;
}

/// planted_band_at with R0 equal to the R(M, N0) that regularization of the
/// instance itself produces. The geometry is rescaled until the two agree;
/// `R0` stays 0 when no fixed point is found.
inline Instance planted_band(std::uint64_t seed, std::int64_t M = 12, std::int64_t N = 3) {
  double R0 = thresh::circumradius(M, N);
  for (int it = 0; it < 16; ++it) {
    Instance inst = planted_band_at(seed, M, N, R0);
    const double actual = pipeline::regularize(inst.points, M, N).R0;
    if (actual == R0) return inst;
    R0 = actual;
  }
  Instance failed = planted_band_at(seed, M, N, R0);
  failed.R0 = 0.0;
  return failed;
}

}  // namespace hexsep::synthetic
