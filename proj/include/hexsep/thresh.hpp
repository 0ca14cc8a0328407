#pragma once

#include <cstdint>
#include <optional>

namespace hexsep::thresh {

/// Critical site probability of hexagonal-lattice percolation, 1 - 2 sin(pi/18).
double critical_probability();

/// Minimum number of hexagons partitioning the square into N^2 classes of
/// M^2 occupied hexagons: M^2 + 2M(N-1)^2. Requires 1 <= N <= M.
std::int64_t hex_count(std::int64_t M, std::int64_t N);

/// Circumradius bound R(M,N) = 1 / (2 sqrt(S(M,N))).
double circumradius(std::int64_t M, std::int64_t N);

/// Real root of M^2 / S(M,N) = rho in N, i.e. 1 + sqrt(M (1 - rho) / (2 rho)).
double class_root(std::int64_t M, double rho);

/// Expected class count K = N^2 with N = ceil(class_root), clamped to N <= M.
/// Requires 0 < rho <= p_c.
std::int64_t expected_classes(std::int64_t M, double rho);

/// Nearest integer to the root of M^2 + 2M(N-1)^2 - 2M^2 = 0.
std::int64_t majority_N(std::int64_t M);

/// Midpoint of R(M,N) and 1/(2N).
double estimate_r0_star(std::int64_t M, std::int64_t N);

/// 1/(2N) - R(M,N); throws std::domain_error when not positive.
double interval_length(std::int64_t M, std::int64_t N);

/// Order-of-magnitude continuum threshold sqrt(ln n / n), n >= 2.
double continuum_rc(std::int64_t n);

struct ThresholdParams {
  std::int64_t M = 0;
  std::int64_t N = 0;
  std::optional<double> rho;
  std::optional<std::int64_t> K;  ///< expected_classes(M, rho) when rho is set
  std::int64_t S = 0;
  double R = 0.0;
  double B = 0.0;
  double r0_star = 0.0;
  double delta_star = 0.0;
  double p_c = 0.0;
};

/// Bundles every closed form for (M, N). When `rho` is given, K is filled in.
ThresholdParams make_params(std::int64_t M, std::int64_t N, std::optional<double> rho = {});

}  // namespace hexsep::thresh
