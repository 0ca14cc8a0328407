#include "hexsep/thresh.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hexsep::thresh {
namespace {

void require_MN(std::int64_t M, std::int64_t N) {
  if (M < 1) throw std::domain_error("M must be >= 1");
  if (N < 1) throw std::domain_error("N must be >= 1");
  if (N > M) {
    throw std::domain_error("N > M (N=" + std::to_string(N) + ", M=" + std::to_string(M) + ")");
  }
}

}  // namespace

double critical_probability() { return 1.0 - 2.0 * std::sin(std::numbers::pi / 18.0); }

std::int64_t hex_count(std::int64_t M, std::int64_t N) {
  require_MN(M, N);
  return M * M + 2 * M * (N - 1) * (N - 1);
}

double circumradius(std::int64_t M, std::int64_t N) {
  return 1.0 / (2.0 * std::sqrt(static_cast<double>(hex_count(M, N))));
}

double class_root(std::int64_t M, double rho) {
  if (M < 1) throw std::domain_error("M must be >= 1");
  if (!(rho > 0.0 && rho <= critical_probability())) {
    throw std::domain_error("rho must lie in (0, p_c]");
  }
  return 1.0 + std::sqrt(static_cast<double>(M) * (1.0 - rho) / (2.0 * rho));
}

std::int64_t expected_classes(std::int64_t M, double rho) {
  // Roots that are integers in exact arithmetic may land a few ulps high.
  const double root = class_root(M, rho);
  auto N = static_cast<std::int64_t>(std::ceil(root - 1e-9 * root));
  if (N > M) N = M;
  return N * N;
}

std::int64_t majority_N(std::int64_t M) {
  if (M < 1) throw std::domain_error("M must be >= 1");
  return std::llround(1.0 + std::sqrt(static_cast<double>(M) / 2.0));
}

double estimate_r0_star(std::int64_t M, std::int64_t N) {
  const double R = circumradius(M, N);
  return (1.0 / (2.0 * static_cast<double>(N)) + R) / 2.0;
}

double interval_length(std::int64_t M, std::int64_t N) {
  const double delta = 1.0 / (2.0 * static_cast<double>(N)) - circumradius(M, N);
  if (!(delta > 0.0)) throw std::domain_error("1/(2N) <= R(M,N): (M, N) outside the threshold regime");
  return delta;
}

double continuum_rc(std::int64_t n) {
  if (n < 2) throw std::domain_error("n must be >= 2");
  const auto x = static_cast<double>(n);
  return std::sqrt(std::log(x) / x);
}

ThresholdParams make_params(std::int64_t M, std::int64_t N, std::optional<double> rho) {
  ThresholdParams p;
  p.M = M;
  p.N = N;
  p.S = hex_count(M, N);
  if (p.S <= N * N) throw std::domain_error("S(M,N) must exceed N^2");
  p.R = circumradius(M, N);
  p.B = 2.0 * p.R;
  p.r0_star = estimate_r0_star(M, N);
  p.delta_star = interval_length(M, N);
  p.p_c = critical_probability();
  if (rho) {
    p.rho = rho;
    p.K = expected_classes(M, *rho);
  }
  return p;
}

}  // namespace hexsep::thresh
