#include "hexsep/mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <stdexcept>
#include <thread>

namespace hexsep::mc {
namespace {

constexpr double kZ95 = 1.959963984540054;

std::mt19937_64 make_engine(std::initializer_list<std::uint64_t> words) {
  std::vector<std::uint32_t> seeds;
  for (std::uint64_t w : words) {
    seeds.push_back(static_cast<std::uint32_t>(w & 0xffffffffu));
    seeds.push_back(static_cast<std::uint32_t>(w >> 32));
  }
  std::seed_seq seq(seeds.begin(), seeds.end());
  return std::mt19937_64(seq);
}

PointList draw(const NodeProcessSpec& spec, std::mt19937_64& engine) {
  if (!(spec.n_or_lambda >= 0.0) || !std::isfinite(spec.n_or_lambda)) {
    throw std::domain_error("node process size must be finite and non-negative");
  }
  std::size_t count = 0;
  if (spec.count_mode == CountMode::fixed_n) {
    count = static_cast<std::size_t>(std::llround(spec.n_or_lambda));
  } else {
    if (!(spec.n_or_lambda > 0.0)) throw std::domain_error("Poisson intensity must be positive");
    count = static_cast<std::size_t>(std::poisson_distribution<std::int64_t>(spec.n_or_lambda)(engine));
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointList points(count);
  for (Point2& p : points) {
    const double x = unit(engine);
    p = Point2(x, unit(engine));
  }
  return points;
}

void require_rho(double rho) {
  if (!(rho > 0.5 && rho < 1.0)) throw std::domain_error("rho must lie in (1/2, 1)");
}

void require_trials(std::size_t trials) {
  if (trials < 1) throw std::domain_error("trials must be >= 1");
}

}  // namespace

PointList sample(const NodeProcessSpec& spec) {
  auto engine = make_engine({spec.seed});
  return draw(spec, engine);
}

PointList sample_trial(const NodeProcessSpec& spec, std::uint64_t trial) {
  auto engine = make_engine({spec.seed, trial, 0x747269616cULL});
  return draw(spec, engine);
}

ProbEstimate wilson_estimate(std::size_t successes, std::size_t trials) {
  require_trials(trials);
  if (successes > trials) throw std::invalid_argument("successes exceed trials");
  ProbEstimate est;
  est.successes = successes;
  est.trials = trials;
  const auto n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ95 / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  est.p_hat = p;
  est.ci_low = std::clamp(centre - half, 0.0, p);
  est.ci_high = std::clamp(centre + half, p, 1.0);
  return est;
}

bool ci_overlap(const ProbEstimate& a, const ProbEstimate& b) {
  return a.ci_low <= b.ci_high && b.ci_low <= a.ci_high;
}

double full_connectivity_radius(std::span<const Point2> points) {
  double best = 0.0;
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      best = std::max(best, (points[a] - points[b]).squaredNorm());
    }
  }
  return 2.0 * std::sqrt(best);
}

bool holds_at(std::span<const Point2> points, double r, rgg::Mode mode, double rho) {
  require_rho(rho);
  if (points.empty()) return false;
  const auto n = static_cast<double>(points.size());
  // Smallest cluster size k with k / n >= rho, using the same comparison as
  // rgg::holds_A.
  auto k = static_cast<std::size_t>(std::ceil(rho * n));
  while (k > 1 && static_cast<double>(k - 1) / n >= rho) --k;
  while (static_cast<double>(k) / n < rho) ++k;
  return rgg::component_reaches(points, r, mode, k);
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = count * w / workers;
      const std::size_t end = count * (w + 1) / workers;
      pool.emplace_back([&, begin, end] {
        try {
          for (std::size_t k = begin; k < end; ++k) fn(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

CoupledExperiment::CoupledExperiment(const NodeProcessSpec& spec, double rho, std::size_t trials,
                                     std::size_t workers)
    : spec_(spec), rho_(rho), workers_(std::max<std::size_t>(workers, 1)) {
  require_rho(rho);
  require_trials(trials);
  samples_.resize(trials);
  parallel_for(trials, workers_, [&](std::size_t t) { samples_[t] = sample_trial(spec_, t); });
}

std::vector<std::uint8_t> CoupledExperiment::outcomes(double r, rgg::Mode mode) const {
  std::vector<std::uint8_t> out(samples_.size());
  parallel_for(samples_.size(), workers_,
               [&](std::size_t t) { out[t] = holds_at(samples_[t], r, mode, rho_) ? 1 : 0; });
  return out;
}

ProbEstimate CoupledExperiment::estimate(double r, rgg::Mode mode) const {
  const auto hits = outcomes(r, mode);
  return wilson_estimate(static_cast<std::size_t>(std::count(hits.begin(), hits.end(), 1)), hits.size());
}

ThresholdCurve CoupledExperiment::curve(std::span<const double> radii, rgg::Mode mode) const {
  if (!std::is_sorted(radii.begin(), radii.end())) throw std::invalid_argument("radii must be sorted");
  ThresholdCurve out;
  out.radii.assign(radii.begin(), radii.end());
  out.coupled = true;
  for (double r : radii) out.p_hats.push_back(estimate(r, mode));
  return out;
}

double CoupledExperiment::search_ceiling(rgg::Mode mode) {
  // Continuum: twice the unit-square diagonal. Hex: circumradius 2 puts the
  // whole square inside cell (0, 0).
  return mode == rgg::Mode::continuum ? 3.0 : 8.0;
}

double CoupledExperiment::grid_step(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw std::domain_error("tol must be positive");
  return std::exp2(std::floor(std::log2(tol)));
}

double CoupledExperiment::grid_probe(std::int64_t k, double step, rgg::Mode mode) {
  const auto key = std::make_tuple(static_cast<int>(mode), step, k);
  if (auto it = probe_cache_.find(key); it != probe_cache_.end()) return it->second;
  const double p = estimate(static_cast<double>(k) * step, mode).p_hat;
  probe_cache_.emplace(key, p);
  return p;
}

double CoupledExperiment::r_eps(double eps, rgg::Mode mode, double tol) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("eps must lie in (0, 1)");
  const double step = grid_step(tol);
  std::int64_t lo = 1;
  auto hi = static_cast<std::int64_t>(std::ceil(search_ceiling(mode) / step));
  if (grid_probe(lo, step, mode) >= eps) return step;
  if (grid_probe(hi, step, mode) < eps) {
    throw std::runtime_error("r_eps: probability " + std::to_string(eps) +
                             " not reached within the search bracket");
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (grid_probe(mid, step, mode) >= eps) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return static_cast<double>(hi) * step;
}

ProbEstimate estimate_prob(const NodeProcessSpec& spec, double rho, double r, rgg::Mode mode,
                           std::size_t trials, std::size_t workers) {
  if (!(r > 0.0)) throw std::domain_error("radius must be positive");
  return CoupledExperiment(spec, rho, trials, workers).estimate(r, mode);
}

ThresholdCurve threshold_curve(const NodeProcessSpec& spec, double rho, rgg::Mode mode,
                               std::span<const double> radii, std::size_t trials,
                               std::size_t workers) {
  return CoupledExperiment(spec, rho, trials, workers).curve(radii, mode);
}

double estimate_r_eps(const NodeProcessSpec& spec, double rho, rgg::Mode mode, double eps,
                      std::size_t trials, double tol, std::size_t workers) {
  CoupledExperiment exp(spec, rho, trials, workers);
  return exp.r_eps(eps, mode, tol);
}

double estimate_delta(const NodeProcessSpec& spec, double rho, rgg::Mode mode, double eps,
                      std::size_t trials, double tol, std::size_t workers) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::domain_error("eps must lie in (0, 1/2)");
  CoupledExperiment exp(spec, rho, trials, workers);
  const double low = exp.r_eps(eps, mode, tol);
  const double high = exp.r_eps(1.0 - eps, mode, tol);
  return high - low;
}

ModelComparison compare_models(const NodeProcessSpec& spec, double rho, double r,
                               std::size_t trials, std::size_t workers) {
  if (!(r > 0.0)) throw std::domain_error("radius must be positive");
  CoupledExperiment exp(spec, rho, trials, workers);
  const auto cont = exp.outcomes(r, rgg::Mode::continuum);
  const auto hex = exp.outcomes(r, rgg::Mode::hex);
  for (std::size_t t = 0; t < cont.size(); ++t) {
    if (hex[t] && !cont[t]) {
      throw std::logic_error("trial " + std::to_string(t) +
                             ": hex property holds without the continuum property");
    }
  }
  const auto count = [](const std::vector<std::uint8_t>& v) {
    return static_cast<std::size_t>(std::count(v.begin(), v.end(), 1));
  };
  return {wilson_estimate(count(cont), cont.size()), wilson_estimate(count(hex), hex.size())};
}

}  // namespace hexsep::mc
