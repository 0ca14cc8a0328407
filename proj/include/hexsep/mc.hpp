#pragma once

#include "hexsep/geom.hpp"
#include "hexsep/rgg.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace hexsep::mc {

enum class CountMode { fixed_n, poisson };

/// Node process on the unit square: either exactly `n_or_lambda` points or a
/// Poisson(`n_or_lambda`) count, placed uniformly.
struct NodeProcessSpec {
  CountMode count_mode = CountMode::fixed_n;
  double n_or_lambda = 0.0;
  std::uint64_t seed = 0;
};

/// Points drawn from `spec.seed` itself.
PointList sample(const NodeProcessSpec& spec);

/// Points for Monte Carlo trial `trial`. The stream is derived from
/// (spec.seed, trial) alone, so it does not depend on scheduling.
PointList sample_trial(const NodeProcessSpec& spec, std::uint64_t trial);

/// Success fraction with a 95% Wilson score interval.
struct ProbEstimate {
  double p_hat = 0.0;
  std::size_t successes = 0;
  std::size_t trials = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

ProbEstimate wilson_estimate(std::size_t successes, std::size_t trials);

/// Two estimates whose 95% intervals intersect.
bool ci_overlap(const ProbEstimate& a, const ProbEstimate& b);

struct ThresholdCurve {
  std::vector<double> radii;
  std::vector<ProbEstimate> p_hats;
  bool coupled = false;
};

/// Twice the largest pairwise distance; every point set is one cluster there.
double full_connectivity_radius(std::span<const Point2> points);

/// Property A at radius r for one point set. Empty sets never hold it.
bool holds_at(std::span<const Point2> points, double r, rgg::Mode mode, double rho);

/// Runs fn(k) for k in [0, count) on `workers` threads. Each k is handled by
/// exactly one call, so writes to slot k need no synchronisation.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// A fixed set of trial samples against which any number of radii and both
/// connectivity models are evaluated (common random numbers).
///
/// Radius searches run on the dyadic grid r_k = k * step, step the largest
/// power of two not above the requested tolerance; outcomes are cached per
/// (mode, step, k) so repeated searches reuse evaluations. Not thread-safe;
/// use one instance per driving thread.
class CoupledExperiment {
 public:
  CoupledExperiment(const NodeProcessSpec& spec, double rho, std::size_t trials,
                    std::size_t workers = 1);

  const NodeProcessSpec& spec() const { return spec_; }
  double rho() const { return rho_; }
  std::size_t trials() const { return samples_.size(); }
  std::size_t workers() const { return workers_; }
  const PointList& trial_points(std::size_t t) const { return samples_[t]; }

  /// Per-trial indicator of property A at radius r.
  std::vector<std::uint8_t> outcomes(double r, rgg::Mode mode) const;

  ProbEstimate estimate(double r, rgg::Mode mode) const;

  ThresholdCurve curve(std::span<const double> radii, rgg::Mode mode) const;

  /// Smallest grid radius with p_hat >= eps, found by bisection. Throws
  /// std::runtime_error when even the bracket top does not reach eps.
  double r_eps(double eps, rgg::Mode mode, double tol);

  /// Top of the search bracket: property A holds for every non-empty sample.
  static double search_ceiling(rgg::Mode mode);

  /// Grid spacing used for tolerance `tol`.
  static double grid_step(double tol);

 private:
  double grid_probe(std::int64_t k, double step, rgg::Mode mode);

  NodeProcessSpec spec_;
  double rho_;
  std::size_t workers_;
  std::vector<PointList> samples_;
  std::map<std::tuple<int, double, std::int64_t>, double> probe_cache_;
};

ProbEstimate estimate_prob(const NodeProcessSpec& spec, double rho, double r, rgg::Mode mode,
                           std::size_t trials, std::size_t workers = 1);

/// Requires sorted radii. Every radius sees the same trial samples.
ThresholdCurve threshold_curve(const NodeProcessSpec& spec, double rho, rgg::Mode mode,
                               std::span<const double> radii, std::size_t trials,
                               std::size_t workers = 1);

double estimate_r_eps(const NodeProcessSpec& spec, double rho, rgg::Mode mode, double eps,
                      std::size_t trials, double tol, std::size_t workers = 1);

/// r(1 - eps) - r(eps) on one set of samples; eps in (0, 1/2).
double estimate_delta(const NodeProcessSpec& spec, double rho, rgg::Mode mode, double eps,
                      std::size_t trials, double tol, std::size_t workers = 1);

struct ModelComparison {
  ProbEstimate continuum;
  ProbEstimate hex;
};

/// Both models on identical samples. Throws std::logic_error if some trial
/// satisfies the hex property without the continuum one.
ModelComparison compare_models(const NodeProcessSpec& spec, double rho, double r,
                               std::size_t trials, std::size_t workers = 1);

}  // namespace hexsep::mc
