#include "hexsep/cli.hpp"

#include "hexsep/io.hpp"
#include "hexsep/mc.hpp"
#include "hexsep/pipeline.hpp"
#include "hexsep/sv.hpp"
#include "hexsep/thresh.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace hexsep::cli {
namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  std::string config;
};

struct ThresholdArgs {
  std::int64_t M = 0;
  std::optional<std::int64_t> N;
  std::optional<double> rho;
  bool json = false;
};

struct SimulateArgs {
  double n = 0.0;
  bool poisson = false;
  double rho = 0.6;
  std::string mode = "both";
  std::vector<double> radii;
  std::size_t trials = 200;
  double eps = 0.1;
  double tol = 1e-3;
  std::string out;
  std::string summary;
};

struct PipelineArgs {
  std::string input;
  bool header = false;
  bool rank = false;
  std::optional<std::int64_t> M;
  std::optional<std::int64_t> N;
  std::optional<double> rho;
  double gamma = 0.5;
  std::string out;
};

/// Thrown for argument combinations CLI11 cannot validate on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const Common& common) {
  if (common.seed) return *common.seed;
  if (const char* env = std::getenv("HEXSEP_SEED"); env != nullptr && *env != '\0') {
    std::size_t used = 0;
    std::uint64_t value = 0;
    try {
      value = std::stoull(env, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || env[used] != '\0') throw UsageError(std::string("HEXSEP_SEED is not an integer: ") + env);
    return value;
  }
  return kDefaultSeed;
}

// Result sink: a file when a path is given, else the fallback stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

// ---- threshold -------------------------------------------------------------

int cmd_threshold(const ThresholdArgs& a, std::ostream& out) {
  std::int64_t N = 0;
  if (a.N) {
    N = *a.N;
  } else if (a.rho) {
    N = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(thresh::expected_classes(a.M, *a.rho)))));
  } else {
    N = std::clamp<std::int64_t>(thresh::majority_N(a.M), 1, a.M);
  }
  const thresh::ThresholdParams p = thresh::make_params(a.M, N, a.rho);
  if (a.json) {
    io::Json doc;
    doc["version"] = io::kVersion;
    doc["threshold"] = io::to_json(p);
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  out << "M=" << p.M << " N=" << p.N << " S=" << p.S << " R=" << io::format_double(p.R)
      << " B=" << io::format_double(p.B) << " p_c=" << io::format_double(p.p_c);
  if (p.K) out << " rho=" << io::format_double(*p.rho) << " K=" << *p.K;
  out << " r0_star=" << io::format_double(p.r0_star) << " delta_star=" << io::format_double(p.delta_star) << '\n';
  return kExitOk;
}

// ---- simulate --------------------------------------------------------------

std::vector<rgg::Mode> modes_for(const std::string& text) {
  if (text == "both") return {rgg::Mode::continuum, rgg::Mode::hex};
  return {rgg::parse_mode(text)};
}

// Coupled checks on one radius sweep: per-trial monotonicity in r for the
// continuum model and, when both modes ran, hex success implying continuum
// success. Hex grids at different radii are unrelated, so the hex outcome is
// not monotone per trial.
void assert_coupled(const std::vector<std::vector<std::vector<std::uint8_t>>>& outcomes,
                    const std::vector<rgg::Mode>& modes) {
  for (std::size_t m = 0; m < modes.size(); ++m) {
    if (modes[m] != rgg::Mode::continuum) continue;
    for (std::size_t k = 1; k < outcomes[m].size(); ++k) {
      for (std::size_t t = 0; t < outcomes[m][k].size(); ++t) {
        if (outcomes[m][k - 1][t] > outcomes[m][k][t]) {
          throw std::logic_error("coupled monotonicity violated in trial " + std::to_string(t));
        }
      }
    }
  }
  if (modes.size() == 2) {
    for (std::size_t k = 0; k < outcomes[0].size(); ++k) {
      for (std::size_t t = 0; t < outcomes[0][k].size(); ++t) {
        if (outcomes[1][k][t] > outcomes[0][k][t]) {
          throw std::logic_error("hex success without continuum success in trial " + std::to_string(t));
        }
      }
    }
  }
}

int cmd_simulate(const SimulateArgs& a, const Common& common, std::ostream& out, std::ostream& err) {
  if (a.radii.empty()) throw UsageError("--radii needs at least one radius");
  const std::uint64_t seed = resolve_seed(common);
  const auto modes = modes_for(a.mode);

  std::vector<double> radii = a.radii;
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  const mc::NodeProcessSpec spec{a.poisson ? mc::CountMode::poisson : mc::CountMode::fixed_n, a.n, seed};
  mc::CoupledExperiment experiment(spec, a.rho, a.trials, common.workers);

  std::vector<std::vector<std::vector<std::uint8_t>>> outcomes(modes.size());
  std::vector<io::CurveRecord> records;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    for (double r : radii) {
      outcomes[m].push_back(experiment.outcomes(r, modes[m]));
      const auto& o = outcomes[m].back();
      const auto successes = static_cast<std::size_t>(std::count(o.begin(), o.end(), std::uint8_t{1}));
      records.push_back({a.n, a.rho, modes[m], r, mc::wilson_estimate(successes, o.size()), seed});
    }
  }
  assert_coupled(outcomes, modes);

  {
    Sink csv(a.out, out);
    io::write_curve_csv(csv.get(), records);
  }

  io::Json summary;
  summary["version"] = io::kVersion;
  summary["n"] = a.n;
  summary["count_mode"] = a.poisson ? "poisson" : "fixed_n";
  summary["rho"] = a.rho;
  summary["eps"] = a.eps;
  summary["trials"] = a.trials;
  summary["seed"] = seed;
  summary["tol"] = mc::CoupledExperiment::grid_step(a.tol);
  summary["coupled_checks"] = "passed";
  io::Json per_mode;
  for (rgg::Mode mode : modes) {
    const double lo = experiment.r_eps(a.eps, mode, a.tol);
    const double mid = experiment.r_eps(0.5, mode, a.tol);
    const double hi = experiment.r_eps(1.0 - a.eps, mode, a.tol);
    io::Json j;
    j["r_eps"] = lo;
    j["r_half"] = mid;
    j["r_one_minus_eps"] = hi;
    j["delta"] = hi - lo;
    per_mode[std::string(rgg::to_string(mode))] = j;
  }
  summary["estimates"] = per_mode;
  Sink json(a.summary, err);
  json.get() << summary.dump(2) << '\n';
  return kExitOk;
}

// ---- cluster / detect / sv -------------------------------------------------

struct PipelineRun {
  pipeline::Dataset data;
  std::int64_t M = 0;
  std::int64_t N = 0;
  pipeline::Regularized classes;
};

PipelineRun run_clustering(const PipelineArgs& a) {
  PipelineRun run;
  Eigen::MatrixXd rows;
  if (a.input.empty() || a.input == "-") {
    rows = io::read_csv(std::cin, a.header);
  } else {
    std::ifstream in(a.input);
    if (!in) throw pipeline::IngestError("cannot open " + a.input);
    rows = io::read_csv(in, a.header);
  }
  run.data = pipeline::ingest(rows, {a.rank});
  const auto n = static_cast<double>(run.data.projected.size());
  run.M = a.M ? *a.M : std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(std::sqrt(n))));
  if (a.N) {
    run.N = *a.N;
  } else if (a.rho) {
    run.N = static_cast<std::int64_t>(
        std::llround(std::sqrt(static_cast<double>(thresh::expected_classes(run.M, *a.rho)))));
  } else {
    run.N = std::clamp<std::int64_t>(thresh::majority_N(run.M), 1, run.M);
  }
  if (run.N < 1 || run.N > run.M) throw std::domain_error("N must satisfy 1 <= N <= M (N > M given)");
  run.classes = pipeline::regularize(run.data.projected, run.M, run.N);
  return run;
}

io::Json clustering_json(const PipelineRun& run) {
  io::Json j;
  j["M"] = run.M;
  j["N"] = run.N;
  j["first_pass_count"] = run.classes.first_pass_count;
  j["N0"] = run.classes.N0;
  j["R0"] = run.classes.R0;
  j["classes"] = io::to_json(run.classes.classes);
  return j;
}

int cmd_cluster(const PipelineArgs& a, std::ostream& out) {
  const PipelineRun run = run_clustering(a);
  io::Json doc;
  doc["version"] = io::kVersion;
  doc["transform"] = io::to_json(run.data.transform);
  doc["clusters"] = clustering_json(run);
  Sink sink(a.out, out);
  sink.get() << doc.dump(2) << '\n';
  return kExitOk;
}

int cmd_detect(const PipelineArgs& a, bool sv_only, std::ostream& out, std::ostream& err) {
  const PipelineRun run = run_clustering(a);
  const auto& points = run.data.projected;
  const pipeline::Hyperplane plane = pipeline::fit_hyperplane(points);
  const pipeline::AnomalyReport report = pipeline::detect(points, run.classes.classes, plane, run.classes.R0);

  io::Json doc;
  doc["version"] = io::kVersion;
  if (!sv_only) {
    doc["transform"] = io::to_json(run.data.transform);
    doc["clusters"] = clustering_json(run);
    doc["hyperplane"] = io::to_json(plane);
    doc["anomalies"] = io::to_json(report);
  }
  int code = kExitOk;
  if (!report.separable()) {
    doc["detector"] = nullptr;
    doc["support_vectors"] = nullptr;
    err << "not separable: no anomalies at R0 = " << io::format_double(run.classes.R0) << '\n';
    code = kExitNotSeparable;
  } else {
    const pipeline::DetectorModel model = pipeline::compute_shift(report, a.gamma);
    if (!sv_only) {
      io::Json detector = io::to_json(model);
      io::Json labels = io::Json::array();
      for (const Point2& p : points) labels.push_back(pipeline::to_string(pipeline::classify(model, p)));
      detector["labels"] = labels;
      doc["detector"] = detector;
    }
    doc["support_vectors"] = io::to_json(sv::extract_support_vectors(report, model, run.classes.N0), report);
  }
  Sink sink(a.out, out);
  sink.get() << doc.dump(2) << '\n';
  return code;
}

// ---- config ----------------------------------------------------------------

bool given(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& s) {
    return s == flag || s.rfind(flag + "=", 0) == 0;
  });
}

// Appends config entries for options of `sub` that the command line leaves
// unset. Keys unknown to the subcommand are ignored.
std::vector<std::string> merge_config(std::vector<std::string> args, const std::string& path, CLI::App& app,
                                      CLI::App* sub) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  for (const auto& [key, value] : parse_config(in)) {
    const std::string flag = "--" + key;
    if (given(args, flag)) continue;
    const bool known = (sub != nullptr && sub->get_option_no_throw(flag) != nullptr) ||
                       app.get_option_no_throw(flag) != nullptr;
    if (known) args.push_back(flag + "=" + value);
  }
  return args;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  const auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string();
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key=value");
    }
    entries.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return entries;
}

int run(const std::vector<std::string>& input_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hexagonal-lattice approximation of random geometric graphs and hyperplane anomaly detection",
               "hexsep"};
  app.set_version_flag("--version", io::kVersion);
  app.require_subcommand(1);

  Common common;
  ThresholdArgs th;
  SimulateArgs sim;
  PipelineArgs pipe;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "Master seed (default: HEXSEP_SEED, else " +
                                               std::to_string(kDefaultSeed) + ")");
    sub->add_option("--workers", common.workers, "Monte Carlo worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--config", common.config, "File of key=value option defaults");
  };
  const auto add_pipeline = [&](CLI::App* sub, bool with_gamma) {
    add_common(sub);
    sub->add_option("input", pipe.input, "Numeric CSV (default: stdin)");
    sub->add_flag("--header", pipe.header, "First non-blank line is a header");
    sub->add_flag("--rank", pipe.rank, "Rank-uniformize each axis before scaling");
    sub->add_option("--M", pipe.M, "Hexagons per class side (default: ceil(sqrt(n)))")->check(CLI::Range(1, 1 << 20));
    sub->add_option("--N", pipe.N, "Classes per side (default from --rho, else the majority root)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--rho", pipe.rho, "Occupation probability used to pick N")->check(CLI::Range(0.0, 1.0));
    if (with_gamma) sub->add_option("--gamma", pipe.gamma, "Shift fraction in (0, 1)");
    sub->add_option("-o,--out", pipe.out, "Report path (default: stdout)");
  };

  CLI::App* threshold = app.add_subcommand("threshold", "Closed-form threshold parameters");
  add_common(threshold);
  threshold->add_option("--M", th.M, "Hexagons per class side")->required();
  threshold->add_option("--N", th.N, "Classes per side");
  threshold->add_option("--rho", th.rho, "Occupation probability in (0, p_c]");
  threshold->add_flag("--json", th.json, "Emit JSON instead of a key=value row");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimates of the property A curve");
  add_common(simulate);
  simulate->add_option("--n", sim.n, "Point count (or Poisson mean with --poisson)")
      ->required()
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--poisson", sim.poisson, "Poisson point count with mean --n");
  simulate->add_option("--rho", sim.rho, "Component fraction in (0.5, 1)");
  simulate->add_option("--mode", sim.mode, "continuum | hex | both")
      ->check(CLI::IsMember({"continuum", "hex", "both"}));
  simulate->add_option("--radii", sim.radii, "Comma-separated radii")->delimiter(',');
  simulate->add_option("--trials", sim.trials, "Trials per radius")->check(CLI::PositiveNumber);
  simulate->add_option("--eps", sim.eps, "Threshold level in (0, 1/2)");
  simulate->add_option("--tol", sim.tol, "Radius search tolerance")->check(CLI::PositiveNumber);
  simulate->add_option("-o,--out", sim.out, "Curve CSV path (default: stdout)");
  simulate->add_option("--summary", sim.summary, "Summary JSON path (default: stderr)");

  CLI::App* cluster = app.add_subcommand("cluster", "Project a CSV and build radius-bounded classes");
  add_pipeline(cluster, false);
  CLI::App* detect = app.add_subcommand("detect", "Full anomaly-detection report");
  add_pipeline(detect, true);
  CLI::App* svcmd = app.add_subcommand("sv", "Support-vector report");
  add_pipeline(svcmd, true);

  try {
    std::vector<std::string> args = input_args;
    // Config defaults are merged before parsing so that flags win.
    const auto cfg = std::find_if(args.begin(), args.end(), [](const std::string& s) {
      return s == "--config" || s.rfind("--config=", 0) == 0;
    });
    if (cfg != args.end()) {
      std::string path;
      if (*cfg == "--config") {
        if (std::next(cfg) == args.end()) throw UsageError("--config needs a path");
        path = *std::next(cfg);
      } else {
        path = cfg->substr(std::string("--config=").size());
      }
      CLI::App* sub = nullptr;
      for (const std::string& s : args) {
        if (s.empty() || s.front() == '-') continue;
        sub = app.get_subcommand_ptr(s).get();
        break;
      }
      args = merge_config(args, path, app, sub);
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*threshold) return cmd_threshold(th, out);
    if (*simulate) {
      if (!(sim.rho > 0.5 && sim.rho < 1.0)) throw UsageError("--rho must lie in (0.5, 1)");
      if (!(sim.eps > 0.0 && sim.eps < 0.5)) throw UsageError("--eps must lie in (0, 1/2)");
      return cmd_simulate(sim, common, out, err);
    }
    if (*cluster || *detect || *svcmd) {
      if (!(pipe.gamma > 0.0 && pipe.gamma < 1.0)) throw UsageError("--gamma must lie in (0, 1)");
      if (*cluster) return cmd_cluster(pipe, out);
      return cmd_detect(pipe, static_cast<bool>(*svcmd), out, err);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const pipeline::IngestError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitError;
  } catch (const pipeline::NotSeparable& e) {
    err << "not separable: " << e.what() << '\n';
    return kExitNotSeparable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace hexsep::cli
