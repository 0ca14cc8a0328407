#pragma once

#include "hexsep/mc.hpp"
#include "hexsep/pipeline.hpp"
#include "hexsep/sv.hpp"
#include "hexsep/thresh.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hexsep::io {

inline constexpr const char* kVersion = "hexsep 0.1.0";

using Json = nlohmann::ordered_json;

/// Reads comma-delimited numeric records. Blank lines are skipped; every
/// record must have the width of the first. Throws pipeline::IngestError
/// naming the offending (1-based, file-line) row and column.
Eigen::MatrixXd read_csv(std::istream& in, bool header, char delimiter = ',');

/// Shortest round-trip decimal text for a double.
std::string format_double(double value);

/// One line of a Monte Carlo curve.
struct CurveRecord {
  double n = 0.0;  ///< n, or lambda for a Poisson node process
  double rho = 0.0;
  rgg::Mode mode = rgg::Mode::continuum;
  double r = 0.0;
  mc::ProbEstimate estimate;
  std::uint64_t seed = 0;
};

inline constexpr const char* kCurveHeader = "n,rho,mode,r,trials,p_hat,ci_low,ci_high,seed";

void write_curve_csv(std::ostream& out, const std::vector<CurveRecord>& records);

Json to_json(const thresh::ThresholdParams& params);
Json to_json(const mc::ProbEstimate& est);
Json to_json(const pipeline::Transform& transform);
Json to_json(const rgg::ClusterSet& classes);
Json to_json(const pipeline::Hyperplane& plane);
Json to_json(const pipeline::AnomalyReport& report);
Json to_json(const pipeline::DetectorModel& model);
Json to_json(const sv::SupportVectorSet& svs, const pipeline::AnomalyReport& report);

}  // namespace hexsep::io
