#include "hexsep/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace hexsep::io {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, delimiter)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delimiter) out.emplace_back();
  return out;
}

Json point_json(const Point2& p) { return Json::array({p.x(), p.y()}); }

template <typename Vec>
Json index_array(const Vec& v) {
  Json out = Json::array();
  for (auto k : v) out.push_back(k);
  return out;
}

}  // namespace

Eigen::MatrixXd read_csv(std::istream& in, bool header, char delimiter) {
  std::vector<std::vector<double>> records;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto cells = split(line, delimiter);
    if (!records.empty() && cells.size() != records.front().size()) {
      throw pipeline::IngestError("row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                      " fields, expected " + std::to_string(records.front().size()),
                                  line_no);
    }
    std::vector<double> values;
    values.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string& text = cells[c];
      double value = 0.0;
      const char* begin = text.data();
      const char* end = begin + text.size();
      if (!text.empty() && *begin == '+') ++begin;
      const auto [ptr, ec] = std::from_chars(begin, end, value);
      if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw pipeline::IngestError("row " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                        ": non-numeric value '" + text + "'",
                                    line_no, c + 1);
      }
      values.push_back(value);
    }
    records.push_back(std::move(values));
  }
  if (records.empty()) throw pipeline::IngestError("no data rows");

  Eigen::MatrixXd out(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(records.front().size()));
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (std::size_t c = 0; c < records[r].size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = records[r][c];
    }
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRecord>& records) {
  out << kCurveHeader << '\n';
  for (const CurveRecord& rec : records) {
    out << format_double(rec.n) << ',' << format_double(rec.rho) << ',' << rgg::to_string(rec.mode) << ','
        << format_double(rec.r) << ',' << rec.estimate.trials << ',' << format_double(rec.estimate.p_hat) << ','
        << format_double(rec.estimate.ci_low) << ',' << format_double(rec.estimate.ci_high) << ',' << rec.seed
        << '\n';
  }
}

Json to_json(const thresh::ThresholdParams& p) {
  Json j;
  j["M"] = p.M;
  j["N"] = p.N;
  j["S"] = p.S;
  j["R"] = p.R;
  j["B"] = p.B;
  j["p_c"] = p.p_c;
  j["rho"] = p.rho ? Json(*p.rho) : Json(nullptr);
  j["K"] = p.K ? Json(*p.K) : Json(nullptr);
  j["r0_star"] = p.r0_star;
  j["delta_star"] = p.delta_star;
  return j;
}

Json to_json(const mc::ProbEstimate& est) {
  Json j;
  j["p_hat"] = est.p_hat;
  j["successes"] = est.successes;
  j["trials"] = est.trials;
  j["ci_low"] = est.ci_low;
  j["ci_high"] = est.ci_high;
  return j;
}

Json to_json(const pipeline::Transform& tf) {
  Json j;
  j["center"] = Json(std::vector<double>(tf.center.data(), tf.center.data() + tf.center.size()));
  Json axes = Json::array();
  for (Eigen::Index a = 0; a < tf.axes.rows(); ++a) {
    std::vector<double> row(static_cast<std::size_t>(tf.axes.cols()));
    for (Eigen::Index c = 0; c < tf.axes.cols(); ++c) row[static_cast<std::size_t>(c)] = tf.axes(a, c);
    axes.push_back(row);
  }
  j["axes"] = axes;
  j["variances"] = Json::array({tf.variances(0), tf.variances(1)});
  j["lower"] = Json::array({tf.lower(0), tf.lower(1)});
  j["range"] = Json::array({tf.range(0), tf.range(1)});
  j["rank_uniformized"] = tf.rank_uniformized;
  return j;
}

Json to_json(const rgg::ClusterSet& classes) {
  Json j;
  j["count"] = classes.cluster_count();
  j["assignment"] = index_array(classes.assignment);
  j["sizes"] = index_array(classes.sizes);
  Json centers = Json::array();
  for (const Point2& c : classes.centers) centers.push_back(point_json(c));
  j["centers"] = centers;
  return j;
}

Json to_json(const pipeline::Hyperplane& plane) {
  Json j;
  j["w"] = point_json(plane.w);
  j["theta"] = plane.theta;
  return j;
}

Json to_json(const pipeline::AnomalyReport& report) {
  Json j;
  j["R0"] = report.R0;
  j["separable"] = report.separable();
  j["anomalous_classes"] = index_array(report.anomalous_classes);
  j["anomalous"] = index_array(report.anomalous);
  j["regular_count"] = report.regular.size();
  j["distances"] = report.distances;
  j["class_distances"] = report.class_distances;
  return j;
}

Json to_json(const pipeline::DetectorModel& m) {
  Json j;
  j["gamma"] = m.gamma;
  j["d_theta"] = m.d_theta;
  j["theta_gamma"] = m.theta_gamma;
  j["reflected_theta_gamma"] = -m.theta_gamma;
  j["x_star"] = m.x_star;
  j["y_hat"] = m.y_hat ? Json(*m.y_hat) : Json(nullptr);
  j["side"] = m.side;
  j["w_shift"] = point_json(m.w_shift);
  return j;
}

Json to_json(const sv::SupportVectorSet& svs, const pipeline::AnomalyReport& report) {
  const auto with_distances = [&](const std::vector<std::size_t>& idx) {
    Json arr = Json::array();
    for (std::size_t k : idx) {
      Json e;
      e["index"] = k;
      e["distance"] = report.distances[k];
      arr.push_back(e);
    }
    return arr;
  };
  Json j;
  j["x_star"] = svs.x_star;
  j["anomaly_side"] = with_distances(svs.anomaly_side);
  j["regular_side"] = with_distances(svs.regular_side);
  j["equivalency_class"] = with_distances(svs.equivalency_class);
  return j;
}

}  // namespace hexsep::io
