#include "hexsep/cli.hpp"

#include "synthetic.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace hexsep::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hexsep_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

const std::vector<std::string> kSim{"simulate", "--n", "60", "--radii", "0.1,0.15,0.2,0.3", "--trials", "40"};

std::vector<std::string> with(std::vector<std::string> base, const std::vector<std::string>& extra) {
  base.insert(base.end(), extra.begin(), extra.end());
  return base;
}

}  // namespace

TEST_CASE("threshold row") {
  const Result r = call({"threshold", "--M", "10", "--N", "3"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("M=10 N=3 S=180 ") == 0);
  CHECK(r.out.find("p_c=0.6527036446") != std::string::npos);

  const Result k = call({"threshold", "--M", "8", "--rho", "0.5", "--json"});
  REQUIRE(k.code == kExitOk);
  const auto j = nlohmann::json::parse(k.out)["threshold"];
  CHECK(j["K"] == 9);
  CHECK(j["N"] == 3);
}

TEST_CASE("threshold domain and usage errors") {
  const Result bad = call({"threshold", "--M", "4", "--N", "5"});
  CHECK(bad.code == kExitError);
  CHECK(bad.err.find("N > M") != std::string::npos);
  CHECK(call({"threshold"}).code == kExitUsage);
  CHECK(call({"nonsense"}).code == kExitUsage);
  CHECK(call({}).code == kExitUsage);
}

TEST_CASE("simulate usage errors") {
  CHECK(call({"simulate", "--n", "50"}).code == kExitUsage);
  CHECK(call(with(kSim, {"--rho", "0.4"})).code == kExitUsage);
  CHECK(call(with(kSim, {"--eps", "0.6"})).code == kExitUsage);
  CHECK(call(with(kSim, {"--mode", "square"})).code == kExitUsage);
}

TEST_CASE("simulate output is independent of the worker count") {
  const Result one = call(with(kSim, {"--seed", "9", "--workers", "1"}));
  REQUIRE(one.code == kExitOk);
  for (const char* w : {"2", "8"}) {
    const Result many = call(with(kSim, {"--seed", "9", "--workers", w}));
    CHECK(many.out == one.out);
    CHECK(many.err == one.err);
  }
}

TEST_CASE("simulate csv rows") {
  const Result r = call(with(kSim, {"--seed", "3"}));
  REQUIRE(r.code == kExitOk);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 9);
  CHECK(rows[0] == "n,rho,mode,r,trials,p_hat,ci_low,ci_high,seed");
  // Hex rows never exceed the continuum row at the same radius.
  std::vector<double> cont;
  std::vector<double> hex;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    std::vector<std::string> f;
    std::istringstream in(rows[k]);
    for (std::string cell; std::getline(in, cell, ',');) f.push_back(cell);
    REQUIRE(f.size() == 9);
    CHECK(f[8] == "3");
    (f[2] == "hex" ? hex : cont).push_back(std::stod(f[5]));
  }
  REQUIRE(cont.size() == 4);
  REQUIRE(hex.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(hex[k] <= cont[k]);
  for (std::size_t k = 1; k < 4; ++k) CHECK(cont[k - 1] <= cont[k]);

  const auto summary = nlohmann::json::parse(r.err);
  CHECK(summary["seed"] == 3);
  CHECK(summary["coupled_checks"] == "passed");
  CHECK(summary["estimates"]["continuum"]["delta"].get<double>() >= 0.0);
}

TEST_CASE("seed precedence") {
  const auto seed_of = [](const std::vector<std::string>& args) {
    const Result r = call(args);
    REQUIRE(r.code == kExitOk);
    return nlohmann::json::parse(r.err)["seed"].get<std::uint64_t>();
  };
  const fs::path cfg = scratch("seed.cfg");
  write_file(cfg, "# defaults\nseed=11\ntrials=20\n\n");

  unsetenv("HEXSEP_SEED");
  CHECK(seed_of(kSim) == kDefaultSeed);
  setenv("HEXSEP_SEED", "13", 1);
  CHECK(seed_of(kSim) == 13);
  CHECK(seed_of(with(kSim, {"--config", cfg.string()})) == 11);
  CHECK(seed_of(with(kSim, {"--config", cfg.string(), "--seed", "17"})) == 17);
  unsetenv("HEXSEP_SEED");

  // The config default for trials is overridden by the explicit flag.
  const Result r = call(with(kSim, {"--config", cfg.string()}));
  CHECK(nlohmann::json::parse(r.err)["trials"] == 40);
}

TEST_CASE("config parsing") {
  std::istringstream ok("# comment\n\nrho = 0.7\nmode=hex\n");
  const auto kv = parse_config(ok);
  REQUIRE(kv.size() == 2);
  CHECK(kv[0] == std::pair<std::string, std::string>{"rho", "0.7"});
  CHECK(kv[1] == std::pair<std::string, std::string>{"mode", "hex"});
  std::istringstream bad("rho 0.7\n");
  CHECK_THROWS_AS(parse_config(bad), std::runtime_error);
}

TEST_CASE("detect exit codes") {
  const hexsep::synthetic::Instance inst = hexsep::synthetic::planted_band(1);
  std::ostringstream csv;
  csv << "x,y\n";
  for (const auto& p : inst.points) csv << p.x() << ',' << p.y() << '\n';
  const fs::path planted = scratch("planted.csv");
  write_file(planted, csv.str());

  const Result ok = call({"detect", planted.string(), "--header", "--M", "12", "--N", "3"});
  REQUIRE(ok.code == kExitOk);
  const auto report = nlohmann::json::parse(ok.out);
  CHECK(report.contains("hyperplane"));
  CHECK(!report["detector"].is_null());
  CHECK(!report["anomalies"]["anomalous"].empty());

  const fs::path line = scratch("line.csv");
  std::ostringstream collinear;
  for (int k = 0; k < 40; ++k) collinear << 0.1 * k << ',' << 0.2 * k << '\n';
  write_file(line, collinear.str());
  const Result flat = call({"detect", line.string()});
  CHECK(flat.code == kExitNotSeparable);
  CHECK(flat.err.find("not separable") != std::string::npos);
  CHECK(nlohmann::json::parse(flat.out)["detector"].is_null());

  const fs::path broken = scratch("broken.csv");
  write_file(broken, "1,2\n3,x\n");
  const Result bad = call({"detect", broken.string()});
  CHECK(bad.code == kExitError);
  CHECK(bad.err.find("row 2, column 2") != std::string::npos);

  CHECK(call({"detect", scratch("missing.csv").string()}).code == kExitError);
}

TEST_CASE("sv and cluster reports") {
  const hexsep::synthetic::Instance inst = hexsep::synthetic::planted_band(2);
  std::ostringstream csv;
  for (const auto& p : inst.points) csv << p.x() << ',' << p.y() << '\n';
  const fs::path path = scratch("sv.csv");
  write_file(path, csv.str());

  const Result sv = call({"sv", path.string(), "--M", "12", "--N", "3", "--gamma", "0.5"});
  REQUIRE(sv.code == kExitOk);
  const auto report = nlohmann::json::parse(sv.out);
  CHECK(!report["support_vectors"]["equivalency_class"].empty());

  const Result cl = call({"cluster", path.string(), "--M", "12", "--N", "3"});
  REQUIRE(cl.code == kExitOk);
  CHECK(nlohmann::json::parse(cl.out)["clusters"]["M"] == 12);
}
