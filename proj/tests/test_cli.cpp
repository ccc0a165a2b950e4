#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hqt/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = hqt::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

fs::path tmpfile(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hqt_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("dv2cv artifact carries six branches summing to one") {
  const auto res = invoke({"dv2cv", "--alpha2", "5", "--theta", "1.0472", "--phi", "0",
                           "--format", "json"});
  REQUIRE(res.code == 0);
  const json doc = json::parse(res.out);
  CHECK(doc["protocol"] == "dv2cv");
  REQUIRE(doc["branches"].size() == 6);
  double total = 0.0;
  for (const auto& b : doc["branches"]) total += b["probability"].get<double>();
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(doc["engine"]["max_crosscheck_dev"].get<double>() <= 1e-8);
}

TEST_CASE("identical invocations write byte-identical artifacts") {
  const auto p1 = tmpfile("det1.json");
  const auto p2 = tmpfile("det2.json");
  const std::vector<std::string> base = {"dv2cv", "--alpha2", "2",     "--theta", "0.9",
                                         "--phi", "1.3",      "--seed", "5"};
  auto args1 = base;
  args1.insert(args1.end(), {"--out", p1.string()});
  auto args2 = base;
  args2.insert(args2.end(), {"--out", p2.string()});
  REQUIRE(invoke(args1).code == 0);
  REQUIRE(invoke(args2).code == 0);
  const std::string bytes1 = slurp(p1);
  CHECK(!bytes1.empty());
  CHECK(bytes1 == slurp(p2));

  const auto s1 = tmpfile("mc1.csv");
  const auto s2 = tmpfile("mc2.csv");
  for (const auto& p : {s1, s2}) {
    const auto res = invoke({"sample", "--alpha2", "1.5", "--theta", "1.0", "--trials", "4000",
                             "--seed", "17", "--format", "csv", "--out", p.string()});
    REQUIRE(res.code == 0);
  }
  CHECK(slurp(s1) == slurp(s2));
}

TEST_CASE("json and csv artifacts agree on the numbers") {
  const std::vector<std::string> base = {"dv2cv", "--alpha2", "1.5", "--theta", "0.7", "--phi",
                                         "0.2"};
  auto jargs = base;
  jargs.insert(jargs.end(), {"--format", "json"});
  auto cargs = base;
  cargs.insert(cargs.end(), {"--format", "csv"});
  const auto jres = invoke(jargs);
  const auto cres = invoke(cargs);
  REQUIRE(jres.code == 0);
  REQUIRE(cres.code == 0);
  const json doc = json::parse(jres.out);

  // pull f_avg out of the csv field section
  double csv_favg = -1.0;
  std::istringstream lines(cres.out);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("f_avg,", 0) == 0) csv_favg = std::stod(line.substr(6));
  }
  REQUIRE(csv_favg >= 0.0);
  const double rel = std::abs(csv_favg - doc["f_avg"].get<double>()) /
                     std::max(1.0, std::abs(csv_favg));
  CHECK(rel < 1e-12);
}

TEST_CASE("sweep emits the documented csv columns") {
  const auto res = invoke({"sweep", "--grid", "1:3:1", "--format", "csv"});
  REQUIRE(res.code == 0);
  std::istringstream lines(res.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "alpha2,x2,delta_abs2,fbar_formula_eq21,fbar_oracle,abs_dev");
  int rows = 0;
  double prev = -1.0;
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    const auto last_comma = line.find_last_of(',');
    const auto second_last = line.find_last_of(',', last_comma - 1);
    const double oracle = std::stod(line.substr(second_last + 1, last_comma - second_last - 1));
    CHECK(oracle >= prev - 1e-12);
    prev = oracle;
  }
  CHECK(rows == 3);
}

TEST_CASE("sweep at a fixed qubit echoes the per-qubit closed form") {
  const auto res = invoke({"sweep", "--grid", "2:2:1", "--fixed-qubit", "--theta", "1.1",
                           "--phi", "0.4", "--engine", "formula", "--format", "csv"});
  REQUIRE(res.code == 0);
  std::istringstream lines(res.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  // fbar_formula_eq21 column holds the fixed-qubit value here
  std::vector<std::string> cells;
  std::istringstream cs(row);
  std::string cell;
  while (std::getline(cs, cell, ',')) cells.push_back(cell);
  REQUIRE(cells.size() == 6);
  CHECK(std::stod(cells[3]) > 0.5);
  CHECK(std::stod(cells[3]) < 1.0);
}

TEST_CASE("sample supports both directions") {
  const auto res = invoke({"sample", "--alpha2", "1", "--direction", "cv2dv", "--trials", "500",
                           "--seed", "3", "--format", "json"});
  REQUIRE(res.code == 0);
  const json doc = json::parse(res.out);
  CHECK(doc["direction"] == "cv2dv");
  REQUIRE(doc["branches"].size() == 5);
  std::uint64_t total = 0;
  for (const auto& b : doc["branches"]) total += b["count"].get<std::uint64_t>();
  CHECK(total == 500);
}

TEST_CASE("verify exit codes") {
  const auto ok = invoke({"verify", "--alpha2", "2", "--seed", "7", "--qubits", "2"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("max deviation") != std::string::npos);

  const auto strict =
      invoke({"verify", "--alpha2", "2", "--seed", "7", "--qubits", "1", "--tol", "1e-30"});
  CHECK(strict.code == 2);
}

TEST_CASE("usage errors exit with one") {
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"dv2cv"}).code == 1);                         // missing --alpha2
  CHECK(invoke({"dv2cv", "--alpha2", "-3"}).code == 1);       // domain
  CHECK(invoke({"sweep", "--grid", "nonsense"}).code == 1);   // bad grid
  CHECK(invoke({"dv2cv", "--alpha2", "1", "--out", "/nonexistent_dir/x.json"}).code == 1);
}

TEST_CASE("help exits cleanly") {
  const auto res = invoke({"--help"});
  CHECK(res.code == 0);
  CHECK(res.out.find("Hybrid") != std::string::npos);
}
