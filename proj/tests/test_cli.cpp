#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "qdem/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = qdem::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Fresh directory under the system temp dir, removed on scope exit.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("qdem_cli_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& text) const {
    const auto p = path / name;
    std::ofstream(p) << text;
    return p.string();
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("sample") {
  auto r = run({"sample", "--n", "4", "--p", "1", "--q", "0.5", "--seed", "3", "--samples", "2"});
  CHECK(r.code == 0);
  CHECK(r.out == "4 3 2 1\n4 3 2 1\n");
  r = run({"sample", "--n", "3", "--p", "0", "--seed", "1"});
  CHECK(r.code == 0);
  CHECK(r.out == "1 2 3\n");
  const auto a = run({"sample", "--n", "12", "--seed", "99", "--samples", "5"});
  const auto b = run({"sample", "--n", "12", "--seed", "99", "--samples", "5"});
  CHECK(a.out == b.out);
  CHECK(run({"sample", "--n", "12"}).code == 2);  // seed is required
}

TEST_CASE("exact") {
  auto r = run({"exact", "--n", "2", "--p", "0.5", "--q", "0.5"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  REQUIRE(j.size() == 2);
  CHECK(j[0]["perm"] == "1 2");
  CHECK(j[0]["prob"].get<double>() == doctest::Approx(0.5));
  CHECK(j[1]["perm"] == "2 1");

  r = run({"exact", "--n", "3", "--p", "0.5", "--q", "0.5"});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j.size() == 6);
  int found = 0;
  for (const auto& e : j)
    if (e["perm"] == "1 2 3") {
      CHECK(std::abs(e["prob"].get<double>() - 0.1875) < 1e-14);
      ++found;
    }
  CHECK(found == 1);
  for (std::size_t i = 1; i < j.size(); ++i) CHECK(j[i - 1]["prob"].get<double>() >= j[i]["prob"].get<double>());

  r = run({"exact", "--n", "8"});
  CHECK(r.code == 2);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("hydro") {
  auto r = run({"hydro", "flux", "--p", "0.5", "--q", "0.5", "--grid", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "z,value\n0,0\n0.5,0.6\n1,1\n");

  r = run({"hydro", "limit-Hsigma", "--p", "0.5", "--q", "0.5", "--x", "0.5", "--grid", "101"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "y,value");
  int rows = 0;
  while (std::getline(lines, line)) {
    const auto comma = line.find(',');
    const double y = std::stod(line.substr(0, comma)), h = std::stod(line.substr(comma + 1));
    if (y <= 0.5 / 1.5) CHECK(h == 0.0);
    ++rows;
  }
  CHECK(rows == 101);

  CHECK(run({"hydro", "gbcg", "--p", "1", "--q", "0.5"}).code == 2);
  CHECK(run({"hydro", "limit-Hsigma", "--x", "1.5"}).code == 2);
  CHECK(run({"hydro", "nonsense"}).code == 2);
}

TEST_CASE("pde") {
  auto r = run({"pde", "--p", "0.9", "--q", "0.6666666666666666", "--lambda", "0.25", "--cells", "1000",
                "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["cells"] == 1000);
  CHECK(j["l1_to_closed_form"].get<double>() < 0.01);
  r = run({"pde", "--cells", "10"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("u,value\n", 0) == 0);
}

TEST_CASE("usage errors and help") {
  auto r = run({"sample", "--n", "3", "--seed", "1", "--bogus", "2"});
  CHECK(r.code == 2);
  r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("experiment") != std::string::npos);
  r = run({"sample", "--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("--seed") != std::string::npos);
  CHECK(r.out.find("--samples") != std::string::npos);
  CHECK(run({}).code == 2);
}

TEST_CASE("experiment spec errors name the key") {
  TempDir dir("spec");
  auto expect = [&](const std::string& text, const std::string& key) {
    const auto spec = dir.file("spec.json", text);
    const auto r = run({"experiment", spec, "--out", (dir.path / "out").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find(key + ":") != std::string::npos);
  };
  expect(R"({"kind":"triangleLimit","n":10,"seed":1,"color":3})", "color");
  expect(R"({"kind":"triangleLimit","n":10})", "seed");
  expect(R"({"kind":"triangleLimit","n":10,"seed":1,"p":2})", "p");
  expect(R"({"kind":"spiral","n":10,"seed":1})", "kind");
  expect(R"({"kind":"triangleLimit","n":"ten","seed":1})", "n");
  expect(R"({"kind":"triangleLimit",)", "spec");
  const auto missing = run({"experiment", (dir.path / "absent.json").string()});
  CHECK(missing.code == 2);
}

TEST_CASE("experiment outputs") {
  TempDir dir("run");
  const auto spec = dir.file("spec.json", R"({"kind":"triangleLimit","n":12,"p":0.5,"q":0.5,"x":[0.5],"samples":2,"seed":5})");
  const auto out = dir.path / "tri";
  auto r = run({"experiment", spec, "--out", out.string(), "--format", "csv,json,svg"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(out / "summary.json"));
  CHECK(fs::exists(out / "field.csv"));
  CHECK(fs::exists(out / "limit.csv"));
  bool svg = false;
  for (const auto& e : fs::directory_iterator(out))
    if (e.path().extension() == ".svg") {
      svg = true;
      CHECK(slurp(e.path()).find("<svg") != std::string::npos);
    }
  CHECK(svg);
  const auto brief = json::parse(r.out);
  CHECK(brief["kind"] == "triangleLimit");

  // A tiny triangle cannot meet the limit-shape thresholds.
  r = run({"experiment", spec, "--out", out.string(), "--strict"});
  CHECK(r.code == 3);
  CHECK(r.err.find("strict:") != std::string::npos);

  CHECK(run({"experiment", spec, "--out", out.string(), "--format", "xml"}).code == 2);
}

TEST_CASE("coupling experiment JSON") {
  TempDir dir("coupling");
  const auto spec =
      dir.file("spec.json", R"({"kind":"couplingOrder","n":20,"p":0.5,"q":0.5,"x":0.5,"samples":20,"seed":2})");
  const auto r = run({"experiment", spec, "--out", dir.path.string(), "--format", "json,csv", "--threads", "2"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(slurp(dir.path / "summary.json"));
  REQUIRE(j.contains("points"));
  CHECK(j["points"].size() > 0);
  const auto& pt = j["points"][0];
  for (const char* key : {"V", "U", "refl", "act", "dstep", "quad"}) CHECK(pt.contains(key));
  CHECK(j.contains("mean_failures_lower"));
  CHECK(j.contains("mean_failures_upper"));
  CHECK(fs::exists(dir.path / "coupling.csv"));
}
