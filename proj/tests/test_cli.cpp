#include "doctest.h"

#include "curvemesh/cli.hpp"
#include "curvemesh/io.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace curvemesh;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("curvemesh_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return (path_ / name).string();
  }

 private:
  fs::path path_;
};

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

const char* kCircle = R"({"curves": [{"name": "circle", "kind": "circle"}]})";

const char* kLineAndCircle = R"([
  {"name": "circle", "kind": "circle"},
  {"name": "line", "kind": "bspline", "degree": 1,
   "control_points": [[0, 0], [1, 1]], "knots": [0, 0, 1, 1]}
])";

}  // namespace

TEST_CASE("spec parsing errors carry a line or field") {
  try {
    io::parse_curve_specs("[\n  {\"name\": \"a\",\n   \"kind\": }\n]");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    io::parse_curve_specs(R"([{"name": "a", "kind": "circle"}, {"name": "b", "kind": "circle", "radius": 2}])");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("curve #1") != std::string::npos);
    CHECK(msg.find("'radius'") != std::string::npos);
  }
  CHECK_THROWS_AS(io::parse_curve_specs(R"([{"name": "b", "kind": "bspline", "degree": 2}])"), ParseError);
  CHECK_THROWS_AS(io::parse_curve_specs(R"([{"name": "b", "kind": "hyperbola"}])"), ParseError);
  CHECK_THROWS_AS(io::parse_curve_specs(R"({"shapes": []})"), ParseError);

  const auto specs = io::parse_curve_specs(kLineAndCircle);
  REQUIRE(specs.size() == 2);
  CHECK(specs[1].control_points.rows() == 2);
  CHECK(specs[1].degree == 1);
}

TEST_CASE("float formatting round-trips") {
  for (double v : {0.1, 1.0 / 3, 1e-300, -2.5e17, 0.0})
    CHECK(std::stod(io::format_double(v)) == v);
  CHECK(io::format_double(0.5) == "0.5");
}

TEST_CASE("exit codes") {
  TempDir tmp;
  const auto spec = tmp.write("c.json", kCircle);
  const auto out = (tmp.path() / "o").string();
  CHECK(run({"frobnicate", "--spec", spec}).code == cli::usage);
  CHECK(run({"optimize"}).code == cli::usage);
  CHECK(run({"optimize", "--spec", spec, "--bogus", "1"}).code == cli::usage);
  CHECK(run({"optimize", "--spec", spec, "--p", "0", "--out", out}).code == cli::usage);
  CHECK(run({"optimize", "--spec", spec, "--q", "two", "--out", out}).code == cli::usage);
  CHECK(run({"optimize", "--spec", spec, "--layout", "loose", "--out", out}).code == cli::usage);
  CHECK(run({"optimize", "--spec", spec, "--tol", "0", "--out", out}).code == cli::usage);
  CHECK(run({"--help"}).code == cli::ok);

  const auto broken = tmp.write("broken.json", "[{\"name\": \"x\", \"kind\": \"circle\",}]");
  const auto r = run({"optimize", "--spec", broken, "--out", out});
  CHECK(r.code == cli::parse);
  CHECK(r.err.find("line 1") != std::string::npos);
  CHECK(run({"optimize", "--spec", (tmp.path() / "missing.json").string(), "--out", out}).code == cli::parse);

  // Every curve failing is a total failure; a lone failure among successes is not.
  const auto bad = tmp.write("bad.json", R"([{"name": "tiny", "kind": "circle", "domain": [0, 1e-15]}])");
  CHECK(run({"optimize", "--spec", bad, "--out", out}).code == cli::total_failure);
  const auto mixed =
      tmp.write("mixed.json", R"([{"name": "tiny", "kind": "circle", "domain": [0, 1e-15]}, {"name": "ok", "kind": "circle"}])");
  CHECK(run({"optimize", "--spec", mixed, "--out", out}).code == cli::ok);
}

TEST_CASE("optimize smoke run") {
  TempDir tmp;
  const auto spec = tmp.write("c.json", kCircle);
  const auto out = tmp.path() / "run";
  const auto r = run({"optimize", "--spec", spec, "--p", "2", "--elements", "2", "--out", out.string()});
  REQUIRE(r.code == cli::ok);
  const auto mesh = out / "mesh_circle_p2_q3_R2.csv";
  CHECK(fs::exists(mesh));
  CHECK(fs::exists(out / "table.csv"));
  CHECK(fs::exists(out / "report.json"));

  const auto report = read_json(out / "report.json");
  CHECK(report["curves"][0]["report"]["converged"] == true);
  CHECK(report["manifest"]["command"] == "optimize");
  const std::string hash = report["manifest_hash"];
  CHECK(hash.size() == 16);

  std::istringstream table(slurp(out / "table.csv"));
  std::string comment, header, row;
  std::getline(table, comment);
  std::getline(table, header);
  std::getline(table, row);
  CHECK(comment.rfind("# ", 0) == 0);
  CHECK(comment.find(hash) != std::string::npos);
  CHECK(header.find("converged") != std::string::npos);
  CHECK(row.rfind("circle,", 0) == 0);
  CHECK(row.find(",true,") != std::string::npos);

  // Every output carries the manifest hash.
  CHECK(slurp(mesh).find(hash) != std::string::npos);
}

TEST_CASE("straight lines are excluded and reported") {
  TempDir tmp;
  const auto spec = tmp.write("mix.json", kLineAndCircle);
  const auto out = tmp.path() / "run";
  const auto r = run({"optimize", "--spec", spec, "--out", out.string()});
  REQUIRE(r.code == cli::ok);
  const auto report = read_json(out / "report.json");
  CHECK(report["excluded_straight_lines"] == json::array({"line"}));
  CHECK(report["curves"].size() == 1);
  CHECK(r.err.find("line") != std::string::npos);
}

TEST_CASE("identical manifests reproduce byte-identical numerical files") {
  TempDir tmp;
  const auto spec = tmp.write("c.json", R"([{"name": "spiral", "kind": "spiral"}, {"name": "c", "kind": "circle"}])");
  const auto a = tmp.path() / "a", b = tmp.path() / "b";
  for (const auto& dir : {a, b}) {
    REQUIRE(run({"optimize", "--spec", spec, "--p", "2,3", "--elements", "3", "--out", dir.string(), "--workers", "2"})
                .code == cli::ok);
    REQUIRE(run({"converge", "--spec", spec, "--p", "2", "--elements", "2,4,8", "--out", (dir / "conv").string()})
                .code == cli::ok);
  }
  // The output directory is part of the manifest, so compare past the comment line.
  const auto body = [](const fs::path& p) {
    const std::string s = slurp(p);
    return s.substr(s.find('\n') + 1);
  };
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("mesh_", 0) != 0) continue;
    CHECK(body(entry.path()) == body(b / name));
    ++compared;
  }
  CHECK(compared == 4);
  CHECK(body(a / "conv" / "study.csv") == body(b / "conv" / "study.csv"));
  const auto orders = read_json(a / "conv" / "orders.json");
  CHECK(orders["orders"]["c"]["2"]["order_optimized"].is_number());
}

TEST_CASE("converge reports the 2p orders on a circle") {
  TempDir tmp;
  const auto spec = tmp.write("c.json", kCircle);
  const auto out = tmp.path() / "c";
  REQUIRE(run({"converge", "--spec", spec, "--p", "2,3,4", "--elements", "2,4,8,16,32", "--tol", "1e-14", "--out",
               out.string()})
              .code == cli::ok);
  const auto orders = read_json(out / "orders.json");
  CHECK(orders["manifest"]["tol"] == 1e-14);
  for (int p : {2, 3, 4}) {
    CAPTURE(p);
    const double order = orders["orders"]["circle"][std::to_string(p)]["order_optimized"];
    CHECK(order > 2 * p - 0.4);
    CHECK(order < 2 * p + 0.6);
  }
  std::istringstream csv(slurp(out / "study.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) rows += line.rfind("circle,", 0) == 0;
  CHECK(rows == 15);
}

TEST_CASE("decompose writes root counts") {
  TempDir tmp;
  const auto spec = tmp.write("s.json", R"([{"name": "half", "kind": "semicircle"}])");
  const auto out = tmp.path() / "d";
  REQUIRE(run({"decompose", "--spec", spec, "--p", "2", "--out", out.string()}).code == cli::ok);
  const auto roots = read_json(out / "roots.json")["roots"][0];
  CHECK(roots["q"] == 3);
  CHECK(roots["initial"]["abs_e"] == 3);
  CHECK(roots["optimized"]["e_n"] == 4);
  CHECK(roots["optimized"]["e_t"] == 5);
  CHECK(fs::exists(out / "error_half_p2_q3_R1_initial.csv"));
  CHECK(fs::exists(out / "error_half_p2_q3_R1_optimized.csv"));
}

TEST_CASE("bench outputs match serial bitwise") {
  TempDir tmp;
  const auto spec = tmp.write("c.json", R"([{"name": "c", "kind": "circle"}, {"name": "s", "kind": "spiral"}])");
  for (const std::string mode : {"by_element", "by_curve"}) {
    const auto out = tmp.path() / mode;
    REQUIRE(run({"bench", "--spec", spec, "--mode", mode, "--workers", "2", "--elements", "8", "--out", out.string()})
                .code == cli::ok);
    const auto sp = read_json(out / "speedup.json");
    REQUIRE(sp["speedup"].size() >= 2);
    for (const auto& s : sp["speedup"]) CHECK(s["identical_to_serial"] == true);
    CHECK(slurp(out / "timing.csv").find(",false\n") == std::string::npos);
  }
}
