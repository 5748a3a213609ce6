#include "doctest.h"

#include "curvemesh/analysis.hpp"
#include "fixtures.hpp"

#include <cmath>
#include <limits>

using namespace curvemesh;

namespace {

CurveSpec spec_of(CurveKind kind) {
  CurveSpec s;
  s.name = std::string(to_string(kind));
  s.kind = kind;
  return s;
}

std::vector<double> logs(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) out.push_back(std::log(x));
  return out;
}

StudyCell cell(int R, double initial, double final_norm, bool failed = false) {
  StudyCell c;
  c.elements = R;
  c.norm_initial = initial;
  c.norm_final = final_norm;
  c.failed = failed;
  return c;
}

}  // namespace

TEST_CASE("fit_slope on synthetic data") {
  const std::vector<double> R{2, 4, 8, 16, 32};
  std::vector<double> halving, sixth;
  for (double r : R) {
    halving.push_back(3.0 / r);
    sixth.push_back(0.7 * std::pow(r, -6.0));
  }
  CHECK(-fit_slope(logs(R), logs(halving)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(-fit_slope(logs(R), logs(sixth)) - 6) < 1e-10);
  CHECK_THROWS_AS(fit_slope({1.0}, {1.0}), SpecError);
  CHECK_THROWS_AS(fit_slope({1.0, 2.0}, {1.0}), SpecError);
}

TEST_CASE("fitted_order: window, floor and failed cells") {
  std::vector<StudyCell> cells;
  for (int R : {1, 2, 4, 8, 16, 32}) cells.push_back(cell(R, 1.0 / (R * R), std::pow(R, -4.0)));
  cells[0].norm_final = 1.0;  // outside the last-4 window, must not matter
  CHECK(fitted_order(cells, false, 4, 1e-13) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fitted_order(cells, true, 4, 1e-13) == doctest::Approx(4.0).epsilon(1e-12));

  cells[5].failed = true;  // 3 usable cells remain in the window
  CHECK(fitted_order(cells, true, 4, 1e-13) == doctest::Approx(4.0).epsilon(1e-12));
  cells[4].norm_final = 1e-14;  // below the floor: only 2 remain
  CHECK(std::isnan(fitted_order(cells, true, 4, 1e-13)));
}

TEST_CASE("circle convergence orders") {
  const std::vector<int> R{2, 4, 8, 16, 32};
  const auto study = run_study(spec_of(CurveKind::circle), {2}, R, Config{});
  REQUIRE(study.cells.size() == R.size());
  for (const auto& c : study.cells) {
    CHECK_FALSE(c.failed);
    CHECK(c.q == 3);
    CHECK(c.norm_final <= c.norm_initial);
    CHECK(c.norm_final > 0);
  }
  CHECK(std::abs(study.order_initial.at(2) - 3) < 0.3);
  CHECK(std::abs(study.order_final.at(2) - 4) < 0.4);
}

TEST_CASE("constrained disparity is never below unconstrained") {
  const std::vector<int> R{2, 4, 8};
  const auto spec = spec_of(CurveKind::spiral);
  StudyOptions con, unc;
  unc.layout = Layout::unconstrained;
  // Shared initial partitions keep the two layouts on the same interpolant.
  con.partition = unc.partition = PartitionStrategy::uniform;
  const auto a = run_study(spec, {2, 3}, R, Config{}, con);
  const auto b = run_study(spec, {2, 3}, R, Config{}, unc);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CAPTURE(i);
    CHECK(a.cells[i].norm_initial == b.cells[i].norm_initial);
    if (a.cells[i].failed || b.cells[i].failed) continue;
    CHECK(a.cells[i].norm_final >= b.cells[i].norm_final * (1 - 1e-9));
  }
}

TEST_CASE("study options") {
  StudyOptions opt;
  opt.q_override = 4;
  const auto s = run_study(spec_of(CurveKind::semicircle), {1, 2}, {2, 4, 8}, Config{}, opt);
  for (const auto& c : s.cells) CHECK(c.q == 4);
  CHECK(std::isnan(s.order_final.at(1)) == false);
  CHECK(default_q(3) == 5);
  CHECK_THROWS_AS(run_study(spec_of(CurveKind::circle), {2}, {4, 2, 8}, Config{}), SpecError);
}

TEST_CASE("root counts on a single semicircle element") {
  const Config cfg;
  const auto p2 = run_root_study(spec_of(CurveKind::semicircle), 2, 3, cfg);
  CHECK(p2.report.converged);
  CHECK(p2.initial.magnitude == 3);
  CHECK(p2.optimized.normal == 4);
  CHECK(p2.optimized.tangential == 5);
  CHECK(p2.optimized.binormal == -1);

  const auto p3 = run_root_study(spec_of(CurveKind::semicircle), 3, 5, cfg);
  CHECK(p3.optimized.tangential == 7);
  CHECK(p3.optimized.normal == 6);
}

TEST_CASE("root counts on a spherical arc") {
  const auto r = run_root_study(spec_of(CurveKind::sphere_arc), 3, 10, Config{});
  CHECK(r.optimized.normal >= 5);
  CHECK(r.optimized.binormal >= 5);
}
