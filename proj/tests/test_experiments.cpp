#include <doctest.h>

#include <cmath>
#include <fstream>

#include "kickrot/analytic.hpp"
#include "kickrot/constants.hpp"
#include "kickrot/experiments.hpp"
#include "kickrot/io.hpp"
#include "support/tempdir.hpp"

using namespace kickrot;
using namespace kickrot::experiments;
namespace fs = std::filesystem;

namespace {

RunOptions small(const fs::path& dir) {
  RunOptions o;
  o.out_dir = dir;
  o.trajectories = 4000;
  o.samples = 8;
  o.kicks = 40;
  return o;
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(io::read_text(dir / "manifest.json")); }

void check_inventory(const fs::path& dir) {
  const auto m = manifest(dir);
  std::size_t listed = 0;
  for (const auto& f : m["files"]) {
    CHECK(io::sha256_file(dir / f["name"].get<std::string>()) == f["sha256"].get<std::string>());
    ++listed;
  }
  std::size_t on_disk = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename() != "manifest.json") ++on_disk;
  CHECK(listed == on_disk);
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("helpers") {
    CHECK(wrap_plot_phase(0.5) == doctest::Approx(0.5));
    CHECK(wrap_plot_phase(1.5) == doctest::Approx(-0.5));
    CHECK(wrap_plot_phase(-1.0) == doctest::Approx(-1.0));
    CHECK(wrap_plot_phase(1.0) == doctest::Approx(-1.0));

    std::vector<double> curve;
    for (int t = 1; t <= 200; ++t) curve.push_back(3.0 * (1.0 - std::exp(-(t - 1) / 14.5)));
    CHECK(saturation_onset(curve) == doctest::Approx(15.5).epsilon(0.1));
    for (auto& v : curve) v = -v;
    CHECK(saturation_onset(curve) == doctest::Approx(15.5).epsilon(0.1));
  }

  TEST_CASE("tail fit recovers exponential slopes") {
    Histogram h(0.0, 1.0);
    for (int k = -60; k <= 60; ++k) h.add(k, 100.0 * std::exp(-std::abs(k) / 8.0));
    const auto t = fit_tails(h, 0.0, 8.0);
    CHECK(t.left.slope == doctest::Approx(1.0 / 8.0).epsilon(1e-9));
    CHECK(t.right.slope == doctest::Approx(-1.0 / 8.0).epsilon(1e-9));
    CHECK(t.left.r_squared == doctest::Approx(1.0));
    CHECK(t.left_bins == 52);
  }

  TEST_CASE("fig4 and fig5 share one quantum run") {
    const auto d4 = support::fresh_dir("fig4"), d5 = support::fresh_dir("fig5");
    const auto r4 = run_fig4(small(d4));
    const auto r5 = run_fig5(small(d5));
    CHECK(r5.endpoint_mean == r4.quantum.stats.series.mean_shift.back());
    CHECK(r5.mean == doctest::Approx(r5.endpoint_mean).epsilon(1e-9));
    CHECK(r5.mass == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(r5.samples == 8);
    CHECK(r4.analytic.size() == 40);
    CHECK(r4.ratchet_time == doctest::Approx(14.51).epsilon(1e-3));
    for (const char* f : {"fig4.csv", "fig4.svg", "manifest.json"}) CHECK(fs::exists(d4 / f));
    for (const char* f : {"fig5.csv", "fig5.svg", "manifest.json"}) CHECK(fs::exists(d5 / f));
    check_inventory(d4);
    check_inventory(d5);
    const auto m = manifest(d4);
    CHECK(m["scenario"] == "fig4");
    CHECK(m["seeds"].size() == 2);
    CHECK(m["engines"].contains("fftw"));
    CHECK(m["complete"] == true);
    CHECK(m["notes"].dump().find("1.4") != std::string::npos);
  }

  TEST_CASE("same seed, same bytes") {
    const auto a = support::fresh_dir("det_a"), b = support::fresh_dir("det_b");
    auto oa = small(a), ob = small(b);
    oa.seed = ob.seed = 7;
    run_fig4(oa);
    run_fig4(ob);
    for (const char* f : {"fig4.csv", "fig4.svg"}) CHECK(io::read_text(a / f) == io::read_text(b / f));
    CHECK(manifest(a)["files"] == manifest(b)["files"]);
    ob.seed = 8;
    run_fig4(ob);
    CHECK(io::read_text(a / "fig4.csv") != io::read_text(b / "fig4.csv"));
  }

  TEST_CASE("fig2 and fig3 emit both series and fits") {
    const auto d2 = support::fresh_dir("fig2");
    auto o = small(d2);
    o.samples = 4;
    o.kicks = 20;
    const auto r2 = run_fig2(o);
    CHECK(r2.points.size() == 14);
    for (const char* f : {"fig2_rest.csv", "fig2_moving.csv", "fig2_fit.csv", "fig2.svg"}) CHECK(fs::exists(d2 / f));
    check_inventory(d2);
    // Φ = 0 point: A = 0, ρ_L = 0 and antithetic sampling cancels exactly.
    for (const auto& p : r2.points)
      if (p.rho_L == 0.0 && p.rocking == 0.0) CHECK(std::abs(p.quantum) < 1e-9);

    const auto d3 = support::fresh_dir("fig3");
    auto o3 = small(d3);
    o3.trajectories = 1000;
    const auto r3 = run_fig3(o3);
    REQUIRE(r3.curves.size() == 2);
    CHECK(r3.curves[0].rho_L.size() == 25);
    CHECK(r3.curves[0].rho_L.front() == doctest::Approx(-0.75 * constants::pi * 32.0));
    CHECK(r3.curves[1].rho_L.back() == doctest::Approx(0.75 * constants::pi * 16.0));
    CHECK(r3.amplitude_ratio > 0.0);
    check_inventory(d3);
  }

  TEST_CASE("scenario json round trip and validation") {
    Scenario s;
    s.id = "sweep";
    s.engines = {Engine::Classical, Engine::Analytic};
    s.K = {2.0, 3.0};
    s.kicks = {5, 10};
    s.seed = 11;
    const auto back = Scenario::from_json(s.to_json());
    CHECK(back.to_json() == s.to_json());

    Scenario bad = s;
    bad.b = {};
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
    bad = s;
    bad.b = {1.2};
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
    CHECK_THROWS_AS(Scenario::from_json(nlohmann::json{{"engines", {"magic"}}}), InvalidParameter);
    CHECK_THROWS_AS(Scenario::from_json(nlohmann::json{{"grid", {{"K", "two"}}}}), InvalidParameter);
  }

  TEST_CASE("custom sweep keeps completed points on partial failure") {
    const auto dir = support::fresh_dir("custom");
    Scenario s;
    s.engines = {Engine::Analytic, Engine::Classical};
    // K = 2e4 passes validation but exceeds the Bessel argument range.
    s.K = {2.6, 2.0e4};
    s.kicks = {10};
    s.trajectories = 500;
    RunOptions o;
    o.out_dir = dir;
    const auto r = run_custom(s, o);
    CHECK(r.points == 2);
    CHECK(r.failed == 1);
    const auto m = manifest(dir);
    CHECK(m["complete"] == false);
    CHECK(fs::exists(dir / "point0_analytic.csv"));
    CHECK(fs::exists(dir / "point0_classical_stats.csv"));
    const auto summary = io::read_csv(dir / "summary.csv");
    CHECK(summary.rows.size() == 2);
    CHECK(summary.column("ok") == std::vector<double>{1.0, 0.0});
    check_inventory(dir);
  }
}
