#include <doctest.h>

#include <cmath>

#include "kickrot/analytic.hpp"
#include "kickrot/classical.hpp"
#include "kickrot/constants.hpp"
#include "oracles/standard_map.hpp"
#include "support/generators.hpp"

using namespace kickrot;
using namespace kickrot::classical;
using constants::pi;
using constants::two_pi;

namespace {

// Unwraps a reduced angle difference into (-π, π].
double angle_diff(double a, double b) {
  double d = a - b;
  while (d > pi) d -= two_pi;
  while (d <= -pi) d += two_pi;
  return d;
}

double jacobian_det(ClassicalState s, long n, const DimensionlessParams& p) {
  const double h = 1e-6;
  auto step = [&](double dphi, double drho) { return kick_map_step({s.angle + dphi, s.momentum + drho}, n, p); };
  const auto pp = step(h, 0), pm = step(-h, 0), rp = step(0, h), rm = step(0, -h);
  const double dphi_dphi = angle_diff(pp.angle, pm.angle) / (2 * h);
  const double drho_dphi = (pp.momentum - pm.momentum) / (2 * h);
  const double dphi_drho = angle_diff(rp.angle, rm.angle) / (2 * h);
  const double drho_drho = (rp.momentum - rm.momentum) / (2 * h);
  return dphi_dphi * drho_drho - dphi_drho * drho_dphi;
}

}  // namespace

TEST_SUITE("classical") {
  TEST_CASE("single kicks") {
    const DimensionlessParams p{2.6, 0.1, 0.0, 1.0};
    for (long n : {1L, 2L, 7L}) CHECK(kick_map_step({pi / 2, 0.0}, n, p).momentum == doctest::Approx(2.6));

    const DimensionlessParams r{1.7, 0.1, pi / 2, 1.0};
    CHECK(kick_map_step({0.0, 0.0}, 1, r).momentum == doctest::Approx(pi / 2));
    CHECK(kick_map_step({0.0, 0.0}, 2, r).momentum == doctest::Approx(-pi / 2));
  }

  TEST_CASE("flight times follow the parity convention") {
    const DimensionlessParams p{1.0, 0.25, 0.0, 1.0};
    const ClassicalState s{0.0, 1.0};
    CHECK(kick_map_step(s, 1, p, Parity::EvenLong).angle == doctest::Approx(0.75));
    CHECK(kick_map_step(s, 2, p, Parity::EvenLong).angle == doctest::Approx(1.25));
    CHECK(kick_map_step(s, 1, p, Parity::OddLong).angle == doctest::Approx(1.25));
    CHECK(kick_map_step(s, 2, p, Parity::OddLong).angle == doctest::Approx(0.75));
  }

  TEST_CASE("b = 0, A = 0 is the standard map") {
    const DimensionlessParams p{2.6, 0.0, 0.0, 1.0};
    const auto a = kick_map_step({1.0, 0.5}, 1, p);
    const auto o = oracle::standard_map_step({1.0, 0.5}, 2.6);
    CHECK(a.angle == o.x);
    CHECK(a.momentum == o.p);

    const DimensionlessParams q{0.5, 0.0, 0.0, 1.0};
    ClassicalState s{0.3, 0.2};
    oracle::StdMapPoint t{0.3, 0.2};
    double worst = 0.0;
    for (long n = 1; n <= 1000; ++n) {
      s = kick_map_step(s, n, q);
      t = oracle::standard_map_step(t, 0.5);
      worst = std::max({worst, std::abs(angle_diff(s.angle, t.x)), std::abs(s.momentum - t.p)});
    }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("angles stay reduced") {
    CHECK(reduce_angle(-1e-300) < two_pi);
    CHECK(reduce_angle(-1e-300) >= 0.0);
    CHECK(reduce_angle(two_pi) == 0.0);
    CHECK(reduce_angle(7.0 * two_pi + 1.0) == doctest::Approx(1.0));
  }

  TEST_CASE("property: area preservation") {
    prop::for_all(100, 41, [](prop::Gen& g, int i) {
      const DimensionlessParams p{g.real(0.1, 6.0), g.real(0.0, 0.5), g.real(-2.0, 2.0), 1.0};
      const ClassicalState s{g.real(0.1, two_pi - 0.1), g.real(-20.0, 20.0)};
      const long n = g.integer(1, 1000);
      CAPTURE(i);
      CHECK(std::abs(jacobian_det(s, n, p) - 1.0) < 1e-8);
    });
  }

  TEST_CASE("initial sampling") {
    const auto e0 = sample_initial(1000, 3.5, 0.0, 1);
    for (const auto& s : e0.states) {
      CHECK(s.momentum == 3.5);
      CHECK(s.angle >= 0.0);
      CHECK(s.angle < two_pi);
    }

    const std::size_t n = 1000000;
    const auto e = sample_initial(n, 2.0, 1.0, 7);
    double m = 0, m2 = 0, a = 0;
    for (const auto& s : e.states) {
      m += s.momentum;
      m2 += s.momentum * s.momentum;
      a += s.angle;
    }
    m /= n;
    const double sd = std::sqrt(m2 / n - m * m);
    CHECK(std::abs(m - 2.0) < 4.0 / std::sqrt(double(n)));
    CHECK(sd == doctest::Approx(1.0).epsilon(0.01));
    CHECK(a / n == doctest::Approx(pi).epsilon(0.01));
    CHECK(e.initial_mean == 2.0);
    CHECK(e.initial_sigma == 1.0);
    CHECK(e.rng_seed == 7);

    const auto f = sample_initial(5000, 2.0, 1.0, 7);
    for (std::size_t i = 0; i < f.states.size(); ++i) {
      CHECK(f.states[i].angle == e.states[i].angle);
      CHECK(f.states[i].momentum == e.states[i].momentum);
    }
    CHECK_THROWS_AS(sample_initial(0, 0.0, 1.0, 1), InvalidParameter);
    CHECK_THROWS_AS(sample_initial(10, 0.0, -1.0, 1), InvalidParameter);
  }

  TEST_CASE("results do not depend on the worker count") {
    const DimensionlessParams p{2.6, 1.0 / 16.0, 0.7, 1.0};
    MomentumStats ref;
    for (unsigned w : {1u, 2u, 3u, 8u}) {
      auto e = sample_initial(20000, 1.0, 1.0, 99, p);
      EvolveOptions o;
      o.workers = w;
      const auto st = evolve_ensemble(e, 30, o);
      if (w == 1) {
        ref = st;
        continue;
      }
      CAPTURE(w);
      CHECK(st.series.mean_shift == ref.series.mean_shift);
      CHECK(st.series.second_moment == ref.series.second_moment);
      CHECK(st.series.sem == ref.series.sem);
      CHECK(st.histogram.bins().size() == ref.histogram.bins().size());
    }
  }

  TEST_CASE("statistics bookkeeping") {
    const DimensionlessParams p{2.6, 1.0 / 16.0, 0.9, 0.5};
    auto e = sample_initial(3000, 4.0, 1.0, 3, p);
    const auto st = evolve_ensemble(e, 11);
    CHECK(e.kick_index == 11);
    CHECK(st.series.size() == 11);
    CHECK(st.samples == 3000);
    CHECK(st.histogram.mass() == 3000.0);
    CHECK(st.histogram.width() == 0.5);
    for (std::size_t k = 0; k < st.series.size(); ++k) {
      CHECK(st.series.variance[k] >= 0.0);
      CHECK(st.series.current[k] == st.series.mean_shift[k] - net_rocking_impulse(long(k) + 1, 0.9));
    }
    // Histogram mean reproduces the final ensemble mean from the moment sums.
    CHECK(st.histogram.mean() - 4.0 == doctest::Approx(st.series.mean_shift.back()).epsilon(1e-10));
    // Continuing the run resumes from the stored kick index.
    const auto more = evolve_ensemble(e, 2);
    CHECK(e.kick_index == 13);
    CHECK(more.series.size() == 2);
    CHECK_THROWS_AS(evolve_ensemble(e, 0), InvalidParameter);
  }

  TEST_CASE("property: zero current without symmetry breaking") {
    const DimensionlessParams p{2.6, 1.0 / 16.0, 0.0, 1.0};
    auto e = sample_initial(1000000, 0.0, 1.0, 2024, p);
    const auto st = evolve_ensemble(e, 120);
    int outside = 0;
    for (std::size_t k = 0; k < st.series.size(); ++k)
      if (std::abs(st.series.mean_shift[k]) >= 3.0 * st.series.sem[k]) ++outside;
    CHECK(outside == 0);
  }

  TEST_CASE("property: antisymmetry in rho_L") {
    const DimensionlessParams p{3.3, 1.0 / 16.0, 0.0, 1.0};
    for (double rL : {2.0, pi / (4.0 * p.period_asymmetry), 19.0}) {
      auto a = sample_initial(200000, rL, 1.0, 5, p);
      auto b = sample_initial(200000, -rL, 1.0, 6, p);
      const auto sa = evolve_ensemble(a, 120), sb = evolve_ensemble(b, 120);
      const double sum = sa.series.mean_shift.back() + sb.series.mean_shift.back();
      const double err = std::hypot(sa.series.sem.back(), sb.series.sem.back());
      CAPTURE(rL);
      CHECK(std::abs(sum) < 3.0 * err);
    }
  }

  TEST_CASE("property: uncorrelated diffusion rate at K = 5") {
    const DimensionlessParams p{5.0, 0.0, 0.0, 1.0};
    auto e = sample_initial(100000, 0.0, 1.0, 8, p);
    const auto st = evolve_ensemble(e, 50);
    const double rate = (st.series.variance[49] - st.series.variance[4]) / 45.0;
    CHECK(rate == doctest::Approx(analytic::uncorrelated_diffusion(5.0)).epsilon(0.25));
  }

  TEST_CASE("ratchet current follows the predicted sign and period") {
    const DimensionlessParams p{3.3, 1.0 / 16.0, 0.0, 1.0};
    const double quarter = pi / (4.0 * p.period_asymmetry);
    auto e = sample_initial(100000, quarter, 0.0, 9, p);
    const auto st = evolve_ensemble(e, 120);
    const double predicted = analytic::current(p, quarter, 120);
    CHECK(st.series.mean_shift.back() * predicted > 0.0);
    CHECK(std::abs(st.series.mean_shift.back()) > 10.0 * st.series.sem.back());
    // Shifting ρ_L by a full period π/b leaves the current unchanged.
    auto f = sample_initial(100000, quarter + pi / p.period_asymmetry, 0.0, 9, p);
    const auto sf = evolve_ensemble(f, 120);
    const double err = std::hypot(st.series.sem.back(), sf.series.sem.back());
    CHECK(std::abs(sf.series.mean_shift.back() - st.series.mean_shift.back()) < 3.0 * err);
  }
}
