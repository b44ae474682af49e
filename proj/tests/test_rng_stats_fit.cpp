#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numeric>
#include <random>
#include <set>

#include "kickrot/constants.hpp"
#include "kickrot/fit.hpp"
#include "kickrot/rng.hpp"
#include "kickrot/stats.hpp"
#include "support/generators.hpp"

using namespace kickrot;

TEST_SUITE("rng") {
  TEST_CASE("Philox4x32-10 known answers") {
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  }

  TEST_CASE("streams are reproducible and distinct") {
    RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
      const auto x = a();
      CHECK(x == b());
      seen.insert(x);
      seen.insert(c());
      seen.insert(d());
    }
    CHECK(seen.size() == 3000);
  }

  TEST_CASE("uniform and normal moments") {
    RandomStream s(1, 0);
    const int n = 200000;
    double su = 0, su2 = 0, sn = 0, sn2 = 0, sn4 = 0;
    for (int i = 0; i < n; ++i) {
      const double u = s.uniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      su += u;
      su2 += u * u;
      const double z = s.normal();
      sn += z;
      sn2 += z * z;
      sn4 += z * z * z * z;
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(su2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
    CHECK(std::abs(sn / n) < 4.0 / std::sqrt(n));
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sn4 / n == doctest::Approx(3.0).epsilon(0.03));
  }

  TEST_CASE("works with standard distributions") {
    RandomStream s(5, 5);
    std::uniform_int_distribution<int> die(1, 6);
    int counts[7] = {};
    for (int i = 0; i < 60000; ++i) ++counts[die(s)];
    for (int k = 1; k <= 6; ++k) CHECK(counts[k] == doctest::Approx(10000).epsilon(0.05));
  }
}

TEST_SUITE("stats") {
  TEST_CASE("pairwise sum is exact on integers and order-stable") {
    std::vector<double> v(10007);
    std::iota(v.begin(), v.end(), 1.0);
    CHECK(pairwise_sum(v) == 10007.0 * 10008.0 / 2.0);
    CHECK(pairwise_sum({}) == 0.0);

    std::vector<double> w(5000);
    prop::Gen g(3);
    for (auto& x : w) x = g.real(-1.0, 1.0) * 1e8;
    const double ref = pairwise_sum(w);
    long double naive = 0;
    for (double x : w) naive += x;
    CHECK(ref == doctest::Approx(static_cast<double>(naive)).epsilon(1e-12));
  }

  TEST_CASE("histogram bins, mass and mean") {
    Histogram h(0.0, 1.0);
    h.add(0.4);
    h.add(-0.4);
    h.add(2.6, 2.0);
    CHECK(h.mass() == 4.0);
    CHECK(h.bins().size() == 2);
    CHECK(h.bin_index(0.49) == 0);
    CHECK(h.bin_index(0.51) == 1);
    CHECK(h.bin_index(-0.51) == -1);
    CHECK(h.mean() == doctest::Approx((0.4 - 0.4 + 5.2) / 4.0));
    CHECK(h.bin_lo(3) == 2.5);
    CHECK(h.bin_hi(3) == 3.5);

    Histogram o(0.0, 1.0);
    o.add(10.0);
    h.merge(o);
    CHECK(h.mass() == 5.0);
    CHECK_THROWS(h.merge(Histogram(0.5, 1.0)));
  }

  TEST_CASE("parallel_for covers every index and rethrows") {
    std::vector<int> hit(1000, 0);
    parallel_for(hit.size(), 3, [&](std::size_t i) { hit[i] += 1; });
    CHECK(std::all_of(hit.begin(), hit.end(), [](int x) { return x == 1; }));
    CHECK_THROWS_AS(parallel_for(10, 2,
                                 [](std::size_t i) {
                                   if (i == 7) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
    CHECK(resolve_workers(0) >= 1);
    CHECK(resolve_workers(5) == 5);
  }
}

TEST_SUITE("fit") {
  TEST_CASE("fixed-frequency sinusoid recovers amplitude and phase") {
    std::vector<double> x, y;
    for (int i = 0; i < 25; ++i) {
      x.push_back(-1.0 + i / 12.0);
      y.push_back(0.2 + 3.8 * std::sin(constants::pi * x.back() + 0.3));
    }
    const auto s = fit::sinusoid_fixed(x, y, constants::pi);
    CHECK(s.amplitude == doctest::Approx(3.8).epsilon(1e-12));
    CHECK(s.phase == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(s.offset == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(s.r_squared == doctest::Approx(1.0));
    CHECK(s.period() == doctest::Approx(2.0));
    CHECK(s(0.25) == doctest::Approx(0.2 + 3.8 * std::sin(constants::pi * 0.25 + 0.3)));
  }

  TEST_CASE("free-period fit finds the period") {
    prop::for_all(20, 31, [](prop::Gen& g, int i) {
      CAPTURE(i);
      const double period = g.real(40.0, 120.0), amp = g.real(1.0, 10.0), ph = g.real(-3.0, 3.0);
      std::vector<double> x, y;
      for (int k = 0; k < 25; ++k) {
        x.push_back(-0.75 * period + 1.5 * period * k / 24.0);
        y.push_back(amp * std::sin(2.0 * constants::pi * x.back() / period + ph) + g.real(-0.05, 0.05));
      }
      const auto s = fit::sinusoid_free_period(x, y, 0.5 * period, 1.5 * period);
      CHECK(s.period() == doctest::Approx(period).epsilon(0.01));
      CHECK(s.amplitude == doctest::Approx(amp).epsilon(0.03));
    });
  }

  TEST_CASE("linear fit") {
    const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
    const auto l = fit::linear(x, y);
    CHECK(l.slope == doctest::Approx(2.0));
    CHECK(l.intercept == doctest::Approx(1.0));
    CHECK(l.r_squared == doctest::Approx(1.0));
  }
}
