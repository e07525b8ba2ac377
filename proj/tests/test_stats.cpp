#include <doctest.h>

#include <cmath>
#include <vector>

#include "stalker/phi_chain.hpp"
#include "stalker/rng.hpp"
#include "stalker/stats.hpp"
#include "support/stat_test_utils.hpp"

using stalker::RngStream;
using stalker::SeriesRecord;

TEST_CASE("first differences carry values and timestamps") {
  SeriesRecord s;
  s.label = "px";
  s.times = {0.0, 1.0, 3.0, 6.0};
  s.values = {2.0, 5.0, 4.0, 4.0};
  auto r = stalker::returns(s);
  CHECK(r.label == "px.returns");
  REQUIRE(r.size() == 3);
  CHECK(r.times == std::vector<double>{1.0, 3.0, 6.0});
  CHECK(r.values == std::vector<double>{3.0, -1.0, 0.0});

  SeriesRecord tiny;
  tiny.times = {0.0};
  tiny.values = {1.0};
  CHECK_THROWS(stalker::returns(tiny));
  SeriesRecord skewed;
  skewed.times = {0.0, 1.0};
  skewed.values = {1.0, 2.0, 3.0};
  CHECK_THROWS(stalker::returns(skewed));
}

TEST_CASE("windowed volatility autocorrelation: exact and statistical") {
  // alternating blocks make the window means a +-1 square wave whose ACF we
  // can write down: acf(L) = (-1)^L * (n_w - L) / n_w
  SeriesRecord alt;
  alt.label = "alt";
  const std::size_t n_w = 10, window = 2;
  for (std::size_t i = 0; i < n_w * window; ++i) {
    double mag = ((i / window) % 2 == 0) ? 1.0 : 3.0;
    // flip signs arbitrarily: only |.| should matter
    alt.values.push_back((i % 3 == 0) ? -mag : mag);
    alt.times.push_back(static_cast<double>(i));
  }
  auto acf = stalker::volatility_autocorr(alt, window, 3);
  CHECK(acf.label == "alt.volacf");
  REQUIRE(acf.size() == 4);
  CHECK(acf.values[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(acf.values[1] == doctest::Approx(-0.9).epsilon(1e-13));
  CHECK(acf.values[2] == doctest::Approx(0.8).epsilon(1e-13));
  CHECK(acf.values[3] == doctest::Approx(-0.7).epsilon(1e-13));
  CHECK(acf.times[2] == 2.0);

  // iid noise: every nonzero lag within gaussian error bars of zero
  SeriesRecord iid;
  RngStream r(21000, 0);
  for (int i = 0; i < 8000; ++i) {
    iid.times.push_back(i);
    iid.values.push_back(r.gauss());
  }
  auto acf_iid = stalker::volatility_autocorr(iid, 20, 5);  // 400 windows
  for (std::size_t lag = 1; lag <= 5; ++lag)
    CHECK(std::abs(acf_iid.values[lag]) < 4.0 / std::sqrt(400.0));

  // slowly modulated amplitude: neighbouring windows share their scale, so
  // the reduced series must show strong positive short-lag correlation
  SeriesRecord mod;
  RngStream r2(21001, 0);
  for (int i = 0; i < 8000; ++i) {
    mod.times.push_back(i);
    mod.values.push_back(r2.gauss() * (1.0 + 0.8 * std::sin(2.0 * M_PI * i / 400.0)));
  }
  auto acf_mod = stalker::volatility_autocorr(mod, 20, 3);
  CHECK(acf_mod.values[1] > 0.3);

  CHECK_THROWS(stalker::volatility_autocorr(iid, 0, 1));
  CHECK_THROWS(stalker::volatility_autocorr(iid, 4000, 1));   // only 2 windows
  CHECK_THROWS(stalker::volatility_autocorr(iid, 20, 400));   // lag >= n_w
}

TEST_CASE("excess kurtosis separates light and heavy tails") {
  // symmetric two-point law: fourth moment equals squared variance, so -2
  std::vector<double> pm;
  for (int i = 0; i < 100; ++i) pm.push_back((i % 2 == 0) ? 1.0 : -1.0);
  CHECK(stalker::excess_kurtosis(pm) == doctest::Approx(-2.0).epsilon(1e-14));

  RngStream r(22000, 0);
  std::vector<double> gauss(20000), laplace(20000);
  for (auto& v : gauss) v = r.gauss();
  for (auto& v : laplace) {
    double u = r.uniform_pos();
    double sign = (r.next_u64() >> 63) ? 1.0 : -1.0;
    v = -sign * std::log(u);  // two-sided exponential, excess kurtosis 3
  }
  CHECK(std::abs(stalker::excess_kurtosis(gauss)) < 0.2);
  CHECK(stalker::excess_kurtosis(laplace) > 1.5);

  CHECK_THROWS(stalker::excess_kurtosis({1.0, 2.0, 3.0}));
  CHECK_THROWS(stalker::excess_kurtosis({1.0, 1.0, 1.0, 1.0}));
}

TEST_CASE("recurrence diagnostics: counts, last visit, growth exponent") {
  SeriesRecord hand;
  hand.times = {0.0, 1.0, 2.0, 3.0, 4.0};
  hand.values = {0.5, 2.0, 0.8, 3.0, 0.9};
  auto d = stalker::recurrence_diagnostics(hand, 1.0);
  CHECK(d.radius == 1.0);
  CHECK(d.visit_count == 3);
  CHECK(d.last_exit == 4.0);

  // pure power law: the log-log slope over the final half is exact
  SeriesRecord pl;
  for (int i = 1; i <= 1000; ++i) {
    pl.times.push_back(i);
    pl.values.push_back(2.0 * std::pow(static_cast<double>(i), 0.7));
  }
  auto dp = stalker::recurrence_diagnostics(pl, 0.5);
  CHECK(dp.visit_count == 0);
  CHECK(dp.last_exit == 0.0);
  CHECK(dp.growth_exponent == doctest::Approx(0.7).epsilon(1e-10));

  CHECK_THROWS(stalker::recurrence_diagnostics(hand, 0.0));
  SeriesRecord broken;
  broken.times = {0.0};
  CHECK_THROWS(stalker::recurrence_diagnostics(broken, 1.0));
}

TEST_CASE("distance chain diagnostics tell weak from strong pull") {
  // weak pull (gamma = 0.5): keeps re-entering the unit ball and stays low;
  // strong pull (gamma = 2.5): never comes back, grows at a steady rate
  RngStream r1(12000, 0);
  auto weak = stalker::run_phi_series({1.0, 1.0}, 0.1, 0.5, 4000, r1);
  auto dw = stalker::recurrence_diagnostics(weak, 1.0);
  CHECK(dw.visit_count > 1500);
  CHECK(dw.last_exit > 0.9 * weak.times.back());
  CHECK(dw.growth_exponent < 0.1);

  RngStream r2(12000, 0);
  auto strong = stalker::run_phi_series({1.0, 1.0}, 0.1, 2.5, 4000, r2);
  auto ds = stalker::recurrence_diagnostics(strong, 1.0);
  CHECK(ds.visit_count == 0);
  CHECK(ds.growth_exponent > 0.15);
  CHECK(strong.values.back() > 5.0);
}

TEST_CASE("terminal distance law separates pull strengths across replicas") {
  for (double eps : {0.1, 0.05}) {
    std::vector<double> weak, strong;
    for (int i = 0; i < 50; ++i) {
      RngStream ra(13000, 1 + i), rb(14000, 1 + i);
      weak.push_back(
          stalker::run_phi_series({1.0, 1.0}, eps, 0.5, 400, ra).values.back());
      strong.push_back(
          stalker::run_phi_series({1.0, 1.0}, eps, 2.5, 400, rb).values.back());
    }
    CHECK(stattest::mann_whitney_p(weak, strong) < 0.01);
  }
}
