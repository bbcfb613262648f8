#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "qmnls/errors.hpp"
#include "qmnls/limits.hpp"
#include "qmnls/spectral.hpp"
#include "support.hpp"

using namespace qmnls;
using std::numbers::pi;

namespace {

SweepConfig quick_sweep() {
  SweepConfig c;
  c.n = 256;
  c.length = 40.0;
  c.t_final = 0.5;
  c.dt = 1e-3;
  return c;
}

}  // namespace

TEST_SUITE("sweep config") {
  TEST_CASE("eps list must decrease strictly") {
    SweepConfig c = quick_sweep();
    c.eps_list = {0.1, 0.2};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.eps_list = {0.1, 0.1};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.eps_list = {};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.eps_list = {0.2, -0.1};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.eps_list = {0.2, 0.1, 0.0};
    CHECK_NOTHROW(c.validate());
  }

  TEST_CASE("sampling stride") {
    SweepConfig c = quick_sweep();
    CHECK(c.steps() == 500);
    CHECK(c.stride() == 5);
    c.diag_stride = 6;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.diag_stride = 2;
    CHECK_NOTHROW(c.validate());
    c.diag_stride = 0;
    c.dt = 0.02;
    CHECK(c.stride() == 1);
  }
}

TEST_SUITE("semiclassical sweep") {
  TEST_CASE("eps = 0 follows the reference trajectory exactly") {
    SweepConfig c = quick_sweep();
    c.eps_list = {0.0};
    const auto r = semiclassical_sweep(c);
    REQUIRE(r.sup_errors.size() == 1);
    CHECK(r.sup_errors[0] == 0.0);
    CHECK_FALSE(r.failed[0]);
  }

  TEST_CASE("Gaussian at s = 1 converges") {
    SweepConfig c;
    c.s = 1.0;
    c.t_final = 1.0;
    const auto r = semiclassical_sweep(c);
    REQUIRE(r.sup_errors.size() == 4);
    for (std::size_t i = 1; i < 4; ++i) CHECK(r.sup_errors[i] < r.sup_errors[i - 1]);
    CHECK(r.sup_errors.back() / r.sup_errors.front() < 0.1);
    CHECK(r.meta.within_hypothesis);
    CHECK(r.meta.samples == 101);
    CHECK(r.meta.datum_id == datum_id(c.datum));
  }

  TEST_CASE("threads do not change the result") {
    SweepConfig c = quick_sweep();
    c.eps_list = {0.3, 0.1};
    const auto a = semiclassical_sweep(c, 1);
    const auto b = semiclassical_sweep(c, 2);
    CHECK(a.sup_errors == b.sup_errors);
  }

  TEST_CASE("s below one half is labelled") {
    SweepConfig c = quick_sweep();
    c.s = 0.25;
    c.eps_list = {0.1};
    CHECK_FALSE(semiclassical_sweep(c).meta.within_hypothesis);
  }

  TEST_CASE("small amplitude reduces to the linear difference") {
    SweepConfig c = quick_sweep();
    c.datum = GaussianDatum{1e-6, 1.0, 0.0};
    c.eps_list = {0.3, 0.1};
    c.s = 1.0;
    const auto r = semiclassical_sweep(c);
    const Field u0 = make_field(c.datum, Grid::make(c.n, c.length));
    for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
      double sup = 0.0;
      for (std::size_t j = 0; j <= c.steps(); j += c.stride())
        sup = std::max(sup, std::sqrt(linear_limit_error(u0, c.s, j * c.dt, c.eps_list[i])));
      CHECK(r.sup_errors[i] == doctest::Approx(sup).epsilon(1e-8));
    }
  }

  TEST_CASE("blow-up marks the runs failed") {
    SweepConfig c = quick_sweep();
    c.datum = GaussianDatum{1e160, 1.0, 0.0};
    c.eps_list = {0.2, 0.1};
    const auto r = semiclassical_sweep(c);
    CHECK(r.failed[0]);
    CHECK(r.failed[1]);
    CHECK(std::isnan(r.sup_errors[0]));
    CHECK_FALSE(r.failure[0].empty());
  }
}

TEST_SUITE("linear propagator limit") {
  TEST_CASE("zero at t = 0") {
    auto gen = test::rng(3);
    const Grid g = Grid::make(128, 20.0);
    const Field u0 = test::random_smooth_field(g, gen, 3.0);
    CHECK(linear_limit_error(u0, 1.0, 0.0, 0.5) == 0.0);
  }

  TEST_CASE("single mode") {
    const Grid g = Grid::make(64, 16 * pi);
    std::vector<Complex> v(g.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::polar(1.0, g.x(j));
    const Field mode(g, v, Space::Physical);
    for (double s : {0.0, 1.0, -2.0}) {
      const double norm2 = sobolev_norm_sq(mode, s);
      CHECK(norm2 == doctest::Approx(std::pow(2.0, s) * g.length()).epsilon(1e-12));
      CHECK(linear_limit_error(mode, s, pi, 1.0) == doctest::Approx(4.0 * norm2).epsilon(1e-12));
      CHECK(linear_limit_error(mode, s, 0.5 * pi, 1.0) == doctest::Approx(2.0 * norm2).epsilon(1e-12));
    }
  }

  TEST_CASE("agrees with the propagated difference") {
    auto gen = test::rng(11);
    const Grid g = Grid::make(256, 30.0);
    const Field u0 = test::random_smooth_field(g, gen, 2.5);
    for (double s : {-1.0, 0.0, 1.0, 2.5})
      for (double eps : {0.05, 0.3, 1.0})
        for (double t : {0.1, 1.0, 7.5}) {
          const double direct =
              std::pow(sobolev_distance(linear_propagate(u0, t, eps), linear_propagate(u0, t, 0.0), s), 2);
          const double spectral = linear_limit_error(u0, s, t, eps);
          CHECK(spectral == doctest::Approx(direct).epsilon(1e-11));
          CHECK(spectral <= 4.0 * sobolev_norm_sq(u0, s));
        }
  }

  TEST_CASE("running maximum stays below the plateau") {
    const Grid g = Grid::make(512, 40.0);
    const Field u0 = make_field(GaussianDatum{}, g);
    const double plateau = linear_limit_plateau(u0, 1.0);
    CHECK(plateau < 2.0 * sobolev_norm_sq(u0, 1.0));
    double running = 0.0;
    std::vector<double> maxima;
    for (int i = 0; i <= 2000; ++i) {
      running = std::max(running, linear_limit_error(u0, 1.0, 0.05 * i, 0.1));
      maxima.push_back(running);
    }
    CHECK(std::is_sorted(maxima.begin(), maxima.end()));
    CHECK(maxima.back() > maxima[200]);
    CHECK(maxima.back() < plateau);
  }

  TEST_CASE("operator norm of the symbol difference is 2") {
    const Grid g = Grid::make(4096, 200.0);
    double sup = 0.0;
    for (double xi : g.freqs()) sup = std::max(sup, std::abs(std::polar(1.0, -xi * xi * xi * xi) - 1.0));
    CHECK(sup > 2.0 - 1e-6);
    CHECK(sup <= 2.0);
  }
}

TEST_SUITE("limit integral") {
  TEST_CASE("special profile plateau") {
    for (double s : {0.0, 1.0, 3.0}) {
      const auto rep = plateau_report(s);
      CHECK(rep.plateau == doctest::Approx(2 * std::pow(pi, 1.5)).epsilon(1e-12));
      CHECK(std::abs(rep.computed_difference()) < 1e-10);
      CHECK(rep.stated_constant == doctest::Approx(2 * pi));
      CHECK(rep.stated_difference() > 4.8);
    }
    const auto text = plateau_report(1.0).to_text();
    CHECK(text.find("6.28318530717958") != std::string::npos);
    CHECK(text.find("11.1366559936634") != std::string::npos);
  }

  TEST_CASE("indicator profile has an elementary plateau") {
    const SpectralWeight w = [](double x) { return x >= 1.0 && x <= 2.0 ? 1.0 + x * x : 0.0; };
    const std::vector<double> bps = {1.0, 2.0};
    CHECK(limit_integral_plateau(w, bps).value == doctest::Approx(10.0 / 3.0).epsilon(1e-12));

    // cos part by brute-force panels
    const double lam = 50.0;
    std::vector<double> pts;
    for (int i = 0; i <= 2000; ++i) pts.push_back(1.0 + i / 2000.0);
    const auto cos_part = integrate([&](double x) { return std::cos(lam * x * x * x * x) * (1 + x * x); }, pts);
    const auto r = limit_integral_at(w, lam, bps);
    CHECK(r.value == doctest::Approx(10.0 / 3.0 - cos_part.value).epsilon(1e-10));
  }

  TEST_CASE("finite lambda matches the Bessel closed form") {
    const auto w = special_profile_weight(1.0);
    for (double lam : {0.01, 0.1, 1.0, 10.0, 1e3, 1e6, 1e9}) {
      const auto r = limit_integral_at(w, lam);
      CHECK(r.value == doctest::Approx(special_profile_limit_bessel(lam)).epsilon(1e-9));
    }
    CHECK(special_profile_limit_bessel(1.0) == doctest::Approx(2.3056605).epsilon(1e-7));
  }

  TEST_CASE("approach to the plateau is slow") {
    const double plateau = 2 * std::pow(pi, 1.5);
    const auto w = special_profile_weight(1.0);
    CHECK(limit_integral_at(w, 1e9).value > 0.99 * plateau);
    // lambda^{-1/4} decay: at lambda = 1e3 the value is still about 17% short
    const double gap = 1.0 - limit_integral_at(w, 1e3).value / plateau;
    CHECK(gap > 0.16);
    CHECK(gap < 0.17);
  }

  TEST_CASE("running maxima at eps and 10 eps reach the same plateau") {
    const double plateau = 2 * std::pow(pi, 1.5);
    const auto w = special_profile_weight(1.0);
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i <= 60; ++i) {
      const double t = std::pow(10.0, 0.25 * i);
      m1 = std::max(m1, limit_integral_at(w, 0.01 * 0.01 * t).value);
      m2 = std::max(m2, limit_integral_at(w, 0.1 * 0.1 * t).value);
    }
    CHECK(m1 < plateau);
    CHECK(m2 < plateau);
    CHECK(m1 == doctest::Approx(plateau).epsilon(0.01));
    CHECK(m2 == doctest::Approx(plateau).epsilon(0.01));
  }

  TEST_CASE("lambda = 0 and invalid lambda") {
    const auto w = special_profile_weight(0.0);
    CHECK(limit_integral_at(w, 0.0).value == 0.0);
    CHECK_THROWS_AS(limit_integral_at(w, -1.0), DomainError);
  }
}

TEST_SUITE("growth") {
  TEST_CASE("exponent formula") {
    CHECK(growth_exponent(0.0) == 1.0);
    CHECK(growth_exponent(1.0) == 1.0);
    CHECK(growth_exponent(4.0 / 3.0) == 4.0);
    CHECK(growth_exponent(2.0) == 4.0);
    CHECK(growth_exponent(3.0) == 13.0);
    CHECK_THROWS_AS(growth_exponent(-0.5), DomainError);
  }

  TEST_CASE("tracked slopes") {
    RunConfig rc;
    rc.n = 256;
    rc.length = 40.0;
    rc.eps = 0.5;
    rc.dt = 2e-3;
    rc.t_final = 2.0;
    rc.diag_stride = 10;
    const auto g0 = growth_tracking(rc, 0.0);
    CHECK(std::abs(g0.slope) <= 1e-6);
    CHECK(g0.norms.size() == 101);
    for (double s : {1.0, 2.0}) {
      const auto g = growth_tracking(rc, s);
      CHECK(g.within_bound);
      CHECK(g.slope <= g.exponent);
    }
  }
}

TEST_SUITE("uniform bound") {
  TEST_CASE("zero datum") {
    SweepConfig c = quick_sweep();
    const std::vector<InitialDatum> fam = {GaussianDatum{0.0, 1.0, 0.0}};
    const auto rep = uniform_bound_check(fam, c);
    CHECK(rep.radius == 0.0);
    CHECK(rep.rate == 0.0);
    CHECK(rep.finite);
  }

  TEST_CASE("rate is stable in eps and grows with the radius") {
    SweepConfig c;
    c.n = 1024;
    c.s = 1.0;
    c.eps_list = {0.05, 0.025, 0.0125};
    const std::vector<InitialDatum> one = {GaussianDatum{1.0, 1.0, 0.0}};
    const std::vector<InitialDatum> two = {GaussianDatum{2.0, 1.0, 0.0}};
    const auto r1 = uniform_bound_check(one, c);
    const auto r2 = uniform_bound_check(two, c);
    CHECK(r2.radius == doctest::Approx(2.0 * r1.radius));
    CHECK(r2.rate >= r1.rate);
    CHECK(r2.finite);
    const auto [lo, hi] = std::minmax_element(r2.rates.begin(), r2.rates.end());
    const double mid = 0.5 * (*lo + *hi);
    CHECK(*hi <= 1.1 * mid);
    CHECK(*lo >= 0.9 * mid);
  }
}

TEST_SUITE("negative s difference") {
  TEST_CASE("eps squared scaling") {
    SweepConfig c;
    c.s = -1.0;
    c.t_final = 0.5;
    c.eps_list = {0.2, 0.1, 0.05, 0.0};
    const auto d = negative_s_difference(c);
    const double r1 = d.error_at(0, 0.5) / d.error_at(1, 0.5);
    const double r2 = d.error_at(1, 0.5) / d.error_at(2, 0.5);
    CHECK(r1 >= 3.5);
    CHECK(r1 <= 4.5);
    CHECK(r2 >= 3.5);
    CHECK(r2 <= 4.5);
    for (double e : d.errors[3]) CHECK(e == 0.0);
    CHECK(d.errors[0][0] == 0.0);
    CHECK(d.errors[0][1] < d.errors[0][10]);
    CHECK(d.envelope_scale > 0.0);
    CHECK(std::isfinite(d.envelope_rate));
  }

  TEST_CASE("requires negative s") {
    SweepConfig c = quick_sweep();
    c.s = 0.5;
    CHECK_THROWS_AS(negative_s_difference(c), ConfigError);
  }
}
