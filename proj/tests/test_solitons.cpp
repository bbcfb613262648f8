#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "qmnls/checkpoint.hpp"
#include "qmnls/datum.hpp"
#include "qmnls/errors.hpp"
#include "qmnls/solitons.hpp"
#include "qmnls/spectral.hpp"
#include "support.hpp"

using namespace qmnls;
using std::numbers::pi;

namespace {

// Dense solve of (I - eps^2 D2) v = rhs with the periodic Fourier
// second-derivative matrix, by Gaussian elimination with partial pivoting.
std::vector<double> dense_helmholtz(const Grid& g, const std::vector<double>& rhs, double eps) {
  const std::size_t n = g.size();
  const double h = 2 * pi / static_cast<double>(n);
  const double scale = std::pow(2 * pi / g.length(), 2);
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double d2;
      if (i == j) {
        d2 = -pi * pi / (3 * h * h) - 1.0 / 6.0;
      } else {
        const double k = static_cast<double>(i) - static_cast<double>(j);
        const double s = std::sin(0.5 * k * h);
        d2 = -(((i + j) % 2 == 0) ? 1.0 : -1.0) / (2 * s * s);
      }
      a[i][j] = (i == j ? 1.0 : 0.0) - eps * eps * scale * d2;
    }
    a[i][n] = rhs[i];
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = a[i][n];
    for (std::size_t k = i + 1; k < n; ++k) acc -= a[i][k] * x[k];
    x[i] = acc / a[i][i];
  }
  return x;
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) m = std::max(m, std::abs(f[j]));
  return m;
}

SolitonResult solve_default(double width = 1.0) {
  const SolitonProblem p;
  return petviashvili_solve(p, make_field(GaussianDatum{1.0, width, 0.0}, p.grid()));
}

Field unit(Field f) {
  f *= Complex(1.0 / l2_norm(f));
  return f;
}

}  // namespace

TEST_SUITE("reconstruct v") {
  TEST_CASE("zero and constant") {
    const Grid g = Grid::make(64, 10.0);
    CHECK(max_abs(reconstruct_v(Field::zeros(g), 0.7)) == 0.0);
    const auto v = reconstruct_v(Field::from_function(g, [](double) { return 1.5; }), 0.7);
    for (std::size_t j = 0; j < v.size(); ++j) CHECK(v[j].real() == doctest::Approx(2.25).epsilon(1e-14));
  }

  TEST_CASE("Gaussian against a dense solve") {
    const Grid g = Grid::make(128, 20.0);
    const Field Q = make_field(GaussianDatum{1.3, 1.2, 0.5}, g);
    for (double eps : {0.1, 0.5, 2.0}) {
      const Field v = reconstruct_v(Q, eps);
      std::vector<double> rhs(g.size());
      for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] = std::norm(Q[j]);
      const auto ref = dense_helmholtz(g, rhs, eps);
      double err = 0.0;
      for (std::size_t j = 0; j < ref.size(); ++j) err = std::max(err, std::abs(v[j].real() - ref[j]));
      CHECK(err <= 1e-9);

      const Field q2 = from_real(g, rhs);
      const Field lhs = apply_multiplier(v, [&](double xi) { return 1.0 + eps * eps * xi * xi; });
      CHECK(l2_norm(lhs - q2) <= 1e-10 * l2_norm(q2));
    }
  }
}

TEST_SUITE("Petviashvili") {
  TEST_CASE("converged ground state at eps = 0.5") {
    const SolitonResult r = solve_default();
    CHECK(r.residual_pde <= 1e-8);
    CHECK(r.residual_pohozaev <= 1e-6);
    CHECK(r.residual_nehari <= 1e-6);
    CHECK(r.min_value > -1e-10);
    CHECK(std::abs(r.gammas.back() - 1.0) <= 1e-10);
    const std::size_t m = r.gammas.size();
    REQUIRE(m > 10);
    for (std::size_t i = m - 10; i < m; ++i)
      CHECK(std::abs(r.gammas[i] - 1.0) <= std::max(std::abs(r.gammas[i - 1] - 1.0), 1e-13));

    const auto [gu, gv] = action_gradient(r.Q, r.v, 0.5, 1.0);
    CHECK(std::hypot(l2_norm(gu), l2_norm(gv)) <= 1e-7);

    const std::size_t n = r.Q.size(), c = n / 2;
    double asym = 0.0;
    for (std::size_t j = 1; j < c; ++j) asym = std::max(asym, std::abs(r.Q[c + j] - r.Q[c - j]));
    CHECK(asym <= 1e-10 * max_abs(r.Q));
    CHECK(r.Q[c].real() == doctest::Approx(max_abs(r.Q)));
  }

  TEST_CASE("independent of the initial width") {
    const SolitonResult ref = solve_default(1.0);
    for (double w : {0.5, 2.0}) CHECK(l2_norm(solve_default(w).Q - ref.Q) <= 1e-6);
  }

  TEST_CASE("small eps approaches the NLS soliton") {
    SolitonProblem p;
    p.eps = 0.01;
    const auto r = petviashvili_solve(p, make_field(GaussianDatum{}, p.grid()));
    const Field sech = Field::from_function(p.grid(), [](double x) { return std::sqrt(2.0) / std::cosh(x); });
    CHECK(l2_norm(r.Q - sech) <= 0.05 * l2_norm(r.Q));
  }

  TEST_CASE("tau scaling at small eps") {
    SolitonProblem p;
    p.eps = 0.01;
    p.tau = 2.0;
    const auto r = petviashvili_solve(p, make_field(GaussianDatum{}, p.grid()));
    const double k = std::sqrt(p.tau);
    const Field sech = Field::from_function(p.grid(), [&](double x) { return std::sqrt(2 * p.tau) / std::cosh(k * x); });
    CHECK(l2_norm(r.Q - sech) <= 0.05 * l2_norm(r.Q));
  }

  TEST_CASE("restart from a stored solution") {
    const SolitonProblem p;
    const SolitonResult r = solve_default();
    const auto dir = std::filesystem::temp_directory_path() / "qmnls_soliton_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "ground.bin";
    write_soliton(path, p, r);

    const auto back = read_checkpoint(path);
    CHECK(back.t == p.tau);
    CHECK(back.eps == p.eps);
    const auto again = petviashvili_solve(p, back.state);
    CHECK(again.iterations <= 2);
    CHECK(std::abs(again.gammas.front() - 1.0) <= 1e-10);

    std::ifstream meta(dir / "ground.bin.meta.csv");
    std::string header, row;
    std::getline(meta, header);
    std::getline(meta, row);
    CHECK(header == "eps,tau,action,residual_pde,residual_pohozaev,residual_nehari,iterations");
    CHECK(std::count(row.begin(), row.end(), ',') == 6);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("failures") {
    const SolitonProblem p;
    const Field init = make_field(GaussianDatum{}, p.grid());
    try {
      petviashvili_solve(p, init, 1e-9, 1);
      FAIL("expected non-convergence");
    } catch (const SolitonNotConverged& e) {
      CHECK(e.iterations() == 1);
      CHECK(e.residual() > 1e-9);
      CHECK(std::isfinite(e.gamma()));
    }
    CHECK_THROWS_AS(petviashvili_solve(p, Field::zeros(p.grid())), ConfigError);
    SolitonProblem bad = p;
    bad.tau = 0.0;
    CHECK_THROWS_AS(petviashvili_solve(bad, init), ConfigError);
    bad = p;
    bad.eps = 0.0;
    CHECK_THROWS_AS(petviashvili_solve(bad, init), ConfigError);
    CHECK_THROWS_AS(petviashvili_solve(p, make_field(GaussianDatum{}, Grid::make(256, 60.0))), ConfigError);
  }
}

TEST_SUITE("action") {
  TEST_CASE("decoupled cases") {
    const Grid g = Grid::make(256, 30.0);
    const Field z = Field::zeros(g);
    CHECK(action(z, z, 0.5, 1.0) == 0.0);
    const Field v = make_field(GaussianDatum{0.8, 1.5, 0.0}, g);
    const double eps = 0.5;
    const Field dv = derivative(v, 1);
    const double expected = 0.25 * eps * eps * std::pow(l2_norm(dv), 2) + 0.25 * std::pow(l2_norm(v), 2);
    CHECK(action(z, v, eps, 1.0) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(action(z, v, eps, 1.0) >= 0.0);
  }

  TEST_CASE("stationary at the ground state") {
    const SolitonResult r = solve_default();
    CHECK(action(r.Q, r.v, 0.5, 1.0) == action(r.Q, reconstruct_v(r.Q, 0.5), 0.5, 1.0));
    auto gen = test::rng(21);
    const double delta = 1e-4;
    for (int i = 0; i < 5; ++i) {
      const Field w1 = unit(test::random_smooth_field(r.Q.grid(), gen, 2.0, true));
      const Field w2 = unit(test::random_smooth_field(r.Q.grid(), gen, 2.0, true));
      Field u = r.Q, v = r.v;
      u += Complex(delta) * w1;
      v += Complex(delta) * w2;
      const double change = std::abs(action(u, v, 0.5, 1.0) - r.action);
      CHECK(change <= 20.0 * delta * delta);
    }
  }

  TEST_CASE("gradient vanishes at zero") {
    const Grid g = Grid::make(64, 10.0);
    const auto [gu, gv] = action_gradient(Field::zeros(g), Field::zeros(g), 0.5, 1.0);
    CHECK(max_abs(gu) == 0.0);
    CHECK(max_abs(gv) == 0.0);
  }

  TEST_CASE("gradient against central differences") {
    const Grid g = Grid::make(256, 30.0);
    auto gen = test::rng(99);
    const double eps = 0.4, tau = 1.3;
    for (int trial = 0; trial < 50; ++trial) {
      // The action is cubic along lines, so the central difference error is h^2 times
      // a multiple of \int phi^2 psi; psi ~ phi^2 keeps that term away from zero.
      const Field u = unit(test::random_smooth_field(g, gen, 1.5, true));
      const Field v = unit(test::random_smooth_field(g, gen, 1.5, true));
      Field phi = test::random_smooth_field(g, gen, 1.5, true);
      phi *= Complex(30.0 / l2_norm(phi));
      std::vector<double> sq(g.size());
      for (std::size_t j = 0; j < sq.size(); ++j) sq[j] = std::norm(phi[j]);
      Field psi = from_real(g, sq);
      psi *= Complex(30.0 / l2_norm(psi));
      const auto [gu, gv] = action_gradient(u, v, eps, tau);
      double exact = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) exact += gu[j].real() * phi[j].real() + gv[j].real() * psi[j].real();
      exact *= g.dx();
      double errs[2];
      int idx = 0;
      for (double h : {1e-4, 1e-5}) {
        Field up = u, um = u, vp = v, vm = v;
        up += Complex(h) * phi;
        um -= Complex(h) * phi;
        vp += Complex(h) * psi;
        vm -= Complex(h) * psi;
        const double fd = (action(up, vp, eps, tau) - action(um, vm, eps, tau)) / (2 * h);
        errs[idx++] = std::abs(fd - exact);
      }
      CHECK(errs[1] <= 1e-6 * (1.0 + std::abs(exact)));
      CHECK(std::log10(errs[0] / errs[1]) >= 1.9);
    }
  }
}

TEST_SUITE("identities") {
  TEST_CASE("zero pair") {
    const Grid g = Grid::make(64, 10.0);
    const Field z = Field::zeros(g);
    CHECK(pohozaev_residual(z, z, 0.5, 1.0, 1).value == 0.0);
    CHECK(nehari_residual(z, z, 0.5, 1.0).value == 0.0);
  }

  TEST_CASE("converged pair satisfies both and a scaled pair does not") {
    const SolitonResult r = solve_default();
    CHECK(pohozaev_residual(r.Q, r.v, 0.5, 1.0, 1).relative() <= 1e-6);
    CHECK(nehari_residual(r.Q, r.v, 0.5, 1.0).relative() <= 1e-6);
    Field q2 = r.Q;
    q2 *= Complex(2.0);
    CHECK(pohozaev_residual(q2, r.v, 0.5, 1.0, 1).relative() > 1e-2);
    CHECK(nehari_residual(q2, r.v, 0.5, 1.0).relative() > 1e-2);
  }

  TEST_CASE("combined identity is Pohozaev + (4d/3) Nehari") {
    const SolitonResult r = solve_default();
    auto gen = test::rng(4);
    const Grid g = r.Q.grid();
    const Field u = test::random_smooth_field(g, gen, 2.0, true);
    const Field v = test::random_smooth_field(g, gen, 2.0, true);
    for (int d = 1; d <= 11; ++d) {
      for (const auto& [a, b] : {std::pair{&r.Q, &r.v}, std::pair{&u, &v}}) {
        const auto p = pohozaev_residual(*a, *b, 0.5, 1.0, d);
        const auto n = nehari_residual(*a, *b, 0.5, 1.0);
        const auto c = combined_identity(*a, *b, 0.5, 1.0, d);
        CHECK(std::abs(c.value - (p.value + 4.0 * d / 3.0 * n.value)) <= 1e-12 * (p.scale + d * n.scale));
      }
    }
    CHECK(combined_identity(r.Q, r.v, 0.5, 1.0, 1).relative() <= 1e-6);
  }

  TEST_CASE("nonexistence arithmetic") {
    const auto r12 = nonexistence_report(12);
    CHECK(r12.c_lap == 0.0);
    CHECK(r12.c_grad_u == -4.0);
    CHECK(r12.c_grad_v == -2.0);
    CHECK(r12.forced);
    CHECK(r12.to_text().find("triviality forced: yes") != std::string::npos);
    CHECK_FALSE(nonexistence_report(9).forced);
    CHECK_FALSE(nonexistence_report(11).forced);
    CHECK(nonexistence_report(13).forced);
    CHECK(nonexistence_report(6, true).forced);
    CHECK_FALSE(nonexistence_report(5, true).forced);
    CHECK_FALSE(nonexistence_report(6).forced);
    CHECK_THROWS_AS(nonexistence_report(0), DomainError);
  }
}

TEST_SUITE("scaling and trilinear") {
  TEST_CASE("scaling exponents") {
    const auto fit = scaling_exponents_check({0.0, 1.0, 2.0});
    CHECK(fit.l3_slope == doctest::Approx(2.0).epsilon(0.025));
    for (std::size_t i = 0; i < fit.s_values.size(); ++i)
      CHECK(std::abs(fit.hs_slopes[i] - (fit.s_values[i] + 0.5)) <= 0.05);
    CHECK(fit.ks.size() == 5);
    CHECK_THROWS_AS(scaling_exponents_check({0.0}, 3, 9), ConfigError);
    CHECK_THROWS_AS(scaling_exponents_check({0.0}, 3, 7, 8192, 5.0), ConfigError);
  }

  TEST_CASE("trilinear ratio is bounded and grid independent") {
    const auto a = trilinear_audit(1000);
    CHECK(a.samples == 1000);
    CHECK(a.max_ratio > 0.0);
    CHECK(std::isfinite(a.max_ratio));
    CHECK(a.relative_change < 1e-2);
  }
}
