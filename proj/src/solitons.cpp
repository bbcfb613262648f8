#include "qmnls/solitons.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <random>

#include "qmnls/checkpoint.hpp"
#include "qmnls/spectral.hpp"

namespace qmnls {

namespace {

double symbol_M(double xi, double eps, double tau) { return DispersionSymbol{eps}(xi) + tau; }

// (1/L) sum w(xi_k) |f^_k|^2
template <class W>
double weighted_sum(const Field& spec, W&& w) {
  const auto xi = spec.grid().freqs();
  double acc = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) acc += w(xi[k]) * std::norm(spec[k]);
  return acc / spec.grid().length();
}

// (1/L) sum Re(f^ conj g^)
double pairing(const Field& f_spec, const Field& g_spec) {
  double acc = 0.0;
  for (std::size_t k = 0; k < f_spec.size(); ++k) acc += (f_spec[k] * std::conj(g_spec[k])).real();
  return acc / f_spec.grid().length();
}

Field pointwise(const Field& a, const Field& b) {
  const Field pa = to_space(a, Space::Physical), pb = to_space(b, Space::Physical);
  std::vector<Complex> out(pa.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = pa[j].real() * pb[j].real();
  return Field(pa.grid(), std::move(out), Space::Physical);
}

Field nonlinearity(const Field& Q, double eps) { return pointwise(reconstruct_v(Q, eps), Q); }

double pde_residual(const Field& Q, double eps, double tau) {
  const Field lhs = apply_multiplier(Q, [&](double xi) { return symbol_M(xi, eps, tau); });
  return l2_norm(lhs - nonlinearity(Q, eps)) / l2_norm(Q);
}

Field recentre(const Field& Q) {
  const std::size_t n = Q.size();
  std::size_t peak = 0;
  for (std::size_t j = 1; j < n; ++j)
    if (Q[j].real() > Q[peak].real()) peak = j;
  const std::size_t shift = (n / 2 + n - peak) % n;
  if (shift == 0) return Q;
  std::vector<Complex> out(n);
  for (std::size_t j = 0; j < n; ++j) out[(j + shift) % n] = Q[j];
  return Field(Q.grid(), std::move(out), Space::Physical);
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

// Equal to 1 on |xi| <= 1/2 and 0 on |xi| >= 1.
double bump(double xi) { return 1.0 - smooth_step(2.0 * std::abs(xi) - 1.0); }

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

void SolitonProblem::validate() const {
  (void)Grid::make(n, length);
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("soliton eps must be positive");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("soliton tau must be positive");
}

Grid SolitonProblem::grid() const { return Grid::make(n, length); }

SolitonNotConverged::SolitonNotConverged(std::size_t iterations, double gamma, double residual)
    : NumericalError("Petviashvili iteration did not converge after " + std::to_string(iterations) +
                     " iterations (gamma " + std::to_string(gamma) + ", residual " +
                     std::to_string(residual) + ")"),
      iterations_(iterations),
      gamma_(gamma),
      residual_(residual) {}

Field real_field(const Field& f) {
  const Field p = to_space(f, Space::Physical);
  std::vector<Complex> out(p.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = p[j].real();
  return Field(p.grid(), std::move(out), Space::Physical);
}

Field reconstruct_v(const Field& Q, double eps) {
  return real_field(apply_J(pointwise(Q, Q), eps));
}

SolitonResult petviashvili_solve(const SolitonProblem& p, const Field& init, double tol,
                                 std::size_t max_iter) {
  p.validate();
  if (!(init.grid() == p.grid())) throw ConfigError("initial profile does not live on the problem grid");
  if (!init.all_finite()) throw ConfigError("initial profile is not finite");
  Field Q = real_field(init);
  if (l2_norm(Q) < 1e-12) throw ConfigError("initial profile must be nonzero");

  const auto M = [&](double xi) { return symbol_M(xi, p.eps, p.tau); };
  std::vector<double> gammas;
  std::size_t iterations = 0;
  double gamma = 0.0, residual = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const Field q_hat = forward_transform(Q);
    const Field n_hat = forward_transform(nonlinearity(Q, p.eps));
    const double mq = weighted_sum(q_hat, M);
    const double nq = pairing(n_hat, q_hat);
    if (!(nq > 0.0)) throw NumericalError("nonlinear pairing <J(Q^2)Q, Q> is not positive");
    gamma = mq / nq;
    gammas.push_back(gamma);

    std::vector<Complex> r(q_hat.size()), next(q_hat.size());
    const auto xi = q_hat.grid().freqs();
    for (std::size_t k = 0; k < r.size(); ++k) {
      const double m = M(xi[k]);
      r[k] = m * q_hat[k] - n_hat[k];
      next[k] = std::pow(gamma, 1.5) * n_hat[k] / m;
    }
    residual = std::sqrt(weighted_sum(Field(q_hat.grid(), r, Space::Frequency), [](double) { return 1.0; })) /
               l2_norm(Q);
    if (!std::isfinite(residual)) throw NumericalError("Petviashvili iteration produced non-finite values");
    if (residual <= tol && std::abs(gamma - 1.0) <= 1e-10) {
      iterations = it;
      break;
    }
    Q = real_field(Field(q_hat.grid(), std::move(next), Space::Frequency));
    if (l2_norm(Q) < 1e-12) throw TrivialFixedPoint("Petviashvili iteration collapsed to Q = 0");
    if (it == max_iter) throw SolitonNotConverged(it, gamma, residual);
  }
  if (iterations == 0) throw SolitonNotConverged(max_iter, gamma, residual);

  Q = recentre(Q);
  Field v = reconstruct_v(Q, p.eps);
  SolitonResult res{std::move(Q), std::move(v), 0.0, 0.0, 0.0, 0.0, iterations, std::move(gammas), 0.0};
  res.action = action(res.Q, res.v, p.eps, p.tau);
  res.residual_pde = pde_residual(res.Q, p.eps, p.tau);
  res.residual_pohozaev = pohozaev_residual(res.Q, res.v, p.eps, p.tau, 1).relative();
  res.residual_nehari = nehari_residual(res.Q, res.v, p.eps, p.tau).relative();
  res.min_value = res.Q[0].real();
  for (std::size_t j = 0; j < res.Q.size(); ++j) res.min_value = std::min(res.min_value, res.Q[j].real());
  return res;
}

QuadraticForms quadratic_forms(const Field& u, const Field& v) {
  const Field uh = to_space(u, Space::Frequency), vh = to_space(v, Space::Frequency);
  QuadraticForms q;
  q.lap_u = weighted_sum(uh, [](double xi) { return xi * xi * xi * xi; });
  q.grad_u = weighted_sum(uh, [](double xi) { return xi * xi; });
  q.mass_u = weighted_sum(uh, [](double) { return 1.0; });
  q.grad_v = weighted_sum(vh, [](double xi) { return xi * xi; });
  q.mass_v = weighted_sum(vh, [](double) { return 1.0; });
  const Field uu = pointwise(u, u), vv = real_field(v);
  double c = 0.0;
  for (std::size_t j = 0; j < uu.size(); ++j) c += uu[j].real() * vv[j].real();
  q.coupling = c * u.grid().dx();
  return q;
}

double action(const Field& u, const Field& v, double eps, double tau) {
  const QuadraticForms q = quadratic_forms(u, v);
  const double e2 = eps * eps;
  return 0.5 * e2 * q.lap_u + 0.5 * q.grad_u + 0.5 * tau * q.mass_u + 0.25 * e2 * q.grad_v +
         0.25 * q.mass_v - 0.5 * q.coupling;
}

std::pair<Field, Field> action_gradient(const Field& u, const Field& v, double eps, double tau) {
  const Field ur = real_field(u), vr = real_field(v);
  Field gu = real_field(apply_multiplier(ur, [&](double xi) { return symbol_M(xi, eps, tau); }));
  gu -= pointwise(ur, vr);
  Field gv = real_field(apply_multiplier(vr, [&](double xi) { return 1.0 + eps * eps * xi * xi; }));
  gv -= pointwise(ur, ur);
  gv *= Complex(0.5);
  return {std::move(gu), std::move(gv)};
}

namespace {

IdentityValue combine(const std::array<double, 6>& coeff, const QuadraticForms& q) {
  const std::array<double, 6> forms = {q.lap_u, q.grad_u, q.mass_u, q.grad_v, q.mass_v, q.coupling};
  IdentityValue out;
  for (std::size_t i = 0; i < 6; ++i) {
    out.value += coeff[i] * forms[i];
    out.scale += std::abs(coeff[i] * forms[i]);
  }
  return out;
}

}  // namespace

IdentityValue pohozaev_residual(const Field& u, const Field& v, double eps, double tau, int d) {
  const double e2 = eps * eps, dd = d;
  return combine({-2 * e2 * (dd - 4), -2 * (dd - 2), -2 * tau * dd, -e2 * (dd - 2), -dd, 2 * dd},
                 quadratic_forms(u, v));
}

IdentityValue nehari_residual(const Field& u, const Field& v, double eps, double tau) {
  const double e2 = eps * eps;
  return combine({e2, 1.0, tau, 0.5 * e2, 0.5, -1.5}, quadratic_forms(u, v));
}

IdentityValue combined_identity(const Field& u, const Field& v, double eps, double tau, int d) {
  const double e2 = eps * eps, dd = d;
  return combine({(8 - 2 * dd / 3) * e2, 4 - 2 * dd / 3, -2 * tau * dd / 3, (2 - dd / 3) * e2, -dd / 3, 0.0},
                 quadratic_forms(u, v));
}

std::string NonexistenceReport::to_text() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "d=%d%s\n"
                "left:  (8-2d/3) = %g  (4-2d/3) = %g  (2-d/3) = %g%s\n"
                "right: 2d/3 = %g (times tau)  d/3 = %g\n"
                "triviality forced: %s\n",
                d, eps_zero ? " eps=0" : "", c_lap, c_grad_u, c_grad_v,
                eps_zero ? "  (eps^2 terms absent)" : "", c_mass_u, c_mass_v, forced ? "yes" : "no");
  return buf;
}

NonexistenceReport nonexistence_report(int d, bool eps_zero) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  NonexistenceReport r;
  r.d = d;
  r.eps_zero = eps_zero;
  const double dd = d;
  r.c_lap = 8 - 2 * dd / 3;
  r.c_grad_u = 4 - 2 * dd / 3;
  r.c_grad_v = 2 - dd / 3;
  r.c_mass_u = 2 * dd / 3;
  r.c_mass_v = dd / 3;
  r.forced = r.c_grad_u <= 0.0 && (eps_zero || (r.c_lap <= 0.0 && r.c_grad_v <= 0.0));
  return r;
}

ScalingFit scaling_exponents_check(const std::vector<double>& s_values, int k_min, int k_max,
                                   std::size_t n, double length) {
  if (k_min < 0 || k_max - k_min < 1) throw ConfigError("need 0 <= k_min < k_max");
  const Grid g = Grid::make(n, length);
  if (std::ldexp(1.0, k_max) >= g.max_abs_freq())
    throw ConfigError("grid does not resolve the annulus |xi| <= 2^k_max");
  if (std::ldexp(1.0, k_min - 2) < 10.0 * g.freq_spacing())
    throw ConfigError("grid spacing too coarse for the annulus |xi| >= 2^(k_min-2)");

  ScalingFit fit;
  fit.s_values = s_values;
  fit.log2_hs.resize(s_values.size());
  std::vector<double> xs;
  for (int k = k_min; k <= k_max; ++k) {
    const double scale = std::ldexp(1.0, k);
    const Field spec = Field::from_spectrum(g, [&](double xi) {
      const double y = xi / scale;
      return bump(y) - bump(2.0 * y);
    });
    const Field u = inverse_transform(spec);
    double cube = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) cube += std::pow(std::abs(u[j]), 3);
    cube *= g.dx();
    fit.ks.push_back(k);
    xs.push_back(k);
    fit.log2_l3_cube.push_back(std::log2(cube));
    for (std::size_t i = 0; i < s_values.size(); ++i)
      fit.log2_hs[i].push_back(std::log2(sobolev_norm(spec, s_values[i])));
  }
  fit.l3_slope = least_squares_slope(xs, fit.log2_l3_cube);
  for (const auto& series : fit.log2_hs) fit.hs_slopes.push_back(least_squares_slope(xs, series));
  return fit;
}

TrilinearAudit trilinear_audit(std::size_t samples, std::size_t n, double length, unsigned seed) {
  const Grid coarse = Grid::make(n, length), fine = Grid::make(2 * n, length);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> cut(0.3, 4.0), shift(-0.25 * length, 0.25 * length);
  const auto half = static_cast<std::ptrdiff_t>(n / 2);

  // Hermitian spectrum on |k| < n/2, placed identically on both grids.
  auto random_pair = [&]() {
    const double c = cut(gen), x0 = shift(gen);
    std::vector<Complex> a(n), b(2 * n);
    for (std::ptrdiff_t k = 0; k < half; ++k) {
      const double xi = coarse.freq_spacing() * static_cast<double>(k);
      Complex z = Complex(nd(gen), k == 0 ? 0.0 : nd(gen)) * std::exp(-(xi / c) * (xi / c)) *
                  std::polar(1.0, -xi * x0) * length;
      if (k == 0) z = z.real();
      a[coarse.slot_of(k)] = z;
      b[fine.slot_of(k)] = z;
      if (k > 0) {
        a[coarse.slot_of(-k)] = std::conj(z);
        b[fine.slot_of(-k)] = std::conj(z);
      }
    }
    return std::pair{Field(coarse, std::move(a), Space::Frequency), Field(fine, std::move(b), Space::Frequency)};
  };
  auto ratio = [](const Field& u, const Field& v, const Field& w) {
    const Field pu = inverse_transform(u), pv = inverse_transform(v), pw = inverse_transform(w);
    double l1 = 0.0;
    for (std::size_t j = 0; j < pu.size(); ++j) l1 += std::abs(pu[j].real() * pv[j].real() * pw[j].real());
    l1 *= u.grid().dx();
    return l1 / (sobolev_norm(u, 2.0) * sobolev_norm(v, 2.0) * sobolev_norm(w, 1.0));
  };

  TrilinearAudit out;
  out.samples = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto [u, uf] = random_pair();
    const auto [v, vf] = random_pair();
    const auto [w, wf] = random_pair();
    out.max_ratio = std::max(out.max_ratio, ratio(u, v, w));
    out.max_ratio_refined = std::max(out.max_ratio_refined, ratio(uf, vf, wf));
  }
  out.relative_change = std::abs(out.max_ratio_refined - out.max_ratio) / out.max_ratio;
  return out;
}

void write_soliton(const std::filesystem::path& path, const SolitonProblem& p, const SolitonResult& r) {
  write_checkpoint(path, r.Q, p.eps, p.tau);
  std::filesystem::path meta = path;
  meta += ".meta.csv";
  std::ofstream out(meta);
  if (!out) throw ConfigError("cannot write " + meta.string());
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu\n", p.eps, p.tau, r.action,
                r.residual_pde, r.residual_pohozaev, r.residual_nehari, r.iterations);
  out << "eps,tau,action,residual_pde,residual_pohozaev,residual_nehari,iterations\n" << buf;
  if (!out) throw ConfigError("cannot write " + meta.string());
}

}  // namespace qmnls
