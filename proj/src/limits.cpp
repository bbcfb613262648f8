#include "qmnls/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "parallel.hpp"
#include "qmnls/errors.hpp"
#include "qmnls/spectral.hpp"

namespace qmnls {

namespace {

using std::numbers::pi;

RunConfig run_config(const SweepConfig& cfg, double eps) {
  RunConfig rc;
  rc.n = cfg.n;
  rc.length = cfg.length;
  rc.eps = eps;
  rc.dt = cfg.dt;
  rc.t_final = cfg.t_final;
  rc.datum = cfg.datum;
  rc.dealias = cfg.dealias;
  return rc;
}

// Physical states at the sample steps of cfg.
std::vector<Field> trajectory(const Field& u0, double eps, const SweepConfig& cfg) {
  std::vector<Field> states;
  integrate(u0, eps, cfg.dt, cfg.steps(), cfg.stride(),
            [&](std::size_t, double, const Field& u) { states.push_back(u); },
            StepOptions{cfg.dealias});
  return states;
}

std::vector<double> sample_times(const SweepConfig& cfg) {
  std::vector<double> t;
  const std::size_t steps = cfg.steps(), stride = cfg.stride();
  for (std::size_t i = 0; i <= steps; ++i)
    if (i % stride == 0 || i == steps) t.push_back(static_cast<double>(i) * cfg.dt);
  return t;
}

// ||u_eps(t_j) - reference_j||_{H^s} along the run.
std::vector<double> distance_series(const Field& u0, double eps, const SweepConfig& cfg, double s,
                                    const std::vector<Field>& reference) {
  std::vector<double> out;
  out.reserve(reference.size());
  integrate(u0, eps, cfg.dt, cfg.steps(), cfg.stride(),
            [&](std::size_t, double, const Field& u) {
              out.push_back(sobolev_distance(u, reference[out.size()], s));
            },
            StepOptions{cfg.dealias});
  return out;
}

std::vector<double> norm_series(const Field& u0, double eps, const SweepConfig& cfg) {
  std::vector<double> out;
  integrate(u0, eps, cfg.dt, cfg.steps(), cfg.stride(),
            [&](std::size_t, double, const Field& u) { out.push_back(sobolev_norm(u, cfg.s)); },
            StepOptions{cfg.dealias});
  return out;
}

double weighted_energy(const Field& u0, double s, double t, double eps, bool drop_phase) {
  const Field spec = to_space(u0, Space::Frequency);
  const auto xi = spec.grid().freqs();
  const double lam = eps * eps * t;
  double acc = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const double x2 = xi[k] * xi[k];
    if (drop_phase && xi[k] == 0.0) continue;
    const double factor = drop_phase ? 2.0 : 2.0 * (1.0 - std::cos(lam * x2 * x2));
    acc += factor * std::pow(1.0 + x2, s) * std::norm(spec[k]);
  }
  return acc / spec.grid().length();
}

}  // namespace

void SweepConfig::validate() const {
  if (!std::isfinite(s)) throw ConfigError("s must be finite");
  if (eps_list.empty()) throw ConfigError("eps_list must not be empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] >= 0.0) || !std::isfinite(eps_list[i]))
      throw ConfigError("eps_list entries must be finite and >= 0");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw ConfigError("eps_list must be strictly decreasing");
  }
  for (double eps : eps_list) run_config(*this, eps).validate();
  if (diag_stride > 0 && static_cast<double>(diag_stride) * dt > 0.01 * t_final * (1.0 + 1e-12))
    throw ConfigError("diag_stride * dt must not exceed t_final / 100");
}

std::size_t SweepConfig::steps() const { return run_config(*this, 0.0).steps(); }

std::size_t SweepConfig::stride() const {
  if (diag_stride > 0) return diag_stride;
  const auto limit = static_cast<std::size_t>(std::floor(0.01 * t_final / dt * (1.0 + 1e-12)));
  return std::max<std::size_t>(1, limit);
}

SweepResult semiclassical_sweep(const SweepConfig& cfg, unsigned threads) {
  cfg.validate();
  const Field u0 = make_field(cfg.datum, Grid::make(cfg.n, cfg.length));

  SweepResult res;
  res.eps_values = cfg.eps_list;
  const std::size_t m = cfg.eps_list.size();
  res.sup_errors.assign(m, std::numeric_limits<double>::quiet_NaN());
  res.failed.assign(m, false);
  res.failure.assign(m, "");
  res.meta = {cfg.s,      cfg.t_final,          cfg.dt,      cfg.n,
              cfg.length, datum_id(cfg.datum), cfg.s > 0.5, sample_times(cfg).size()};

  std::vector<Field> reference;
  try {
    reference = trajectory(u0, 0.0, cfg);
  } catch (const EvolutionAborted& e) {
    res.failed.assign(m, true);
    res.failure.assign(m, std::string("eps = 0 reference: ") + e.what());
    return res;
  }

  std::vector<char> failed(m, 0);
  detail::parallel_for(m, threads, [&](std::size_t i) {
    try {
      const auto d = distance_series(u0, cfg.eps_list[i], cfg, cfg.s, reference);
      res.sup_errors[i] = *std::max_element(d.begin(), d.end());
    } catch (const EvolutionAborted& e) {
      failed[i] = 1;
      res.failure[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < m; ++i) res.failed[i] = failed[i] != 0;
  return res;
}

double linear_limit_error(const Field& u0, double s, double t, double eps) {
  return weighted_energy(u0, s, t, eps, false);
}

double linear_limit_plateau(const Field& u0, double s) { return weighted_energy(u0, s, 0.0, 0.0, true); }

QuadResult limit_integral_plateau(const SpectralWeight& w, std::span<const double> breakpoints,
                                  QuadOptions opts) {
  std::vector<double> points(breakpoints.begin(), breakpoints.end());
  if (points.empty()) points.push_back(0.0);
  const QuadResult r = integrate_line(w, points, 1.0, opts);
  if (!r.converged) throw QuadratureError("plateau quadrature did not converge", r.error);
  return r;
}

LimitIntegral limit_integral_at(const SpectralWeight& w, double lambda,
                                std::span<const double> breakpoints, double tol) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and >= 0");
  const QuadResult plateau = limit_integral_plateau(w, breakpoints);
  if (lambda == 0.0) return {0.0, 0.0, 0, false};

  std::vector<double> bps;
  for (double b : breakpoints)
    if (b != 0.0) bps.push_back(std::abs(b));
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  // Fold onto [0, inf): the phase lambda xi^4 is even.
  const Integrand f = [&](double x) {
    const double x2 = x * x;
    return std::cos(lambda * x2 * x2) * (w(x) + w(-x));
  };
  const auto node = [&](std::size_t k) {
    return std::pow((static_cast<double>(k) + 0.5) * pi / lambda, 0.25);
  };

  const double scale = std::max(std::abs(plateau.value), std::numeric_limits<double>::min());
  const QuadOptions opts{1e-3 * tol * scale, 1e-13, 4000};
  const std::size_t max_intervals = 200000;

  double total = 0.0, left = 0.0;
  std::size_t k = 0, bi = 0, quiet = 0, count = 0;
  std::vector<double> sums;
  double previous = std::numeric_limits<double>::quiet_NaN();
  int agreements = 0;
  while (count < max_intervals) {
    double right = node(k);
    bool at_node = true;
    if (bi < bps.size() && bps[bi] <= right) {
      at_node = bps[bi] == right;
      right = bps[bi];
      ++bi;
    }
    if (at_node) ++k;
    const QuadResult term = integrate(f, left, right, opts);
    if (!term.converged) throw QuadratureError("oscillatory interval did not converge", term.error);
    total += term.value;
    left = right;
    ++count;
    if (bi < bps.size()) continue;

    quiet = std::abs(term.value) <= 1e-3 * tol * scale ? quiet + 1 : 0;
    if (quiet >= 4) return {plateau.value - total, plateau.error + 4e-3 * tol * scale, count, false};

    if (!at_node) continue;
    sums.push_back(total);
    if (sums.size() < 12 || sums.size() % 2 != 0) continue;
    const std::size_t window = std::min<std::size_t>(sums.size(), 40);
    const Extrapolation ext = wynn_epsilon(std::span<const double>(sums).last(window));
    if (std::abs(ext.value - previous) <= tol * scale) {
      if (++agreements >= 2)
        return {plateau.value - ext.value, plateau.error + std::abs(ext.value - previous), count, true};
    } else {
      agreements = 0;
    }
    previous = ext.value;
  }
  throw QuadratureError("oscillatory sum did not settle within the interval budget",
                        std::abs(total - previous));
}

SpectralWeight special_profile_weight(double s) {
  return [s](double xi) {
    const double a = special_profile_spectrum(xi, s);
    return std::pow(1.0 + xi * xi, s) * a * a;
  };
}

double special_profile_limit_bessel(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  const double z = 1.0 / (8.0 * lambda);
  const double jp = std::cyl_bessel_j(0.25, z);
  // J_{-1/4} = cos(pi/4) J_{1/4} - sin(pi/4) Y_{1/4}
  const double jm = std::numbers::sqrt2 / 2 * (jp - std::cyl_neumann(0.25, z));
  const double inv = 1.0 / lambda;
  const double osc = std::sqrt(2 * pi) *
                     (std::sin((pi - inv) / 8) * jp - std::cos((inv + pi) / 8) * jm) /
                     std::sqrt(lambda);
  return 0.5 * std::pow(pi, 1.5) * (osc + 4.0);
}

std::string PlateauReport::to_text() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "plateau s=%.17g\n"
                "computed      %.17g (quadrature error %.3g)\n"
                "stated 2*pi   %.17g difference %.17g\n"
                "2*pi^(3/2)    %.17g difference %.17g\n",
                s, plateau, error, stated_constant, stated_difference(), computed_constant,
                computed_difference());
  return buf;
}

PlateauReport plateau_report(double s) {
  const QuadResult q = limit_integral_plateau(special_profile_weight(s), {}, {1e-15, 1e-13, 4000});
  return {s, q.value, q.error, 2 * pi, 2 * std::pow(pi, 1.5)};
}

double growth_exponent(double s) {
  if (!(s >= 0.0)) throw DomainError("growth exponent needs s >= 0");
  return 0.5 * (std::pow(3.0, std::floor(0.75 * s) + 1.0) - 1.0);
}

GrowthResult growth_tracking(const RunConfig& cfg, double s, double margin) {
  if (!(s >= 0.0)) throw ConfigError("growth tracking needs s >= 0");
  RunConfig rc = cfg;
  rc.sobolev_orders = {s};
  const EvolveResult run = evolve(rc);

  GrowthResult g;
  g.s = s;
  g.times = run.diagnostics.times;
  g.norms = run.diagnostics.hs(s);
  g.exponent = growth_exponent(s);
  g.margin = margin;
  if (g.norms.front() > 0.0) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(g.times.size());
    for (std::size_t i = 0; i < g.times.size(); ++i) {
      const double x = 0.5 * std::log1p(g.times[i] * g.times[i]);
      const double y = std::log(g.norms[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    g.slope = denom > 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
    g.intercept = (sy - g.slope * sx) / m;
  }
  g.within_bound = g.slope <= g.exponent + margin;
  return g;
}

UniformBoundReport uniform_bound_check(std::span<const InitialDatum> family, const SweepConfig& cfg,
                                       unsigned threads) {
  cfg.validate();
  const Grid grid = Grid::make(cfg.n, cfg.length);
  std::vector<Field> data;
  UniformBoundReport rep;
  for (const auto& d : family) {
    data.push_back(make_field(d, grid));
    rep.radius = std::max(rep.radius, sobolev_norm(data.back(), cfg.s));
  }
  rep.eps_values = cfg.eps_list;
  rep.rates.assign(cfg.eps_list.size(), 0.0);
  const std::vector<double> times = sample_times(cfg);
  const std::size_t runs = data.size() * cfg.eps_list.size();
  std::vector<double> rate(runs, 0.0);

  if (rep.radius > 0.0) {
    detail::parallel_for(runs, threads, [&](std::size_t r) {
      const std::size_t i = r / data.size(), j = r % data.size();
      const auto norms = norm_series(data[j], cfg.eps_list[i], cfg);
      double c = 0.0;
      for (std::size_t k = 1; k < norms.size(); ++k)
        c = std::max(c, std::log(norms[k] / rep.radius) / times[k]);
      rate[r] = c;
    });
  }
  for (std::size_t r = 0; r < runs; ++r) {
    auto& slot = rep.rates[r / data.size()];
    slot = std::max(slot, rate[r]);
  }
  rep.rate = rep.rates.empty() ? 0.0 : *std::max_element(rep.rates.begin(), rep.rates.end());
  rep.finite = std::isfinite(rep.rate);
  return rep;
}

double DifferenceSeries::error_at(std::size_t i, double t) const {
  std::size_t best = 0;
  for (std::size_t j = 1; j < times.size(); ++j)
    if (std::abs(times[j] - t) < std::abs(times[best] - t)) best = j;
  return errors.at(i).at(best);
}

DifferenceSeries negative_s_difference(const SweepConfig& cfg, unsigned threads) {
  if (!(cfg.s < 0.0)) throw ConfigError("negative_s_difference needs s < 0");
  cfg.validate();
  const Field u0 = make_field(cfg.datum, Grid::make(cfg.n, cfg.length));
  const std::vector<Field> reference = trajectory(u0, 0.0, cfg);

  DifferenceSeries out;
  out.eps_values = cfg.eps_list;
  out.times = sample_times(cfg);
  out.errors.resize(cfg.eps_list.size());
  detail::parallel_for(cfg.eps_list.size(), threads, [&](std::size_t i) {
    out.errors[i] = distance_series(u0, cfg.eps_list[i], cfg, cfg.s, reference);
  });

  std::vector<double> env(out.times.size(), 0.0);
  for (std::size_t i = 0; i < out.eps_values.size(); ++i) {
    const double e2 = out.eps_values[i] * out.eps_values[i];
    if (e2 == 0.0) continue;
    for (std::size_t j = 0; j < env.size(); ++j) env[j] = std::max(env[j], out.errors[i][j] / e2);
  }

  // For fixed C the best K is linear least squares; C by golden-section search in log C.
  const auto fit = [&](double c, double* k_out) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < env.size(); ++j) {
      const double g = std::expm1(c * out.times[j]);
      num += env[j] * g;
      den += g * g;
    }
    const double k = den > 0.0 ? num / den : 0.0;
    double res = 0.0;
    for (std::size_t j = 0; j < env.size(); ++j) {
      const double d = env[j] - k * std::expm1(c * out.times[j]);
      res += d * d;
    }
    if (k_out) *k_out = k;
    return res;
  };
  const double tmax = out.times.back();
  double lo = std::log(1e-4 / tmax), hi = std::log(50.0 / tmax);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    if (fit(std::exp(a), nullptr) <= fit(std::exp(b), nullptr))
      hi = b;
    else
      lo = a;
  }
  out.envelope_rate = std::exp(0.5 * (lo + hi));
  fit(out.envelope_rate, &out.envelope_scale);
  return out;
}

}  // namespace qmnls
