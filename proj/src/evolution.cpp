#include "qmnls/evolution.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "qmnls/spectral.hpp"

namespace qmnls {

double mass(const Field& f) {
  const double n = l2_norm(f);
  return n * n;
}

double energy(const Field& f, double eps) {
  const Field spec = to_space(f, Space::Frequency);
  const auto xi = f.grid().freqs();
  const double e2 = eps * eps;
  double quad = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const double x2 = xi[k] * xi[k];
    quad += (0.5 * e2 * x2 * x2 + 0.5 * x2) * std::norm(spec[k]);
  }
  quad /= f.grid().length();

  const Field phys = to_space(f, Space::Physical);
  std::vector<double> rho(phys.size());
  for (std::size_t j = 0; j < rho.size(); ++j) rho[j] = std::norm(phys[j]);
  const auto smoothed = real_part(apply_J(from_real(f.grid(), rho), eps));
  double quartic = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) quartic += smoothed[j] * rho[j];
  quartic *= f.grid().dx();
  return quad - 0.25 * quartic;
}

Field nonlinear_step(const Field& f, double dt, double eps) {
  if (f.space() != Space::Physical) throw UsageError("nonlinear_step expects a physical-space field");
  std::vector<double> rho(f.size());
  for (std::size_t j = 0; j < rho.size(); ++j) rho[j] = std::norm(f[j]);
  // J_eps has a real even symbol, so J_eps(|u|^2) is real up to roundoff.
  const auto potential = real_part(apply_J(from_real(f.grid(), rho), eps));
  std::vector<Complex> out(f.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::polar(1.0, dt * potential[j]) * f[j];
  return Field(f.grid(), std::move(out), Space::Physical);
}

Field dealias(const Field& f) {
  const auto n = static_cast<std::ptrdiff_t>(f.size());
  const Grid& g = f.grid();
  std::vector<Complex> mask(f.size());
  for (std::size_t k = 0; k < mask.size(); ++k) {
    const auto idx = g.signed_index(k);
    mask[k] = 3 * std::abs(idx) <= n ? 1.0 : 0.0;
  }
  return apply_multiplier_values(f, mask);
}

Field strang_step(const Field& f, double dt, double eps, StepOptions opts) {
  Field u = nonlinear_step(to_space(f, Space::Physical), 0.5 * dt, eps);
  u = linear_propagate(u, dt, eps);
  u = nonlinear_step(u, 0.5 * dt, eps);
  if (opts.dealias) u = dealias(u);
  return u;
}

void RunConfig::validate() const {
  (void)Grid::make(n, length);
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("eps must be finite and >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be positive");
  if (!(dt < t_final)) throw ConfigError("dt must be smaller than t_final");
  const double ratio = t_final / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
    throw ConfigError("t_final must be an integer multiple of dt");
  if (diag_stride == 0) throw ConfigError("diag_stride must be >= 1");
  for (double s : sobolev_orders)
    if (!std::isfinite(s)) throw ConfigError("sobolev orders must be finite");
  // The linear phase is applied exactly; this only guards against overflow.
  const Grid g = Grid::make(n, length);
  const double phase = dt * DispersionSymbol{eps}(g.max_abs_freq());
  if (!std::isfinite(phase)) throw ConfigError("linear phase dt*d_eps(xi_max) overflows");
}

std::size_t RunConfig::steps() const {
  return static_cast<std::size_t>(std::llround(t_final / dt));
}

const std::vector<double>& Diagnostics::hs(double s) const {
  for (const auto& series : hs_norms)
    if (series.s == s) return series.values;
  throw UsageError("Sobolev order " + std::to_string(s) + " was not tracked");
}

EvolutionAborted::EvolutionAborted(std::size_t step, Diagnostics last_good)
    : NumericalError("non-finite state detected at step " + std::to_string(step)),
      step_(step),
      last_good_(std::move(last_good)) {}

Field integrate(const Field& initial, double eps, double dt, std::size_t steps, std::size_t stride,
                const StepObserver& observer, StepOptions opts) {
  if (stride == 0) throw UsageError("sampling stride must be >= 1");
  Field u = to_space(initial, Space::Physical);
  if (observer) observer(0, 0.0, u);
  for (std::size_t i = 1; i <= steps; ++i) {
    u = strang_step(u, dt, eps, opts);
    if (!u.all_finite()) throw EvolutionAborted(i, {});
    if (observer && (i % stride == 0 || i == steps)) observer(i, static_cast<double>(i) * dt, u);
  }
  return u;
}

EvolveResult evolve(const RunConfig& cfg) {
  cfg.validate();
  const Grid grid = Grid::make(cfg.n, cfg.length);
  return evolve(cfg, make_field(cfg.datum, grid));
}

EvolveResult evolve(const RunConfig& cfg, const Field& initial) {
  cfg.validate();
  if (!(initial.grid() == Grid::make(cfg.n, cfg.length)))
    throw ConfigError("initial state does not live on the configured grid");

  Diagnostics diag;
  for (double s : cfg.sobolev_orders) diag.hs_norms.push_back({s, {}});
  std::vector<Snapshot> snaps;
  const std::size_t steps = cfg.steps();

  auto observe = [&](std::size_t step, double t, const Field& u) {
    if (step % cfg.diag_stride == 0 || step == steps) {
      diag.times.push_back(t);
      diag.mass.push_back(mass(u));
      diag.energy.push_back(energy(u, cfg.eps));
      for (auto& series : diag.hs_norms) series.values.push_back(sobolev_norm(u, series.s));
    }
    if (cfg.checkpoint_stride > 0 && (step % cfg.checkpoint_stride == 0 || step == steps))
      snaps.push_back({step, t, u});
  };

  // Sample at every multiple of either stride; the observer filters.
  std::size_t stride = cfg.diag_stride;
  if (cfg.checkpoint_stride > 0) stride = std::gcd(stride, cfg.checkpoint_stride);

  try {
    Field final_state =
        integrate(initial, cfg.eps, cfg.dt, steps, stride, observe, StepOptions{cfg.dealias});
    return EvolveResult{std::move(final_state), std::move(diag), std::move(snaps)};
  } catch (const EvolutionAborted& e) {
    throw EvolutionAborted(e.step(), std::move(diag));
  }
}

}  // namespace qmnls
