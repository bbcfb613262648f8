#include "qmnls/kernel_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "parallel.hpp"
#include "qmnls/errors.hpp"
#include "qmnls/quadrature.hpp"
#include "qmnls/spectral.hpp"

namespace qmnls {

namespace {

using std::numbers::pi;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double abs_root(double xi, double tau, double eps, double xi1) {
  return std::abs(root_r({xi, tau, eps, xi1}));
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

}  // namespace

void validate(const RootProblem& p) {
  if (!std::isfinite(p.xi) || !std::isfinite(p.tau) || !std::isfinite(p.eps) || !std::isfinite(p.xi1))
    throw DomainError("root problem has non-finite parameters");
  if (!(p.xi > 1.0)) throw DomainError("root problem needs xi > 1");
  if (!(p.eps > 0.0)) throw DomainError("root problem needs eps > 0");
  const double d = DispersionSymbol{p.eps}(p.xi);
  if (!(p.tau > 0.5 * d && p.tau < 2.0 * d))
    throw DomainError("root problem needs d_eps(xi)/2 < tau < 2 d_eps(xi)");
}

Cubic cubic_of(double xi, double tau, double eps, double xi1) {
  const double e2 = eps * eps;
  const double m = xi1 - xi;
  Cubic c;
  c.lead = 4.0 * e2;
  c.linear = std::cbrt(xi1 * xi1) * (e2 * xi1 * xi1 + 2.0);
  // d(m) + tau written as (d(xi) + tau) + (d(m) - d(xi)) so that the
  // cancellation near tau = -d(xi) happens in a single rounded sum.
  const double shift = DispersionSymbol{eps}(xi) + tau;
  c.constant = std::abs(shift + xi1 * (xi1 - 2.0 * xi) * (1.0 + e2 * (m * m + xi * xi)));
  return c;
}

Cubic cubic_of(const RootProblem& p) { return cubic_of(p.xi, p.tau, p.eps, p.xi1); }

double eval_P(const RootProblem& p, double xi2) { return cubic_of(p)(xi2); }

double negative_root(const Cubic& c) {
  if (c.constant == 0.0) return 0.0;
  if (c.linear == 0.0) return -std::cbrt(c.constant / c.lead);
  const double arg = 1.5 * c.constant / c.linear * std::sqrt(3.0 * c.lead / c.linear);
  if (arg > 1e30) return -std::cbrt(c.constant / c.lead);
  const double pref = 2.0 * std::sqrt(c.linear / (3.0 * c.lead));
  return -pref * std::sinh(std::asinh(arg) / 3.0);
}

double root_r(const RootProblem& p) {
  validate(p);
  const Cubic c = cubic_of(p);
  if (std::abs(p.xi1) < 1e-12) return -std::cbrt(c.constant / c.lead);
  return negative_root(c);
}

double root_bisect(const RootProblem& p) {
  const Cubic c = cubic_of(p);
  if (c.constant == 0.0) return 0.0;
  double hi = 0.0, lo = -1.0;
  while (c(lo) > 0.0) lo *= 2.0;
  for (int it = 0; it < 2000 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * std::abs(lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (c(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

int sign_changes(const RootProblem& p, std::span<const double> xi2_points) {
  const Cubic c = cubic_of(p);
  int changes = 0;
  double prev = 0.0;
  for (double x : xi2_points) {
    const double v = c(x);
    if (v == 0.0) continue;
    if (prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++changes;
    prev = v;
  }
  return changes;
}

bool AuditReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.ok; });
}

AuditReport root_formula_audit(std::size_t count, std::uint64_t seed) {
  AuditReport rep;
  rep.name = "root";
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_residual = 0.0, worst_agreement = 0.0;
  std::size_t multiple = 0;
  std::vector<double> grid(401);
  for (std::size_t i = 0; i < count; ++i) {
    RootProblem p;
    p.xi = std::pow(10.0, 2.0 * u(gen)) * (1.0 + 1e-9);
    p.eps = 0.1 + 2.9 * u(gen);
    const double d = DispersionSymbol{p.eps}(p.xi);
    p.tau = d * (0.5 + 1.5 * (0.001 + 0.998 * u(gen)));
    p.xi1 = (u(gen) < 0.5 ? -1.0 : 1.0) * p.xi * std::pow(10.0, -3.0 + 6.0 * u(gen));

    const double r = root_r(p);
    const double c = eval_P(p, 0.0);
    const double residual = std::abs(eval_P(p, r));
    const double bound = 1e-8 * (1.0 + c);
    const double rb = root_bisect(p);
    worst_residual = std::max(worst_residual, residual / bound);
    worst_agreement = std::max(worst_agreement, std::abs(r - rb) / std::abs(rb));
    for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = -10.0 * std::abs(r) * (1.0 - k / 400.0);
    if (sign_changes(p, grid) != 1) ++multiple;
    rep.rows.push_back({"root", p.xi, p.tau, p.xi1, residual, bound, residual / bound});
  }
  rep.checks.push_back({"|P(r)| <= 1e-8 (1 + |c|)", worst_residual <= 1.0, "max ratio " + fmt(worst_residual)});
  rep.checks.push_back({"bisection agreement 1e-10", worst_agreement <= 1e-10, "max " + fmt(worst_agreement)});
  rep.checks.push_back({"single sign change", multiple == 0, std::to_string(multiple) + " problems with other counts"});
  return rep;
}

std::vector<double> audit_xi1_grid(double xi, std::size_t per_sign) {
  std::vector<double> g = {0.0, xi / 2, -xi / 2, xi, -xi, 2 * xi, -2 * xi};
  for (std::size_t i = 0; i < per_sign; ++i) {
    const double e = -6.0 + 9.0 * static_cast<double>(i) / static_cast<double>(per_sign - 1);
    const double m = xi * std::pow(10.0, e);
    g.push_back(m);
    g.push_back(-m);
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

AuditReport lower_bound_audit(double eps, std::span<const double> xi_grid, double tau_fraction) {
  AuditReport rep;
  rep.name = "lower_bound";
  std::vector<double> minima;
  bool positive = true, tau_monotone = true, reflection = true, residual = true;
  double worst_residual = 0.0;
  for (double xi : xi_grid) {
    const double d = DispersionSymbol{eps}(xi);
    const double tau = tau_fraction * d;
    const double tau_lo = 0.5 * d * (1.0 + 1e-9), tau_hi = 2.0 * d * (1.0 - 1e-9);
    const double bound = std::pow(xi, 4.0 / 3.0);
    double min_ratio = std::numeric_limits<double>::infinity();
    for (double xi1 : audit_xi1_grid(xi)) {
      const RootProblem p{xi, tau, eps, xi1};
      const double r = root_r(p);
      const double c = cubic_of(p).constant;
      const double res = std::abs(eval_P(p, r)) / (1.0 + c);
      worst_residual = std::max(worst_residual, res);
      if (!(r < 0.0)) positive = false;
      if (!(res <= 1e-8)) residual = false;
      const double ratio = std::abs(r) / bound;
      min_ratio = std::min(min_ratio, ratio);
      rep.rows.push_back({"lower", xi, tau, xi1, std::abs(r), bound, ratio});
      if (abs_root(xi, tau_hi, eps, xi1) < abs_root(xi, tau_lo, eps, xi1)) tau_monotone = false;
      if (xi1 > 0.0 && abs_root(xi, tau, eps, -xi1) < abs_root(xi, tau, eps, xi1) * (1.0 - 1e-14))
        reflection = false;
    }
    if (!(min_ratio > 0.0)) positive = false;
    minima.push_back(min_ratio);
  }
  const double s = minima.empty() ? 1.0 : spread(minima);
  rep.checks.push_back({"roots negative and minima positive", positive, ""});
  rep.checks.push_back({"residual |P(r)| <= 1e-8 (1 + |c|)", residual, "worst " + fmt(worst_residual)});
  rep.checks.push_back({"per-xi minima within 2x", s <= 2.0, "spread " + fmt(s)});
  rep.checks.push_back({"|r| nondecreasing in tau across the window", tau_monotone, ""});
  rep.checks.push_back({"|r(-xi1)| >= |r(xi1)| for xi1 > 0", reflection, ""});
  return rep;
}

AuditReport upper_bound_audit(double eps, std::span<const double> xi_grid, double tau_fraction) {
  AuditReport rep;
  rep.name = "upper_bound";
  std::vector<double> inner_max, outer_max;
  bool decreasing = true, finite = true;
  for (double xi : xi_grid) {
    const double d = DispersionSymbol{eps}(xi);
    const double tau = tau_fraction * d;
    double kin = 0.0, kout = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (double xi1 : audit_xi1_grid(xi)) {
      const double r = abs_root(xi, tau, eps, xi1);
      const bool inner = std::abs(xi1) <= 0.5 * xi;
      const double bound = inner ? std::cbrt(d) : std::cbrt(std::abs(xi1)) * japanese_bracket(eps * xi1);
      const double ratio = r / bound;
      if (!std::isfinite(ratio)) finite = false;
      (inner ? kin : kout) = std::max(inner ? kin : kout, ratio);
      rep.rows.push_back({inner ? "upper_inner" : "upper_outer", xi, tau, xi1, r, bound, ratio});
      if (xi1 > 0.0 && xi1 < xi) {
        if (r > prev * (1.0 + 1e-14)) decreasing = false;
        prev = r;
      }
    }
    inner_max.push_back(kin);
    outer_max.push_back(kout);
  }
  const double si = inner_max.empty() ? 1.0 : spread(inner_max);
  const double so = outer_max.empty() ? 1.0 : spread(outer_max);
  rep.checks.push_back({"branch constants finite", finite, ""});
  rep.checks.push_back({"inner-branch constant within 2x across xi", si <= 2.0, "spread " + fmt(si)});
  rep.checks.push_back({"outer-branch constant within 2x across xi", so <= 2.0, "spread " + fmt(so)});
  rep.checks.push_back({"|r| decreasing on (0, xi)", decreasing, ""});
  return rep;
}

AuditReport ratio91_audit(double eps, std::span<const double> xi_grid) {
  AuditReport rep;
  rep.name = "ratio91";
  double worst = 0.0;
  for (double xi : xi_grid) {
    const double d = DispersionSymbol{eps}(xi);
    for (double tau : {0.5 * d * (1.0 + 1e-9), d, 2.0 * d * (1.0 - 1e-9)}) {
      for (double xi1 : audit_xi1_grid(xi)) {
        if (xi1 < 0.0 || xi1 >= 0.5 * xi) continue;
        const double plus = cubic_of(xi, tau, eps, -xi1).constant;
        const double minus = cubic_of(xi, tau, eps, xi1).constant;
        const double ratio = plus / minus;
        worst = std::max(worst, ratio);
        rep.rows.push_back({"ratio91", xi, tau, xi1, ratio, 91.0, ratio / 91.0});
      }
    }
  }
  rep.checks.push_back({"alpha1/alpha2 <= 91", worst <= 91.0, "max " + fmt(worst)});
  return rep;
}

double phi_beta(double beta, double a) {
  const double b = japanese_bracket(a);
  if (beta > 1.0) return 1.0;
  if (beta == 1.0) return std::log(1.0 + b);
  return std::pow(b, 1.0 - beta);
}

double weighted_kernel_integral(double beta, double gamma, double a1, double a2) {
  const Integrand f = [=](double t) {
    return std::exp(-0.5 * beta * std::log1p((t - a1) * (t - a1)) - 0.5 * gamma * std::log1p((t - a2) * (t - a2)));
  };
  const QuadResult r = integrate_line(f, {a1, a2}, 1.0, {1e-300, 1e-10, 20000});
  if (!r.converged) throw QuadratureError("kernel integral did not converge", r.error);
  return r.value;
}

AuditReport phi_kernel_audit(double beta, double gamma, std::span<const double> a_grid) {
  if (!(beta >= gamma && gamma >= 0.0 && beta + gamma > 1.0))
    throw DomainError("kernel integral needs beta >= gamma >= 0 and beta + gamma > 1");
  AuditReport rep;
  rep.name = "phi_kernel";
  std::vector<double> ratios;
  bool finite = true;
  for (double a : a_grid) {
    const double value = weighted_kernel_integral(beta, gamma, a, 0.0);
    const double bound = std::pow(japanese_bracket(a), -gamma) * phi_beta(beta, a);
    const double ratio = value / bound;
    if (!std::isfinite(ratio) || !(ratio > 0.0)) finite = false;
    ratios.push_back(ratio);
    rep.rows.push_back({"phi", 0.0, 0.0, a, value, bound, ratio});
  }
  const double s = ratios.empty() ? 1.0 : spread(ratios);
  rep.checks.push_back({"ratios finite and positive", finite, "spread " + fmt(s)});
  return rep;
}

double tail_integral(double A, double a) {
  if (!(A > 0.0) || !(a > 0.0 && a < 1.0)) throw DomainError("tail integral needs A > 0 and 0 < a < 1");
  // z - A = A y^{1/(1-a)} on [A, 2A] removes the endpoint singularity.
  const double p = 1.0 / (1.0 - a);
  const QuadOptions opts{1e-300, 1e-12, 4000};
  const QuadResult near = integrate([=](double y) { return 1.0 / (1.0 + std::pow(y, p)); }, 0.0, 1.0, opts);
  const QuadResult far = integrate_tail(
      [=](double z) { return 1.0 / (z * std::pow(z - A, a)); }, 2.0 * A, +1, A, opts);
  if (!near.converged || !far.converged)
    throw QuadratureError("tail integral did not converge", near.error + far.error);
  return std::pow(A, -a) * p * near.value + far.value;
}

AuditReport tail_integral_audit(std::span<const double> A_grid, std::span<const double> a_grid) {
  AuditReport rep;
  rep.name = "tail_integral";
  double worst_rel = 0.0, worst_scale = 0.0;
  bool bound_ok = true;
  for (double a : a_grid) {
    for (double A : A_grid) {
      const double value = tail_integral(A, a);
      const double exact = std::pow(A, -a) * pi / std::sin(pi * a);
      const double explicit_bound = (1.0 / (1.0 - a) + 1.0 / a) * std::pow(A, -a);
      const double rel = std::abs(value - exact) / exact;
      worst_rel = std::max(worst_rel, rel);
      if (!(value <= explicit_bound)) bound_ok = false;
      const double scaled = tail_integral(4.0 * A, a) / value / std::pow(4.0, -a);
      worst_scale = std::max(worst_scale, std::abs(scaled - 1.0));
      rep.rows.push_back({"tail_closed_form", a, A, std::nullopt, value, exact, value / exact});
      rep.rows.push_back({"tail_explicit_bound", a, A, std::nullopt, value, explicit_bound, value / explicit_bound});
    }
  }
  rep.checks.push_back({"closed form within 1e-8 relative", worst_rel <= 1e-8, "worst " + fmt(worst_rel)});
  rep.checks.push_back({"explicit bound (1/(1-a) + 1/a) A^-a holds", bound_ok, ""});
  rep.checks.push_back({"value(4A)/value(A) = 4^-a within 1e-8", worst_scale <= 1e-8, "worst " + fmt(worst_scale)});
  return rep;
}

void validate(const SmoothingParams& p) {
  if (!(p.eps > 0.0) || !std::isfinite(p.eps)) throw DomainError("smoothing audit needs eps > 0");
  if (!(p.s >= 0.0) || !std::isfinite(p.s)) throw DomainError("smoothing audit needs s >= 0");
  if (!(p.gamma >= 1.0 / 3.0 && p.gamma < 0.5)) throw DomainError("smoothing audit needs gamma in [1/3, 1/2)");
  if (!(p.b > 0.5 && p.b < 1.0 - p.gamma)) throw DomainError("smoothing audit needs b in (1/2, 1 - gamma)");
  if (!(p.a >= 0.0 && p.a < 4.0 / 3.0)) throw DomainError("smoothing audit needs a in [0, 4/3)");
}

namespace {

const QuadOptions inner_opts{1e-300, 1e-8, 4000};
const QuadOptions outer_opts{1e-300, 1e-6, 4000};

struct InnerResult {
  double value;
  bool converged;
};

InnerResult inner_integral(const Cubic& c, double b) {
  // Integrate in delta = xi2 - r with P(r) = 0 built in, so the integrand
  // keeps full precision near a large root.
  const double r = negative_root(c);
  const double slope = c.derivative(r);
  const double quad = 3.0 * c.lead * r;
  const Integrand f = [=](double delta) {
    const double v = delta * (slope + delta * (quad + c.lead * delta));
    return std::pow(1.0 + v * v, -b);
  };
  // Length over which |P| grows to O(1) away from the root.
  double h = std::cbrt(1.0 / c.lead);
  if (slope > 0.0) h = std::min(h, 1.0 / slope);
  if (quad != 0.0) h = std::min(h, 1.0 / std::sqrt(std::abs(quad)));
  QuadResult total = integrate_tail(f, 0.0, -1, h, inner_opts);
  if (r < 0.0) {
    const Integrand mapped = [&](double u) {
      const double g = std::exp(u);
      return f(h * (g - 1.0)) * h * g;
    };
    total += integrate(mapped, 0.0, std::log1p(-r / h), inner_opts);
  }
  double scale = std::cbrt((1.0 + c.constant) / c.lead);
  if (c.linear > 0.0) scale = std::min(scale, (1.0 + c.constant) / c.linear);
  total += integrate_tail(f, -r, +1, scale, inner_opts);
  return {total.value, total.converged};
}

}  // namespace

double smoothing_inner(const SmoothingParams& p, double xi, double tau, double xi1) {
  return inner_integral(cubic_of(xi, tau, p.eps, xi1), p.b).value;
}

SmoothingValue smoothing_value(const SmoothingParams& p, double xi, double tau) {
  validate(p);
  const double e2 = p.eps * p.eps;
  const double d = DispersionSymbol{p.eps}(xi);
  SmoothingValue out;
  out.prefactor = std::pow(japanese_bracket(xi), 2.0 * p.a) * std::pow(japanese_bracket(tau - d), -2.0 * p.gamma);

  bool inner_ok = true;
  // xi1 = w^3 turns |xi1|^{-1/3} dxi1 into 3|w| dw.
  const Integrand g = [&](double w) {
    const double xi1 = w * w * w;
    const double weight = 1.0 / ((1.0 + e2 * xi1 * xi1) * (1.0 + e2 * xi1 * xi1));
    if (weight == 0.0) return 0.0;
    const InnerResult in = inner_integral(cubic_of(xi, tau, p.eps, xi1), p.b);
    if (!in.converged) inner_ok = false;
    return 3.0 * std::abs(w) * weight * in.value;
  };

  std::vector<double> breaks = {0.0, xi / 2, -xi / 2, xi, -xi, 2 * xi, 1.0 / p.eps, -1.0 / p.eps};
  if (tau < 0.0) {
    const double y = std::sqrt((-1.0 + std::sqrt(1.0 - 4.0 * e2 * tau)) / (2.0 * e2));
    breaks.push_back(xi + y);
    breaks.push_back(xi - y);
  }
  for (auto& x : breaks) x = std::cbrt(x);
  const double extent = *std::max_element(breaks.begin(), breaks.end(), [](double l, double r) {
    return std::abs(l) < std::abs(r);
  });
  const QuadResult outer = integrate_line(g, breaks, 0.25 * std::max(1.0, std::abs(extent)), outer_opts);
  out.integral = outer.value;
  out.value = out.prefactor * out.integral;
  out.converged = outer.converged && inner_ok && std::isfinite(out.value);
  return out;
}

SmoothingAudit smoothing_supremum_sample(const SmoothingParams& p, std::size_t sample_count, double xi_max,
                                         unsigned threads) {
  validate(p);
  if (sample_count == 0) throw DomainError("smoothing audit needs at least one sample");
  if (!(xi_max > 1.0)) throw DomainError("smoothing audit needs xi_max > 1");
  constexpr double fractions[] = {-4.0, -1.0, -0.25, 0.0, 0.25, 0.5, 2.0, 4.0, 0.75, 1.0, 1.5};
  constexpr std::size_t per_xi = std::size(fractions);
  const std::size_t n_xi = std::max<std::size_t>(2, (sample_count + per_xi - 1) / per_xi);
  const double lo = std::log10(0.1), hi = std::log10(xi_max);

  SmoothingAudit audit;
  audit.samples.resize(n_xi * per_xi);
  detail::parallel_for(n_xi, threads, [&](std::size_t i) {
    const double xi = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_xi - 1));
    const double d = DispersionSymbol{p.eps}(xi);
    for (std::size_t j = 0; j < per_xi; ++j) {
      const double tau = fractions[j] * d;
      SmoothingSample s;
      s.xi = xi;
      s.tau = tau;
      s.proof_case = tau < 0.0 ? 1 : (tau <= 0.5 * d || tau >= 2.0 * d) ? 2 : 3;
      try {
        const SmoothingValue v = smoothing_value(p, xi, tau);
        s.value = v.value;
        s.flagged = !v.converged;
      } catch (const NumericalError&) {
        s.flagged = true;
      }
      audit.samples[i * per_xi + j] = s;
    }
  });

  double running = 0.0, before_last_decade = 0.0;
  for (const auto& s : audit.samples) {
    if (s.flagged) {
      ++audit.flagged;
    } else {
      running = std::max(running, s.value);
    }
    if (s.xi <= xi_max / 10.0) before_last_decade = running;
    audit.running_max.push_back(running);
  }
  audit.worst = running;
  audit.final_decade_increase = before_last_decade > 0.0 ? running / before_last_decade - 1.0 : 0.0;
  return audit;
}

}  // namespace qmnls
