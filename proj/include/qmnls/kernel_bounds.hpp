#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qmnls {

/// Parameters of the cubic
///   P(xi2) = 4 eps^2 xi2^3 + |xi1|^{2/3}(eps^2 xi1^2 + 2) xi2 + |(1 + eps^2 (xi1 - xi)^2)(xi1 - xi)^2 + tau|.
/// A valid problem has xi > 1, eps > 0 and d_eps(xi)/2 < tau < 2 d_eps(xi).
struct RootProblem {
  double xi = 2.0;
  double tau = 20.0;
  double eps = 1.0;
  double xi1 = 0.0;
};

/// Throws DomainError unless the problem lies in the window above.
void validate(const RootProblem& p);

struct Cubic {
  double lead = 0.0;
  double linear = 0.0;
  double constant = 0.0;

  double operator()(double x) const noexcept { return (lead * x * x + linear) * x + constant; }
  double derivative(double x) const noexcept { return 3.0 * lead * x * x + linear; }
};

/// Coefficients of P for any parameters (no window check).
Cubic cubic_of(double xi, double tau, double eps, double xi1);
Cubic cubic_of(const RootProblem& p);

double eval_P(const RootProblem& p, double xi2);

/// The unique real root (<= 0) of a cubic with lead > 0, linear >= 0,
/// constant >= 0, via the sinh/asinh closed form; cube-root form when the
/// linear coefficient vanishes.
double negative_root(const Cubic& c);

/// Root of P through the closed form. Validates the window; |xi1| < 1e-12
/// uses the degenerate branch -(c / (4 eps^2))^{1/3}.
double root_r(const RootProblem& p);

/// Independent bracketing-and-bisection root of P on (-inf, 0].
double root_bisect(const RootProblem& p);

/// Number of sign changes of P over the sorted sample points.
int sign_changes(const RootProblem& p, std::span<const double> xi2_points);

struct AuditRow {
  std::string kind;
  double xi = 0.0;
  double tau = 0.0;
  std::optional<double> xi1;
  double value = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

struct AuditCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct AuditReport {
  std::string name;
  std::vector<AuditRow> rows;
  std::vector<AuditCheck> checks;

  bool passed() const;
};

/// Closed-form root on `count` random valid problems (xi in [1, 100], eps in [0.1, 3],
/// tau across the window, |xi1| in [1e-3 xi, 1e3 xi] of both signs). Rows carry
/// |P(r)| against 1e-8 (1 + |P(0)|); checks also cover bisection agreement to
/// 1e-10 relative and a single sign change of P on [-10|r|, 0].
AuditReport root_formula_audit(std::size_t count = 1000, std::uint64_t seed = 2024);

/// Audit xi1 values: log-spaced magnitudes in [1e-6 xi, 1e3 xi] of both
/// signs, 0, and the structural points +-xi/2, +-xi, +-2xi. Sorted.
std::vector<double> audit_xi1_grid(double xi, std::size_t per_sign = 160);

/// |r| / xi^{4/3} over the audit grid for each xi (tau = tau_fraction * d_eps(xi)).
/// Checks positivity, stability of the per-xi minima within 2x, monotonicity in
/// tau and the reflection inequality |r(-xi1)| >= |r(xi1)|.
AuditReport lower_bound_audit(double eps, std::span<const double> xi_grid, double tau_fraction = 1.0);

/// |r| against d_eps(xi)^{1/3} for |xi1| <= xi/2 and |xi1|^{1/3} <eps xi1> beyond.
/// Checks finite and stable branch constants and the decrease of |r| on (0, xi).
AuditReport upper_bound_audit(double eps, std::span<const double> xi_grid, double tau_fraction = 1.0);

/// alpha1 / alpha2 for xi1 in [0, xi/2) at tau in {~d/2, d, ~2d}; checks <= 91.
AuditReport ratio91_audit(double eps, std::span<const double> xi_grid);

/// phi_beta(a): 1 for beta > 1, log(1 + <a>) for beta = 1, <a>^{1-beta} for beta < 1.
double phi_beta(double beta, double a);

/// \int dtau / (<tau - a1>^beta <tau - a2>^gamma) by adaptive quadrature.
double weighted_kernel_integral(double beta, double gamma, double a1, double a2);

/// Ratio of the kernel integral to <a>^{-gamma} phi_beta(a) over a = a1 - a2.
/// Throws DomainError unless beta >= gamma >= 0 and beta + gamma > 1.
AuditReport phi_kernel_audit(double beta, double gamma, std::span<const double> a_grid);

/// \int_A^inf dz / (z (z - A)^a) by quadrature.
double tail_integral(double A, double a);

/// Quadrature against A^{-a} pi / sin(pi a) (1e-8 relative), against the
/// explicit bound (1/(1-a) + 1/a) A^{-a}, and the homogeneity value(4A)/value(A) = 4^{-a}.
AuditReport tail_integral_audit(std::span<const double> A_grid, std::span<const double> a_grid);

struct SmoothingParams {
  double eps = 1.0;
  double b = 0.55;
  double gamma = 0.4;
  double a = 1.0;
  double s = 0.0;
};

/// Throws DomainError outside s >= 0, gamma in [1/3, 1/2), b in (1/2, 1 - gamma),
/// a in [0, 4/3), eps > 0.
void validate(const SmoothingParams& p);

struct SmoothingValue {
  double prefactor = 0.0;
  double integral = 0.0;
  double value = 0.0;
  bool converged = false;
};

/// <xi>^{2a} <tau - d_eps(xi)>^{-2 gamma} \iint <eps xi1>^{-4} |xi1|^{-1/3} <P>^{-2b} dxi2 dxi1.
SmoothingValue smoothing_value(const SmoothingParams& p, double xi, double tau);

/// Inner integral \int <P(xi2)>^{-2b} dxi2 split at the root and at 0.
double smoothing_inner(const SmoothingParams& p, double xi, double tau, double xi1);

struct SmoothingSample {
  double xi = 0.0;
  double tau = 0.0;
  int proof_case = 0;
  double value = 0.0;
  bool flagged = false;
};

struct SmoothingAudit {
  std::vector<SmoothingSample> samples;
  std::vector<double> running_max;
  double worst = 0.0;
  /// Relative increase of the running max contributed by samples with xi in (xi_max/10, xi_max].
  double final_decade_increase = 0.0;
  std::size_t flagged = 0;
};

/// Samples (xi, tau) on xi log-spaced in [0.1, xi_max], eleven tau values per xi
/// across the three cases (tau < 0; tau in [0, d/2] or [2d, inf); tau in (d/2, 2d)),
/// ordered by increasing xi. Runs on up to `threads` workers.
SmoothingAudit smoothing_supremum_sample(const SmoothingParams& p, std::size_t sample_count,
                                         double xi_max = 1e3, unsigned threads = 1);

}  // namespace qmnls
