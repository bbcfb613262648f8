#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qmnls/datum.hpp"
#include "qmnls/evolution.hpp"
#include "qmnls/field.hpp"
#include "qmnls/quadrature.hpp"

namespace qmnls {

/// Shared setup for experiments that co-evolve several eps values from one datum.
struct SweepConfig {
  InitialDatum datum = GaussianDatum{};
  double s = 1.0;
  double t_final = 1.0;
  /// Strictly decreasing, nonnegative.
  std::vector<double> eps_list = {0.4, 0.2, 0.1, 0.05};
  double dt = 1e-3;
  std::size_t n = 512;
  double length = 40.0;
  /// Steps between samples; 0 picks the largest stride with stride*dt <= t_final/100.
  std::size_t diag_stride = 0;
  bool dealias = false;

  /// Throws ConfigError on invalid fields, including a stride coarser than t_final/100.
  void validate() const;
  std::size_t steps() const;
  std::size_t stride() const;
};

struct SweepMeta {
  double s = 0.0;
  double t_final = 0.0;
  double dt = 0.0;
  std::size_t n = 0;
  double length = 0.0;
  std::string datum_id;
  /// s > 1/2, the regime where convergence is known.
  bool within_hypothesis = false;
  std::size_t samples = 0;
};

struct SweepResult {
  std::vector<double> eps_values;
  /// max over samples of ||u_eps(t) - u_0(t)||_{H^s}; NaN for failed runs.
  std::vector<double> sup_errors;
  std::vector<bool> failed;
  std::vector<std::string> failure;
  SweepMeta meta;
};

/// Evolves the datum at eps = 0 and at every listed eps, and records the
/// supremum over the sampled times of the H^s distance between the two.
/// A run that turns non-finite is marked failed and the sweep continues.
SweepResult semiclassical_sweep(const SweepConfig& cfg, unsigned threads = 1);

/// ||(U_eps(t) - U_0(t)) u0||_{H^s}^2 = (1/L) sum 2(1 - cos(eps^2 t xi^4)) <xi>^{2s} |u0^|^2.
double linear_limit_error(const Field& u0, double s, double t, double eps);

/// Time average of linear_limit_error: (1/L) sum over xi != 0 of 2 <xi>^{2s} |u0^|^2.
double linear_limit_plateau(const Field& u0, double s);

/// Weight w(xi) = <xi>^{2s} |u0^(xi)|^2 on the real line.
using SpectralWeight = std::function<double(double)>;

/// \int w(xi) dxi, the t -> inf limit of \int (1 - cos(lambda xi^4)) w(xi) dxi.
/// `breakpoints` mark discontinuities of w. Throws QuadratureError when the
/// tolerance is not reached.
QuadResult limit_integral_plateau(const SpectralWeight& w, std::span<const double> breakpoints = {},
                                  QuadOptions opts = {});

struct LimitIntegral {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
  bool extrapolated = false;
};

/// \int (1 - cos(lambda xi^4)) w(xi) dxi for lambda = eps^2 t >= 0. The cosine
/// part is summed over the intervals between consecutive zeros of cos(lambda xi^4)
/// and the partial sums are accelerated with Wynn's epsilon algorithm.
LimitIntegral limit_integral_at(const SpectralWeight& w, double lambda,
                                std::span<const double> breakpoints = {}, double tol = 1e-11);

/// Weight of the special limit profile, 2 pi exp(-xi^2) for every s.
SpectralWeight special_profile_weight(double s);

/// Closed form of the special-profile integral through Bessel functions of
/// orders +-1/4 at argument 1/(8 lambda).
double special_profile_limit_bessel(double lambda);

struct PlateauReport {
  double s = 0.0;
  double plateau = 0.0;
  double error = 0.0;
  double stated_constant = 0.0;
  double computed_constant = 0.0;

  double stated_difference() const { return plateau - stated_constant; }
  double computed_difference() const { return plateau - computed_constant; }
  std::string to_text() const;
};

/// Plateau of the special profile next to the constants 2 pi and 2 pi^{3/2}.
PlateauReport plateau_report(double s);

/// (3^{floor(3s/4)+1} - 1)/2, the polynomial growth exponent of ||u(t)||_{H^s}.
double growth_exponent(double s);

struct GrowthResult {
  double s = 0.0;
  std::vector<double> times;
  std::vector<double> norms;
  /// Least-squares slope of log ||u(t)||_{H^s} against log <t>.
  double slope = 0.0;
  double intercept = 0.0;
  double exponent = 0.0;
  double margin = 0.0;
  bool within_bound = false;
};

/// Single run at cfg.eps (cfg.datum, grid, dt, t_final; sampling every cfg.diag_stride steps).
GrowthResult growth_tracking(const RunConfig& cfg, double s, double margin = 0.05);

struct UniformBoundReport {
  double radius = 0.0;
  std::vector<double> eps_values;
  /// Per-eps smallest C >= 0 with ||u_eps(t)||_{H^s} <= R e^{Ct} on the samples.
  std::vector<double> rates;
  double rate = 0.0;
  bool finite = false;
};

/// R = max ||u0||_{H^s} over the family; cfg.datum is not used.
UniformBoundReport uniform_bound_check(std::span<const InitialDatum> family, const SweepConfig& cfg,
                                       unsigned threads = 1);

struct DifferenceSeries {
  std::vector<double> eps_values;
  std::vector<double> times;
  /// errors[i][j] = ||u_{eps_i}(t_j) - u_0(t_j)||_{H^s}
  std::vector<std::vector<double>> errors;
  /// Fit of max_i errors[i](t) / eps_i^2 by K (e^{Ct} - 1).
  double envelope_scale = 0.0;
  double envelope_rate = 0.0;

  /// Error of run i at the sample closest to t.
  double error_at(std::size_t i, double t) const;
};

/// Requires cfg.s < 0 (ConfigError otherwise).
DifferenceSeries negative_s_difference(const SweepConfig& cfg, unsigned threads = 1);

}  // namespace qmnls
