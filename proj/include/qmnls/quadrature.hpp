#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qmnls {

using Integrand = std::function<double(double)>;

struct QuadOptions {
  double abs_tol = 1e-14;
  double rel_tol = 1e-11;
  std::size_t max_intervals = 4000;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;

  QuadResult& operator+=(const QuadResult& other);
};

/// One 21-point Gauss-Kronrod rule on [a, b] with the QUADPACK error estimate.
QuadResult gauss_kronrod21(const Integrand& f, double a, double b);

/// Globally adaptive bisection over the pieces delimited by `points`
/// (sorted, at least two entries). The interval with the largest error is
/// split until the total error meets the tolerance.
QuadResult integrate(const Integrand& f, std::span<const double> points, QuadOptions opts = {});
QuadResult integrate(const Integrand& f, double a, double b, QuadOptions opts = {});

/// \int_a^{a + direction * inf} f, through x = a + direction * scale * (e^u - 1),
/// summed over unit chunks in u until the geometric tail estimate drops below
/// the tolerance. `scale` should be the length over which f changes near a.
QuadResult integrate_tail(const Integrand& f, double a, int direction, double scale,
                          QuadOptions opts = {});

/// \int over the real line: adaptive between the sorted breakpoints, tails
/// beyond the outermost ones.
QuadResult integrate_line(const Integrand& f, std::vector<double> points, double tail_scale,
                          QuadOptions opts = {});

struct Extrapolation {
  double value = 0.0;
  double error = 0.0;
};

/// Wynn's epsilon algorithm applied to a sequence of partial sums.
Extrapolation wynn_epsilon(std::span<const double> partial_sums);

}  // namespace qmnls
