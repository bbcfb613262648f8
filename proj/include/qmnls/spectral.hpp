#pragma once

#include <cmath>
#include <concepts>
#include <span>
#include <vector>

#include "qmnls/field.hpp"

namespace qmnls {

/// <xi> = (1 + xi^2)^{1/2}
inline double japanese_bracket(double xi) noexcept { return std::sqrt(1.0 + xi * xi); }

/// Quartic dispersion relation d_eps(xi) = xi^2 + eps^2 xi^4.
struct DispersionSymbol {
  double eps = 0.0;

  double operator()(double xi) const noexcept {
    const double xi2 = xi * xi;
    return xi2 + eps * eps * (xi2 * xi2);
  }
};

// Transforms follow f^(xi) = \int f(x) e^{-i x xi} dx discretised on the grid:
//   f^(xi_k) = dx * sum_j f(x_j) e^{-i xi_k x_j},
//   f(x_j)   = (1/L) * sum_k f^(xi_k) e^{i xi_k x_j}.
// With these scalings, ||f||^2 = dx sum |f_j|^2 = (1/L) sum |f^_k|^2.

Field forward_transform(const Field& f);
Field inverse_transform(const Field& f);

/// Returns f in the requested space, transforming only if needed.
Field to_space(const Field& f, Space space);

/// Multiplies the spectrum by precomputed symbol values (native ordering).
/// Output keeps the input's space tag. Throws NumericalError on non-finite symbol values.
Field apply_multiplier_values(const Field& f, std::span<const Complex> symbol);

template <class M>
  requires std::invocable<M, double>
Field apply_multiplier(const Field& f, M&& m) {
  const auto xi = f.grid().freqs();
  std::vector<Complex> symbol(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) symbol[k] = Complex(m(xi[k]));
  return apply_multiplier_values(f, symbol);
}

/// J_eps = (1 - eps^2 d_xx)^{-1}, symbol 1/(1 + eps^2 xi^2). Identity at eps = 0.
Field apply_J(const Field& f, double eps);

/// Discrete L^2 norm sqrt(dx sum |f_j|^2), evaluated in physical space.
double l2_norm(const Field& f);

/// ||f||_{H^s}^2 = (1/L) sum <xi_k>^{2s} |f^(xi_k)|^2; any finite s.
double sobolev_norm_sq(const Field& f, double s);
double sobolev_norm(const Field& f, double s);

/// ||f - g||_{H^s}
double sobolev_distance(const Field& f, const Field& g, double s);

/// U_eps(t) = exp(it(d_xx - eps^2 d_xxxx)), symbol exp(-i t d_eps(xi)).
Field linear_propagate(const Field& f, double t, double eps);

/// Spectral derivative of the given order (symbol (i xi)^order).
Field derivative(const Field& f, int order);

/// dx * sum f_j, for real-valued integrands sampled on the grid.
double integrate(const Grid& grid, std::span<const double> samples);

/// Real parts of a physical field.
std::vector<double> real_part(const Field& f);

/// Physical field with the given real samples.
Field from_real(const Grid& grid, std::span<const double> samples);

}  // namespace qmnls
