#include "qmnls/spectral.hpp"

#include <cmath>

#include "fft_backend.hpp"
#include "qmnls/errors.hpp"

namespace qmnls {

namespace {

// e^{-i xi_k x_j} with x_0 = -L/2 contributes e^{i pi k} = (-1)^k, and
// (-1)^k == (-1)^slot because n is even.
double shift_sign(std::size_t slot) { return (slot & 1u) ? -1.0 : 1.0; }

}  // namespace

Field forward_transform(const Field& f) {
  if (f.space() != Space::Physical) throw UsageError("forward_transform expects a physical-space field");
  const double dx = f.grid().dx();
  auto v = std::vector<Complex>(f.values().begin(), f.values().end());
  detail::dft_forward(v);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] *= dx * shift_sign(k);
  return Field(f.grid(), std::move(v), Space::Frequency);
}

Field inverse_transform(const Field& f) {
  if (f.space() != Space::Frequency) throw UsageError("inverse_transform expects a frequency-space field");
  const double inv_len = 1.0 / f.grid().length();
  auto v = std::vector<Complex>(f.values().begin(), f.values().end());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] *= inv_len * shift_sign(k);
  detail::dft_backward(v);
  return Field(f.grid(), std::move(v), Space::Physical);
}

Field to_space(const Field& f, Space space) {
  if (f.space() == space) return f;
  return space == Space::Frequency ? forward_transform(f) : inverse_transform(f);
}

Field apply_multiplier_values(const Field& f, std::span<const Complex> symbol) {
  if (symbol.size() != f.size()) throw UsageError("multiplier length does not match grid size");
  for (const auto& m : symbol)
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
      throw NumericalError("Fourier multiplier is not finite on the frequency lattice");
  auto spec = std::move(to_space(f, Space::Frequency)).release();
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= symbol[k];
  Field out(f.grid(), std::move(spec), Space::Frequency);
  return f.space() == Space::Frequency ? out : inverse_transform(out);
}

Field apply_J(const Field& f, double eps) {
  if (eps == 0.0) return f;
  const double e2 = eps * eps;
  return apply_multiplier(f, [e2](double xi) { return 1.0 / (1.0 + e2 * xi * xi); });
}

double l2_norm(const Field& f) {
  const Field phys = to_space(f, Space::Physical);
  double acc = 0.0;
  for (const auto& z : phys.values()) acc += std::norm(z);
  return std::sqrt(acc * f.grid().dx());
}

double sobolev_norm_sq(const Field& f, double s) {
  const Field spec = to_space(f, Space::Frequency);
  const auto xi = f.grid().freqs();
  double acc = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const double w = s == 0.0 ? 1.0 : std::pow(1.0 + xi[k] * xi[k], s);
    acc += w * std::norm(spec[k]);
  }
  return acc / f.grid().length();
}

double sobolev_norm(const Field& f, double s) { return std::sqrt(sobolev_norm_sq(f, s)); }

double sobolev_distance(const Field& f, const Field& g, double s) {
  return sobolev_norm(to_space(f, Space::Frequency) - to_space(g, Space::Frequency), s);
}

Field linear_propagate(const Field& f, double t, double eps) {
  if (t == 0.0) return f;
  const DispersionSymbol d{eps};
  return apply_multiplier(f, [&](double xi) { return std::polar(1.0, -t * d(xi)); });
}

Field derivative(const Field& f, int order) {
  return apply_multiplier(f, [order](double xi) {
    Complex m(1.0, 0.0);
    for (int i = 0; i < order; ++i) m *= Complex(0.0, xi);
    return m;
  });
}

double integrate(const Grid& grid, std::span<const double> samples) {
  double acc = 0.0;
  for (double v : samples) acc += v;
  return acc * grid.dx();
}

std::vector<double> real_part(const Field& f) {
  const Field phys = to_space(f, Space::Physical);
  std::vector<double> out(phys.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = phys[j].real();
  return out;
}

Field from_real(const Grid& grid, std::span<const double> samples) {
  std::vector<Complex> v(samples.begin(), samples.end());
  return Field(grid, std::move(v), Space::Physical);
}

}  // namespace qmnls
