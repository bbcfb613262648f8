#pragma once

// Shared helpers for the unit tests: deterministic random fields and
// reference computations that do not go through the library's transform path.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "qmnls/field.hpp"
#include "qmnls/spectral.hpp"

namespace qmnls::test {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

/// White random complex samples (all modes populated).
inline Field random_field(const Grid& grid, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  std::vector<Complex> v(grid.size());
  for (auto& z : v) z = Complex(nd(gen), nd(gen));
  return Field(grid, std::move(v), Space::Physical);
}

/// Random spectrum with Gaussian decay exp(-(xi/cutoff)^2): smooth, and
/// negligible near the Nyquist frequency when cutoff is small enough.
inline Field random_smooth_field(const Grid& grid, std::mt19937_64& gen, double cutoff,
                                 bool real = false) {
  std::normal_distribution<double> nd;
  std::vector<Complex> spec(grid.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double xi = grid.freq(k);
    spec[k] = Complex(nd(gen), nd(gen)) * std::exp(-(xi / cutoff) * (xi / cutoff)) * grid.length();
  }
  Field f = inverse_transform(Field(grid, std::move(spec), Space::Frequency));
  if (!real) return f;
  std::vector<Complex> re(f.size());
  for (std::size_t j = 0; j < re.size(); ++j) re[j] = f[j].real();
  return Field(grid, std::move(re), Space::Physical);
}

/// Sum of a few random real Gaussian bumps, as an analytic function of x.
struct BumpSum {
  std::vector<double> amp, center, width;

  static BumpSum random(std::mt19937_64& gen, int count, double amp_scale, double spread) {
    std::uniform_real_distribution<double> ua(-amp_scale, amp_scale), uc(-spread, spread),
        uw(0.6, 1.6);
    BumpSum b;
    for (int i = 0; i < count; ++i) {
      b.amp.push_back(ua(gen));
      b.center.push_back(uc(gen));
      b.width.push_back(uw(gen));
    }
    return b;
  }

  double operator()(double x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < amp.size(); ++i) {
      const double z = (x - center[i]) / width[i];
      acc += amp[i] * std::exp(-0.5 * z * z);
    }
    return acc;
  }
};

/// O(n^2) transform straight from the definition dx * sum f_j e^{-i xi_k x_j}.
inline std::vector<Complex> naive_forward(const Field& f) {
  const Grid& g = f.grid();
  std::vector<Complex> out(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) acc += f[j] * std::polar(1.0, -g.freq(k) * g.x(j));
    out[k] = acc * g.dx();
  }
  return out;
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

inline double rel_l2_diff(const Field& a, const Field& b) {
  return l2_norm(a - b) / l2_norm(b);
}

/// Composite Simpson on uniformly spaced samples (odd count).
inline double simpson(const std::vector<double>& y, double h) {
  double acc = y.front() + y.back();
  for (std::size_t i = 1; i + 1 < y.size(); ++i) acc += (i % 2 ? 4.0 : 2.0) * y[i];
  return acc * h / 3.0;
}

}  // namespace qmnls::test
