#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "qmnls/grid.hpp"

namespace qmnls {

using Complex = std::complex<double>;

enum class Space { Physical, Frequency };

/// Complex samples on a Grid, tagged with the space they live in.
class Field {
public:
  Field(Grid grid, std::vector<Complex> values, Space space);

  static Field zeros(const Grid& grid, Space space = Space::Physical);

  /// Samples f(x_j) on the physical lattice.
  template <class F>
  static Field from_function(const Grid& grid, F&& f) {
    std::vector<Complex> v(grid.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = Complex(f(grid.x(j)));
    return Field(grid, std::move(v), Space::Physical);
  }

  /// Samples F(xi_k) in native frequency ordering.
  template <class F>
  static Field from_spectrum(const Grid& grid, F&& f) {
    std::vector<Complex> v(grid.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = Complex(f(grid.freq(j)));
    return Field(grid, std::move(v), Space::Frequency);
  }

  const Grid& grid() const noexcept { return grid_; }
  Space space() const noexcept { return space_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const Complex> values() const noexcept { return values_; }
  const Complex& operator[](std::size_t j) const noexcept { return values_[j]; }

  bool all_finite() const noexcept;

  /// Moves the samples out; the field is left empty.
  std::vector<Complex> release() && { return std::move(values_); }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(Complex scale);

private:
  Grid grid_;
  std::vector<Complex> values_;
  Space space_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Complex scale, Field a);

}  // namespace qmnls
