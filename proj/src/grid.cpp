#include "qmnls/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qmnls/errors.hpp"

namespace qmnls {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid Grid::make(std::size_t n, double length) {
  if (n < 8 || !is_power_of_two(n))
    throw ConfigError("grid size n must be a power of two >= 8, got " + std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length))
    throw ConfigError("grid length L must be positive and finite");
  return Grid(n, length);
}

Grid::Grid(std::size_t n, double length) : n_(n), length_(length) {
  auto xi = std::make_shared<std::vector<double>>(n);
  for (std::size_t j = 0; j < n; ++j)
    (*xi)[j] = 2.0 * std::numbers::pi * static_cast<double>(signed_index(j)) / length;
  freqs_ = std::move(xi);
}

double Grid::freq_spacing() const noexcept { return 2.0 * std::numbers::pi / length_; }

std::ptrdiff_t Grid::signed_index(std::size_t slot) const noexcept {
  const auto j = static_cast<std::ptrdiff_t>(slot);
  const auto n = static_cast<std::ptrdiff_t>(n_);
  return j < n / 2 ? j : j - n;
}

std::size_t Grid::slot_of(std::ptrdiff_t k) const {
  const auto n = static_cast<std::ptrdiff_t>(n_);
  if (k < -n / 2 || k >= n / 2) throw DomainError("signed frequency index out of range");
  return static_cast<std::size_t>(k < 0 ? k + n : k);
}

double Grid::max_abs_freq() const noexcept {
  return std::numbers::pi * static_cast<double>(n_) / length_;
}

double Grid::x(std::size_t j) const noexcept {
  return -0.5 * length_ + static_cast<double>(j) * dx();
}

}  // namespace qmnls
