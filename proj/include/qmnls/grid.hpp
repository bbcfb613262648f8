#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace qmnls {

/// Uniform periodic lattice on [-L/2, L/2) and its dual frequency lattice.
///
/// Physical sample j sits at x_j = -L/2 + j*dx. Frequencies are stored in the
/// transform's native ordering: slot j carries the signed index
///   k = j        for j <  n/2
///   k = j - n    for j >= n/2
/// so that xi = 2*pi*k/L runs over {-n/2, ..., n/2 - 1} * (2*pi/L). Use
/// signed_index()/slot_of() rather than manual index arithmetic.
class Grid {
public:
  /// Throws ConfigError unless n is a power of two >= 8 and length > 0.
  static Grid make(std::size_t n, double length);

  std::size_t size() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double dx() const noexcept { return length_ / static_cast<double>(n_); }
  double freq_spacing() const noexcept;

  std::ptrdiff_t signed_index(std::size_t slot) const noexcept;
  std::size_t slot_of(std::ptrdiff_t k) const;

  double freq(std::size_t slot) const noexcept { return (*freqs_)[slot]; }
  std::span<const double> freqs() const noexcept { return *freqs_; }
  /// Largest |xi| on the lattice (the Nyquist frequency n*pi/L).
  double max_abs_freq() const noexcept;

  double x(std::size_t j) const noexcept;

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.n_ == b.n_ && a.length_ == b.length_;
  }

private:
  Grid(std::size_t n, double length);

  std::size_t n_;
  double length_;
  std::shared_ptr<const std::vector<double>> freqs_;
};

}  // namespace qmnls
