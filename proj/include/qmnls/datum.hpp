#pragma once

#include <string>
#include <variant>

#include "qmnls/field.hpp"

namespace qmnls {

/// amplitude * exp(-(x - center)^2 / (2 width^2))
struct GaussianDatum {
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;
};

/// amplitude * exp(i wavenumber x) * exp(-x^2 / (2 width^2))
struct PlaneWaveModulatedDatum {
  double amplitude = 1.0;
  double wavenumber = 1.0;
  double width = 1.0;
};

/// u0 = <grad>^{-s} exp(-x^2/2) in one dimension, built on the frequency side
/// as u0^(xi) = <xi>^{-s} sqrt(2 pi) exp(-xi^2/2).
struct SpecialLimitProfileDatum {
  double s = 0.0;
};

/// State read from a checkpoint file; the grid must match the run's grid.
struct FileDatum {
  std::string path;
};

using InitialDatum =
    std::variant<GaussianDatum, PlaneWaveModulatedDatum, SpecialLimitProfileDatum, FileDatum>;

/// Physical-space samples of the datum. Throws ConfigError on grid mismatch or
/// non-finite samples.
Field make_field(const InitialDatum& datum, const Grid& grid);

/// Frequency-side density of the special profile, u0^(xi).
double special_profile_spectrum(double xi, double s);

/// Short identifier without commas, used in CSV outputs.
std::string datum_id(const InitialDatum& datum);

}  // namespace qmnls
