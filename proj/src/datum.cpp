#include "qmnls/datum.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "qmnls/checkpoint.hpp"
#include "qmnls/errors.hpp"
#include "qmnls/spectral.hpp"

namespace qmnls {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

double special_profile_spectrum(double xi, double s) {
  return std::pow(1.0 + xi * xi, -0.5 * s) * std::sqrt(2.0 * std::numbers::pi) *
         std::exp(-0.5 * xi * xi);
}

Field make_field(const InitialDatum& datum, const Grid& grid) {
  Field f = std::visit(
      overloaded{
          [&](const GaussianDatum& g) {
            if (!(g.width > 0.0)) throw ConfigError("gaussian width must be positive");
            return Field::from_function(grid, [&](double x) {
              const double z = (x - g.center) / g.width;
              return g.amplitude * std::exp(-0.5 * z * z);
            });
          },
          [&](const PlaneWaveModulatedDatum& p) {
            if (!(p.width > 0.0)) throw ConfigError("plane-wave envelope width must be positive");
            return Field::from_function(grid, [&](double x) {
              const double z = x / p.width;
              return p.amplitude * std::exp(-0.5 * z * z) * std::polar(1.0, p.wavenumber * x);
            });
          },
          [&](const SpecialLimitProfileDatum& sp) {
            return inverse_transform(
                Field::from_spectrum(grid, [&](double xi) { return special_profile_spectrum(xi, sp.s); }));
          },
          [&](const FileDatum& fd) {
            auto data = read_checkpoint(fd.path);
            if (!(data.state.grid() == grid))
              throw ConfigError("checkpoint grid does not match the configured grid: " + fd.path);
            return data.state;
          },
      },
      datum);
  if (!f.all_finite()) throw ConfigError("initial datum is not finite everywhere");
  return f;
}

std::string datum_id(const InitialDatum& datum) {
  return std::visit(
      overloaded{
          [](const GaussianDatum& g) {
            return "gaussian:a=" + fmt_g(g.amplitude) + ";w=" + fmt_g(g.width) + ";c=" + fmt_g(g.center);
          },
          [](const PlaneWaveModulatedDatum& p) {
            return "planewave:a=" + fmt_g(p.amplitude) + ";k=" + fmt_g(p.wavenumber) + ";w=" + fmt_g(p.width);
          },
          [](const SpecialLimitProfileDatum& sp) { return "special:s=" + fmt_g(sp.s); },
          [](const FileDatum& fd) { return "file:" + fd.path; },
      },
      datum);
}

}  // namespace qmnls
