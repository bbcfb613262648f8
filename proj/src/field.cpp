#include "qmnls/field.hpp"

#include <cmath>

#include "qmnls/errors.hpp"

namespace qmnls {

Field::Field(Grid grid, std::vector<Complex> values, Space space)
    : grid_(std::move(grid)), values_(std::move(values)), space_(space) {
  if (values_.size() != grid_.size()) throw UsageError("field length does not match grid size");
}

Field Field::zeros(const Grid& grid, Space space) {
  return Field(grid, std::vector<Complex>(grid.size()), space);
}

bool Field::all_finite() const noexcept {
  for (const auto& z : values_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

namespace {

void check_compatible(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw UsageError("fields live on different grids");
  if (a.space() != b.space()) throw UsageError("fields live in different spaces");
}

}  // namespace

Field& Field::operator+=(const Field& other) {
  check_compatible(*this, other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other.values_[j];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  check_compatible(*this, other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other.values_[j];
  return *this;
}

Field& Field::operator*=(Complex scale) {
  for (auto& z : values_) z *= scale;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Complex scale, Field a) { return a *= scale; }

}  // namespace qmnls
