#include "qmnls/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "qmnls/errors.hpp"
#include "qmnls/spectral.hpp"

namespace qmnls {

namespace {

constexpr std::array<char, 6> kMagic{'Q', 'M', 'N', 'L', 'S', '1'};

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
    throw ConfigError("checkpoint file is truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const Field& state, double eps, double t) {
  const Field phys = to_space(state, Space::Physical);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open checkpoint for writing: " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint64_t>(out, phys.size());
  put_le<double>(out, phys.grid().length());
  put_le<double>(out, eps);
  put_le<double>(out, t);
  for (const auto& z : phys.values()) {
    put_le<double>(out, z.real());
    put_le<double>(out, z.imag());
  }
  if (!out) throw ConfigError("failed writing checkpoint: " + path.string());
}

CheckpointData read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint: " + path.string());
  std::array<char, 6> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw ConfigError("not a QMNLS1 checkpoint: " + path.string());
  const auto n = get_le<std::uint64_t>(in);
  const auto length = get_le<double>(in);
  const auto eps = get_le<double>(in);
  const auto t = get_le<double>(in);
  if (n > (std::uint64_t{1} << 32)) throw ConfigError("checkpoint grid size is implausible");
  const Grid grid = Grid::make(static_cast<std::size_t>(n), length);
  std::vector<Complex> values(grid.size());
  for (auto& z : values) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    z = Complex(re, im);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ConfigError("checkpoint has trailing bytes");
  return CheckpointData{Field(grid, std::move(values), Space::Physical), eps, t};
}

}  // namespace qmnls
