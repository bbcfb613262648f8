#pragma once

#include <filesystem>

#include "qmnls/field.hpp"

namespace qmnls {

// Binary layout, little-endian:
//   "QMNLS1" (6 bytes), u64 n, f64 L, f64 eps, f64 t,
//   n records of (f64 re, f64 im) in physical space, record 0 at x = -L/2.
// Soliton files reuse the layout with the t slot holding the frequency tau.

struct CheckpointData {
  Field state;
  double eps = 0.0;
  double t = 0.0;
};

void write_checkpoint(const std::filesystem::path& path, const Field& state, double eps, double t);

/// Throws ConfigError for unreadable, truncated or malformed files.
CheckpointData read_checkpoint(const std::filesystem::path& path);

}  // namespace qmnls
