#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qmnls/evolution.hpp"
#include "qmnls/kernel_bounds.hpp"
#include "qmnls/limits.hpp"
#include "qmnls/solitons.hpp"

namespace qmnls::cli {

struct SolitonConfig {
  SolitonProblem problem;
  double tol = 1e-9;
  std::size_t max_iter = 1000;
  double init_amplitude = 1.0;
  double init_width = 1.0;
  std::vector<int> nonexistence_dims;
  std::vector<double> scaling_s;
  std::size_t trilinear_samples = 0;
};

struct AuditConfig {
  std::vector<std::string> audits = {"root", "lower", "upper", "ratio91", "phi", "tail", "smoothing"};
  double eps = 1.0;
  std::vector<double> xi_grid = {2.0, 10.0, 50.0};
  double tau_fraction = 1.0;
  std::size_t root_samples = 1000;
  std::uint64_t root_seed = 2024;
  double phi_beta = 0.6;
  double phi_gamma = 0.6;
  std::vector<double> phi_a = {0.0, 1.0, 10.0, 100.0, 1000.0};
  std::vector<double> tail_A = {0.1, 1.0, 10.0, 1000.0};
  std::vector<double> tail_a = {0.1, 0.25, 0.5, 0.75, 0.9};
  SmoothingParams smoothing;
  std::size_t smoothing_samples = 1100;
  double smoothing_xi_max = 1e3;
};

struct GrowthConfig {
  RunConfig run;
  std::vector<double> s_values = {0.0, 1.0, 2.0};
  double margin = 0.05;
};

struct LimitConfig {
  double s = 1.0;
  std::string profile = "special";
  std::vector<double> lambdas = {1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9};
};

// Each parser rejects unknown keys, missing required keys, wrong types and
// values that fail the module invariants, with ConfigError naming the field.
RunConfig parse_run_config(const std::string& text);
SweepConfig parse_sweep_config(const std::string& text);
SolitonConfig parse_soliton_config(const std::string& text);
AuditConfig parse_audit_config(const std::string& text);
GrowthConfig parse_growth_config(const std::string& text);
LimitConfig parse_limit_config(const std::string& text);

std::string read_text(const std::filesystem::path& path);

}  // namespace qmnls::cli
