#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "qmnls/errors.hpp"
#include "qmnls/field.hpp"

namespace qmnls {

/// Ground states of eps^2 Q'''' - Q'' - J_eps(Q^2) Q + tau Q = 0 on a periodic grid.
struct SolitonProblem {
  double eps = 0.5;
  double tau = 1.0;
  std::size_t n = 1024;
  double length = 60.0;

  /// Throws ConfigError unless eps > 0, tau > 0 and the grid is valid.
  void validate() const;
  Grid grid() const;
};

struct SolitonResult {
  Field Q;
  Field v;
  double action = 0.0;
  /// ||eps^2 Q'''' - Q'' + tau Q - J(Q^2) Q|| / ||Q||
  double residual_pde = 0.0;
  /// |identity| / (sum of the absolute values of its terms)
  double residual_pohozaev = 0.0;
  double residual_nehari = 0.0;
  std::size_t iterations = 0;
  /// Stabilising factor of each iteration.
  std::vector<double> gammas;
  double min_value = 0.0;
};

class SolitonNotConverged : public NumericalError {
public:
  SolitonNotConverged(std::size_t iterations, double gamma, double residual);
  std::size_t iterations() const noexcept { return iterations_; }
  double gamma() const noexcept { return gamma_; }
  double residual() const noexcept { return residual_; }

private:
  std::size_t iterations_;
  double gamma_;
  double residual_;
};

/// The iteration collapsed onto Q = 0.
class TrivialFixedPoint : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// v = J_eps(Q^2), the solution of -eps^2 v'' + v = Q^2.
Field reconstruct_v(const Field& Q, double eps);

/// Real part of a field in physical space.
Field real_field(const Field& f);

/// Petviashvili iteration
///   gamma_n = <M Q_n, Q_n> / <J(Q_n^2) Q_n, Q_n>,   Q_{n+1} = gamma_n^{3/2} M^{-1}[J(Q_n^2) Q_n]
/// with M = eps^2 xi^4 + xi^2 + tau. Stops once the relative PDE residual is
/// below tol and |gamma - 1| <= 1e-10. The result is recentred on its maximum.
SolitonResult petviashvili_solve(const SolitonProblem& p, const Field& init, double tol = 1e-9,
                                 std::size_t max_iter = 1000);

/// \int eps^2 (u'')^2/2 + (u')^2/2 + tau u^2/2 + eps^2 (v')^2/4 + v^2/4 - u^2 v/2
double action(const Field& u, const Field& v, double eps, double tau);

/// L^2 gradient (eps^2 u'''' - u'' + tau u - u v, (-eps^2 v'' + v - u^2)/2).
std::pair<Field, Field> action_gradient(const Field& u, const Field& v, double eps, double tau);

/// The six integrals entering the identities.
struct QuadraticForms {
  double lap_u = 0.0;    // \int (u'')^2
  double grad_u = 0.0;   // \int (u')^2
  double mass_u = 0.0;   // \int u^2
  double grad_v = 0.0;   // \int (v')^2
  double mass_v = 0.0;   // \int v^2
  double coupling = 0.0; // \int u^2 v
};

QuadraticForms quadratic_forms(const Field& u, const Field& v);

struct IdentityValue {
  double value = 0.0;
  /// Sum of the absolute values of the individual terms.
  double scale = 0.0;

  double relative() const { return scale > 0.0 ? std::abs(value) / scale : 0.0; }
};

/// -2eps^2(d-4)A - 2(d-2)B - 2 tau d C - eps^2(d-2)D - dE + 2dF
IdentityValue pohozaev_residual(const Field& u, const Field& v, double eps, double tau, int d);

/// eps^2 A + B + tau C + eps^2 D/2 + E/2 - 3F/2
IdentityValue nehari_residual(const Field& u, const Field& v, double eps, double tau);

/// (8 - 2d/3) eps^2 A + (4 - 2d/3) B + (2 - d/3) eps^2 D - 2 tau d C/3 - d E/3
IdentityValue combined_identity(const Field& u, const Field& v, double eps, double tau, int d);

struct NonexistenceReport {
  int d = 1;
  bool eps_zero = false;
  double c_lap = 0.0;
  double c_grad_u = 0.0;
  double c_grad_v = 0.0;
  double c_mass_u = 0.0;
  double c_mass_v = 0.0;
  /// Every surviving left-hand coefficient is <= 0 while the right-hand side
  /// is positive for a nontrivial pair.
  bool forced = false;

  std::string to_text() const;
};

/// Sign analysis of the combined identity in dimension d; with eps_zero the
/// eps^2 terms drop out. Throws DomainError for d < 1.
NonexistenceReport nonexistence_report(int d, bool eps_zero = false);

struct ScalingFit {
  std::vector<int> ks;
  std::vector<double> log2_l3_cube;
  double l3_slope = 0.0;
  std::vector<double> s_values;
  std::vector<std::vector<double>> log2_hs;
  std::vector<double> hs_slopes;
};

/// u_k with spectrum u^(xi / 2^k), u^ = phi^(xi) - phi^(2 xi) for a smooth step phi^.
/// Throws ConfigError when the grid cannot resolve the annuli for k in [k_min, k_max].
ScalingFit scaling_exponents_check(const std::vector<double>& s_values, int k_min = 3, int k_max = 7,
                                   std::size_t n = 8192, double length = 100.0);

struct TrilinearAudit {
  std::size_t samples = 0;
  double max_ratio = 0.0;
  double max_ratio_refined = 0.0;
  double relative_change = 0.0;
};

/// max ||uvw||_{L^1} / (||u||_{H^2} ||v||_{H^2} ||w||_{H^1}) over random smooth real
/// triples, on the grid and on the same functions sampled at twice the resolution.
TrilinearAudit trilinear_audit(std::size_t samples = 1000, std::size_t n = 256, double length = 40.0,
                               unsigned seed = 7);

/// Writes the profile to `path` in checkpoint layout (t slot = tau) and the
/// metadata line `eps,tau,action,residual_pde,residual_pohozaev,residual_nehari,iterations`
/// to `path` with ".meta.csv" appended.
void write_soliton(const std::filesystem::path& path, const SolitonProblem& p, const SolitonResult& r);

}  // namespace qmnls
