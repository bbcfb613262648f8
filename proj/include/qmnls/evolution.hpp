#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "qmnls/datum.hpp"
#include "qmnls/errors.hpp"
#include "qmnls/field.hpp"

namespace qmnls {

/// Conserved mass ||u||_{L^2}^2.
double mass(const Field& f);

/// eps^2/2 ||u_xx||^2 + 1/2 ||u_x||^2 - 1/4 \int J_eps(|u|^2) |u|^2 dx
double energy(const Field& f, double eps);

/// Exact flow of u_t = i J_eps(|u|^2) u over time dt:
///   u <- exp(i dt J_eps(|u|^2)) u.
/// |u(x)| is invariant along this flow, so no iteration is needed.
Field nonlinear_step(const Field& f, double dt, double eps);

struct StepOptions {
  /// Zero modes with |k| > n/3 after each step.
  bool dealias = false;
};

/// Strang composition N(dt/2) o U_eps(dt) o N(dt/2). Accepts either space,
/// returns a physical field. Negative dt runs the scheme backwards.
Field strang_step(const Field& f, double dt, double eps, StepOptions opts = {});

/// 2/3-rule projection.
Field dealias(const Field& f);

struct RunConfig {
  std::size_t n = 256;
  double length = 40.0;
  double eps = 0.0;
  double dt = 1e-3;
  double t_final = 1.0;
  InitialDatum datum = GaussianDatum{};
  std::size_t diag_stride = 1;
  std::vector<double> sobolev_orders;
  std::size_t checkpoint_stride = 0;
  bool dealias = false;

  /// Throws ConfigError on invariant violations.
  void validate() const;
  /// Number of steps t_final/dt (validated to be an integer).
  std::size_t steps() const;
};

struct HsSeries {
  double s = 0.0;
  std::vector<double> values;
};

struct Diagnostics {
  std::vector<double> times;
  std::vector<double> mass;
  std::vector<double> energy;
  std::vector<HsSeries> hs_norms;

  /// Series for regularity s; throws UsageError if s was not tracked.
  const std::vector<double>& hs(double s) const;
  std::size_t samples() const noexcept { return times.size(); }
};

struct Snapshot {
  std::size_t step = 0;
  double t = 0.0;
  Field state;
};

struct EvolveResult {
  Field final_state;
  Diagnostics diagnostics;
  std::vector<Snapshot> checkpoints;
};

/// Raised when the state becomes non-finite; carries the diagnostics sampled
/// before the failure.
class EvolutionAborted : public NumericalError {
public:
  EvolutionAborted(std::size_t step, Diagnostics last_good);
  std::size_t step() const noexcept { return step_; }
  const Diagnostics& last_good() const noexcept { return last_good_; }

private:
  std::size_t step_;
  Diagnostics last_good_;
};

/// Observer called at step 0, every `stride` steps, and at the final step.
using StepObserver = std::function<void(std::size_t step, double t, const Field& state)>;

/// Runs `steps` Strang steps from `initial`, invoking `observer` at sample
/// steps. Throws EvolutionAborted on non-finite state.
Field integrate(const Field& initial, double eps, double dt, std::size_t steps, std::size_t stride,
                const StepObserver& observer, StepOptions opts = {});

/// Full experiment: diagnostics every diag_stride steps (plus the final step),
/// snapshots every checkpoint_stride steps (plus the final step; 0 disables).
EvolveResult evolve(const RunConfig& cfg);

/// Same, starting from an explicit state on the config's grid.
EvolveResult evolve(const RunConfig& cfg, const Field& initial);

}  // namespace qmnls
