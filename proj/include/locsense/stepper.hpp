#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "locsense/diagnostics.hpp"
#include "locsense/linsolve.hpp"
#include "locsense/models.hpp"

namespace locsense {

enum class VUpdateOrder { u_first, v_first };

std::string_view to_string(VUpdateOrder order);
VUpdateOrder parse_v_update_order(std::string_view name);

struct StepConfig {
  double dt_init = 1e-3;
  double dt_min = 1e-9;
  double dt_max = 1e-1;
  double t_end = 1.0;
  VUpdateOrder v_update_order = VUpdateOrder::u_first;
  /// ||u||_inf above this declares blow-up; 0 selects 1e6 * mass.
  double blowup_linf_threshold = 0.0;
  /// Declare blow-up (instead of failing) when dt is driven below dt_min.
  bool blowup_dt_floor_flag = true;
  double solver_tol = 1e-12;
  std::size_t solver_max_iter = 0;
  /// A step whose ||u_new - u||_2 / ||u||_2 exceeds this is retried with dt / 2.
  double max_relative_change = 0.1;
  int grow_after = 5;
  double grow_factor = 1.2;

  void validate() const;
};

enum class StepStatus { ok, dt_reduced, blowup_detected, failed };

std::string_view to_string(StepStatus status);

struct StepOutcome {
  SimState state;
  double dt_used = 0.0;
  StepStatus status = StepStatus::ok;
  /// dt * int a (u_new)^2 with a the motility this step used.
  double duality_increment = 0.0;
  /// Cells whose round-off negatives were clamped to zero.
  std::size_t clamped = 0;
  int halvings = 0;
  std::string message;
};

/// Bernoulli function x / (e^x - 1), series branch for |x| < 1e-4.
double bernoulli(double x);

/// I + dt (-Lap_h) diag(a): the Laplace-form update matrix.
SparseOperator laplace_form_matrix(const Grid& g, std::span<const double> a, double dt);

/// I - dt G for the exponentially fitted drift-diffusion operator
/// G u = div(c (grad u - u grad phi)), face coefficient c = logarithmic mean
/// of exp(-theta phi) on the two adjacent cells (theta = 0 gives c = 1).
SparseOperator drift_diffusion_matrix(const Grid& g, std::span<const double> phi, double theta, double dt);

/// (1 + dt beta) I + dt eps (-Lap_h), or beta I + eps (-Lap_h) when `elliptic`.
SparseOperator chemo_matrix(const Grid& g, double epsilon, double beta, double dt, bool elliptic);

/// Motility field a_i = exp(-max(v_i, 0)).
std::vector<double> motility_field(const Field& v);

StepOutcome step_local_sensing(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt);
StepOutcome step_minimal_ks(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt);
StepOutcome step_parabolic_elliptic(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt);
StepOutcome step_regularized(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt);
StepOutcome step_theta(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt);

/// Dispatches on p.kind.
StepOutcome step(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt);

/// Solves the elliptic chemoattractant problem eps(-Lap)v + beta v = src.
Field solve_elliptic_v(const Field& src, double epsilon, double beta, double tol);

enum class RunStatus { completed, blowup_detected, failed };

std::string_view to_string(RunStatus status);

struct RunResult {
  std::vector<DiagRecord> trajectory;
  SimState final_state;
  RunStatus status = RunStatus::completed;
  double blowup_time = 0.0;
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t clamped = 0;
  double mass0 = 0.0;
  std::string message;
};

/// Advances to c.t_end (or blow-up), recording diagnostics at t = 0 and at
/// every multiple of `sample_every` (every step when sample_every <= 0).
/// Always returns the partial trajectory.
RunResult run(const ModelSpec& model, const SimState& init, const StepConfig& c, double sample_every);

}  // namespace locsense
