#pragma once

#include <optional>
#include <span>
#include <vector>

#include "locsense/grid.hpp"
#include "locsense/models.hpp"

namespace locsense {

/// Functionals of one sampled state.
struct DiagRecord {
  double t = 0.0;
  double mass = 0.0;
  double v_mean = 0.0;
  double entropy = 0.0;
  /// Mollified entropy; NaN unless the run is regularized.
  double entropy_nu = 0.0;
  /// <u - m, K(u - m)> = ||grad K(u - m)||^2.
  double dual_norm_sq = 0.0;
  double dissipation_fisher = 0.0;
  double dissipation_v = 0.0;
  /// 2 * sum_j dt_j * int a_j (u^{j+1})^2, with a_j the motility used by step j.
  double duality_lhs_cumulative = 0.0;
  double umax = 0.0;
  double umin = 0.0;
  double vmax = 0.0;
  double l1_u = 0.0;
  double l2_u = 0.0;
  double l4_u = 0.0;
  double linf_u = 0.0;
  /// -C^2/eps - m^2/beta with C the running max of sqrt(dual_norm_sq); NaN when beta = 0.
  double entropy_lower_bound = 0.0;
  double dt_used = 0.0;
};

/// int (eps/2 |grad v|^2 + beta/2 v^2 - u v + u log u - u + 1).
double entropy(const Field& u, const Field& v, double epsilon, double beta);

/// Same with the cross term int (L_nu u) v.
double entropy_nu(const Field& u, const Field& v, double epsilon, double beta, double nu);

/// u log u - u + 1 with 0 log 0 = 0.
double entropy_density(double u);

double dual_norm_sq(const Field& u, double m);

struct Dissipation {
  double fisher = 0.0;
  double v_residual = 0.0;
};

/// fisher = 4 ||grad sqrt(e^{-v} u)||^2, v_residual = int (eps Lap v + u - beta v)^2.
Dissipation dissipation_terms(const Field& u, const Field& v, double epsilon, double beta);

/// -C^2/eps - m^2/beta. Throws for beta = 0.
double entropy_lower_bound(double c, double m, double epsilon, double beta);

/// Assembles a record. `c_running` carries the running max of sqrt(dual_norm_sq)
/// across calls and is updated in place.
DiagRecord make_record(const SimState& s, const ModelSpec& spec, double duality_cumulative, double& c_running,
                       double dt_used);

struct DualityCheck {
  /// RHS - LHS per sample: dual(u0) + 2 m^2 t - dual(u(t)) - cumulative(t).
  std::vector<double> residual;
  /// sqrt(dual(u0) + 2 m^2 t) + slack - sqrt(dual(u(t))) per sample.
  std::vector<double> envelope_margin;
  std::vector<double> slack;
  bool cumulative_ok = true;
  bool envelope_ok = true;
  bool monotone_ok = true;
  double worst_residual = 0.0;

  bool ok() const { return cumulative_ok && envelope_ok && monotone_ok; }
};

/// slack(t) = 2 m^2 * 10 * dt_max * t.
double duality_slack(double m, double dt_max, double t);

/// Checks the discrete duality inequality along a trajectory. `m` defaults to
/// the first record's mass and `dt_max` to the largest dt_used.
DualityCheck check_duality(std::span<const DiagRecord> trajectory, std::optional<double> m = std::nullopt,
                           std::optional<double> dt_max = std::nullopt);

/// Largest positive (E_{k+1} - E_k) / (t_{k+1} - t_k) along a trajectory, or 0.
double max_entropy_increment_rate(std::span<const DiagRecord> trajectory);

struct EntropyMonotonicityReport {
  double coarse_rate = 0.0;
  double fine_rate = 0.0;
  /// coarse_rate / fine_rate; +inf when the fine run never increases.
  double ratio = 0.0;
  /// max_k E(t_k) - E(0) on the fine run.
  double fine_max_rise = 0.0;
  double noise_floor = 0.0;
  bool ok = false;
};

/// Compares two runs of the same scenario at (dt, h) and (dt/2, h/2). Passes
/// when the fine increment rate is at least `min_ratio` times smaller, or when
/// both rates sit below the round-off floor.
EntropyMonotonicityReport check_entropy_monotonicity(std::span<const DiagRecord> coarse,
                                                     std::span<const DiagRecord> fine, double min_ratio = 1.5);

}  // namespace locsense
