#include "locsense/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "locsense/mesh.hpp"

namespace locsense {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double round_off_sqrt(double x) { return x > 0.0 ? std::sqrt(x) : 0.0; }

double entropy_with_cross(const Field& u, const Field& v, double epsilon, double beta, double cross) {
  double local = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) local += entropy_density(u[k]) + 0.5 * beta * v[k] * v[k];
  local *= u.grid.cell_volume();
  return 0.5 * epsilon * grad_sq_norm(v) + local - cross;
}

}  // namespace

double entropy_density(double u) {
  if (u <= 0.0) return 1.0;
  return u * std::log(u) - u + 1.0;
}

double entropy(const Field& u, const Field& v, double epsilon, double beta) {
  require_same_grid(u, v, "entropy");
  return entropy_with_cross(u, v, epsilon, beta, inner(u, v));
}

double entropy_nu(const Field& u, const Field& v, double epsilon, double beta, double nu) {
  require_same_grid(u, v, "entropy_nu");
  return entropy_with_cross(u, v, epsilon, beta, inner(apply_L_nu(u, nu), v));
}

double dual_norm_sq(const Field& u, double m) {
  const double l1 = lp_norm(u, 1.0);
  if (std::abs(integral(u) - m) > 1e-8 * (std::abs(m) + l1))
    throw std::invalid_argument("dual_norm_sq: integral(u) does not match the supplied mass");
  const Field w = apply_K(u - m);
  return grad_sq_norm(w);
}

Dissipation dissipation_terms(const Field& u, const Field& v, double epsilon, double beta) {
  require_same_grid(u, v, "dissipation_terms");
  Field root(u.grid);
  for (std::size_t k = 0; k < u.size(); ++k) root[k] = round_off_sqrt(motility(v[k]) * u[k]);
  const Field lap_v = laplacian_neumann(v);
  double res = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double r = epsilon * lap_v[k] + u[k] - beta * v[k];
    res += r * r;
  }
  return {4.0 * grad_sq_norm(root), res * u.grid.cell_volume()};
}

double entropy_lower_bound(double c, double m, double epsilon, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("entropy_lower_bound: beta = 0 makes the bound degenerate");
  if (!(epsilon > 0.0)) throw std::invalid_argument("entropy_lower_bound: epsilon must be positive");
  return -c * c / epsilon - m * m / beta;
}

DiagRecord make_record(const SimState& s, const ModelSpec& spec, double duality_cumulative, double& c_running,
                       double dt_used) {
  DiagRecord r;
  r.t = s.t;
  r.mass = integral(s.u);
  r.v_mean = mean(s.v);
  r.entropy = entropy(s.u, s.v, spec.epsilon, spec.beta);
  r.entropy_nu = spec.nu ? entropy_nu(s.u, s.v, spec.epsilon, spec.beta, *spec.nu) : kNaN;
  r.dual_norm_sq = dual_norm_sq(s.u, r.mass);
  const auto diss = dissipation_terms(s.u, s.v, spec.epsilon, spec.beta);
  r.dissipation_fisher = diss.fisher;
  r.dissipation_v = diss.v_residual;
  r.duality_lhs_cumulative = duality_cumulative;
  const auto [umin, umax] = std::minmax_element(s.u.values.begin(), s.u.values.end());
  r.umin = *umin;
  r.umax = *umax;
  r.vmax = *std::max_element(s.v.values.begin(), s.v.values.end());
  r.l1_u = lp_norm(s.u, 1.0);
  r.l2_u = lp_norm(s.u, 2.0);
  r.l4_u = lp_norm(s.u, 4.0);
  r.linf_u = lp_norm(s.u, kInfinity);
  c_running = std::max(c_running, round_off_sqrt(r.dual_norm_sq));
  r.entropy_lower_bound = spec.beta > 0.0 ? entropy_lower_bound(c_running, r.mass, spec.epsilon, spec.beta) : kNaN;
  r.dt_used = dt_used;
  return r;
}

double duality_slack(double m, double dt_max, double t) { return 2.0 * m * m * 10.0 * dt_max * t; }

DualityCheck check_duality(std::span<const DiagRecord> traj, std::optional<double> m_opt,
                           std::optional<double> dt_max_opt) {
  DualityCheck out;
  if (traj.empty()) return out;
  const double m = m_opt.value_or(traj.front().mass);
  double dt_max = 0.0;
  for (const auto& r : traj) dt_max = std::max(dt_max, r.dt_used);
  dt_max = dt_max_opt.value_or(dt_max);
  const double d0 = traj.front().dual_norm_sq;
  const double t0 = traj.front().t;
  double prev_cum = traj.front().duality_lhs_cumulative;
  out.worst_residual = std::numeric_limits<double>::infinity();
  for (const auto& r : traj) {
    const double t = r.t - t0;
    const double rhs = d0 + 2.0 * m * m * t;
    // Round-off allowance for the inverse-Laplacian solves entering both sides.
    const double eps_round = 1e-9 * (std::abs(rhs) + 1.0);
    const double slack = duality_slack(m, dt_max, t) + eps_round;
    const double res = rhs - (r.dual_norm_sq + r.duality_lhs_cumulative);
    const double margin = std::sqrt(std::max(rhs, 0.0)) + slack - round_off_sqrt(r.dual_norm_sq);
    out.residual.push_back(res);
    out.envelope_margin.push_back(margin);
    out.slack.push_back(slack);
    out.worst_residual = std::min(out.worst_residual, res + slack);
    if (res < -slack) out.cumulative_ok = false;
    if (margin < 0.0) out.envelope_ok = false;
    if (r.duality_lhs_cumulative < prev_cum) out.monotone_ok = false;
    prev_cum = r.duality_lhs_cumulative;
  }
  return out;
}

double max_entropy_increment_rate(std::span<const DiagRecord> traj) {
  double worst = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double dt = traj[k].t - traj[k - 1].t;
    if (dt <= 0.0) continue;
    worst = std::max(worst, (traj[k].entropy - traj[k - 1].entropy) / dt);
  }
  return worst;
}

EntropyMonotonicityReport check_entropy_monotonicity(std::span<const DiagRecord> coarse,
                                                     std::span<const DiagRecord> fine, double min_ratio) {
  EntropyMonotonicityReport rep;
  rep.coarse_rate = max_entropy_increment_rate(coarse);
  rep.fine_rate = max_entropy_increment_rate(fine);
  double scale = 1.0;
  for (const auto& r : coarse) scale = std::max(scale, std::abs(r.entropy));
  for (const auto& r : fine) scale = std::max(scale, std::abs(r.entropy));
  rep.noise_floor = 1e-9 * scale;
  rep.ratio = rep.fine_rate > 0.0 ? rep.coarse_rate / rep.fine_rate : std::numeric_limits<double>::infinity();
  if (!fine.empty()) {
    rep.fine_max_rise = -std::numeric_limits<double>::infinity();
    for (const auto& r : fine) rep.fine_max_rise = std::max(rep.fine_max_rise, r.entropy - fine.front().entropy);
  }
  const bool both_quiet = rep.coarse_rate <= rep.noise_floor && rep.fine_rate <= rep.noise_floor;
  rep.ok = both_quiet || rep.ratio >= min_ratio;
  return rep;
}

}  // namespace locsense
