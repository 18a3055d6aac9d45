#include "locsense/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "locsense/mesh.hpp"

namespace locsense {

std::string_view to_string(VUpdateOrder order) { return order == VUpdateOrder::u_first ? "u_first" : "v_first"; }

VUpdateOrder parse_v_update_order(std::string_view name) {
  if (name == "u_first") return VUpdateOrder::u_first;
  if (name == "v_first") return VUpdateOrder::v_first;
  throw std::invalid_argument("unknown v_update_order '" + std::string(name) + "'");
}

std::string_view to_string(StepStatus status) {
  switch (status) {
    case StepStatus::ok: return "ok";
    case StepStatus::dt_reduced: return "dt_reduced";
    case StepStatus::blowup_detected: return "blowup_detected";
    case StepStatus::failed: return "failed";
  }
  return "unknown";
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::completed: return "completed";
    case RunStatus::blowup_detected: return "blowup_detected";
    case RunStatus::failed: return "failed";
  }
  return "unknown";
}

void StepConfig::validate() const {
  if (!(dt_min > 0.0 && dt_init > 0.0 && dt_max > 0.0)) throw std::invalid_argument("StepConfig: dt values must be positive");
  if (!(dt_min <= dt_init && dt_init <= dt_max))
    throw std::invalid_argument("StepConfig: need dt_min <= dt_init <= dt_max");
  if (!(t_end >= 0.0)) throw std::invalid_argument("StepConfig: t_end must be nonnegative");
  if (!(solver_tol > 0.0)) throw std::invalid_argument("StepConfig: solver_tol must be positive");
  if (!(blowup_linf_threshold >= 0.0)) throw std::invalid_argument("StepConfig: blowup_linf_threshold must be >= 0");
  if (!(max_relative_change > 0.0)) throw std::invalid_argument("StepConfig: max_relative_change must be positive");
  if (grow_after < 1 || !(grow_factor >= 1.0)) throw std::invalid_argument("StepConfig: invalid dt growth policy");
}

double bernoulli(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x / 2.0 + x * x / 12.0;
  return x / std::expm1(x);
}

std::vector<double> motility_field(const Field& v) {
  std::vector<double> a(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) a[k] = motility(v[k]);
  return a;
}

namespace {

// I - dt G, where (G u)_i = sum_j (w_ij u_j - w_ji u_i) / h^2 and the face
// callback yields (w_ij, w_ji). Column sums are exactly one.
template <class FaceWeights>
SparseOperator flux_form_matrix(const Grid& g, double dt, FaceWeights&& weights) {
  const double s = dt / (g.h() * g.h());
  SparseOperator::Builder b(g.cell_count());
  for (std::size_t k = 0; k < g.cell_count(); ++k) b.add(k, k, 1.0);
  for_each_face(g, [&](std::size_t i, std::size_t j) {
    const auto [w_ij, w_ji] = weights(i, j);
    b.add(i, i, s * w_ji);
    b.add(i, j, -s * w_ij);
    b.add(j, j, s * w_ij);
    b.add(j, i, -s * w_ji);
  });
  return b.build(false);
}

}  // namespace

SparseOperator laplace_form_matrix(const Grid& g, std::span<const double> a, double dt) {
  if (a.size() != g.cell_count()) throw std::invalid_argument("laplace_form_matrix: coefficient size mismatch");
  return flux_form_matrix(g, dt, [&](std::size_t i, std::size_t j) { return std::pair{a[j], a[i]}; });
}

SparseOperator drift_diffusion_matrix(const Grid& g, std::span<const double> phi, double theta, double dt) {
  if (phi.size() != g.cell_count()) throw std::invalid_argument("drift_diffusion_matrix: potential size mismatch");
  return flux_form_matrix(g, dt, [&](std::size_t i, std::size_t j) {
    const double delta = phi[j] - phi[i];
    // Logarithmic mean of exp(-theta phi) over the face: exp(-theta phi_i) / B(-theta delta).
    const double c = std::exp(-theta * phi[i]) / bernoulli(-theta * delta);
    return std::pair{c * bernoulli(delta), c * bernoulli(-delta)};
  });
}

SparseOperator chemo_matrix(const Grid& g, double epsilon, double beta, double dt, bool elliptic) {
  const double diag = elliptic ? beta : 1.0 + dt * beta;
  const double w = (elliptic ? epsilon : dt * epsilon) / (g.h() * g.h());
  SparseOperator::Builder b(g.cell_count());
  for (std::size_t k = 0; k < g.cell_count(); ++k) b.add(k, k, diag);
  for_each_face(g, [&](std::size_t i, std::size_t j) {
    b.add(i, i, w);
    b.add(j, j, w);
    b.add(i, j, -w);
    b.add(j, i, -w);
  });
  return b.build(true);
}

namespace {

struct Attempt {
  Field u;
  Field v;
  double duality_increment = 0.0;
  std::size_t clamped = 0;
};

class AttemptFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SolveOptions options(const StepConfig& c, double tol) {
  SolveOptions o;
  o.tol = tol;
  o.max_iter = c.solver_max_iter;
  return o;
}

// Clamps round-off negatives in [-1e-12 max, 0); anything below that band
// means the solve was not accurate enough.
bool clamp_round_off(std::vector<double>& x, std::size_t& clamped) {
  double mx = 0.0;
  for (double y : x) {
    if (!std::isfinite(y)) return false;
    mx = std::max(mx, y);
  }
  const double band = 1e-12 * mx;
  for (double& y : x) {
    if (y >= 0.0) continue;
    if (y < -band) return false;
    y = 0.0;
    ++clamped;
  }
  return true;
}

// M-matrix solve for the density with the mass projected back onto the
// exactly conserved value sum(rhs).
Field solve_density(const SparseOperator& a, const Field& rhs, const StepConfig& c, std::size_t& clamped) {
  double tol = c.solver_tol;
  SolveResult res = solve_mmatrix(a, rhs.values, options(c, tol), rhs.values);
  for (int refine = 0; refine < 3; ++refine) {
    if (!res.report.converged)
      throw AttemptFailed("density solve did not converge (residual " + std::to_string(res.report.residual_norm) + ")");
    std::vector<double> trial = res.x;
    std::size_t local = 0;
    if (clamp_round_off(trial, local)) {
      res.x = std::move(trial);
      clamped += local;
      double before = 0.0, after = 0.0;
      for (double y : rhs.values) before += y;
      for (double y : res.x) after += y;
      if (!(after > 0.0)) throw AttemptFailed("density solve produced nonpositive mass");
      const double scale = before / after;
      for (double& y : res.x) y *= scale;
      return Field(rhs.grid, std::move(res.x));
    }
    tol *= 1e-2;
    res = solve_mmatrix(a, rhs.values, options(c, tol), res.x);
  }
  throw AttemptFailed("density solve left negative values beyond round-off");
}

// Symmetric solve for v with its mean pinned to `target_mean`.
Field solve_chemo(const SparseOperator& a, const Field& rhs, const Field& guess, double target_mean,
                  const StepConfig& c, std::size_t& clamped) {
  SolveResult res = solve_spd(a, rhs.values, options(c, c.solver_tol), guess.values);
  if (!res.report.converged)
    throw AttemptFailed("chemoattractant solve did not converge (residual " + std::to_string(res.report.residual_norm) +
                        ")");
  Field v(rhs.grid, std::move(res.x));
  const double shift = target_mean - mean(v);
  for (double& y : v.values) y += shift;
  if (!clamp_round_off(v.values, clamped)) throw AttemptFailed("chemoattractant went negative beyond round-off");
  return v;
}

Field parabolic_v_update(const Field& v_old, const Field& src, const ModelSpec& p, const StepConfig& c, double dt,
                         std::size_t& clamped) {
  const SparseOperator a = chemo_matrix(v_old.grid, p.epsilon, p.beta, dt, false);
  Field rhs = v_old;
  for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += dt * src[k];
  const double target = (mean(v_old) + dt * mean(src)) / (1.0 + dt * p.beta);
  return solve_chemo(a, rhs, v_old, target, c, clamped);
}

double weighted_sq(const Field& u, std::span<const double> a) {
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) acc += a[k] * u[k] * u[k];
  return acc * u.grid.cell_volume();
}

Field regularize(const Field& f, const ModelSpec& p, const StepConfig& c) {
  return p.nu ? apply_L_nu(f, *p.nu, c.solver_tol) : f;
}

// Laplace-form family: local sensing, regularized, parabolic-elliptic.
Attempt attempt_laplace(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt) {
  Attempt out;
  if (p.kind == ModelKind::parabolic_elliptic) {
    const Field v_star = solve_elliptic_v(s.u, p.epsilon, p.beta, c.solver_tol);
    const auto a = motility_field(v_star);
    out.u = solve_density(laplace_form_matrix(s.u.grid, a, dt), s.u, c, out.clamped);
    out.v = solve_elliptic_v(out.u, p.epsilon, p.beta, c.solver_tol);
    out.duality_increment = dt * weighted_sq(out.u, a);
    return out;
  }
  std::vector<double> a;
  if (c.v_update_order == VUpdateOrder::u_first) {
    a = motility_field(regularize(s.v, p, c));
    out.u = solve_density(laplace_form_matrix(s.u.grid, a, dt), s.u, c, out.clamped);
    out.v = parabolic_v_update(s.v, regularize(out.u, p, c), p, c, dt, out.clamped);
  } else {
    out.v = parabolic_v_update(s.v, regularize(s.u, p, c), p, c, dt, out.clamped);
    a = motility_field(regularize(out.v, p, c));
    out.u = solve_density(laplace_form_matrix(s.u.grid, a, dt), s.u, c, out.clamped);
  }
  out.duality_increment = dt * weighted_sq(out.u, a);
  return out;
}

Attempt attempt_minimal_ks(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt) {
  Attempt out;
  const Grid& g = s.u.grid;
  if (c.v_update_order == VUpdateOrder::u_first) {
    out.u = solve_density(drift_diffusion_matrix(g, s.v.values, 0.0, dt), s.u, c, out.clamped);
    out.duality_increment = dt * weighted_sq(out.u, motility_field(s.v));
    out.v = parabolic_v_update(s.v, out.u, p, c, dt, out.clamped);
  } else {
    out.v = parabolic_v_update(s.v, s.u, p, c, dt, out.clamped);
    out.u = solve_density(drift_diffusion_matrix(g, out.v.values, 0.0, dt), s.u, c, out.clamped);
    out.duality_increment = dt * weighted_sq(out.u, motility_field(out.v));
  }
  return out;
}

Attempt attempt_theta(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt) {
  const Field& V = *p.potential;
  require_same_grid(s.u, V, "step_theta");
  Attempt out;
  out.u = solve_density(drift_diffusion_matrix(s.u.grid, V.values, *p.theta, dt), s.u, c, out.clamped);
  out.v = V;
  std::vector<double> a(V.size());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = std::exp(-*p.theta * V[k]);
  out.duality_increment = dt * weighted_sq(out.u, a);
  return out;
}

double relative_change(const Field& before, const Field& after) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < before.size(); ++k) {
    const double d = after[k] - before[k];
    num += d * d;
    den += before[k] * before[k];
  }
  return den > 0.0 ? std::sqrt(num / den) : (num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
}

template <class AttemptFn>
StepOutcome advance(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt, AttemptFn&& attempt) {
  require_same_grid(s.u, s.v, "step");
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  StepOutcome out;
  std::string last_reason;
  while (true) {
    if (dt < c.dt_min) {
      out.state = s;
      out.dt_used = dt;
      out.status = c.blowup_dt_floor_flag ? StepStatus::blowup_detected : StepStatus::failed;
      out.message = "dt driven below dt_min (" + last_reason + ")";
      return out;
    }
    try {
      Attempt a = attempt(s, p, c, dt);
      const double change = relative_change(s.u, a.u);
      if (change > c.max_relative_change) {
        last_reason = "relative change " + std::to_string(change);
      } else {
        out.state = SimState(s.t + dt, std::move(a.u), std::move(a.v));
        out.dt_used = dt;
        out.duality_increment = a.duality_increment;
        out.clamped = a.clamped;
        out.status = out.halvings > 0 ? StepStatus::dt_reduced : StepStatus::ok;
        const double threshold = c.blowup_linf_threshold > 0.0 ? c.blowup_linf_threshold : 1e6 * s.mass;
        if (lp_norm(out.state.u, kInfinity) > threshold) {
          out.status = StepStatus::blowup_detected;
          out.message = "||u||_inf exceeded blow-up threshold";
        }
        return out;
      }
    } catch (const AttemptFailed& e) {
      last_reason = e.what();
    } catch (const SolveFailure& e) {
      last_reason = e.what();
    }
    dt *= 0.5;
    ++out.halvings;
  }
}

}  // namespace

Field solve_elliptic_v(const Field& src, double epsilon, double beta, double tol) {
  if (!(beta > 0.0)) throw std::invalid_argument("solve_elliptic_v: beta must be positive");
  const SparseOperator a = chemo_matrix(src.grid, epsilon, beta, 0.0, true);
  SolveOptions o;
  o.tol = tol;
  SolveResult res = solve_spd(a, src.values, o);
  if (!res.report.converged) throw SolveFailure("elliptic chemoattractant solve did not converge", res.report);
  Field v(src.grid, std::move(res.x));
  const double shift = mean(src) / beta - mean(v);
  for (double& y : v.values) y = std::max(y + shift, 0.0);
  return v;
}

StepOutcome step_local_sensing(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt) {
  return advance(s, p, c, dt, attempt_laplace);
}

StepOutcome step_regularized(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt) {
  if (!p.nu) throw std::invalid_argument("step_regularized: model has no nu");
  return advance(s, p, c, dt, attempt_laplace);
}

StepOutcome step_parabolic_elliptic(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt) {
  if (!(p.beta > 0.0)) throw std::invalid_argument("step_parabolic_elliptic: beta must be positive");
  return advance(s, p, c, dt, attempt_laplace);
}

StepOutcome step_minimal_ks(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt) {
  return advance(s, p, c, dt, attempt_minimal_ks);
}

StepOutcome step_theta(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt) {
  if (!p.theta || !p.potential) throw std::invalid_argument("step_theta: model lacks theta or potential");
  return advance(s, p, c, dt, attempt_theta);
}

StepOutcome step(const SimState& s, const ModelSpec& p, const StepConfig& c, double dt) {
  switch (p.kind) {
    case ModelKind::local_sensing: return step_local_sensing(s, p, c, dt);
    case ModelKind::minimal_ks: return step_minimal_ks(s, p, c, dt);
    case ModelKind::parabolic_elliptic: return step_parabolic_elliptic(s, p, c, dt);
    case ModelKind::regularized: return step_regularized(s, p, c, dt);
    case ModelKind::theta_family: return step_theta(s, p, c, dt);
  }
  throw std::invalid_argument("step: unknown model kind");
}

RunResult run(const ModelSpec& model, const SimState& init, const StepConfig& c, double sample_every) {
  model.validate();
  c.validate();
  RunResult out;
  out.final_state = init;
  out.mass0 = init.mass;
  if (c.t_end <= 0.0) return out;

  SimState state = init;
  if (model.kind == ModelKind::parabolic_elliptic)
    state = SimState(init.t, init.u, solve_elliptic_v(init.u, model.epsilon, model.beta, c.solver_tol));
  else if (model.kind == ModelKind::theta_family)
    state = SimState(init.t, init.u, *model.potential);

  double c_running = 0.0;
  double cumulative = 0.0;
  out.trajectory.push_back(make_record(state, model, cumulative, c_running, 0.0));

  const double t0 = state.t;
  const double t_final = t0 + c.t_end;
  const double t_eps = 1e-12 * std::max(1.0, c.t_end);
  double dt = c.dt_init;
  int streak = 0;
  long sample_index = 1;
  auto next_sample = [&] { return sample_every > 0.0 ? t0 + sample_index * sample_every : t_final; };

  try {
    while (state.t < t_final - t_eps) {
      double target = std::min(t_final, next_sample());
      double dt_try = std::min(dt, target - state.t);
      const bool lands = dt_try >= target - state.t;
      StepOutcome so = step(state, model, c, dt_try);
      out.clamped += so.clamped;
      out.rejected += static_cast<std::size_t>(so.halvings);
      if (so.status == StepStatus::failed) {
        out.status = RunStatus::failed;
        out.message = so.message;
        break;
      }
      if (so.halvings > 0) {
        dt = so.dt_used;
        streak = 0;
      } else if (++streak >= c.grow_after) {
        dt = std::min(dt * c.grow_factor, c.dt_max);
        streak = 0;
      }
      const bool floor_hit = so.status == StepStatus::blowup_detected && so.state.t == state.t;
      if (!floor_hit) {
        if (lands && so.halvings == 0) so.state.t = target;
        cumulative += 2.0 * so.duality_increment;
        state = std::move(so.state);
        ++out.steps;
      }
      const bool at_sample =
          sample_every <= 0.0 || state.t >= next_sample() - t_eps || state.t >= t_final - t_eps;
      const bool blowup = so.status == StepStatus::blowup_detected;
      if ((at_sample || blowup) && !floor_hit) {
        out.trajectory.push_back(make_record(state, model, cumulative, c_running, so.dt_used));
        while (sample_every > 0.0 && next_sample() <= state.t + t_eps) ++sample_index;
      }
      if (blowup) {
        out.status = RunStatus::blowup_detected;
        out.blowup_time = state.t;
        out.message = so.message;
        break;
      }
    }
  } catch (const std::exception& e) {
    out.status = RunStatus::failed;
    out.message = e.what();
  }
  out.final_state = std::move(state);
  return out;
}

}  // namespace locsense
