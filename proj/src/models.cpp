#include "locsense/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "locsense/mesh.hpp"

namespace locsense {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::local_sensing: return "local_sensing";
    case ModelKind::minimal_ks: return "minimal_ks";
    case ModelKind::parabolic_elliptic: return "parabolic_elliptic";
    case ModelKind::regularized: return "regularized";
    case ModelKind::theta_family: return "theta_family";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::local_sensing, ModelKind::minimal_ks, ModelKind::parabolic_elliptic,
                 ModelKind::regularized, ModelKind::theta_family})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

ModelSpec ModelSpec::local_sensing(double epsilon, double beta) {
  ModelSpec s;
  s.kind = ModelKind::local_sensing;
  s.epsilon = epsilon;
  s.beta = beta;
  s.validate();
  return s;
}

ModelSpec ModelSpec::minimal_ks(double epsilon, double beta) {
  ModelSpec s = local_sensing(epsilon, beta);
  s.kind = ModelKind::minimal_ks;
  return s;
}

ModelSpec ModelSpec::parabolic_elliptic(double epsilon, double beta) {
  ModelSpec s;
  s.kind = ModelKind::parabolic_elliptic;
  s.epsilon = epsilon;
  s.beta = beta;
  s.validate();
  return s;
}

ModelSpec ModelSpec::regularized(double epsilon, double beta, double nu) {
  ModelSpec s;
  s.kind = ModelKind::regularized;
  s.epsilon = epsilon;
  s.beta = beta;
  s.nu = nu;
  s.validate();
  return s;
}

ModelSpec ModelSpec::theta_family(double theta, Field potential) {
  ModelSpec s;
  s.kind = ModelKind::theta_family;
  s.theta = theta;
  s.potential = std::move(potential);
  s.validate();
  return s;
}

void ModelSpec::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("ModelSpec: epsilon must be positive");
  if (!(beta >= 0.0)) throw std::invalid_argument("ModelSpec: beta must be nonnegative");
  const bool wants_nu = kind == ModelKind::regularized;
  const bool wants_theta = kind == ModelKind::theta_family;
  if (wants_nu != nu.has_value())
    throw std::invalid_argument(wants_nu ? "ModelSpec: regularized model requires nu"
                                         : "ModelSpec: nu is only meaningful for the regularized model");
  if (wants_nu && !(*nu > 0.0)) throw std::invalid_argument("ModelSpec: nu must be positive");
  if (wants_theta != theta.has_value() || wants_theta != potential.has_value())
    throw std::invalid_argument(wants_theta ? "ModelSpec: theta_family requires theta and a potential"
                                            : "ModelSpec: theta/potential are only meaningful for theta_family");
  if (wants_theta && !(*theta >= 0.0 && *theta <= 1.0))
    throw std::invalid_argument("ModelSpec: theta must lie in [0, 1]");
  if (kind == ModelKind::parabolic_elliptic && !(beta > 0.0))
    throw std::invalid_argument("ModelSpec: parabolic_elliptic requires beta > 0");
}

SimState::SimState(double time, Field u_field, Field v_field)
    : t(time), u(std::move(u_field)), v(std::move(v_field)) {
  require_same_grid(u, v, "SimState");
  mass = integral(u);
  v_mean = mean(v);
}

std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::constant: return "constant";
    case ProfileKind::gaussian_bump: return "gaussian_bump";
    case ProfileKind::cosine_perturbation: return "cosine_perturbation";
    case ProfileKind::checkerboard: return "checkerboard";
    case ProfileKind::random: return "random";
  }
  return "unknown";
}

ProfileKind parse_profile_kind(std::string_view name) {
  for (auto k : {ProfileKind::constant, ProfileKind::gaussian_bump, ProfileKind::cosine_perturbation,
                 ProfileKind::checkerboard, ProfileKind::random})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown profile kind '" + std::string(name) + "'");
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Field Profile::generate(const Grid& g, std::uint64_t seed) const {
  using std::numbers::pi;
  Field f(g);
  switch (kind) {
    case ProfileKind::constant:
      f.values.assign(g.cell_count(), baseline);
      break;
    case ProfileKind::gaussian_bump: {
      if (!(width > 0.0)) throw std::invalid_argument("gaussian_bump: width must be positive");
      const double s2 = 2.0 * width * width;
      f = Field::sample(g, [&](double x, double y) {
        double r2 = (x - center[0]) * (x - center[0]);
        if (g.dim() == 2) r2 += (y - center[1]) * (y - center[1]);
        return baseline + amplitude * std::exp(-r2 / s2);
      });
      break;
    }
    case ProfileKind::cosine_perturbation:
      if (std::abs(amplitude) > baseline)
        throw std::invalid_argument("cosine_perturbation: |amplitude| exceeds baseline, field would be negative");
      f = Field::sample(g, [&](double x, double y) {
        double c = std::cos(mode * pi * x);
        if (g.dim() == 2) c *= std::cos(mode * pi * y);
        return baseline + amplitude * c;
      });
      break;
    case ProfileKind::checkerboard:
      if (std::abs(amplitude) > baseline)
        throw std::invalid_argument("checkerboard: |amplitude| exceeds baseline, field would be negative");
      if (mode < 1) throw std::invalid_argument("checkerboard: mode must be >= 1");
      f = Field::sample(g, [&](double x, double y) {
        auto tile = [&](double s) { return static_cast<int>(std::floor(s * mode)); };
        const int parity = (tile(x) + (g.dim() == 2 ? tile(y) : 0)) % 2;
        return baseline + (parity == 0 ? amplitude : -amplitude);
      });
      break;
    case ProfileKind::random: {
      SplitMix64 rng(seed);
      for (double& x : f.values) x = baseline + amplitude * rng.uniform();
      break;
    }
  }
  for (double x : f.values)
    if (x < 0.0 || !std::isfinite(x))
      throw std::invalid_argument(std::string(to_string(kind)) + ": parameters produce negative or non-finite values");
  return f;
}

double motility(double v_value) { return std::exp(-std::max(v_value, 0.0)); }

SimState make_initial(const Grid& g, const InitialData& spec) {
  if (!(spec.mass > 0.0)) throw std::invalid_argument("make_initial: target mass must be positive");
  Field u = spec.u.generate(g, spec.seed);
  // Independent stream for v so that u and v noise are uncorrelated.
  Field v = spec.v.generate(g, spec.seed ^ 0x5bd1e995ULL);
  const double m0 = integral(u);
  if (!(m0 > 0.0)) throw std::invalid_argument("make_initial: u profile is nonpositive everywhere");
  const double scale = spec.mass / m0;
  for (double& x : u.values) x *= scale;
  return SimState(0.0, std::move(u), std::move(v));
}

double critical_mass(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("critical_mass: epsilon must be positive");
  return 4.0 * std::numbers::pi * epsilon;
}

double jump_rate(double theta, double h, double vi, double vj) {
  return std::exp(-theta * vi - (1.0 - theta) * h * (vi - vj));
}

}  // namespace locsense
