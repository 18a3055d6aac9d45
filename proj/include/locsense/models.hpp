#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "locsense/grid.hpp"

namespace locsense {

enum class ModelKind { local_sensing, minimal_ks, parabolic_elliptic, regularized, theta_family };

std::string_view to_string(ModelKind kind);
/// Throws std::invalid_argument for unknown names.
ModelKind parse_model_kind(std::string_view name);

/// Which system to evolve and its parameters.
///
/// `nu` is present only for `regularized`; `theta` and `potential` only for
/// `theta_family`. validate() enforces this.
struct ModelSpec {
  ModelKind kind = ModelKind::local_sensing;
  double epsilon = 1.0;
  double beta = 1.0;
  std::optional<double> nu;
  std::optional<double> theta;
  std::optional<Field> potential;

  static ModelSpec local_sensing(double epsilon, double beta);
  static ModelSpec minimal_ks(double epsilon, double beta);
  static ModelSpec parabolic_elliptic(double epsilon, double beta);
  static ModelSpec regularized(double epsilon, double beta, double nu);
  static ModelSpec theta_family(double theta, Field potential);

  void validate() const;
};

/// Cell density u, chemoattractant v, cached mass of u and mean of v.
struct SimState {
  double t = 0.0;
  Field u;
  Field v;
  double mass = 0.0;
  double v_mean = 0.0;

  SimState() = default;
  SimState(double time, Field u_field, Field v_field);
};

enum class ProfileKind { constant, gaussian_bump, cosine_perturbation, checkerboard, random };

std::string_view to_string(ProfileKind kind);
ProfileKind parse_profile_kind(std::string_view name);

/// Shape of an initial field.
///
/// constant:            baseline
/// gaussian_bump:       baseline + amplitude * exp(-|x - center|^2 / (2 width^2))
/// cosine_perturbation: baseline + amplitude * prod_d cos(mode * pi * x_d)
/// checkerboard:        baseline +/- amplitude on a mode x mode tiling
/// random:              baseline + amplitude * U(0,1), seeded
struct Profile {
  ProfileKind kind = ProfileKind::constant;
  double baseline = 1.0;
  double amplitude = 0.0;
  double width = 0.1;
  std::array<double, 2> center{0.5, 0.5};
  int mode = 1;

  /// Samples the profile; rejects parameters that yield negative values.
  Field generate(const Grid& g, std::uint64_t seed) const;
};

struct InitialData {
  Profile u;
  Profile v{ProfileKind::constant, 0.0};
  double mass = 1.0;
  std::uint64_t seed = 0;
};

/// Motility gamma(s) = exp(-s); arguments below zero are clamped to zero.
double motility(double v_value);

/// u0 scaled multiplicatively to the target mass, v0 as generated, t = 0.
SimState make_initial(const Grid& g, const InitialData& spec);

/// 4 pi epsilon: the two-dimensional critical mass.
double critical_mass(double epsilon);

/// Jump intensity from node i to a neighbouring node j of the interpolated
/// local/gradient sensing random walk: exp(-theta Vi - (1 - theta) h (Vi - Vj)).
double jump_rate(double theta, double h, double vi, double vj);

/// Deterministic uniform draws in [0, 1) from a 64-bit seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace locsense
