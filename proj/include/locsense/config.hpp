#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "locsense/models.hpp"
#include "locsense/stepper.hpp"

namespace locsense {

/// Parse or semantic error. `line` is 0 when no single line is to blame.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0, std::string key = {});
  std::size_t line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

enum class ExpectStatus { any, completed, blowup_detected };

std::string_view to_string(ExpectStatus e);

struct Scenario {
  std::string name;
  /// Sweep group this scenario belongs to (empty for a standalone scenario).
  std::string group;
  ModelSpec model;
  int dim = 2;
  int n = 32;
  InitialData initial;
  StepConfig step;
  double sample_every = 0.0;
  /// Empty means "use the batch default".
  std::string output;
  ExpectStatus expect = ExpectStatus::any;

  Grid grid() const { return Grid(dim, n); }
};

enum class SweepKind { none, models, nu, theta };

std::string_view to_string(SweepKind k);

struct SweepGroup {
  std::string name;
  SweepKind kind = SweepKind::none;
  /// Indices into Batch::scenarios.
  std::vector<std::size_t> members;
  /// nu sweep: index of the unregularized reference run.
  std::optional<std::size_t> reference;
  double equilibrium_tol = 1e-3;
};

struct Batch {
  std::vector<Scenario> scenarios;
  std::vector<SweepGroup> groups;
  /// Non-fatal findings (unknown keys outside strict mode).
  std::vector<std::string> warnings;
};

/// INI-style text: sections `[scenario.<name>]`, `key = value` lines, `#` or
/// `;` comments, comma-separated arrays, optional double quotes around values.
Batch parse_config(std::string_view text, bool strict = true);

std::vector<std::string> preset_names();
/// Config text for a named preset; throws ConfigError for unknown names.
std::string preset_text(std::string_view name);
/// The preset parsed into its (possibly several) scenarios.
Batch preset(std::string_view name);

}  // namespace locsense
