#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "locsense/config.hpp"
#include "locsense/diagnostics.hpp"
#include "locsense/stepper.hpp"

namespace locsense {

/// CSV column order of every trajectory file.
const std::vector<std::string>& csv_columns();
/// Value of column `c` (index into csv_columns()) for one record.
double csv_value(const DiagRecord& r, std::size_t c);

void write_csv(std::ostream& out, const std::vector<DiagRecord>& trajectory);
/// Parses a trajectory CSV written by write_csv; throws std::runtime_error on schema mismatch.
std::vector<DiagRecord> read_csv(std::istream& in);

/// `# dim n t` header, then one value per line at 17 significant digits.
void write_snapshot(std::ostream& out, const Field& f, double t);
Field read_snapshot(std::istream& in, double* t = nullptr);

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Checks that depend only on a stored trajectory: mass drift, entropy floor,
/// and (for Laplace-form models) the duality inequality and its envelope.
/// `model` = nullopt skips the model-specific duality checks.
std::vector<Assertion> trajectory_assertions(const std::vector<DiagRecord>& trajectory,
                                             std::optional<ModelKind> model);

/// Models whose trajectories obey the duality inequality.
bool has_duality(ModelKind kind);

struct ScenarioResult {
  std::string name;
  std::string group;
  ModelKind model = ModelKind::local_sensing;
  RunResult run;
  std::vector<Assertion> assertions;
  std::filesystem::path csv;

  bool ok() const;
};

struct ComparisonEntry {
  std::string scenario;
  ModelKind model = ModelKind::local_sensing;
  RunStatus status = RunStatus::completed;
  double t_star = 0.0;
  double final_umax = 0.0;
  bool envelope_ok = false;
  bool entropy_floor_ok = false;
};

struct NuRow {
  double nu = 0.0;
  /// ||u_nu(T) - u(T)||_2 against the unregularized reference.
  double diff_reference = 0.0;
  /// ||u_nu(T) - u_{nu_min}(T)||_2; zero for nu_min itself.
  double diff_nu_min = 0.0;
};

struct ThetaRow {
  double theta = 0.0;
  /// ||u(T) - u_inf||_2 / ||u_inf||_2 with u_inf = m exp(V) / int exp(V).
  double rel_error = 0.0;
};

struct GroupReport {
  std::string name;
  SweepKind kind = SweepKind::none;
  std::vector<ComparisonEntry> comparison;
  std::vector<NuRow> nu_table;
  std::vector<ThetaRow> theta_table;
  std::vector<Assertion> assertions;

  bool ok() const;
};

struct BatchReport {
  std::vector<ScenarioResult> scenarios;
  std::vector<GroupReport> groups;
  std::filesystem::path out_dir;

  bool ok() const;
};

struct BatchOptions {
  /// Used when a scenario has no `output` key; a scenario key wins otherwise
  /// unless `force_out` is set.
  std::filesystem::path out_dir = "locsense_out";
  bool force_out = false;
  int parallel = 1;
  /// Progress lines go here when non-null.
  std::ostream* log = nullptr;
};

/// Runs every scenario, writes CSVs, snapshots and summary.json, and
/// evaluates all assertions. Partial outputs are kept when runs fail.
BatchReport run_batch(const Batch& batch, const BatchOptions& opts);

ScenarioResult run_scenario(const Scenario& s);

/// Group-level tables and assertions from finished member runs.
GroupReport evaluate_group(const SweepGroup& g, const Batch& batch, const std::vector<ScenarioResult>& results);

}  // namespace locsense
