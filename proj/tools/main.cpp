// locsense-cli: run scenario batches, inspect presets, re-check trajectories.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "locsense/batch.hpp"
#include "locsense/config.hpp"

namespace fs = std::filesystem;
using namespace locsense;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void print_assertions(const std::string& who, const std::vector<Assertion>& as) {
  for (const auto& a : as)
    std::cout << (a.pass ? "PASS " : "FAIL ") << who << ' ' << a.name << ": " << a.detail << '\n';
}

int cmd_run(const std::string& config, const std::string& out, int parallel, bool strict) {
  const Batch batch = parse_config(slurp(config), strict);
  for (const auto& w : batch.warnings) std::cerr << "warning: " << w << '\n';
  BatchOptions opts;
  opts.out_dir = out.empty() ? fs::path("locsense_out") : fs::path(out);
  opts.force_out = !out.empty();
  opts.parallel = parallel;
  opts.log = &std::cerr;
  const BatchReport rep = run_batch(batch, opts);
  for (const auto& s : rep.scenarios) print_assertions(s.name, s.assertions);
  for (const auto& g : rep.groups) {
    for (const auto& c : g.comparison)
      std::cout << "     " << g.name << ' ' << c.scenario << ": " << to_string(c.status)
                << (c.status == RunStatus::blowup_detected ? " at t* = " + std::to_string(c.t_star) : "")
                << ", final umax " << c.final_umax << '\n';
    for (const auto& r : g.nu_table)
      std::cout << "     " << g.name << " nu = " << r.nu << ": |u_nu - u| = " << r.diff_reference
                << ", |u_nu - u_nu_min| = " << r.diff_nu_min << '\n';
    for (const auto& r : g.theta_table)
      std::cout << "     " << g.name << " theta = " << r.theta << ": rel error " << r.rel_error << '\n';
    print_assertions(g.name, g.assertions);
  }
  std::cout << (rep.ok() ? "all assertions pass" : "some assertions FAILED") << " (summary: "
            << (opts.out_dir / "summary.json").string() << ")\n";
  return rep.ok() ? 0 : 1;
}

// Model of a stored CSV: explicit flag, else the summary.json next to it.
std::optional<ModelKind> infer_model(const fs::path& csv, const std::string& flag) {
  if (!flag.empty()) return parse_model_kind(flag);
  const fs::path summary = csv.parent_path() / "summary.json";
  if (!fs::exists(summary)) return std::nullopt;
  const auto j = nlohmann::json::parse(slurp(summary), nullptr, false);
  if (j.is_discarded() || !j.contains("scenarios")) return std::nullopt;
  for (const auto& s : j["scenarios"])
    if (s.value("csv", "") == csv.filename().string()) return parse_model_kind(s.value("model", ""));
  return std::nullopt;
}

int cmd_check(const std::string& path, const std::string& model_flag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  const auto traj = read_csv(in);
  const auto model = infer_model(path, model_flag);
  if (!model) std::cout << "note: model unknown (no --model, no summary.json entry); duality checks skipped\n";
  const auto as = trajectory_assertions(traj, model);
  print_assertions(fs::path(path).filename().string(), as);
  const bool ok = std::all_of(as.begin(), as.end(), [](const Assertion& a) { return a.pass; });
  std::cout << traj.size() << " records, " << (ok ? "all assertions pass" : "some assertions FAILED") << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving simulator for local-sensing chemotaxis and Keller-Segel models"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run every scenario of a config file");
  std::string config, out;
  int parallel = 1;
  bool strict = false;
  run->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory (overrides per-scenario output keys)");
  run->add_option("--parallel", parallel, "Scenarios to run concurrently")->check(CLI::PositiveNumber);
  run->add_flag("--strict", strict, "Treat unknown config keys as errors");

  auto* pre = app.add_subcommand("preset", "Inspect built-in presets");
  pre->require_subcommand(1);
  auto* list = pre->add_subcommand("list", "List preset names");
  auto* show = pre->add_subcommand("show", "Print a preset as config text");
  std::string preset_name;
  show->add_option("name", preset_name, "Preset name")->required();

  auto* check = app.add_subcommand("check", "Re-verify the inequalities of a stored trajectory CSV");
  std::string csv, model;
  check->add_option("csv", csv, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  check->add_option("--model", model, "Model kind of the run (default: from summary.json)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, out, parallel, strict);
    if (*list) {
      for (const auto& n : preset_names()) std::cout << n << '\n';
      return 0;
    }
    if (*show) {
      std::cout << preset_text(preset_name);
      return 0;
    }
    if (*check) return cmd_check(csv, model);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
