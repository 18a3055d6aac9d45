#include "locsense/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "locsense/mesh.hpp"

namespace locsense {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "t",     "mass", "v_mean", "entropy", "dual_norm_sq", "dissipation_fisher", "dissipation_v",
      "duality_lhs_cumulative", "umax", "umin", "vmax", "l2_u", "l4_u", "linf_u", "entropy_lower_bound", "dt_used"};
  return cols;
}

namespace {

// Member pointers in csv_columns() order.
constexpr double DiagRecord::*kCsvFields[] = {
    &DiagRecord::t,          &DiagRecord::mass,          &DiagRecord::v_mean,
    &DiagRecord::entropy,    &DiagRecord::dual_norm_sq,  &DiagRecord::dissipation_fisher,
    &DiagRecord::dissipation_v, &DiagRecord::duality_lhs_cumulative, &DiagRecord::umax,
    &DiagRecord::umin,       &DiagRecord::vmax,          &DiagRecord::l2_u,
    &DiagRecord::l4_u,       &DiagRecord::linf_u,        &DiagRecord::entropy_lower_bound,
    &DiagRecord::dt_used};

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string g6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double parse_cell(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw std::runtime_error("csv: malformed number '" + s + "'");
  return v;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

}  // namespace

double csv_value(const DiagRecord& r, std::size_t c) {
  if (c >= std::size(kCsvFields)) throw std::out_of_range("csv_value: column index");
  return r.*kCsvFields[c];
}

void write_csv(std::ostream& out, const std::vector<DiagRecord>& trajectory) {
  const auto& cols = csv_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  for (const auto& r : trajectory) {
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << g17(r.*kCsvFields[c]);
    out << '\n';
  }
}

std::vector<DiagRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty file");
  std::string expected;
  for (std::size_t c = 0; c < csv_columns().size(); ++c) expected += (c ? "," : "") + csv_columns()[c];
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) throw std::runtime_error("csv: header does not match the trajectory schema");
  std::vector<DiagRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    DiagRecord r;
    std::size_t c = 0;
    while (std::getline(row, cell, ',')) {
      if (c >= csv_columns().size()) throw std::runtime_error("csv: too many fields on line " + std::to_string(lineno));
      r.*kCsvFields[c++] = parse_cell(cell);
    }
    if (c != csv_columns().size()) throw std::runtime_error("csv: too few fields on line " + std::to_string(lineno));
    r.l1_u = r.mass;
    out.push_back(r);
  }
  return out;
}

void write_snapshot(std::ostream& out, const Field& f, double t) {
  out << "# " << f.grid.dim() << ' ' << f.grid.n() << ' ' << g17(t) << '\n';
  for (double x : f.values) out << g17(x) << '\n';
}

Field read_snapshot(std::istream& in, double* t) {
  std::string hash;
  int dim = 0, n = 0;
  double time = 0.0;
  if (!(in >> hash >> dim >> n >> time) || hash != "#") throw std::runtime_error("snapshot: malformed header");
  Field f(Grid(dim, n));
  for (double& x : f.values)
    if (!(in >> x)) throw std::runtime_error("snapshot: too few values");
  if (t) *t = time;
  return f;
}

bool has_duality(ModelKind kind) {
  return kind == ModelKind::local_sensing || kind == ModelKind::regularized ||
         kind == ModelKind::parabolic_elliptic;
}

std::vector<Assertion> trajectory_assertions(const std::vector<DiagRecord>& traj, std::optional<ModelKind> model) {
  std::vector<Assertion> out;
  if (traj.empty()) {
    out.push_back({"nonempty_trajectory", false, "no records"});
    return out;
  }
  const double m0 = traj.front().mass;
  double drift = 0.0;
  double worst_neg = 0.0;
  for (const auto& r : traj) {
    drift = std::max(drift, std::abs(r.mass - m0) / m0);
    if (r.umin < 0.0) worst_neg = std::max(worst_neg, -r.umin / std::max(r.umax, 1e-300));
  }
  out.push_back({"mass_conservation", drift <= 1e-9, "max relative drift " + g6(drift) + " (limit 1e-09)"});
  out.push_back({"nonnegativity", worst_neg <= 1e-12, "worst min(u)/max(u) " + g6(-worst_neg)});

  // The floor is an algebraic identity; only quadrature round-off is allowed.
  std::size_t checked = 0, violations = 0;
  double worst_gap = std::numeric_limits<double>::infinity();
  for (const auto& r : traj) {
    if (!std::isfinite(r.entropy_lower_bound)) continue;
    ++checked;
    const double gap = r.entropy - r.entropy_lower_bound;
    const double tol = 64 * std::numeric_limits<double>::epsilon() * (std::abs(r.entropy) + std::abs(r.entropy_lower_bound));
    worst_gap = std::min(worst_gap, gap);
    if (gap < -tol) ++violations;
  }
  if (checked > 0)
    out.push_back({"entropy_floor", violations == 0,
                   std::to_string(violations) + " violations in " + std::to_string(checked) +
                       " records, min E - floor " + g6(worst_gap)});

  if (model && has_duality(*model)) {
    const auto d = check_duality(traj);
    double worst_env = std::numeric_limits<double>::infinity();
    for (double x : d.envelope_margin) worst_env = std::min(worst_env, x);
    out.push_back({"duality_cumulative", d.cumulative_ok, "min residual + slack " + g6(d.worst_residual)});
    out.push_back({"duality_envelope", d.envelope_ok, "min envelope margin " + g6(worst_env)});
    out.push_back({"duality_monotone", d.monotone_ok, "cumulative term nondecreasing"});
  }
  return out;
}

bool ScenarioResult::ok() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

bool GroupReport::ok() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

bool BatchReport::ok() const {
  return std::all_of(scenarios.begin(), scenarios.end(), [](const auto& s) { return s.ok(); }) &&
         std::all_of(groups.begin(), groups.end(), [](const auto& g) { return g.ok(); });
}

ScenarioResult run_scenario(const Scenario& s) {
  ScenarioResult out;
  out.name = s.name;
  out.group = s.group;
  out.model = s.model.kind;
  const SimState init = make_initial(s.grid(), s.initial);
  out.run = run(s.model, init, s.step, s.sample_every);
  out.assertions = trajectory_assertions(out.run.trajectory, s.model.kind);
  const std::string status(to_string(out.run.status));
  const std::string detail = status + (out.run.message.empty() ? "" : ": " + out.run.message);
  if (out.run.status == RunStatus::failed) out.assertions.push_back({"run_finished", false, detail});
  if (s.expect != ExpectStatus::any)
    out.assertions.push_back({"expected_status", status == to_string(s.expect),
                              "expected " + std::string(to_string(s.expect)) + ", got " + detail});
  return out;
}

namespace {

double l2_diff(const Field& a, const Field& b) { return lp_norm(a - b, 2.0); }

const ScenarioResult& result_for(const std::vector<ScenarioResult>& results, std::size_t i) { return results.at(i); }

}  // namespace

GroupReport evaluate_group(const SweepGroup& g, const Batch& batch, const std::vector<ScenarioResult>& results) {
  GroupReport rep;
  rep.name = g.name;
  rep.kind = g.kind;
  bool all_ran = true;
  for (std::size_t i : g.members) all_ran = all_ran && result_for(results, i).run.status != RunStatus::failed;
  if (g.reference) all_ran = all_ran && result_for(results, *g.reference).run.status != RunStatus::failed;

  switch (g.kind) {
    case SweepKind::none: break;
    case SweepKind::models: {
      bool every_ok = true;
      for (std::size_t i : g.members) {
        const auto& r = result_for(results, i);
        ComparisonEntry e;
        e.scenario = r.name;
        e.model = r.model;
        e.status = r.run.status;
        e.t_star = r.run.status == RunStatus::blowup_detected ? r.run.blowup_time : 0.0;
        e.final_umax = r.run.trajectory.empty() ? 0.0 : r.run.trajectory.back().umax;
        e.envelope_ok = check_duality(r.run.trajectory).envelope_ok;
        e.entropy_floor_ok = true;
        for (const auto& a : r.assertions)
          if (a.name == "entropy_floor") e.entropy_floor_ok = a.pass;
        every_ok = every_ok && r.ok();
        rep.comparison.push_back(e);
      }
      rep.assertions.push_back({"comparison", every_ok && all_ran,
                                "every member reached its expected status with passing diagnostics"});
      break;
    }
    case SweepKind::nu: {
      if (!all_ran || !g.reference || g.members.empty()) {
        rep.assertions.push_back({"nu_monotone", false, "a member run failed"});
        break;
      }
      const Field& ref = result_for(results, *g.reference).run.final_state.u;
      std::vector<std::size_t> order = g.members;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return *batch.scenarios[a].model.nu > *batch.scenarios[b].model.nu;
      });
      const Field& finest = result_for(results, order.back()).run.final_state.u;
      for (std::size_t i : order) {
        const Field& u = result_for(results, i).run.final_state.u;
        rep.nu_table.push_back({*batch.scenarios[i].model.nu, l2_diff(u, ref), l2_diff(u, finest)});
      }
      bool ref_dec = true, min_dec = true;
      for (std::size_t k = 1; k < rep.nu_table.size(); ++k) {
        ref_dec = ref_dec && rep.nu_table[k].diff_reference < rep.nu_table[k - 1].diff_reference;
        min_dec = min_dec && rep.nu_table[k].diff_nu_min < rep.nu_table[k - 1].diff_nu_min;
      }
      std::string row;
      for (const auto& r : rep.nu_table) row += (row.empty() ? "" : ", ") + g6(r.diff_reference);
      rep.assertions.push_back({"nu_monotone_vs_reference", ref_dec, "||u_nu - u||_2 = " + row});
      rep.assertions.push_back({"nu_monotone_vs_nu_min", min_dec, "differences to the smallest nu decrease"});
      break;
    }
    case SweepKind::theta: {
      bool within = all_ran;
      std::string row;
      for (std::size_t i : g.members) {
        const Scenario& s = batch.scenarios[i];
        const Field& u = result_for(results, i).run.final_state.u;
        Field u_inf(s.model.potential->grid);
        for (std::size_t k = 0; k < u_inf.size(); ++k) u_inf[k] = std::exp((*s.model.potential)[k]);
        u_inf = (s.initial.mass / integral(u_inf)) * u_inf;
        const double err = l2_diff(u, u_inf) / lp_norm(u_inf, 2.0);
        rep.theta_table.push_back({*s.model.theta, err});
        within = within && err <= g.equilibrium_tol;
        row += (row.empty() ? "" : ", ") + g6(err);
      }
      rep.assertions.push_back(
          {"theta_equilibrium", within, "relative L2 errors " + row + " (limit " + g6(g.equilibrium_tol) + ")"});
      break;
    }
  }
  return rep;
}

namespace {

json assertions_json(const std::vector<Assertion>& as) {
  json a = json::array();
  for (const auto& x : as) a.push_back({{"name", x.name}, {"pass", x.pass}, {"detail", x.detail}});
  return a;
}

json summary_json(const Batch& batch, const BatchReport& rep) {
  json j;
  j["all_pass"] = rep.ok();
  json sc = json::array();
  for (std::size_t i = 0; i < rep.scenarios.size(); ++i) {
    const auto& r = rep.scenarios[i];
    const auto& s = batch.scenarios[i];
    json e = {{"name", r.name},
              {"group", r.group},
              {"model", std::string(to_string(r.model))},
              {"status", std::string(to_string(r.run.status))},
              {"message", r.run.message},
              {"steps", r.run.steps},
              {"rejected", r.run.rejected},
              {"clamped", r.run.clamped},
              {"mass", s.initial.mass},
              {"epsilon", s.model.epsilon},
              {"beta", s.model.beta},
              {"csv", r.csv.filename().string()},
              {"pass", r.ok()},
              {"assertions", assertions_json(r.assertions)}};
    if (r.run.status == RunStatus::blowup_detected) e["blowup_time"] = r.run.blowup_time;
    if (!r.run.trajectory.empty()) e["final_umax"] = r.run.trajectory.back().umax;
    if (s.model.nu) e["nu"] = *s.model.nu;
    if (s.model.theta) e["theta"] = *s.model.theta;
    sc.push_back(std::move(e));
  }
  j["scenarios"] = std::move(sc);
  json gs = json::array();
  for (const auto& g : rep.groups) {
    json e = {{"name", g.name}, {"sweep", std::string(to_string(g.kind))}, {"pass", g.ok()},
              {"assertions", assertions_json(g.assertions)}};
    if (g.kind == SweepKind::models) {
      json c = json::array();
      for (const auto& x : g.comparison) {
        json row = {{"scenario", x.scenario},
                    {"model", std::string(to_string(x.model))},
                    {"status", std::string(to_string(x.status))},
                    {"final_umax", x.final_umax},
                    {"sqrt_t_envelope", x.envelope_ok},
                    {"entropy_floor", x.entropy_floor_ok}};
        if (x.status == RunStatus::blowup_detected) row["t_star"] = x.t_star;
        c.push_back(std::move(row));
      }
      e["comparison"] = std::move(c);
    }
    if (g.kind == SweepKind::nu) {
      json t = json::array();
      for (const auto& x : g.nu_table)
        t.push_back({{"nu", x.nu}, {"l2_diff_reference", x.diff_reference}, {"l2_diff_nu_min", x.diff_nu_min}});
      e["nu_table"] = std::move(t);
    }
    if (g.kind == SweepKind::theta) {
      json t = json::array();
      for (const auto& x : g.theta_table) t.push_back({{"theta", x.theta}, {"rel_l2_error", x.rel_error}});
      e["theta_table"] = std::move(t);
    }
    gs.push_back(std::move(e));
  }
  j["groups"] = std::move(gs);
  return j;
}

}  // namespace

BatchReport run_batch(const Batch& batch, const BatchOptions& opts) {
  BatchReport rep;
  rep.out_dir = opts.out_dir;
  fs::create_directories(opts.out_dir);
  rep.scenarios.resize(batch.scenarios.size());
  std::mutex log_mu;
  auto log = [&](const std::string& msg) {
    if (!opts.log) return;
    std::lock_guard lock(log_mu);
    *opts.log << msg << std::endl;
  };

  auto work = [&](std::size_t i) {
    const Scenario& s = batch.scenarios[i];
    const fs::path dir = (opts.force_out || s.output.empty()) ? opts.out_dir : fs::path(s.output);
    ScenarioResult& r = rep.scenarios[i];
    r.name = s.name;
    r.group = s.group;
    r.model = s.model.kind;
    r.csv = dir / (s.name + ".csv");
    log("[" + s.name + "] running " + std::string(to_string(s.model.kind)) + " on " + std::to_string(s.n) +
        (s.dim == 2 ? "^2" : "") + " cells to t = " + g6(s.step.t_end));
    try {
      fs::create_directories(dir);
      const fs::path csv = r.csv;
      r = run_scenario(s);
      r.csv = csv;
      std::ostringstream os;
      write_csv(os, r.run.trajectory);
      write_file(r.csv, os.str());
      std::ostringstream u0, uf, vf;
      write_snapshot(u0, make_initial(s.grid(), s.initial).u, 0.0);
      write_snapshot(uf, r.run.final_state.u, r.run.final_state.t);
      write_snapshot(vf, r.run.final_state.v, r.run.final_state.t);
      write_file(dir / (s.name + ".u0.txt"), u0.str());
      write_file(dir / (s.name + ".u_final.txt"), uf.str());
      write_file(dir / (s.name + ".v_final.txt"), vf.str());
    } catch (const std::exception& e) {
      r.assertions.push_back({"scenario_error", false, e.what()});
    }
    std::string fails;
    for (const auto& a : r.assertions)
      if (!a.pass) fails += " " + a.name;
    log("[" + s.name + "] " + std::string(to_string(r.run.status)) + " at t = " + g6(r.run.final_state.t) + ", " +
        std::to_string(r.run.steps) + " steps" + (fails.empty() ? ", all checks pass" : ", FAILED:" + fails));
  };

  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(opts.parallel, 1)), 1, batch.scenarios.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < batch.scenarios.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < batch.scenarios.size(); i = next++) work(i);
      });
    for (auto& t : pool) t.join();
  }

  for (const auto& g : batch.groups) rep.groups.push_back(evaluate_group(g, batch, rep.scenarios));
  write_file(opts.out_dir / "summary.json", summary_json(batch, rep).dump(2) + "\n");
  return rep;
}

}  // namespace locsense
