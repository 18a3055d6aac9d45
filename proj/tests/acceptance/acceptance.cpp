// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "locsense/batch.hpp"
#include "locsense/config.hpp"
#include "locsense/mesh.hpp"
#include "oracles.hpp"

using namespace locsense;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Criterion {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string sci(double x) { return fmt("%.3e", x); }

StepConfig fixed_dt(double dt, double t_end) {
  StepConfig c;
  c.dt_init = c.dt_max = dt;
  c.dt_min = dt * 1e-6;
  c.t_end = t_end;
  c.grow_factor = 1.0;
  c.max_relative_change = 1e9;
  return c;
}

Scenario only(const Batch& b) { return b.scenarios.at(0); }

double max_abs_diff(const Field& a, const Field& b) {
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, std::abs(a[k] - b[k]));
  return e;
}

bool all_pass(const std::vector<Assertion>& as, const std::string& prefix = "") {
  for (const auto& a : as)
    if (a.name.rfind(prefix, 0) == 0 && !a.pass) return false;
  return true;
}

std::string failing(const std::vector<Assertion>& as) {
  std::string s;
  for (const auto& a : as)
    if (!a.pass) s += " " + a.name + " (" + a.detail + ")";
  return s.empty() ? "" : ":" + s;
}

BatchReport run_preset(const std::string& name, const fs::path& out) {
  BatchOptions o;
  o.out_dir = out;
  o.force_out = true;
  return run_batch(preset(name), o);
}

// --- 1 -----------------------------------------------------------------------

Criterion operator_oracles() {
  Criterion c;
  for (int d : {1, 2}) {
    const Grid g(d, d == 1 ? 1024 : 32);
    const Field f = oracle::random_field(g, 7 + d, -1.0, 1.0);
    const double ek = oracle::rel_l2(apply_K(f).values, oracle::dense_K(g, oracle::to_eigen(f.values)));
    c.require(ek < 1e-8, "apply_K vs bordered dense LU, " + std::to_string(g.cell_count()) + " cells: " + sci(ek));
    const Field p = oracle::random_field(g, 17 + d, 0.0, 1.0);
    const double el = oracle::rel_l2(apply_lambda_nu(p, 1e-2).values, oracle::dense_lambda(g, oracle::to_eigen(p.values), 1e-2));
    c.require(el < 1e-8, "apply_lambda_nu vs dense LU, " + std::to_string(g.cell_count()) + " cells: " + sci(el));
  }
  {
    const Grid g(2, 32);
    const SimState s(0.0, oracle::random_field(g, 31, 0.0, 2.0), oracle::random_field(g, 32, 0.0, 1.5));
    const double dt = 5e-3;
    const Eigen::MatrixXd L = oracle::dense_neumann_laplacian(g);
    Eigen::VectorXd a(g.cell_count());
    for (std::size_t k = 0; k < g.cell_count(); ++k) a[k] = std::exp(-s.v[k]);
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(g.cell_count(), g.cell_count()) - dt * L * a.asDiagonal();
    const auto ls = step_local_sensing(s, ModelSpec::local_sensing(1.0, 1.0), fixed_dt(dt, 1.0), dt);
    const double e1 = oracle::rel_l2(ls.state.u.values, A.partialPivLu().solve(oracle::to_eigen(s.u.values)));
    c.require(e1 < 1e-8, "local-sensing density system vs dense LU, 1024 cells: " + sci(e1));
    const auto ks = step_minimal_ks(s, ModelSpec::minimal_ks(1.0, 1.0), fixed_dt(dt, 1.0), dt);
    const double e2 =
        oracle::rel_l2(ks.state.u.values, oracle::dense_sg(g, s.v, 0.0, dt).partialPivLu().solve(oracle::to_eigen(s.u.values)));
    c.require(e2 < 1e-8, "Keller-Segel density system vs dense LU, 1024 cells: " + sci(e2));
  }

  // Eigenfunction convergence, each against its analytic image.
  struct Case {
    std::string name;
    int dim;
    std::function<double(const Grid&)> error;
  };
  auto cos1 = [](const Grid& g) { return Field::sample(g, [](double x) { return std::cos(pi * x); }); };
  auto cos2 = [](const Grid& g) {
    return Field::sample(g, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
  };
  const double nu = 0.01;
  const std::vector<Case> cases = {
      {"laplacian cos(pi x)", 1, [&](const Grid& g) { return max_abs_diff(laplacian_neumann(cos1(g)), (-pi * pi) * cos1(g)); }},
      {"laplacian cos(pi x)cos(pi y)", 2,
       [&](const Grid& g) { return max_abs_diff(laplacian_neumann(cos2(g)), (-2 * pi * pi) * cos2(g)); }},
      {"K cos(pi x)", 1, [&](const Grid& g) { return max_abs_diff(apply_K(cos1(g)), (1 / (pi * pi)) * cos1(g)); }},
      {"K cos(pi x)cos(pi y)", 2, [&](const Grid& g) { return max_abs_diff(apply_K(cos2(g)), (0.5 / (pi * pi)) * cos2(g)); }},
      {"Lambda_nu cos(pi x)", 1,
       [&](const Grid& g) { return max_abs_diff(apply_lambda_nu(cos1(g), nu), (1 / (1 + nu * pi * pi)) * cos1(g)); }},
      {"L_nu cos(pi x)cos(pi y)", 2, [&](const Grid& g) {
         const double k = 1 / (1 + 2 * nu * pi * pi);
         return max_abs_diff(apply_L_nu(cos2(g), nu), (k * k) * cos2(g));
       }},
      {"grad_sq_norm cos(pi x)", 1, [&](const Grid& g) { return std::abs(grad_sq_norm(cos1(g)) - pi * pi / 2); }},
  };
  for (const auto& cs : cases) {
    const std::vector<int> ns = cs.dim == 1 ? std::vector<int>{32, 64, 128} : std::vector<int>{16, 32, 64};
    std::vector<double> err;
    for (int n : ns) err.push_back(cs.error(Grid(cs.dim, n)));
    const double order = std::min(oracle::observed_order(err[0], err[1]), oracle::observed_order(err[1], err[2]));
    c.require(order >= 1.9, cs.name + ": observed order " + fmt("%.3f", order));
  }
  return c;
}

// --- 2 -----------------------------------------------------------------------

Criterion mass_conservation() {
  Criterion c;
  const Grid g(2, 24);
  const Field V = Field::sample(g, [](double x, double y) { return 2.0 * std::exp(-((x - 0.3) * (x - 0.3) + (y - 0.7) * (y - 0.7)) / 0.05); });
  const std::vector<ModelSpec> models = {ModelSpec::local_sensing(1.0, 1.0), ModelSpec::minimal_ks(1.0, 1.0),
                                         ModelSpec::parabolic_elliptic(1.0, 1.0),
                                         ModelSpec::regularized(1.0, 1.0, 1e-3), ModelSpec::theta_family(0.5, V)};
  std::uint64_t seed = 100;
  for (const auto& m : models) {
    const SimState s(0.0, oracle::random_field(g, seed, 0.0, 3.0), oracle::random_field(g, seed + 1, 0.0, 2.0));
    seed += 2;
    const double dt = 1e-3;
    // A hair past 1000 dt so that round-off in t cannot drop the last step.
    const RunResult r = run(m, s, fixed_dt(dt, 1000 * dt), 0.0);
    double drift = 0.0;
    for (const auto& rec : r.trajectory) drift = std::max(drift, std::abs(rec.mass - s.mass) / s.mass);
    const bool ok = r.status == RunStatus::completed && r.steps == 1000 && drift <= 1e-9;
    c.require(ok, std::string(to_string(m.kind)) + ": " + std::to_string(r.steps) + " steps, max relative drift " +
                      sci(drift));
  }
  return c;
}

// --- 3 -----------------------------------------------------------------------

Criterion mean_of_v() {
  Criterion c;
  InitialData d;
  d.u = {ProfileKind::gaussian_bump, 0.2, 1.0, 0.1, {0.4, 0.6}};
  d.v = {ProfileKind::constant, 0.0};
  d.mass = 1.0;
  const RunResult r = run(ModelSpec::local_sensing(1.0, 1.0), make_initial(Grid(2, 32), d), fixed_dt(1e-3, 1.0), 0.0);
  double worst = 0.0;
  for (const auto& rec : r.trajectory) worst = std::max(worst, std::abs(rec.v_mean - (1.0 - std::exp(-rec.t))));
  c.require(r.status == RunStatus::completed && r.trajectory.size() == 1001,
            std::to_string(r.trajectory.size()) + " records over [0, 1]");
  c.require(worst <= 5e-3, "max |vbar - (1 - e^-t)| = " + sci(worst) + " (limit 5e-3)");
  return c;
}

// --- 4, 5 --------------------------------------------------------------------

struct DualityRuns {
  std::vector<std::pair<std::string, ScenarioResult>> runs;
};

DualityRuns duality_runs() {
  DualityRuns out;
  for (const char* p : {"subcritical2d", "supercritical2d"}) {
    Scenario s = only(preset(p));
    out.runs.emplace_back(std::string(p) + " local_sensing", run_scenario(s));
    s.model = ModelSpec::regularized(s.model.epsilon, s.model.beta, 1e-3);
    out.runs.emplace_back(std::string(p) + " regularized(nu=1e-3)", run_scenario(s));
  }
  return out;
}

Criterion duality(const DualityRuns& d) {
  Criterion c;
  for (const auto& [name, r] : d.runs) {
    const auto chk = check_duality(r.run.trajectory);
    double env = std::numeric_limits<double>::infinity(), res = env;
    for (std::size_t k = 1; k < chk.residual.size(); ++k) {
      env = std::min(env, chk.envelope_margin[k]);
      res = std::min(res, chk.residual[k] + chk.slack[k]);
    }
    const bool ok = r.run.status != RunStatus::failed && r.run.trajectory.size() > 1 && chk.ok();
    c.require(ok, name + ": " + std::string(to_string(r.run.status)) + ", " + std::to_string(r.run.trajectory.size()) +
                      " records, min envelope margin " + sci(env) + ", min residual + slack " + sci(res));
  }
  return c;
}

Criterion entropy_floor(const DualityRuns& d) {
  Criterion c;
  const auto& r = d.runs.at(2).second;  // supercritical2d, local sensing
  const Scenario s = only(preset("supercritical2d"));
  const double eps = s.model.epsilon, beta = s.model.beta, m = s.initial.mass;
  // C(t) rebuilt here from the dual-norm column, independent of the stored bound.
  double C = 0.0, worst = std::numeric_limits<double>::infinity();
  std::size_t bad = 0;
  for (const auto& rec : r.run.trajectory) {
    C = std::max(C, std::sqrt(std::max(rec.dual_norm_sq, 0.0)));
    const double floor = -C * C / eps - m * m / beta;
    const double gap = rec.entropy - floor;
    worst = std::min(worst, gap);
    const double roundoff = 64 * std::numeric_limits<double>::epsilon() * (std::abs(rec.entropy) + std::abs(floor));
    if (gap < -roundoff) ++bad;
  }
  c.require(r.run.trajectory.size() > 1, std::to_string(r.run.trajectory.size()) + " records");
  c.require(bad == 0, std::to_string(bad) + " violations, min E(t) - floor(t) = " + fmt("%.6g", worst));
  return c;
}

// --- 6 -----------------------------------------------------------------------

Criterion delayed_blowup(const BatchReport& rep) {
  Criterion c;
  const Scenario sup = only(preset("supercritical2d"));
  c.require(sup.model.epsilon == 1.0 && std::abs(sup.initial.mass - 8 * pi) < 1e-12 && sup.initial.u.width == 0.05 &&
                sup.n == 96 && sup.step.t_end == 2.0,
            "preset: eps = 1, m = 8 pi, bump width 0.05, 96^2, T = 2");
  for (const auto& r : rep.scenarios) {
    const double T = 2.0;
    if (r.model == ModelKind::minimal_ks) {
      const bool ok = r.run.status == RunStatus::blowup_detected && r.run.blowup_time < T;
      c.require(ok, "minimal_ks: " + std::string(to_string(r.run.status)) + " at t* = " + fmt("%.6g", r.run.blowup_time));
    } else {
      const double umax = r.run.trajectory.empty() ? NAN : r.run.trajectory.back().umax;
      const bool ok = r.run.status == RunStatus::completed &&
                      std::abs(r.run.final_state.t - T) < 1e-9 && std::isfinite(umax) &&
                      all_pass(r.assertions, "duality") && all_pass(r.assertions, "entropy_floor");
      c.require(ok, "local_sensing: " + std::string(to_string(r.run.status)) + " at t = " +
                        fmt("%.6g", r.run.final_state.t) + ", final ||u||_inf = " + fmt("%.6g", umax) +
                        ", duality and entropy floor" + (ok ? " pass" : " FAIL" + failing(r.assertions)));
    }
  }
  c.require(rep.ok(), "batch assertions" + failing(rep.groups.empty() ? std::vector<Assertion>{} : rep.groups[0].assertions));
  return c;
}

// --- 7 -----------------------------------------------------------------------

Criterion subcritical_boundedness() {
  Criterion c;
  const Scenario s = only(preset("subcritical2d"));
  const ScenarioResult r = run_scenario(s);
  const double u0 = lp_norm(make_initial(s.grid(), s.initial).u, kInfinity);
  double peak = 0.0;
  for (const auto& rec : r.run.trajectory) peak = std::max(peak, rec.linf_u);
  c.require(r.run.status == RunStatus::completed && std::abs(r.run.final_state.t - 5.0) < 1e-9,
            "subcritical2d to T = 5: " + std::string(to_string(r.run.status)));
  c.require(peak <= 10 * u0, "max ||u(t)||_inf = " + fmt("%.6g", peak) + " vs 10 ||u0||_inf = " + fmt("%.6g", 10 * u0));

  // One (dt, h) halving at fixed step sizes.
  Scenario coarse = s, fine = s;
  coarse.step = fixed_dt(1e-2, 5.0);
  fine.n = 2 * s.n;
  fine.step = fixed_dt(5e-3, 5.0);
  const RunResult rc = run(s.model, make_initial(coarse.grid(), coarse.initial), coarse.step, 0.0);
  const RunResult rf = run(s.model, make_initial(fine.grid(), fine.initial), fine.step, 0.0);
  const auto rep = check_entropy_monotonicity(rc.trajectory, rf.trajectory);
  c.require(rep.ok, "max entropy increment rate " + sci(rep.coarse_rate) + " (32^2, dt 1e-2) vs " +
                        sci(rep.fine_rate) + " (64^2, dt 5e-3), ratio " + fmt("%.3g", rep.ratio) +
                        ", noise floor " + sci(rep.noise_floor));
  c.require(rep.fine_max_rise <= rep.noise_floor,
            "refined run: max E(t) - E(0) = " + sci(rep.fine_max_rise));
  return c;
}

// --- 8, 9 --------------------------------------------------------------------

Criterion nu_convergence(const BatchReport& rep) {
  Criterion c;
  const GroupReport& g = rep.groups.at(0);
  for (const auto& row : g.nu_table)
    c.notes.push_back("     nu = " + fmt("%g", row.nu) + ": ||u_nu(T) - u(T)||_2 = " + sci(row.diff_reference));
  bool dec = g.nu_table.size() == 4;
  for (std::size_t k = 1; k < g.nu_table.size(); ++k)
    dec = dec && g.nu_table[k].diff_reference < g.nu_table[k - 1].diff_reference;
  c.require(dec, "strictly decreasing over nu = 1e-1 .. 1e-4");
  c.require(rep.ok(), "every member run passes its own checks" + failing(g.assertions));
  return c;
}

Criterion theta_family(const BatchReport& rep) {
  Criterion c;
  const GroupReport& g = rep.groups.at(0);
  bool ok = g.theta_table.size() == 3;
  for (const auto& row : g.theta_table) {
    ok = ok && row.rel_error <= 1e-3;
    c.notes.push_back("     theta = " + fmt("%g", row.theta) + ": ||u(T) - u_inf||/||u_inf|| = " + sci(row.rel_error));
  }
  c.require(ok, "all theta reach the exp(V) equilibrium within 1e-3");
  bool exact = true;
  SplitMix64 rng(5);
  for (int k = 0; k < 1000; ++k) {
    const double vi = 10 * rng.uniform(), vj = 10 * rng.uniform() - 5, h = rng.uniform();
    exact = exact && jump_rate(1.0, h, vi, vj) == jump_rate(1.0, h, vi, 0.0) && jump_rate(1.0, h, vi, vj) == std::exp(-vi);
  }
  c.require(exact, "jump_rate(theta = 1) equals exp(-Vi) for 1000 random (h, Vi, Vj), bit for bit");
  return c;
}

// --- 10 ----------------------------------------------------------------------

Criterion parabolic_elliptic() {
  Criterion c;
  for (const char* p : {"subcritical2d", "supercritical2d"}) {
    Scenario s = only(preset(p));
    s.model = ModelSpec::parabolic_elliptic(s.model.epsilon, s.model.beta);
    s.sample_every = 0.0;  // every step
    if (std::string(p) == "supercritical2d") s.step.t_end = 0.5;
    const ScenarioResult r = run_scenario(s);
    const double target = s.initial.mass / s.model.beta;
    double worst = 0.0;
    for (const auto& rec : r.run.trajectory) worst = std::max(worst, std::abs(rec.v_mean - target) / target);
    c.require(worst <= 1e-9 && r.run.trajectory.size() > 1,
              std::string(p) + ": " + std::to_string(r.run.trajectory.size()) + " steps, max |vbar - m/beta|/(m/beta) = " + sci(worst));
    c.require(all_pass(r.assertions), std::string(p) + ": mass, duality, entropy floor, status" + failing(r.assertions));
  }
  return c;
}

// --- 11 ----------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Criterion determinism(const fs::path& first_root, const fs::path& second_root) {
  Criterion c;
  for (const auto& name : preset_names()) {
    const fs::path a = first_root / name, b = second_root / name;
    if (!fs::exists(a)) run_preset(name, a);
    run_preset(name, b);
    std::size_t files = 0, same = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      if (e.path().extension() != ".csv" && e.path().extension() != ".txt") continue;
      ++files;
      same += slurp(e.path()) == slurp(b / e.path().filename()) ? 1 : 0;
    }
    c.require(files > 0 && same == files, name + ": " + std::to_string(same) + "/" + std::to_string(files) +
                                              " CSV and snapshot files byte-identical");
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out = "acceptance_out";
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--out") out = argv[i + 1];
  fs::remove_all(out);
  fs::create_directories(out);

  int failures = 0;
  auto report = [&](int id, const std::string& title, const std::function<Criterion()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c;
    try {
      c = body();
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << id << ". " << title << " (" << fmt("%.1f", secs) << " s)\n";
    for (const auto& n : c.notes) std::cout << "       " << n << '\n';
    std::cout.flush();
    failures += c.pass ? 0 : 1;
  };

  report(1, "operator oracles and eigenfunction orders", operator_oracles);
  report(2, "mass conservation over 1000 steps, every stepper", mass_conservation);
  report(3, "mean of v follows m/beta + e^{-beta t}(vbar0 - m/beta)", mean_of_v);
  DualityRuns runs;
  report(4, "duality inequality and sqrt(t) envelope", [&] {
    runs = duality_runs();
    return duality(runs);
  });
  report(5, "entropy floor -C^2/eps - m^2/beta on supercritical2d", [&] { return entropy_floor(runs); });
  report(6, "delayed blow-up: Keller-Segel collapses, local sensing does not",
         [&] { return delayed_blowup(run_preset("ks_blowup_pair", out / "run1" / "ks_blowup_pair")); });
  report(7, "subcritical boundedness and entropy decay under refinement", subcritical_boundedness);
  report(8, "regularized runs converge as nu -> 0",
         [&] { return nu_convergence(run_preset("nu_sweep", out / "run1" / "nu_sweep")); });
  report(9, "theta family equilibrium and local-sensing jump rates",
         [&] { return theta_family(run_preset("theta_sweep", out / "run1" / "theta_sweep")); });
  report(10, "parabolic-elliptic mean, mass and duality", parabolic_elliptic);
  report(11, "byte-identical reruns of every preset", [&] { return determinism(out / "run1", out / "run2"); });

  std::cout << (failures == 0 ? "all 11 criteria pass" : std::to_string(failures) + " criteria FAILED") << '\n';
  return failures == 0 ? 0 : 1;
}
