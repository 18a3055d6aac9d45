#include "locsense/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

namespace locsense {

ConfigError::ConfigError(const std::string& what, std::size_t line, std::string key)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line),
      key_(std::move(key)) {}

std::string_view to_string(ExpectStatus e) {
  switch (e) {
    case ExpectStatus::any: return "any";
    case ExpectStatus::completed: return "completed";
    case ExpectStatus::blowup_detected: return "blowup_detected";
  }
  return "unknown";
}

std::string_view to_string(SweepKind k) {
  switch (k) {
    case SweepKind::none: return "none";
    case SweepKind::models: return "models";
    case SweepKind::nu: return "nu";
    case SweepKind::theta: return "theta";
  }
  return "unknown";
}

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;  // 0: inherited from a preset
};

using Keys = std::map<std::string, Entry>;

struct Section {
  std::string name;
  std::size_t line = 0;
  Keys keys;
};

const std::set<std::string, std::less<>> kKnownKeys = {
    "preset", "model", "epsilon", "beta", "nu", "theta",
    "potential", "potential_baseline", "potential_amplitude", "potential_width", "potential_center", "potential_mode",
    "dim", "n", "mass", "mass_critical_fraction", "seed",
    "u0", "u0_baseline", "u0_amplitude", "u0_width", "u0_center", "u0_mode",
    "v0", "v0_baseline", "v0_amplitude", "v0_width", "v0_center", "v0_mode",
    "dt_init", "dt_min", "dt_max", "t_end", "v_update_order", "blowup_linf_threshold", "blowup_mass_fraction",
    "blowup_dt_floor", "solver_tol", "max_relative_change", "dt_grow_after", "dt_grow_factor",
    "sample_every", "output", "expect", "equilibrium_tol",
    "sweep", "models", "nu_values", "theta_values"};

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

bool valid_name(std::string_view s, bool allow_dash) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || (allow_dash && c == '-');
  });
}

std::vector<Section> lex(std::string_view text, std::size_t line_offset = 0) {
  std::vector<Section> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = line_offset;
  while (std::getline(in, raw)) {
    ++line;
    // Cut an inline '#' comment unless it sits inside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') quoted = !quoted;
      if (raw[i] == '#' && !quoted) {
        raw.resize(i);
        break;
      }
    }
    const std::string s = trim(raw);
    if (s.empty() || s.front() == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      const std::string head = trim(std::string_view(s).substr(1, s.size() - 2));
      constexpr std::string_view prefix = "scenario.";
      if (head.rfind(prefix, 0) != 0)
        throw ConfigError("section must be [scenario.<name>], got [" + head + "]", line);
      const std::string name = head.substr(prefix.size());
      if (!valid_name(name, true)) throw ConfigError("invalid scenario name '" + name + "'", line);
      for (const auto& sec : out)
        if (sec.name == name) throw ConfigError("duplicate scenario '" + name + "'", line);
      out.push_back({name, line, {}});
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string value = unquote(trim(std::string_view(s).substr(eq + 1)));
    if (!valid_name(key, false)) throw ConfigError("invalid key '" + key + "'", line, key);
    if (out.empty()) throw ConfigError("key '" + key + "' outside of any [scenario.<name>] section", line, key);
    auto& keys = out.back().keys;
    if (keys.count(key)) throw ConfigError("duplicate key '" + key + "'", line, key);
    keys[key] = {value, line};
  }
  return out;
}

std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

// ---- presets ---------------------------------------------------------------

constexpr const char* kSupercriticalBody = R"(epsilon = 1
beta = 1
dim = 2
n = 96
mass_critical_fraction = 2
# Concentrated bump in a corner, where the collapse threshold is lowest.
u0 = gaussian_bump
u0_baseline = 0
u0_amplitude = 1
u0_width = 0.05
u0_center = 0, 0
v0 = constant
v0_baseline = 0
t_end = 2
dt_init = 1e-4
dt_min = 1e-9
dt_max = 0.05
sample_every = 0.02
# Blow-up once half of the mass sits in a single cell.
blowup_mass_fraction = 0.5
seed = 1
)";

std::string preset_body(std::string_view name) {
  if (name == "subcritical2d")
    return R"(model = local_sensing
epsilon = 1
beta = 1
dim = 2
n = 32
mass_critical_fraction = 0.5
u0 = gaussian_bump
u0_baseline = 1
u0_amplitude = 2
u0_width = 0.1
u0_center = 0.5, 0.5
v0 = constant
v0_baseline = 0
t_end = 5
dt_init = 1e-3
dt_max = 0.05
sample_every = 0.05
seed = 1
expect = completed
)";
  if (name == "supercritical2d") return std::string("model = local_sensing\n") + kSupercriticalBody + "expect = completed\n";
  if (name == "ks_blowup_pair")
    return std::string(kSupercriticalBody) +
           "sweep = models\nmodels = local_sensing, minimal_ks\nexpect = completed, blowup_detected\n";
  if (name == "nu_sweep")
    return R"(model = local_sensing
epsilon = 1
beta = 1
dim = 2
n = 32
mass_critical_fraction = 0.5
u0 = gaussian_bump
u0_baseline = 1
u0_amplitude = 3
u0_width = 0.1
u0_center = 0.3, 0.6
v0 = constant
v0_baseline = 0
t_end = 0.5
# Fixed step so that only nu differs between the runs.
dt_init = 1e-3
dt_max = 1e-3
dt_min = 1e-6
max_relative_change = 1
sample_every = 0.05
seed = 1
sweep = nu
nu_values = 1e-1, 1e-2, 1e-3, 1e-4
expect = completed
)";
  if (name == "theta_sweep")
    return R"(dim = 2
n = 32
mass = 1
u0 = constant
u0_baseline = 1
potential = gaussian_bump
potential_baseline = 0
potential_amplitude = 1
potential_width = 0.15
potential_center = 0.5, 0.5
t_end = 10
dt_init = 1e-3
dt_max = 0.1
sample_every = 0.5
seed = 1
sweep = theta
theta_values = 0, 0.5, 1
equilibrium_tol = 1e-3
expect = completed
)";
  if (name == "dim1_smooth")
    return R"(model = local_sensing
epsilon = 1
beta = 1
dim = 1
n = 128
mass_critical_fraction = 0.5
u0 = cosine_perturbation
u0_baseline = 1
u0_amplitude = 0.5
u0_mode = 1
v0 = constant
v0_baseline = 0
t_end = 2
dt_init = 1e-3
dt_max = 0.05
sample_every = 0.02
seed = 1
expect = completed
)";
  throw ConfigError("unknown preset '" + std::string(name) + "'", 0, "preset");
}

// ---- typed access ------------------------------------------------------------

class Reader {
 public:
  Reader(std::string scenario, const Keys& keys) : scenario_(std::move(scenario)), keys_(keys) {}

  bool has(const std::string& k) const { return keys_.count(k) > 0; }

  [[noreturn]] void fail(const std::string& k, const std::string& msg) const {
    const auto it = keys_.find(k);
    throw ConfigError("scenario '" + scenario_ + "': key '" + k + "': " + msg, it == keys_.end() ? 0 : it->second.line,
                      k);
  }

  std::string str(const std::string& k, const std::string& def) const {
    const auto it = keys_.find(k);
    return it == keys_.end() ? def : it->second.value;
  }

  double num(const std::string& k, double def) const {
    if (!has(k)) return def;
    return parse_double(k, keys_.at(k).value);
  }

  std::optional<double> opt_num(const std::string& k) const {
    if (!has(k)) return std::nullopt;
    return num(k, 0.0);
  }

  long long integer(const std::string& k, long long def) const {
    if (!has(k)) return def;
    const std::string& s = keys_.at(k).value;
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno != 0) fail(k, "expected an integer, got '" + s + "'");
    return v;
  }

  std::uint64_t seed(const std::string& k) const {
    if (!has(k)) return 0;
    const std::string& s = keys_.at(k).value;
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s.front() == '-' || *end != '\0' || errno != 0)
      fail(k, "expected an unsigned 64-bit integer, got '" + s + "'");
    return v;
  }

  bool boolean(const std::string& k, bool def) const {
    if (!has(k)) return def;
    std::string s = keys_.at(k).value;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    fail(k, "expected a boolean, got '" + s + "'");
  }

  std::vector<std::string> list(const std::string& k) const {
    std::vector<std::string> out;
    if (!has(k)) return out;
    std::string item;
    std::istringstream in(keys_.at(k).value);
    while (std::getline(in, item, ',')) {
      item = unquote(trim(item));
      if (item.empty()) fail(k, "empty list element");
      out.push_back(item);
    }
    if (out.empty()) fail(k, "empty list");
    return out;
  }

  std::vector<double> num_list(const std::string& k) const {
    std::vector<double> out;
    for (const auto& s : list(k)) out.push_back(parse_double(k, s));
    return out;
  }

  template <class F>
  auto convert(const std::string& k, F&& f) const -> decltype(f(std::string{})) {
    try {
      return f(keys_.at(k).value);
    } catch (const std::invalid_argument& e) {
      fail(k, e.what());
    }
  }

 private:
  double parse_double(const std::string& k, const std::string& s) const {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(v)) fail(k, "expected a finite number, got '" + s + "'");
    return v;
  }

  std::string scenario_;
  const Keys& keys_;
};

Profile read_profile(const Reader& r, const std::string& prefix, Profile def) {
  Profile p = def;
  if (r.has(prefix)) p.kind = r.convert(prefix, [](const std::string& s) { return parse_profile_kind(s); });
  p.baseline = r.num(prefix + "_baseline", p.baseline);
  p.amplitude = r.num(prefix + "_amplitude", p.amplitude);
  p.width = r.num(prefix + "_width", p.width);
  p.mode = static_cast<int>(r.integer(prefix + "_mode", p.mode));
  if (r.has(prefix + "_center")) {
    const auto c = r.num_list(prefix + "_center");
    if (c.size() != 1 && c.size() != 2) r.fail(prefix + "_center", "expected one or two coordinates");
    p.center = {c[0], c.size() == 2 ? c[1] : c[0]};
  }
  if (p.kind == ProfileKind::gaussian_bump && !(p.width > 0.0)) r.fail(prefix + "_width", "must be positive");
  if (p.mode < 1) r.fail(prefix + "_mode", "must be >= 1");
  return p;
}

ExpectStatus parse_expect(const Reader& r, const std::string& s) {
  if (s == "any") return ExpectStatus::any;
  if (s == "completed") return ExpectStatus::completed;
  if (s == "blowup_detected") return ExpectStatus::blowup_detected;
  r.fail("expect", "expected any, completed or blowup_detected, got '" + s + "'");
}

Scenario build_scenario(const std::string& name, const std::string& group, const Keys& keys, bool strict,
                        std::vector<std::string>& warnings) {
  const Reader r(name, keys);
  for (const auto& [k, e] : keys) {
    if (kKnownKeys.count(k)) continue;
    if (strict) r.fail(k, "unknown key");
    warnings.push_back("scenario '" + name + "': ignoring unknown key '" + k + "'" +
                       (e.line ? " (line " + std::to_string(e.line) + ")" : ""));
  }

  Scenario s;
  s.name = name;
  s.group = group;

  s.dim = static_cast<int>(r.integer("dim", 2));
  if (s.dim != 1 && s.dim != 2) r.fail("dim", "must be 1 or 2");
  const long long n = r.integer("n", 32);
  if (n < 2 || n > 4096) r.fail("n", "must lie in [2, 4096]");
  s.n = static_cast<int>(n);
  const Grid g = s.grid();

  // Model.
  ModelSpec& m = s.model;
  m.kind = r.has("model") ? r.convert("model", [](const std::string& v) { return parse_model_kind(v); })
                          : ModelKind::local_sensing;
  m.epsilon = r.num("epsilon", 1.0);
  m.beta = r.num("beta", 1.0);
  if (!(m.epsilon > 0.0)) r.fail("epsilon", "must be positive");
  if (!(m.beta >= 0.0)) r.fail("beta", "must be nonnegative");
  if (m.kind == ModelKind::parabolic_elliptic && !(m.beta > 0.0))
    r.fail("beta", "parabolic_elliptic requires beta > 0");
  const bool regularized = m.kind == ModelKind::regularized;
  const bool theta_model = m.kind == ModelKind::theta_family;
  if (regularized != r.has("nu"))
    r.fail("nu", regularized ? "required for model regularized" : "only valid for model regularized");
  if (regularized) {
    m.nu = r.num("nu", 0.0);
    if (!(*m.nu > 0.0)) r.fail("nu", "must be positive");
  }
  if (theta_model != r.has("theta"))
    r.fail("theta", theta_model ? "required for model theta_family" : "only valid for model theta_family");
  if (theta_model != r.has("potential"))
    r.fail("potential", theta_model ? "required for model theta_family (the static potential V)"
                                    : "only valid for model theta_family");
  const std::uint64_t seed = r.seed("seed");
  if (theta_model) {
    m.theta = r.num("theta", 0.0);
    if (!(*m.theta >= 0.0 && *m.theta <= 1.0)) r.fail("theta", "must lie in [0, 1]");
    const Profile pot = read_profile(r, "potential", {ProfileKind::constant, 0.0, 1.0});
    try {
      m.potential = pot.generate(g, seed ^ 0x9e3779b9ULL);
    } catch (const std::invalid_argument& e) {
      r.fail("potential", e.what());
    }
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    r.fail("model", e.what());
  }

  // Initial data.
  InitialData& init = s.initial;
  init.seed = seed;
  init.u = read_profile(r, "u0", {ProfileKind::constant, 1.0});
  init.v = read_profile(r, "v0", {ProfileKind::constant, 0.0});
  if (r.has("mass") && r.has("mass_critical_fraction"))
    r.fail("mass", "give either mass or mass_critical_fraction, not both");
  init.mass = r.has("mass_critical_fraction") ? r.num("mass_critical_fraction", 0.0) * critical_mass(m.epsilon)
                                              : r.num("mass", 1.0);
  if (!(init.mass > 0.0)) r.fail(r.has("mass") ? "mass" : "mass_critical_fraction", "mass must be positive");
  try {
    (void)init.v.generate(g, seed ^ 0x5bd1e995ULL);
  } catch (const std::invalid_argument& e) {
    r.fail("v0", e.what());
  }
  try {
    (void)make_initial(g, init);
  } catch (const std::invalid_argument& e) {
    r.fail("u0", e.what());
  }

  // Stepping.
  StepConfig& c = s.step;
  c.t_end = r.num("t_end", 1.0);
  if (!(c.t_end > 0.0)) r.fail("t_end", "must be positive");
  c.dt_init = r.num("dt_init", 1e-3);
  c.dt_min = r.num("dt_min", std::min(1e-9, c.dt_init));
  c.dt_max = r.num("dt_max", std::max(0.1, c.dt_init));
  if (!(c.dt_min > 0.0)) r.fail("dt_min", "must be positive");
  if (!(c.dt_min <= c.dt_init)) r.fail("dt_init", "must be >= dt_min");
  if (!(c.dt_init <= c.dt_max)) r.fail("dt_init", "must be <= dt_max");
  if (r.has("v_update_order"))
    c.v_update_order = r.convert("v_update_order", [](const std::string& v) { return parse_v_update_order(v); });
  if (r.has("blowup_linf_threshold") && r.has("blowup_mass_fraction"))
    r.fail("blowup_mass_fraction", "give either blowup_linf_threshold or blowup_mass_fraction, not both");
  c.blowup_linf_threshold = r.num("blowup_linf_threshold", 0.0);
  if (!(c.blowup_linf_threshold >= 0.0)) r.fail("blowup_linf_threshold", "must be nonnegative");
  if (r.has("blowup_mass_fraction")) {
    const double f = r.num("blowup_mass_fraction", 0.0);
    if (!(f > 0.0 && f <= 1.0)) r.fail("blowup_mass_fraction", "must lie in (0, 1]");
    // A cell holding the fraction f of the mass has density f m / |cell|.
    c.blowup_linf_threshold = f * init.mass / g.cell_volume();
  }
  c.blowup_dt_floor_flag = r.boolean("blowup_dt_floor", true);
  c.solver_tol = r.num("solver_tol", c.solver_tol);
  if (!(c.solver_tol > 0.0 && c.solver_tol < 1.0)) r.fail("solver_tol", "must lie in (0, 1)");
  c.max_relative_change = r.num("max_relative_change", c.max_relative_change);
  if (!(c.max_relative_change > 0.0)) r.fail("max_relative_change", "must be positive");
  c.grow_after = static_cast<int>(r.integer("dt_grow_after", c.grow_after));
  if (c.grow_after < 1) r.fail("dt_grow_after", "must be >= 1");
  c.grow_factor = r.num("dt_grow_factor", c.grow_factor);
  if (!(c.grow_factor >= 1.0)) r.fail("dt_grow_factor", "must be >= 1");

  s.sample_every = r.num("sample_every", c.t_end / 50.0);
  if (!(s.sample_every >= 0.0)) r.fail("sample_every", "must be nonnegative (0 records every step)");
  s.output = r.str("output", "");
  s.expect = parse_expect(r, r.str("expect", "any"));
  return s;
}

void expand(const Section& sec, bool strict, Batch& batch) {
  Keys keys;
  if (const auto it = sec.keys.find("preset"); it != sec.keys.end()) {
    std::string body;
    try {
      body = preset_body(it->second.value);
    } catch (const ConfigError& e) {
      throw ConfigError("scenario '" + sec.name + "': key 'preset': " + e.what(), it->second.line, "preset");
    }
    for (const auto& p : lex("[scenario.preset]\n" + body))
      for (const auto& [k, e] : p.keys) keys[k] = {e.value, 0};
  }
  for (const auto& [k, e] : sec.keys)
    if (k != "preset") keys[k] = e;

  const Reader r(sec.name, keys);
  const std::string sweep = r.str("sweep", "none");
  SweepGroup group;
  group.name = sec.name;
  if (sweep == "none") group.kind = SweepKind::none;
  else if (sweep == "models") group.kind = SweepKind::models;
  else if (sweep == "nu") group.kind = SweepKind::nu;
  else if (sweep == "theta") group.kind = SweepKind::theta;
  else r.fail("sweep", "expected none, models, nu or theta, got '" + sweep + "'");
  group.equilibrium_tol = r.num("equilibrium_tol", 1e-3);
  if (!(group.equilibrium_tol > 0.0)) r.fail("equilibrium_tol", "must be positive");

  auto check_sweep_keys = [&](std::string_view wanted) {
    static const std::pair<const char*, const char*> owners[] = {
        {"models", "models"}, {"nu_values", "nu"}, {"theta_values", "theta"}};
    for (const auto& [k, kind] : owners)
      if (k != wanted && r.has(k)) r.fail(k, std::string("only valid with sweep = ") + kind);
  };

  struct Member {
    std::string suffix;
    Keys keys;
    bool reference = false;
  };
  std::vector<Member> members;
  Keys base = keys;
  for (const char* k : {"sweep", "models", "nu_values", "theta_values", "equilibrium_tol"}) base.erase(k);

  switch (group.kind) {
    case SweepKind::none:
      check_sweep_keys("");
      members.push_back({"", base});
      break;
    case SweepKind::models: {
      check_sweep_keys("models");
      if (!r.has("models")) r.fail("models", "required with sweep = models");
      for (const auto& name : r.list("models")) {
        try {
          (void)parse_model_kind(name);
        } catch (const std::invalid_argument& e) {
          r.fail("models", e.what());
        }
        Member mem{name, base};
        mem.keys["model"] = {name, keys.at("models").line};
        members.push_back(std::move(mem));
      }
      break;
    }
    case SweepKind::nu: {
      check_sweep_keys("nu_values");
      if (!r.has("nu_values")) r.fail("nu_values", "required with sweep = nu");
      Member ref{"reference", base, true};
      ref.keys["model"] = {"local_sensing", 0};
      ref.keys.erase("nu");
      members.push_back(std::move(ref));
      for (double nu : r.num_list("nu_values")) {
        if (!(nu > 0.0)) r.fail("nu_values", "values must be positive");
        Member mem{"nu_" + fmt_g(nu), base};
        mem.keys["model"] = {"regularized", 0};
        mem.keys["nu"] = {fmt_g(nu), keys.at("nu_values").line};
        members.push_back(std::move(mem));
      }
      break;
    }
    case SweepKind::theta: {
      check_sweep_keys("theta_values");
      if (!r.has("theta_values")) r.fail("theta_values", "required with sweep = theta");
      for (double th : r.num_list("theta_values")) {
        Member mem{"theta_" + fmt_g(th), base};
        mem.keys["model"] = {"theta_family", 0};
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", th);
        mem.keys["theta"] = {buf, keys.at("theta_values").line};
        members.push_back(std::move(mem));
      }
      break;
    }
  }

  // expect may be one value for all members or one per swept member.
  const auto expects = r.list("expect");
  std::size_t swept = 0;
  for (const auto& mem : members) swept += mem.reference ? 0 : 1;
  if (expects.size() > 1 && expects.size() != swept)
    r.fail("expect", "give one value or one per swept member (" + std::to_string(swept) + ")");

  std::size_t k = 0;
  for (auto& mem : members) {
    if (!expects.empty()) {
      const std::string& e = mem.reference ? expects.front() : expects[expects.size() == 1 ? 0 : k];
      mem.keys["expect"] = {e, keys.at("expect").line};
    }
    if (!mem.reference) ++k;
    const std::string name = mem.suffix.empty() ? sec.name : sec.name + "__" + mem.suffix;
    const std::string gname = group.kind == SweepKind::none ? "" : sec.name;
    for (const auto& other : batch.scenarios)
      if (other.name == name) throw ConfigError("duplicate scenario name '" + name + "' after sweep expansion", sec.line);
    const std::size_t index = batch.scenarios.size();
    batch.scenarios.push_back(build_scenario(name, gname, mem.keys, strict, batch.warnings));
    if (mem.reference) group.reference = index;
    else group.members.push_back(index);
  }
  if (group.kind != SweepKind::none) batch.groups.push_back(std::move(group));
}

}  // namespace

Batch parse_config(std::string_view text, bool strict) {
  const auto sections = lex(text);
  if (sections.empty()) throw ConfigError("no scenario");
  Batch batch;
  for (const auto& sec : sections) expand(sec, strict, batch);
  return batch;
}

std::vector<std::string> preset_names() {
  return {"subcritical2d", "supercritical2d", "ks_blowup_pair", "nu_sweep", "theta_sweep", "dim1_smooth"};
}

std::string preset_text(std::string_view name) {
  return "[scenario." + std::string(name) + "]\n" + preset_body(name);
}

Batch preset(std::string_view name) { return parse_config(preset_text(name)); }

}  // namespace locsense
