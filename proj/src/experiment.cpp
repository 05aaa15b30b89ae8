#include "bwkb/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "bwkb/cell_spectrum.hpp"
#include "bwkb/eikonal.hpp"
#include "bwkb/error.hpp"
#include "bwkb/high_contrast.hpp"
#include "bwkb/reference_solver.hpp"
#include "bwkb/wavepacket.hpp"

namespace bwkb {

namespace fs = std::filesystem;
using nlohmann::json;

const char* tool_version() { return "0.1.0"; }

ExitCode exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::schema:
    case ErrorCode::invalid_argument:
    case ErrorCode::io:
    case ErrorCode::unsupported: return ExitCode::usage;
    case ErrorCode::validation_failed: return ExitCode::validation;
    default: return ExitCode::numerical;
  }
}

namespace {

const std::set<std::string> kCommands = {"bands", "eikonal", "packet", "reference", "validate", "plotdata"};

// ------------------------------------------------------------ field access

class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorCode::schema, "config field '" + where() + "' must be an object");
  }
  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key) const {
    need(key);
    const json& v = j_.at(key);
    if (!v.is_number()) bad(key, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) bad(key, "must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
  double positive(const std::string& key) const {
    const double v = number(key);
    if (!(v > 0)) bad(key, "must be positive");
    return v;
  }
  double positive(const std::string& key, double fallback) const { return has(key) ? positive(key) : fallback; }
  long integer(const std::string& key) const {
    need(key);
    const json& v = j_.at(key);
    if (!v.is_number_integer()) bad(key, "must be an integer");
    return v.get<long>();
  }
  long integer(const std::string& key, long fallback) const { return has(key) ? integer(key) : fallback; }
  std::string text(const std::string& key) const {
    need(key);
    const json& v = j_.at(key);
    if (!v.is_string()) bad(key, "must be a string");
    return v.get<std::string>();
  }
  std::string text(const std::string& key, const std::string& fallback) const { return has(key) ? text(key) : fallback; }
  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) bad(key, "must be true or false");
    return j_.at(key).get<bool>();
  }
  std::vector<double> numbers(const std::string& key) const {
    need(key);
    const json& v = j_.at(key);
    if (!v.is_array()) bad(key, "must be an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) bad(key, "must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  std::vector<std::string> texts(const std::string& key) const {
    need(key);
    const json& v = j_.at(key);
    if (!v.is_array()) bad(key, "must be an array of strings");
    std::vector<std::string> out;
    for (const json& e : v) {
      if (!e.is_string()) bad(key, "must be an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }
  Fields object(const std::string& key) const {
    need(key);
    return Fields(j_.at(key), field(key));
  }
  const json& raw(const std::string& key) const {
    need(key);
    return j_.at(key);
  }
  [[noreturn]] void bad(const std::string& key, const std::string& what) const {
    fail(ErrorCode::schema, "config field '" + field(key) + "' " + what);
  }

 private:
  const json& j_;
  std::string path_;
  std::string where() const { return path_.empty() ? "<root>" : path_; }
  void need(const std::string& key) const {
    if (!has(key)) fail(ErrorCode::schema, "config field '" + field(key) + "' is required");
  }
};

// ------------------------------------------------------------------ medium

json read_json_file(const std::string& path, const std::string& what) {
  if (!fs::exists(path)) fail(ErrorCode::io, what + " '" + path + "' does not exist");
  return load_config(path);
}

MediumSpec medium_from(const Fields& f) {
  MediumSpec m;
  m.kind = f.text("kind");
  if (m.kind == "high_contrast") {
    m.hc = {f.number("h"), f.positive("a2")};
    if (!(m.hc.h > 0 && m.hc.h < 1)) f.bad("h", "must lie in (0, 1)");
    m.description = {{"kind", m.kind}, {"h", m.hc.h}, {"a2", m.hc.a2}};
  } else if (m.kind == "two_phase") {
    m.hc = {f.number("h"), f.positive("a2")};
    if (!(m.hc.h > 0 && m.hc.h < 1)) f.bad("h", "must lie in (0, 1)");
    m.a1 = f.positive("a1");
    m.coeff = CellCoefficient(CellProfile::two_phase(m.hc.h, m.a1, m.hc.a2));
    m.description = {{"kind", m.kind}, {"h", m.hc.h}, {"a1", m.a1}, {"a2", m.hc.a2}};
  } else if (m.kind == "cell") {
    json c;
    if (f.has("coefficient_file"))
      c = read_json_file(f.text("coefficient_file"), "coefficient file");
    else
      c = f.raw("coefficient");
    m.coeff = CellCoefficient::from_json(c);
    m.description = {{"kind", m.kind}, {"coefficient", m.coeff.to_json()}};
  } else {
    f.bad("kind", "must be one of high_contrast, two_phase, cell");
  }
  return m;
}

MediumSpec parse_medium(const Fields& root) { return medium_from(root.object("medium")); }

int parse_sign(const Fields& f) {
  const std::string s = f.text("sign", "+");
  if (s == "+") return 1;
  if (s == "-") return -1;
  f.bad("sign", "must be '+' or '-'");
}

GaussianEnvelope parse_envelope(const Fields& root) {
  Fields f = root.object("envelope");
  GaussianEnvelope e;
  e.kappa_star = f.number("kappa_star");
  e.kappa_width = f.positive("kappa_width");
  e.amplitude = f.number("amplitude", 1.0);
  e.x_center = f.number("x_center", 0.0);
  e.x_width = f.number("x_width", 0.0);
  if (e.x_width < 0) f.bad("x_width", "must be nonnegative");
  e.cutoff = f.positive("cutoff", 7.0);
  e.mirrored = f.flag("mirrored", false);
  if (e.kappa_star < -kPi || e.kappa_star >= kPi) f.bad("kappa_star", "must lie in [-pi, pi)");
  return e;
}

std::vector<double> parse_epsilons(const Fields& f) {
  std::vector<double> eps;
  if (f.has("epsilon") && f.raw("epsilon").is_array())
    eps = f.numbers("epsilon");
  else
    eps = {f.positive("epsilon")};
  if (eps.empty()) f.bad("epsilon", "must not be empty");
  for (double e : eps)
    if (!(e > 0) || !std::isfinite(e)) f.bad("epsilon", "values must be positive");
  std::vector<double> sorted = eps;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) f.bad("epsilon", "values must be distinct");
  return eps;
}

std::pair<double, double> parse_pair(const Fields& f, const std::string& key) {
  auto v = f.numbers(key);
  if (v.size() != 2 || !(v[0] < v[1])) f.bad(key, "must be [a, b] with a < b");
  return {v[0], v[1]};
}

// ------------------------------------------------------------ csv + writer

std::string join_row(const std::vector<double>& row) {
  std::string s;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) s += ',';
    s += format_number(row[i]);
  }
  return s;
}

std::string join_header(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) s += ',';
    s += cols[i];
  }
  return s;
}

// Single writer per artifact: files go to a staging directory that replaces
// the target only when the command finishes.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(const std::string& out) : target_(out) {
    if (out.empty()) fail(ErrorCode::schema, "config field 'output_dir' must not be empty");
    if (fs::exists(target_)) {
      if (!fs::is_directory(target_)) fail(ErrorCode::io, "output '" + out + "' exists and is not a directory");
      if (!fs::is_empty(target_) && !fs::exists(target_ / "manifest.json"))
        fail(ErrorCode::io, "output directory '" + out + "' is not empty and holds no artifact manifest");
    }
    staging_ = target_;
    staging_ += ".staging";
    std::error_code ec;
    fs::remove_all(staging_, ec);
    fs::create_directories(staging_, ec);
    if (ec) fail(ErrorCode::io, "cannot create '" + staging_.string() + "': " + ec.message());
  }
  ~ArtifactWriter() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(staging_, ec);
    }
  }
  void text(const std::string& name, const std::string& content) {
    std::ofstream os(staging_ / name, std::ios::binary);
    os << content;
    if (!os) fail(ErrorCode::io, "cannot write '" + name + "'");
    files_.push_back(name);
  }
  void csv(const std::string& name, const std::vector<std::string>& cols, const std::vector<std::vector<double>>& rows) {
    std::string s = join_header(cols) + "\n";
    for (const auto& r : rows) s += join_row(r) + "\n";
    text(name, s);
  }
  const std::vector<std::string>& files() const { return files_; }
  std::string commit() {
    std::error_code ec;
    fs::remove_all(target_, ec);
    fs::rename(staging_, target_, ec);
    if (ec) fail(ErrorCode::io, "cannot move artifact into '" + target_.string() + "': " + ec.message());
    committed_ = true;
    return target_.string();
  }

 private:
  fs::path target_, staging_;
  std::vector<std::string> files_;
  bool committed_ = false;
};

struct Outcome {
  ExitCode code = ExitCode::pass;
  std::string summary;
  json tolerances = json::object();
  json stats = json::object();
};

// ---------------------------------------------------------------- commands

Outcome run_bands(const Fields& f, ArtifactWriter& w) {
  MediumSpec m = parse_medium(f);
  const long n_min = f.integer("n_min", 0), n_max = f.integer("n_max");
  const long kp = f.integer("kappa_points", 65);
  if (n_min < 0 || n_max < n_min) f.bad("n_max", "must satisfy 0 <= n_min <= n_max");
  if (kp < 3) f.bad("kappa_points", "must be at least 3");
  Outcome o;
  std::vector<std::vector<double>> bands, rows;
  if (m.kind == "high_contrast") {
    auto edges = hc_band_edges_upto(int(n_max), m.hc);
    for (long n = n_min; n <= n_max; ++n) {
      bands.push_back({double(n), edges[n].lo, edges[n].hi});
      for (long i = 0; i < kp; ++i) {
        const double k = -kPi + kTwoPi * i / (kp - 1);
        const double kk = i == kp - 1 ? std::nextafter(kPi, 0.0) : k;
        HCBandPoint p = hc_solve_in_band(int(n), kk, edges[n], m.hc);
        const double asym = n >= 1 ? hc_band_asymptotics(int(n), kk, m.hc).omega : std::nan("");
        rows.push_back({double(n), kk, p.omega, p.residual, asym});
      }
    }
    w.csv("bands.csv", {"n", "lower", "upper"}, bands);
    w.csv("dispersion.csv", {"n", "kappa", "omega", "omega_exact_residual", "omega_asymptotic"}, rows);
    o.tolerances = {{"root_residual", 1e-12}, {"edge_location", 1e-10}};
  } else {
    // uniform zone grid with an even count so both -pi and 0 are nodes
    const int points = int(kp % 2 ? kp - 1 : kp);
    for (long n = n_min; n <= n_max; ++n) {
      BlochBranch br(m.coeff, int(n), points);
      double lo = 1e300, hi = 0.0;
      for (int j = 0; j < br.points(); ++j) {
        const double xi = br.xi_grid()[j];
        rows.push_back({double(n), xi, br.omegas()[j], br.group_velocity()[j], curvature(br, xi).value});
        lo = std::min(lo, br.omegas()[j]);
        hi = std::max(hi, br.omegas()[j]);
      }
      bands.push_back({double(n), lo, hi});
    }
    w.csv("bands.csv", {"n", "lower", "upper"}, bands);
    w.csv("branch.csv", {"n", "xi", "omega", "omega_xi", "omega_xixi"}, rows);
    o.tolerances = {{"eigen_residual", 1e-8}};
  }
  o.summary = "bands " + std::to_string(n_min) + ".." + std::to_string(n_max) + " written";
  return o;
}

Outcome run_eikonal(const Fields& f, ArtifactWriter& w) {
  MediumSpec m = parse_medium(f);
  PhaseState st;
  st.sign = parse_sign(f);
  st.kappa = f.number("kappa");
  const std::string g = f.text("g");
  if (g != "zero" && g.rfind("linear:", 0) != 0 && g.rfind("quad:", 0) != 0 && !fs::exists(g))
    f.bad("g", "must be zero, linear:c, quad:c2 or an existing CSV file");
  st.g = InitialPhase::parse(g);
  const int n = int(f.integer("branch", 0));
  st.branch = make_branch(m, n, int(f.integer("branch_points", 256)));
  const double tf = f.positive("t_final");
  const double dt = f.positive("dt", tf / 100);
  std::vector<double> launch;
  if (f.has("launch")) {
    launch = f.numbers("launch");
    if (launch.empty()) f.bad("launch", "must not be empty");
  } else {
    for (int i = -2; i <= 2; ++i) launch.push_back(0.5 * i);
  }
  std::function<double(double)> u0;
  if (f.has("u0_width")) {
    const double wd = f.positive("u0_width");
    u0 = [wd](double s) { return std::exp(-0.5 * s * s / (wd * wd)); };
  }
  validate_phase_state(st);
  std::vector<std::vector<double>> rows, summary;
  double drift = 0.0;
  for (double s0 : launch) {
    CharacteristicPath p = trace_characteristic(st, s0, tf, dt, u0);
    for (std::size_t i = 0; i < p.times.size(); ++i)
      rows.push_back({s0, p.times[i], p.x[i], p.phase[i], p.phase_slope[i], p.amplitude[i]});
    summary.push_back({s0, p.xi, p.step, p.slope_drift, p.velocity_error, p.phase_rate_error, p.step_change});
    drift = std::max(drift, p.slope_drift);
  }
  w.csv("characteristics.csv", {"sigma0", "t", "x", "phi0", "phi0_x", "u0"}, rows);
  w.csv("summary.csv",
        {"sigma0", "xi", "step", "slope_drift", "velocity_error", "phase_rate_error", "step_change"}, summary);
  Outcome o;
  o.tolerances = {{"step_doubling", 1e-9}, {"slope_constancy", 1e-8}};
  o.stats = {{"max_slope_drift", drift}, {"branch", st.branch->describe()}};
  o.summary = std::to_string(launch.size()) + " characteristics traced";
  return o;
}

std::string suffix(std::size_t i, std::size_t count) { return count > 1 ? "_e" + std::to_string(i) : ""; }

Outcome run_packet(const Fields& f, ArtifactWriter& w) {
  MediumSpec m = parse_medium(f);
  const std::string mode = f.text("mode");
  if (mode != "sp" && mode != "quad" && mode != "delta") f.bad("mode", "must be sp, quad or delta");
  const int sign = parse_sign(f);
  auto branch = make_branch(m, int(f.integer("branch", 0)), int(f.integer("branch_points", 256)));
  const double t = f.number("t");
  if (t < 0) f.bad("t", "must be nonnegative");
  auto [a, b] = parse_pair(f, "window");
  const long npc = f.integer("nodes_per_cell", 16);
  if (npc < 1) f.bad("nodes_per_cell", "must be positive");
  const auto eps = parse_epsilons(f);

  Outcome o;
  o.tolerances["quadrature_warn"] = QuadratureOptions{}.warn_tolerance;
  std::vector<std::vector<double>> ladder;
  bool warned = false;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    CellGrid grid = CellGrid::window(eps[i], a, b, int(npc));
    ReconstructedField field;
    if (mode == "delta") {
      Fields d = f.object("delta");
      const double f0 = d.number("f0"), fw = d.positive("f_width");
      auto spec = PacketSpec::delta(d.number("kappa_star"), [f0, fw](double x) { return f0 * std::exp(-0.5 * x * x / (fw * fw)); },
                                    eps[i], sign, branch);
      if (!(t > 0)) f.bad("t", "must be positive for a delta packet");
      DeltaPulse p = delta_pulse_field(spec, t, grid, d.positive("mollifier_width", 4 * eps[i]));
      field = std::move(p.field);
    } else {
      auto spec = PacketSpec::smooth(parse_envelope(f), eps[i], sign, branch);
      field = mode == "sp" ? reconstruct_stationary_phase(spec, grid, t) : reconstruct_quadrature(spec, grid, t);
    }
    warned = warned || field.accuracy_warning;
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto v = field.values[k];
      rows.push_back({grid.x(k), v.real(), v.imag(), std::abs(v)});
    }
    w.csv("field" + suffix(i, eps.size()) + ".csv", {"x", "re_u", "im_u", "abs_u"}, rows);
    ladder.push_back({double(i), eps[i], l2_norm(field.values)});
  }
  if (eps.size() > 1) w.csv("ladder.csv", {"index", "epsilon", "l2_norm"}, ladder);
  o.stats = {{"accuracy_warning", warned}, {"branch", branch->describe()}};
  o.summary = "packet field (" + mode + ") at t=" + format_number(t);
  return o;
}

Outcome run_reference(const Fields& f, ArtifactWriter& w) {
  MediumSpec m = parse_medium(f);
  if (m.kind == "high_contrast") f.bad("medium.kind", "must be two_phase or cell for the direct solver (finite a1)");
  if (m.coeff.time_dependent()) f.bad("medium", "time-dependent coefficients are not supported by the direct solver");
  const int sign = parse_sign(f);
  auto branch = make_branch(m, int(f.integer("branch", 0)), int(f.integer("branch_points", 256)));
  const double tf = f.positive("t_final");
  std::vector<double> snaps = f.has("snap") ? f.numbers("snap") : std::vector<double>{tf};
  for (std::size_t i = 0; i < snaps.size(); ++i)
    if (!(snaps[i] > 0) || snaps[i] > tf || (i && !(snaps[i] > snaps[i - 1])))
      f.bad("snap", "must be increasing times in (0, t_final]");
  if (snaps.back() != tf) snaps.push_back(tf);
  const GaussianEnvelope env = parse_envelope(f);
  const long npc = f.integer("nodes_per_cell", 64);
  if (npc < 2) f.bad("nodes_per_cell", "must be at least 2");
  const double cfl = f.positive("cfl", 0.9);
  if (cfl > 1.0) f.bad("cfl", "must not exceed 1");
  SpongeOptions sponge;
  sponge.fraction = f.number("sponge_fraction", 0.1);
  if (!(sponge.fraction >= 0 && sponge.fraction < 0.5)) f.bad("sponge_fraction", "must lie in [0, 0.5)");
  const auto eps = parse_epsilons(f);

  Outcome o;
  json runs = json::array();
  for (std::size_t i = 0; i < eps.size(); ++i) {
    auto spec = PacketSpec::smooth(env, eps[i], sign, branch);
    double a, b;
    if (f.has("window")) {
      std::tie(a, b) = parse_pair(f, "window");
    } else {
      double vmax = 0.0;
      for (int j = 0; j < 256; ++j) vmax = std::max(vmax, std::abs(branch->omega_xi(0, -kPi + kTwoPi * (j + 0.5) / 256)));
      const double half = env.x_width > 0 ? 5 * env.x_width : 8 * eps[i] / env.kappa_width;
      std::tie(a, b) = suggested_window(env.x_center - half, env.x_center + half, vmax, tf);
    }
    FineGrid grid = cell_aligned_grid(m.coeff.profile(), eps[i], a, b, int(npc));
    if (sponge.fraction > 0) add_sponge(grid, sponge);
    FineGridState st = prepared_initial_data(spec, grid);
    st.cfl = cfl;
    const double e0 = discrete_energy(grid, st.u, st.v);
    FdtdRun run = run_fdtd(st, snaps);
    std::vector<std::vector<double>> energy = {{0.0, e0}};
    for (std::size_t s = 0; s < run.snapshots.size(); ++s) {
      const FieldSnapshot& snap = run.snapshots[s];
      std::vector<std::vector<double>> rows;
      for (std::size_t k = 0; k < grid.size(); ++k) rows.push_back({grid.x[k], snap.u[k], snap.v[k]});
      w.csv("snapshot" + suffix(i, eps.size()) + "_" + std::to_string(s) + ".csv", {"x", "u", "u_t"}, rows);
      energy.push_back({snap.t, snap.energy});
    }
    w.csv("energy" + suffix(i, eps.size()) + ".csv", {"t", "energy"}, energy);
    runs.push_back({{"epsilon", eps[i]},
                    {"nodes", grid.size()},
                    {"dx_min", grid.min_spacing()},
                    {"dt", run.dt_max},
                    {"cfl", run.cfl},
                    {"steps", run.steps},
                    {"energy_drift", run.energy_drift},
                    {"window", {a, b}},
                    {"snapshot_times", snaps}});
  }
  o.stats = {{"runs", runs}, {"branch", branch->describe()}};
  o.tolerances = {{"instability_growth", 1e10}, {"window_margin_relative", 1e-3}};
  o.summary = "direct simulation to t=" + format_number(tf) + " for " + std::to_string(eps.size()) + " epsilon value(s)";
  return o;
}

std::vector<std::string> parse_suites(const Fields& f) {
  std::vector<std::string> suites;
  if (f.has("suites"))
    suites = f.texts("suites");
  else
    suites = {f.text("suite")};
  if (suites.size() == 1 && suites[0] == "all") suites = suite_names();
  const auto known = suite_names();
  for (const auto& s : suites)
    if (std::find(known.begin(), known.end(), s) == known.end()) f.bad("suite", "unknown suite '" + s + "'");
  return suites;
}

Outcome run_validate(const Fields& f, ArtifactWriter& w) {
  const auto suites = parse_suites(f);
  std::ostringstream report;
  std::vector<std::vector<double>> rows;
  std::string checks_csv = "suite,name,value,lower,tolerance,comparator,gating,pass\n";
  Outcome o;
  bool all = true;
  for (const std::string& name : suites) {
    SuiteReport r = run_suite(name);
    report << "suite " << name << ": " << (r.passed() ? "PASS" : "FAIL") << "\n";
    for (const CheckResult& c : r.checks) {
      report << "  " << (c.gating ? (c.pass ? "pass" : "FAIL") : "info") << "  " << c.name << "  value=" << format_number(c.value);
      if (c.comparator == "in")
        report << "  range=[" << format_number(c.lower) << ", " << format_number(c.tolerance) << "]";
      else if (c.comparator != "info")
        report << "  " << c.comparator << " " << format_number(c.tolerance);
      if (!c.detail.empty()) report << "  (" << c.detail << ")";
      report << "\n";
      checks_csv += c.suite + ",\"" + c.name + "\"," + format_number(c.value) + "," + format_number(c.lower) + "," +
                    format_number(c.tolerance) + "," + c.comparator + "," + (c.gating ? "1" : "0") + "," +
                    (c.pass ? "1" : "0") + "\n";
      if (c.comparator != "info")
        o.tolerances[name + "/" + c.name] =
            c.comparator == "in" ? json{c.lower, c.tolerance} : json(c.tolerance);
    }
    for (const DataTable& t : r.tables) w.csv(name + "_" + t.name + ".csv", t.columns, t.rows);
    all = all && r.passed();
  }
  w.text("checks.csv", checks_csv);
  report << "overall: " << (all ? "PASS" : "FAIL") << "\n";
  w.text("report.txt", report.str());
  o.code = all ? ExitCode::pass : ExitCode::validation;
  o.summary = std::string("validation ") + (all ? "passed" : "failed");
  o.stats = {{"suites", suites}};
  return o;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      continue;
    }
    if (c == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

struct CsvFile {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) fail(ErrorCode::io, "csv column '" + name + "' missing");
    return std::size_t(it - header.begin());
  }
};

CsvFile read_csv(const fs::path& p) {
  std::ifstream is(p);
  if (!is) fail(ErrorCode::io, "cannot read '" + p.string() + "'");
  CsvFile c;
  std::string line;
  if (std::getline(is, line)) c.header = split_csv_line(line);
  while (std::getline(is, line))
    if (!line.empty()) c.rows.push_back(split_csv_line(line));
  return c;
}

}  // namespace

// ------------------------------------------------------------- public API

MediumSpec parse_medium(const json& medium) { return medium_from(Fields(medium, "medium")); }

std::shared_ptr<const DispersionBranch> make_branch(const MediumSpec& m, int n, int points) {
  if (n < 0) fail(ErrorCode::invalid_argument, "branch index must be nonnegative");
  if (m.kind == "high_contrast") return std::make_shared<HighContrastBranch>(n, m.hc);
  if (m.coeff.time_dependent()) return std::make_shared<TimeDependentCellBranch>(m.coeff, n, points);
  return std::make_shared<CellBranch>(m.coeff, n, points);
}

json load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::io, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

json parse_config(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorCode::schema, "config syntax error at line " + std::to_string(line) + ", column " +
                                std::to_string(col) + ": " + e.what());
  }
}

void validate_config(const json& config) {
  Fields f(config, "");
  if (!f.has("schema_version")) fail(ErrorCode::schema, "config field 'schema_version' is required");
  if (f.integer("schema_version") != kSchemaVersion)
    f.bad("schema_version", "must be " + std::to_string(kSchemaVersion));
  const std::string cmd = f.text("command");
  if (!kCommands.count(cmd)) f.bad("command", "must be one of bands, eikonal, packet, reference, validate, plotdata");
  f.text("output_dir");
  if (f.has("seed")) f.integer("seed");
  if (cmd == "bands") {
    parse_medium(f);
    f.integer("n_max");
  } else if (cmd == "eikonal") {
    parse_medium(f);
    parse_sign(f);
    f.number("kappa");
    f.positive("t_final");
    const std::string g = f.text("g");
    if (g != "zero" && g.rfind("linear:", 0) != 0 && g.rfind("quad:", 0) != 0 && !fs::exists(g))
      f.bad("g", "must be zero, linear:c, quad:c2 or an existing CSV file");
  } else if (cmd == "packet") {
    parse_medium(f);
    parse_sign(f);
    const std::string mode = f.text("mode");
    if (mode != "sp" && mode != "quad" && mode != "delta") f.bad("mode", "must be sp, quad or delta");
    parse_epsilons(f);
    f.number("t");
    parse_pair(f, "window");
    if (mode == "delta") {
      Fields d = f.object("delta");
      d.number("kappa_star");
      d.number("f0");
      d.positive("f_width");
    } else {
      parse_envelope(f);
    }
  } else if (cmd == "reference") {
    parse_medium(f);
    parse_sign(f);
    parse_epsilons(f);
    f.positive("t_final");
    parse_envelope(f);
  } else if (cmd == "validate") {
    parse_suites(f);
  } else if (cmd == "plotdata") {
    for (const auto& d : f.texts("artifacts"))
      if (!fs::exists(fs::path(d) / "manifest.json"))
        f.bad("artifacts", "entry '" + d + "' is not an artifact directory (no manifest.json)");
  }
}

std::string config_hash(const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

ExperimentResult run_experiment(const json& config) {
  ExperimentResult res;
  try {
    validate_config(config);
    Fields f(config, "");
    const std::string cmd = f.text("command");
    if (cmd == "plotdata") return emit_plot_data_config(config);
    res.output_dir = f.text("output_dir");
    ArtifactWriter w(res.output_dir);
    Outcome o;
    if (cmd == "bands") o = run_bands(f, w);
    else if (cmd == "eikonal") o = run_eikonal(f, w);
    else if (cmd == "packet") o = run_packet(f, w);
    else if (cmd == "reference") o = run_reference(f, w);
    else o = run_validate(f, w);
    json manifest = {{"tool", "bwkb"},
                     {"version", tool_version()},
                     {"schema_version", kSchemaVersion},
                     {"command", cmd},
                     {"config_hash", config_hash(config)},
                     {"config", config},
                     {"tolerances", o.tolerances},
                     {"run", o.stats},
                     {"exit_code", int(o.code)}};
    std::vector<std::string> files = w.files();
    files.push_back("manifest.json");
    manifest["files"] = files;
    w.text("manifest.json", manifest.dump(2) + "\n");
    res.files = files;
    res.output_dir = w.commit();
    res.code = o.code;
    res.summary = o.summary;
  } catch (const Error& e) {
    res.code = exit_code_for(e.code());
    res.summary = std::string(error_code_name(e.code())) + ": " + e.what();
  }
  return res;
}

namespace {

struct FigureSource {
  fs::path dir;
  json manifest;
};

bool has_table(const FigureSource& s, const std::string& name) { return fs::exists(s.dir / name); }

}  // namespace

ExperimentResult emit_plot_data_config(const json& config) {
  ExperimentResult res;
  try {
    Fields f(config, "");
    std::vector<FigureSource> sources;
    for (const auto& d : f.texts("artifacts")) {
      const fs::path mp = fs::path(d) / "manifest.json";
      if (!fs::exists(mp)) f.bad("artifacts", "entry '" + d + "' is not an artifact directory (no manifest.json)");
      sources.push_back({d, load_config(mp.string())});
    }
    std::vector<std::string> wanted;
    const std::vector<std::string> all = {"bands", "packet", "snapshots", "q", "convergence"};
    const bool explicit_list = f.has("figures");
    if (explicit_list) {
      wanted = f.texts("figures");
      for (const auto& w : wanted)
        if (std::find(all.begin(), all.end(), w) == all.end()) f.bad("figures", "unknown figure '" + w + "'");
    } else {
      wanted = all;
    }
    auto of = [&](const std::string& cmd) {
      std::vector<const FigureSource*> out;
      for (const auto& s : sources)
        if (s.manifest.value("command", "") == cmd) out.push_back(&s);
      return out;
    };
    res.output_dir = f.text("output_dir");
    ArtifactWriter w(res.output_dir);
    auto missing = [&](const std::string& fig, const std::string& need) {
      if (explicit_list) fail(ErrorCode::io, "figure '" + fig + "' needs " + need);
    };
    int emitted = 0;
    for (const std::string& fig : wanted) {
      std::string out;
      if (fig == "bands") {
        for (const FigureSource* s : of("bands")) {
          const bool hc = has_table(*s, "dispersion.csv");
          CsvFile c = read_csv(s->dir / (hc ? "dispersion.csv" : "branch.csv"));
          const std::size_t cn = c.column("n"), ck = c.column(hc ? "kappa" : "xi"), co = c.column("omega");
          std::vector<std::pair<std::pair<double, double>, std::size_t>> order;
          for (std::size_t i = 0; i < c.rows.size(); ++i) {
            const double k = std::stod(c.rows[i][ck]);
            if (k >= 0) order.push_back({{std::stod(c.rows[i][cn]), k}, i});
          }
          std::sort(order.begin(), order.end());
          for (const auto& [key, i] : order)
            out += s->dir.filename().string() + "," + c.rows[i][cn] + "," + c.rows[i][ck] + "," + c.rows[i][co] + "\n";
        }
        if (out.empty()) missing(fig, "a 'bands' run");
        else w.text("plot_bands.csv", "source,n,kappa,omega\n" + out), ++emitted;
      } else if (fig == "packet") {
        for (const FigureSource* s : of("packet"))
          for (const auto& file : s->manifest.at("files")) {
            const std::string name = file.get<std::string>();
            if (name.rfind("field", 0) != 0) continue;
            CsvFile c = read_csv(s->dir / name);
            for (const auto& r : c.rows)
              for (std::size_t q = 1; q < c.header.size(); ++q)
                out += s->dir.filename().string() + "/" + name + "," + r[0] + "," + c.header[q] + "," + r[q] + "\n";
          }
        if (out.empty()) missing(fig, "a 'packet' run");
        else w.text("plot_packet.csv", "source,x,quantity,value\n" + out), ++emitted;
      } else if (fig == "snapshots") {
        for (const FigureSource* s : of("reference")) {
          const json& runs = s->manifest.at("run").at("runs");
          for (std::size_t e = 0; e < runs.size(); ++e) {
            const auto times = runs[e].at("snapshot_times").get<std::vector<double>>();
            for (std::size_t k = 0; k < times.size(); ++k) {
              const std::string name = "snapshot" + suffix(e, runs.size()) + "_" + std::to_string(k) + ".csv";
              CsvFile c = read_csv(s->dir / name);
              for (const auto& r : c.rows)
                out += format_number(runs[e].at("epsilon").get<double>()) + "," + format_number(times[k]) + "," +
                       r[0] + "," + r[1] + "\n";
            }
          }
        }
        if (out.empty()) missing(fig, "a 'reference' run");
        else w.text("plot_snapshots.csv", "epsilon,t,x,u\n" + out), ++emitted;
      } else if (fig == "q") {
        for (const FigureSource* s : of("validate"))
          for (const char* name : {"energy_q_series_asymptotic.csv", "end_to_end_q_series_fdtd.csv"})
            if (has_table(*s, name)) {
              CsvFile c = read_csv(s->dir / name);
              const std::string src = std::string(name).find("fdtd") != std::string::npos ? "fdtd" : "asymptotic";
              for (const auto& r : c.rows) out += src + "," + r[c.column("t")] + "," + r[c.column("q")] + "\n";
            }
        if (out.empty()) missing(fig, "a 'validate' run of suite 'energy' or 'end_to_end'");
        else w.text("plot_q.csv", "source,t,q\n" + out), ++emitted;
      } else if (fig == "convergence") {
        for (const FigureSource* s : of("validate")) {
          if (has_table(*s, "end_to_end_convergence.csv")) {
            CsvFile c = read_csv(s->dir / "end_to_end_convergence.csv");
            for (const auto& r : c.rows)
              out += "fdtd_vs_leading_order," + r[c.column("epsilon")] + "," + r[c.column("relative_l2_error")] + "\n";
          }
          if (has_table(*s, "stationary_phase_sp_convergence.csv")) {
            CsvFile c = read_csv(s->dir / "stationary_phase_sp_convergence.csv");
            for (const auto& r : c.rows)
              out += "stationary_phase_vs_quadrature," + r[c.column("epsilon")] + "," +
                     r[c.column("relative_l2_gap")] + "\n";
          }
        }
        if (out.empty()) missing(fig, "a 'validate' run of suite 'stationary_phase' or 'end_to_end'");
        else w.text("plot_convergence.csv", "series,epsilon,error\n" + out), ++emitted;
      }
    }
    if (emitted == 0) fail(ErrorCode::io, "no figure can be built from the given artifacts; run bands, packet, reference or validate first");
    json sources_json = json::array();
    for (const auto& s : sources)
      sources_json.push_back({{"dir", s.dir.string()}, {"command", s.manifest.value("command", "")},
                              {"config_hash", s.manifest.value("config_hash", "")}});
    std::vector<std::string> files = w.files();
    files.push_back("manifest.json");
    json manifest = {{"tool", "bwkb"},           {"version", tool_version()}, {"schema_version", kSchemaVersion},
                     {"command", "plotdata"},    {"config_hash", config_hash(config)},
                     {"config", config},         {"sources", sources_json},  {"tolerances", json::object()},
                     {"files", files}};
    w.text("manifest.json", manifest.dump(2) + "\n");
    res.files = files;
    res.output_dir = w.commit();
    res.summary = std::to_string(emitted) + " plot file(s) written";
  } catch (const Error& e) {
    res.code = exit_code_for(e.code());
    res.summary = std::string(error_code_name(e.code())) + ": " + e.what();
  }
  return res;
}

ExperimentResult emit_plot_data(const std::string& artifact_dir, const std::string& output_dir) {
  json config = {{"schema_version", kSchemaVersion},
                 {"command", "plotdata"},
                 {"artifacts", {artifact_dir}},
                 {"output_dir", output_dir.empty() ? artifact_dir + "_plots" : output_dir}};
  return run_experiment(config);
}

}  // namespace bwkb
