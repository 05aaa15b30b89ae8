#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "bwkb/bwkb.h"

using nlohmann::json;

namespace {

constexpr int kUsage = 1;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

double to_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw CLI::ValidationError(what, "'" + s + "' is not a number");
  return v;
}

std::vector<double> to_numbers(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& p : split(s, ',')) out.push_back(to_number(p, what));
  return out;
}

// "h=0.5,a2=1" (high contrast), "h=0.5,a1=100,a2=1" (two phase) or a path to a coefficient JSON file
json medium_from(const std::string& text) {
  if (text.find('=') == std::string::npos) return {{"kind", "cell"}, {"coefficient_file", text}};
  json m = json::object();
  for (const auto& kv : split(text, ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--medium", "expected key=value, got '" + kv + "'");
    m[kv.substr(0, eq)] = to_number(kv.substr(eq + 1), "--medium");
  }
  m["kind"] = m.contains("a1") ? "two_phase" : "high_contrast";
  return m;
}

struct Options {
  std::string config, out, medium, coefficient, g, sign, mode, epsilon, window, snap, suite, artifacts, figures,
      launch, n_range;
  double kappa = 0, t = 0, t_final = 0, dt = 0, a1 = 0, kappa_star = 0, kappa_width = 0, x_width = 0, cutoff = 0,
         f0 = 0, f_width = 0, mollifier = 0, cfl = 0, u0_width = 0;
  int branch = 0, kappa_points = 0, npc = 0, branch_points = 0;
  long seed = 0;
};

void put_medium(json& j, const Options& o, CLI::App* cmd) {
  if (cmd->count("--coefficient")) j["medium"] = {{"kind", "cell"}, {"coefficient_file", o.coefficient}};
  if (cmd->count("--medium")) j["medium"] = medium_from(o.medium);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bloch-wave WKB toolkit: band structure, phase transport, packet reconstruction and a direct solver"};
  app.name("bwkb");
  app.require_subcommand(0, 1);
  // global options may follow the subcommand
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "JSON config; its fields override the flags");
  app.add_option("--out", o.out, "output directory (artifact)");
  app.add_option("--seed", o.seed, "recorded in the manifest");
  app.set_version_flag("--version", std::string(bwkb_version()));

  auto* bands = app.add_subcommand("bands", "band structure");
  auto* eik = app.add_subcommand("eikonal", "characteristics of the phase equation");
  auto* packet = app.add_subcommand("packet", "leading-order packet field");
  auto* ref = app.add_subcommand("reference", "direct simulation of the wave equation");
  auto* val = app.add_subcommand("validate", "validation suites");
  auto* plot = app.add_subcommand("plotdata", "long-format plot files from artifacts");

  for (auto* c : {bands, eik, packet, ref}) {
    c->add_option("--medium", o.medium, "h=..,a2=.. | h=..,a1=..,a2=.. | coefficient JSON file");
    c->add_option("--coefficient", o.coefficient, "coefficient JSON file");
  }
  for (auto* c : {eik, packet, ref}) {
    c->add_option("--branch", o.branch, "band index n");
    c->add_option("--branch-points", o.branch_points, "quasimomentum grid for cell media");
    c->add_option("--sign", o.sign, "+ or -");
  }
  for (auto* c : {packet, ref}) {
    c->add_option("--epsilon", o.epsilon, "scale, or a comma-separated ladder");
    c->add_option("--kappa-star", o.kappa_star, "envelope center in quasimomentum");
    c->add_option("--kappa-width", o.kappa_width, "envelope width in quasimomentum");
    c->add_option("--x-width", o.x_width, "envelope width in x (0: no x dependence)");
    c->add_option("--cutoff", o.cutoff, "envelope support in widths");
    c->add_option("--npc", o.npc, "nodes per cell");
    c->add_option("--window", o.window, "a,b");
  }
  bands->add_option("--n", o.n_range, "band range lo..hi");
  bands->add_option("--kappa-points", o.kappa_points, "samples per band");

  eik->add_option("--g", o.g, "zero | linear:c | quad:c2 | CSV file sigma,g");
  eik->add_option("--kappa", o.kappa, "quasimomentum offset");
  eik->add_option("--t-final", o.t_final, "final time");
  eik->add_option("--dt", o.dt, "RK4 step");
  eik->add_option("--launch", o.launch, "comma-separated launch points");
  eik->add_option("--u0-width", o.u0_width, "Gaussian initial amplitude width");

  packet->add_option("--mode", o.mode, "sp | quad | delta");
  packet->add_option("--t", o.t, "time");
  packet->add_option("--f0", o.f0, "delta mode: f(0)");
  packet->add_option("--f-width", o.f_width, "delta mode: Gaussian width of f");
  packet->add_option("--mollifier", o.mollifier, "delta mode: mollifier width");

  ref->add_option("--a1", o.a1, "stiff coefficient (overrides the medium)");
  ref->add_option("--t-final", o.t_final, "final time");
  ref->add_option("--snap", o.snap, "t1,t2,...");
  ref->add_option("--cfl", o.cfl, "CFL number");

  val->add_option("--suite", o.suite, "suite name, comma list, or all");
  plot->add_option("--artifacts", o.artifacts, "comma-separated artifact directories");
  plot->add_option("--figures", o.figures, "bands,packet,snapshots,q,convergence");

  if (argc <= 1) {
    std::cerr << app.help();
    return kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  json j = json::object();
  try {
    CLI::App* cmd = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
    if (cmd) {
      j["schema_version"] = 1;
      j["command"] = cmd->get_name();
    }
    if (app.count("--out")) j["output_dir"] = o.out;
    if (app.count("--seed")) j["seed"] = o.seed;
    if (cmd == bands || cmd == eik || cmd == packet || cmd == ref) put_medium(j, o, cmd);
    if (cmd && (cmd == eik || cmd == packet || cmd == ref)) {
      if (cmd->count("--branch")) j["branch"] = o.branch;
      if (cmd->count("--branch-points")) j["branch_points"] = o.branch_points;
      if (cmd->count("--sign")) j["sign"] = o.sign;
    }
    if (cmd == packet || cmd == ref) {
      if (cmd->count("--epsilon")) {
        auto e = to_numbers(o.epsilon, "--epsilon");
        j["epsilon"] = e.size() == 1 ? json(e[0]) : json(e);
      }
      json env = json::object();
      if (cmd->count("--kappa-star")) env["kappa_star"] = o.kappa_star;
      if (cmd->count("--kappa-width")) env["kappa_width"] = o.kappa_width;
      if (cmd->count("--x-width")) env["x_width"] = o.x_width;
      if (cmd->count("--cutoff")) env["cutoff"] = o.cutoff;
      if (!env.empty()) j["envelope"] = env;
      if (cmd->count("--npc")) j["nodes_per_cell"] = o.npc;
      if (cmd->count("--window")) j["window"] = to_numbers(o.window, "--window");
    }
    if (cmd == bands) {
      if (bands->count("--n")) {
        const auto dots = o.n_range.find("..");
        if (dots == std::string::npos) {
          j["n_max"] = std::stol(o.n_range);
        } else {
          j["n_min"] = std::stol(o.n_range.substr(0, dots));
          j["n_max"] = std::stol(o.n_range.substr(dots + 2));
        }
      }
      if (bands->count("--kappa-points")) j["kappa_points"] = o.kappa_points;
    } else if (cmd == eik) {
      if (eik->count("--g")) j["g"] = o.g;
      if (eik->count("--kappa")) j["kappa"] = o.kappa;
      if (eik->count("--t-final")) j["t_final"] = o.t_final;
      if (eik->count("--dt")) j["dt"] = o.dt;
      if (eik->count("--launch")) j["launch"] = to_numbers(o.launch, "--launch");
      if (eik->count("--u0-width")) j["u0_width"] = o.u0_width;
    } else if (cmd == packet) {
      if (packet->count("--mode")) j["mode"] = o.mode;
      if (packet->count("--t")) j["t"] = o.t;
      if (o.mode == "delta") {
        json d = json::object();
        if (packet->count("--kappa-star")) d["kappa_star"] = o.kappa_star;
        if (packet->count("--f0")) d["f0"] = o.f0;
        if (packet->count("--f-width")) d["f_width"] = o.f_width;
        if (packet->count("--mollifier")) d["mollifier_width"] = o.mollifier;
        j["delta"] = d;
      }
    } else if (cmd == ref) {
      if (ref->count("--a1")) {
        if (!j.contains("medium") || !j["medium"].contains("h"))
          throw CLI::ValidationError("--a1", "needs --medium h=..,a2=..");
        j["medium"]["a1"] = o.a1;
        j["medium"]["kind"] = "two_phase";
      }
      if (ref->count("--t-final")) j["t_final"] = o.t_final;
      if (ref->count("--snap")) j["snap"] = to_numbers(o.snap, "--snap");
      if (ref->count("--cfl")) j["cfl"] = o.cfl;
    } else if (cmd == val) {
      if (val->count("--suite")) {
        auto s = split(o.suite, ',');
        if (s.size() == 1) j["suite"] = s[0];
        else j["suites"] = s;
      }
    } else if (cmd == plot) {
      if (plot->count("--artifacts")) j["artifacts"] = split(o.artifacts, ',');
      if (plot->count("--figures")) j["figures"] = split(o.figures, ',');
    }
    if (!o.config.empty()) {
      std::ifstream is(o.config, std::ios::binary);
      if (!is) {
        std::cerr << "error: cannot open config '" << o.config << "'\n";
        return kUsage;
      }
      std::stringstream ss;
      ss << is.rdbuf();
      json file;
      try {
        file = json::parse(ss.str());
      } catch (const json::parse_error&) {
        // let the library report line and column
        int code = kUsage;
        char* result = nullptr;
        bwkb_run_experiment(ss.str().c_str(), &code, &result);
        std::cerr << "error: " << json::parse(result).value("summary", "") << "\n";
        bwkb_free_string(result);
        return code;
      }
      if (!file.is_object()) {
        std::cerr << "error: config must be a JSON object\n";
        return kUsage;
      }
      j.merge_patch(file);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  if (!j.contains("command")) {
    std::cerr << "error: no command given\n\n" << app.help();
    return kUsage;
  }
  int code = kUsage;
  char* result = nullptr;
  if (bwkb_run_experiment(j.dump().c_str(), &code, &result) != BWKB_OK) {
    std::cerr << "error: " << bwkb_last_error() << "\n";
    return kUsage;
  }
  const json r = json::parse(result);
  bwkb_free_string(result);
  if (code == 0 || code == 3) {
    std::cout << r.value("summary", "") << "\n";
    if (!r.value("output_dir", "").empty()) std::cout << "artifact: " << r.value("output_dir", "") << "\n";
  } else {
    std::cerr << "error: " << r.value("summary", "") << "\n";
  }
  return code;
}
