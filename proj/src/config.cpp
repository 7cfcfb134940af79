#include "rwave/config.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <stdexcept>

namespace rwave {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void require_object(const json& j, const std::string& name) {
  if (!j.is_object()) fail(name + " must be an object");
}

void reject_unknown(const json& j, const std::string& section,
                    std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) fail("unknown key \"" + it.key() + "\" in " + section);
}

double get_num(const json& j, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number()) fail(std::string(key) + " must be a number");
  return j[key].get<double>();
}

int get_int(const json& j, const char* key, int dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number_integer()) fail(std::string(key) + " must be an integer");
  return j[key].get<int>();
}

std::uint64_t get_seed(const json& j, const char* key, std::uint64_t dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number_unsigned() && !j[key].is_number_integer())
    fail(std::string(key) + " must be a non-negative integer");
  const auto v = j[key].get<long long>();
  if (v < 0) fail(std::string(key) + " must be non-negative");
  return static_cast<std::uint64_t>(v);
}

std::string get_str(const json& j, const char* key, const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_string()) fail(std::string(key) + " must be a string");
  return j[key].get<std::string>();
}

const std::vector<std::string> kExperiments = {
    "tail",        "sup-tail",        "uniform-energy",
    "convergence", "exceptional-set", "solver-validate"};

}  // namespace

const std::vector<std::string>& known_experiments() { return kExperiments; }

RunConfig parse_config(const nlohmann::json& j) {
  require_object(j, "configuration");
  reject_unknown(j, "configuration",
                 {"experiment", "grid", "data", "ensemble", "dynamics", "params",
                  "output"});

  RunConfig cfg;
  cfg.experiment = get_str(j, "experiment", "");
  bool known = false;
  for (const auto& e : kExperiments) known = known || e == cfg.experiment;
  if (!known) {
    std::string names;
    for (const auto& e : kExperiments) names += (names.empty() ? "" : ", ") + e;
    fail("experiment must be one of: " + names);
  }

  const json grid = j.value("grid", json::object());
  require_object(grid, "grid");
  reject_unknown(grid, "grid", {"dim", "points", "box", "dealias_ratio"});
  cfg.grid = make_grid(get_int(grid, "dim", 3), get_int(grid, "points", 16),
                       get_num(grid, "box", 8.0), get_num(grid, "dealias_ratio", 2.0));

  const json data = j.value("data", json::object());
  require_object(data, "data");
  reject_unknown(data, "data", {"s", "profile", "seed", "eps0"});
  cfg.data.s = get_num(data, "s", 0.75);
  const std::string profile = get_str(data, "profile", "randomized-phase");
  if (profile == "randomized-phase")
    cfg.data.profile = RoughProfile::randomized_phase;
  else if (profile == "power-law")
    cfg.data.profile = RoughProfile::power_law;
  else
    fail("data.profile must be randomized-phase or power-law");
  cfg.data.seed = get_seed(data, "seed", 7);
  cfg.data.eps0 = get_num(data, "eps0", 0.01);
  if (!(cfg.data.s > 0.5 && cfg.data.s <= 1.0))
    fail("data.s must lie in (1/2, 1]");
  if (!(cfg.data.eps0 > 0.0)) fail("data.eps0 must be positive");

  const json ens = j.value("ensemble", json::object());
  require_object(ens, "ensemble");
  reject_unknown(ens, "ensemble", {"members", "seed", "distribution", "cutoff"});
  cfg.ensemble.members = get_int(ens, "members", 100);
  if (cfg.ensemble.members < 1) fail("ensemble.members must be at least 1");
  cfg.ensemble.seed = get_seed(ens, "seed", 1);
  cfg.ensemble.distribution =
      distribution_from_string(get_str(ens, "distribution", "gaussian"));
  const std::string cutoff = get_str(ens, "cutoff", "smooth");
  if (cutoff == "smooth")
    cfg.ensemble.cutoff = CubeCutoff::smooth;
  else if (cutoff == "sharp")
    cfg.ensemble.cutoff = CubeCutoff::sharp;
  else
    fail("ensemble.cutoff must be smooth or sharp");

  const json dyn = j.value("dynamics", json::object());
  require_object(dyn, "dynamics");
  reject_unknown(dyn, "dynamics", {"dt", "t_final", "snapshot_stride"});
  cfg.dynamics.dt = get_num(dyn, "dt", 1e-2);
  cfg.dynamics.t_final = get_num(dyn, "t_final", 1.0);
  cfg.dynamics.snapshot_stride = get_int(dyn, "snapshot_stride", 1);
  if (!(cfg.dynamics.dt > 0.0)) fail("dynamics.dt must be positive");
  if (!(cfg.dynamics.t_final > 0.0)) fail("dynamics.t_final must be positive");
  if (cfg.dynamics.snapshot_stride < 1) fail("dynamics.snapshot_stride must be >= 1");

  cfg.params = j.value("params", json::object());
  require_object(cfg.params, "params");

  const json out = j.value("output", json::object());
  require_object(out, "output");
  reject_unknown(out, "output", {"dir", "tag"});
  cfg.output_dir = get_str(out, "dir", "");
  cfg.tag = get_str(out, "tag", cfg.experiment);
  if (cfg.tag.empty()) fail("output.tag must not be empty");
  for (char c : cfg.tag)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'))
      fail("output.tag may contain only letters, digits, '-' and '_'");

  // effective configuration; identifies the run, so no output section
  json echo;
  echo["experiment"] = cfg.experiment;
  echo["grid"] = {{"dim", cfg.grid.dim},
                  {"points", cfg.grid.points},
                  {"box", cfg.grid.box},
                  {"dealias_ratio", cfg.grid.dealias_ratio}};
  echo["data"] = {{"s", cfg.data.s},
                  {"profile", profile},
                  {"seed", cfg.data.seed},
                  {"eps0", cfg.data.eps0}};
  echo["ensemble"] = {{"members", cfg.ensemble.members},
                      {"seed", cfg.ensemble.seed},
                      {"distribution", to_string(cfg.ensemble.distribution)},
                      {"cutoff", cutoff}};
  echo["dynamics"] = {{"dt", cfg.dynamics.dt},
                      {"t_final", cfg.dynamics.t_final},
                      {"snapshot_stride", cfg.dynamics.snapshot_stride}};
  echo["params"] = cfg.params;
  cfg.echo = echo;
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open configuration file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail("configuration is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

}  // namespace rwave
