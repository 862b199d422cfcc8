#include "mdecon/harness.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mdecon {

using json = nlohmann::ordered_json;

namespace {

void
check_keys(const json& j, std::string_view where, const std::set<std::string>& allowed)
{
  if (!j.is_object()) {
    throw std::invalid_argument("config: '" + std::string(where) + "' must be an object");
  }
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) {
      throw std::invalid_argument("config: unknown key '" + key + "' in '" + std::string(where) +
                                  "'");
    }
  }
}

template<typename T>
void
read(const json& j, const char* key, T& out)
{
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("config: bad value for '") + key + "': " + e.what());
    }
  }
}

//! scalars are accepted where a per-axis list is expected.
template<typename T>
void
read_list(const json& j, const char* key, std::vector<T>& out)
{
  if (!j.contains(key)) {
    return;
  }
  if (j.at(key).is_array()) {
    read(j, key, out);
  } else {
    T v{};
    read(j, key, v);
    out = { v };
  }
}

json
mode_json(const ModeSpec& m)
{
  json j{ { "type", to_string(m.type) } };
  switch (m.type) {
    case CutoffMode::fixed_k:
      j["k"] = m.k;
      break;
    case CutoffMode::adaptive:
      j["chi1"] = m.selection.chi1;
      j["chi2"] = m.selection.chi2;
      j["grid_cap"] = m.selection.grid_cap;
      break;
    case CutoffMode::power:
      j["scale"] = m.scale;
      j["exponent"] = m.exponent;
      break;
    case CutoffMode::minimax:
      j["s"] = m.s;
      break;
  }
  return j;
}

ModeSpec
mode_from_json(const json& j)
{
  check_keys(j, "mode", { "type", "k", "chi1", "chi2", "grid_cap", "scale", "exponent", "s" });
  ModeSpec m;
  std::string type = "fixed_k";
  read(j, "type", type);
  m.type = parse_cutoff_mode(type);
  read_list(j, "k", m.k);
  read(j, "chi1", m.selection.chi1);
  m.selection.chi2 = m.selection.chi1;
  read(j, "chi2", m.selection.chi2);
  read(j, "grid_cap", m.selection.grid_cap);
  read(j, "scale", m.scale);
  read_list(j, "exponent", m.exponent);
  read_list(j, "s", m.s);
  return m;
}

json
quad_json(const QuadratureConfig& q)
{
  json j{ { "step_t", q.step_t },
          { "points_per_decade", q.points_per_decade },
          { "decades", q.decades },
          { "auto_factor", q.auto_factor },
          { "tol_zero", q.tol_zero } };
  if (q.is_auto()) {
    j["x_max"] = "auto";
  } else {
    j["x_max"] = q.x_max;
  }
  return j;
}

QuadratureConfig
quad_from_json(const json& j)
{
  check_keys(j,
             "quad",
             { "step_t", "points_per_decade", "x_max", "decades", "auto_factor", "tol_zero" });
  QuadratureConfig q;
  read(j, "step_t", q.step_t);
  read(j, "points_per_decade", q.points_per_decade);
  read(j, "decades", q.decades);
  read(j, "auto_factor", q.auto_factor);
  read(j, "tol_zero", q.tol_zero);
  if (j.contains("x_max")) {
    const auto& x = j.at("x_max");
    if (x.is_string()) {
      if (x.get<std::string>() != "auto") {
        throw std::invalid_argument("config: quad.x_max must be 'auto' or numbers");
      }
      q.x_max.clear();
    } else {
      read_list(j, "x_max", q.x_max);
    }
  }
  return q;
}

json
to_json(const ExperimentConfig& c)
{
  return json{
    { "name", c.name },
    { "target", c.target },
    { "noise", c.noise },
    { "c", c.c },
    { "n", c.n },
    { "replicates", c.replicates },
    { "seed", c.seed },
    { "mode", mode_json(c.mode) },
    { "eval_grid",
      { { "lo", c.eval_grid.lo },
        { "hi", c.eval_grid.hi },
        { "points", c.eval_grid.points },
        { "spacing", c.eval_grid.log_spaced ? "log" : "linear" } } },
    { "quad", quad_json(c.quad) },
    { "risk",
      { { "spatial", c.risk.spatial },
        { "half_decades", c.risk.half_decades },
        { "points_per_decade", c.risk.points_per_decade },
        { "points_per_unit_k", c.risk.points_per_unit_k } } },
    { "nonneg_clip", c.nonneg_clip },
    { "threads", c.threads },
    { "output", c.output },
    { "plot_script", c.plot_script },
  };
}

ExperimentConfig
from_json(const json& j)
{
  check_keys(j,
             "config",
             { "name",
               "target",
               "noise",
               "c",
               "n",
               "replicates",
               "seed",
               "mode",
               "eval_grid",
               "quad",
               "risk",
               "nonneg_clip",
               "threads",
               "output",
               "plot_script" });
  ExperimentConfig c;
  read(j, "name", c.name);
  read_list(j, "target", c.target);
  read_list(j, "noise", c.noise);
  read_list(j, "c", c.c);
  read(j, "n", c.n);
  read(j, "replicates", c.replicates);
  read(j, "seed", c.seed);
  if (j.contains("mode")) {
    c.mode = mode_from_json(j.at("mode"));
  }
  if (j.contains("eval_grid")) {
    const auto& g = j.at("eval_grid");
    check_keys(g, "eval_grid", { "lo", "hi", "points", "spacing" });
    read_list(g, "lo", c.eval_grid.lo);
    read_list(g, "hi", c.eval_grid.hi);
    read_list(g, "points", c.eval_grid.points);
    std::string spacing = "log";
    read(g, "spacing", spacing);
    if (spacing != "log" && spacing != "linear") {
      throw std::invalid_argument("config: eval_grid.spacing must be 'log' or 'linear'");
    }
    c.eval_grid.log_spaced = spacing == "log";
  }
  if (j.contains("quad")) {
    c.quad = quad_from_json(j.at("quad"));
  }
  if (j.contains("risk")) {
    const auto& r = j.at("risk");
    check_keys(r, "risk", { "spatial", "half_decades", "points_per_decade", "points_per_unit_k" });
    read(r, "spatial", c.risk.spatial);
    read(r, "half_decades", c.risk.half_decades);
    read(r, "points_per_decade", c.risk.points_per_decade);
    read(r, "points_per_unit_k", c.risk.points_per_unit_k);
  }
  read(j, "nonneg_clip", c.nonneg_clip);
  read(j, "threads", c.threads);
  read(j, "output", c.output);
  read(j, "plot_script", c.plot_script);
  return c;
}

} // namespace

std::string
to_string(CutoffMode mode)
{
  switch (mode) {
    case CutoffMode::fixed_k:
      return "fixed_k";
    case CutoffMode::adaptive:
      return "adaptive";
    case CutoffMode::power:
      return "power";
    case CutoffMode::minimax:
      return "minimax";
  }
  return "unknown";
}

CutoffMode
parse_cutoff_mode(std::string_view name)
{
  if (name == "fixed_k" || name == "fixed") {
    return CutoffMode::fixed_k;
  }
  if (name == "adaptive") {
    return CutoffMode::adaptive;
  }
  if (name == "power") {
    return CutoffMode::power;
  }
  if (name == "minimax") {
    return CutoffMode::minimax;
  }
  throw std::invalid_argument("unknown cut-off mode '" + std::string(name) +
                              "' (expected fixed_k, adaptive, power or minimax)");
}

std::string
config_to_text(const ExperimentConfig& config)
{
  return to_json(config).dump(2) + "\n";
}

ExperimentConfig
config_from_text(std::string_view text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return from_json(j);
}

ExperimentConfig
load_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_text(ss.str());
}

bool
ExperimentConfig::operator==(const ExperimentConfig& other) const
{
  return config_to_text(*this) == config_to_text(other);
}

} // namespace mdecon
