#include "lfd/config.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "lfd/errors.hpp"

namespace lfd {

namespace {

using nlohmann::json;

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_gains(const json& obj, const char* key, DmpGains& gains) {
  if (!obj.contains(key)) return;
  const json& g = obj.at(key);
  read_opt(g, "alpha", gains.alpha);
  read_opt(g, "beta", gains.beta);
}

void read_profile(const json& obj, Profile& p) {
  if (!obj.contains("profiles") || !obj.at("profiles").contains(p.name)) return;
  const json& j = obj.at("profiles").at(p.name);
  read_opt(j, "n_pts", p.n_pts);
  read_opt(j, "n_bfs", p.n_bfs);
  read_opt(j, "n_bfs_o", p.n_bfs_o);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ParseError("config: " + what, 0);
}

void check_values(const LfdConfig& c) {
  require(c.canonical.alpha_x > 0.0, "canonical.alpha_x must be positive");
  for (const DmpGains* g : {&c.position_gains, &c.orientation_gains}) {
    require(g->alpha > 0.0 && g->beta > 0.0, "gains must be positive");
  }
  for (const Profile* p : {&c.task_ii, &c.task_iv}) {
    require(p->n_pts >= 3, p->name + ".n_pts must be at least 3");
    require(p->n_bfs >= 1 && p->n_bfs_o >= 1, p->name + " basis counts must be at least 1");
  }
  require(c.segmentation.speed_threshold > 0.0 && c.segmentation.dwell_min >= 0.0 &&
              c.segmentation.min_segment >= 0.0,
          "segmentation thresholds out of range");
  require(c.scene.entry_tol > 0.0 && c.scene.exit_tol > 0.0 && c.scene.reasonable_tol > 0.0,
          "scene tolerances must be positive");
  require(c.needle.radius > 0.0 && c.needle.arc_angle_deg > 0.0 && c.needle.arc_angle_deg < 360.0,
          "needle geometry out of range");
}

json profile_json(const Profile& p) { return {{"n_pts", p.n_pts}, {"n_bfs", p.n_bfs}, {"n_bfs_o", p.n_bfs_o}}; }

}  // namespace

const Profile& LfdConfig::profile(const std::string& name) const {
  if (name == task_ii.name) return task_ii;
  if (name == task_iv.name) return task_iv;
  throw InvalidArgument("unknown profile '" + name + "' (expected task-ii or task-iv)");
}

FitSettings LfdConfig::fit_settings(const std::string& profile_name) const {
  const Profile& p = profile(profile_name);
  FitSettings s;
  s.canonical = canonical;
  s.position_gains = position_gains;
  s.orientation_gains = orientation_gains;
  s.n_bfs = p.n_bfs;
  s.n_bfs_o = p.n_bfs_o;
  return s;
}

LfdConfig parse_config(const std::string& json_text) {
  LfdConfig cfg;
  try {
    const json root = json::parse(json_text);
    if (!root.is_object()) throw ParseError("config root must be an object", 0);
    if (root.contains("canonical")) read_opt(root.at("canonical"), "alpha_x", cfg.canonical.alpha_x);
    read_gains(root, "position_gains", cfg.position_gains);
    read_gains(root, "orientation_gains", cfg.orientation_gains);
    read_profile(root, cfg.task_ii);
    read_profile(root, cfg.task_iv);
    if (root.contains("segmentation")) {
      const json& s = root.at("segmentation");
      read_opt(s, "speed_threshold", cfg.segmentation.speed_threshold);
      read_opt(s, "dwell_min", cfg.segmentation.dwell_min);
      read_opt(s, "min_segment", cfg.segmentation.min_segment);
    }
    if (root.contains("scene")) {
      const json& s = root.at("scene");
      read_opt(s, "entry_tol", cfg.scene.entry_tol);
      read_opt(s, "exit_tol", cfg.scene.exit_tol);
      read_opt(s, "reasonable_tol", cfg.scene.reasonable_tol);
    }
    if (root.contains("needle")) {
      const json& s = root.at("needle");
      read_opt(s, "radius", cfg.needle.radius);
      read_opt(s, "arc_angle_deg", cfg.needle.arc_angle_deg);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what(), 0);
  }
  check_values(cfg);
  return cfg;
}

LfdConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path.string(), 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const LfdConfig& cfg) {
  json root = {
      {"canonical", {{"alpha_x", cfg.canonical.alpha_x}}},
      {"position_gains", {{"alpha", cfg.position_gains.alpha}, {"beta", cfg.position_gains.beta}}},
      {"orientation_gains", {{"alpha", cfg.orientation_gains.alpha}, {"beta", cfg.orientation_gains.beta}}},
      {"profiles", {{cfg.task_ii.name, profile_json(cfg.task_ii)}, {cfg.task_iv.name, profile_json(cfg.task_iv)}}},
      {"segmentation",
       {{"speed_threshold", cfg.segmentation.speed_threshold},
        {"dwell_min", cfg.segmentation.dwell_min},
        {"min_segment", cfg.segmentation.min_segment}}},
      {"scene",
       {{"entry_tol", cfg.scene.entry_tol},
        {"exit_tol", cfg.scene.exit_tol},
        {"reasonable_tol", cfg.scene.reasonable_tol}}},
      {"needle", {{"radius", cfg.needle.radius}, {"arc_angle_deg", cfg.needle.arc_angle_deg}}},
  };
  return root.dump(2) + "\n";
}

}  // namespace lfd
