#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lfd/config.hpp"
#include "lfd/errors.hpp"
#include "lfd/io.hpp"
#include "lfd/pose_dmp.hpp"
#include "lfd/preprocess.hpp"
#include "lfd/scene.hpp"

namespace lfd::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Malformed command line that CLI11 itself cannot detect.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::string profile;
};

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

std::vector<double> parse_list(const std::string& flag, const std::string& text, std::size_t expected) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(v)) {
      throw UsageError(flag + ": '" + item + "' is not a finite number");
    }
    values.push_back(v);
  }
  if (values.size() != expected) {
    throw UsageError(flag + " expects " + std::to_string(expected) + " comma-separated values, got '" + text + "'");
  }
  return values;
}

Vec3 parse_vec3(const std::string& flag, const std::string& text) {
  const auto v = parse_list(flag, text, 3);
  return {v[0], v[1], v[2]};
}

UnitQuat parse_quat(const std::string& flag, const std::string& text) {
  const auto v = parse_list(flag, text, 4);
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
  if (std::abs(n - 1.0) > 1e-6) throw UsageError(flag + " must be a unit quaternion w,x,y,z");
  return {v[0], v[1], v[2], v[3]};
}

LfdConfig resolve_config(const Globals& g) {
  if (!g.config_path.empty()) return load_config(g.config_path);
  if (const char* env = std::getenv(kConfigEnvVar); env && *env) return load_config(env);
  return {};
}

std::string profile_or(const Globals& g, const std::string& fallback) {
  return g.profile.empty() ? fallback : g.profile;
}

void print_warnings(std::ostream& err, const std::string& what, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << what << ": " << w << '\n';
}

// ---------------------------------------------------------------------------
// segment

struct SegmentArgs {
  std::string input;
  std::string out_dir;
  std::string prefix;
};

int cmd_segment(const Globals& g, const SegmentArgs& a, std::ostream& out, std::ostream& err) {
  const LfdConfig cfg = resolve_config(g);
  const TrajectoryFile file = load_trajectory(a.input);
  const TimedPoseTrajectory& traj = file.trajectory;
  const auto ranges = find_segments(traj, cfg.segmentation);

  const std::string prefix = a.prefix.empty() ? fs::path(a.input).stem().string() : a.prefix;
  fs::create_directories(a.out_dir);
  const fs::path manifest_path = fs::path(a.out_dir) / (prefix + "_manifest.txt");
  std::ofstream manifest(manifest_path);
  if (!manifest) throw Error("cannot open " + manifest_path.string() + " for writing");
  manifest << "# segments of " << fs::path(a.input).filename().string() << '\n';
  manifest << "columns index first last t_start t_end label file\n";

  for (std::size_t i = 0; i < ranges.size(); ++i) {
    char tag[16];
    std::snprintf(tag, sizeof tag, "%02zu", i + 1);
    TimedPoseTrajectory seg = traj.slice(ranges[i].first, ranges[i].last);
    seg.label = traj.label ? *traj.label + "." + tag : std::string("seg") + tag;
    const std::string name = prefix + "_seg" + tag + ".traj";
    save_trajectory(fs::path(a.out_dir) / name, {seg, file.frame});
    manifest << i + 1 << ' ' << ranges[i].first << ' ' << ranges[i].last << ' ' << format_number(seg.stamps.front())
             << ' ' << format_number(seg.stamps.back()) << ' ' << *seg.label << ' ' << name << '\n';
    out << name << "  samples " << seg.size() << "  t " << fixed(seg.stamps.front(), 3) << " .. "
        << fixed(seg.stamps.back(), 3) << " s\n";
  }
  if (ranges.empty()) err << "warning: no motion above " << cfg.segmentation.speed_threshold << " m/s, 0 segments\n";
  out << "segments " << ranges.size() << "  manifest " << manifest_path.filename().string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string input;
  std::string output;
};

void print_report(std::ostream& out, const char* part, std::size_t n_bfs, const FitReport& r) {
  out << part << "  n_bfs " << n_bfs << "  residual_rms";
  for (double v : r.residual_rms) out << ' ' << format_number(v);
  out << "  degenerate";
  for (bool d : r.degenerate_axis) out << ' ' << (d ? 1 : 0);
  out << '\n';
}

int cmd_fit(const Globals& g, const FitArgs& a, std::ostream& out, std::ostream& err) {
  const LfdConfig cfg = resolve_config(g);
  const std::string profile = profile_or(g, "task-ii");
  const Profile& p = cfg.profile(profile);
  const TrajectoryFile file = load_trajectory(a.input);

  PoseFit fit = fit_pose(file.trajectory, cfg.fit_settings(profile));
  fit.model.profile = profile;
  ModelFile mf = ModelFile::paired(fit.model);
  mf.n_pts = p.n_pts;
  save_model(a.output, mf);

  print_warnings(err, "position", fit.position_report.warnings);
  print_warnings(err, "orientation", fit.orientation_report.warnings);
  out << "profile " << profile << "  n_pts " << p.n_pts << "  samples " << file.trajectory.size() << "  duration "
      << format_number(fit.model.position.duration) << " s\n";
  print_report(out, "position", p.n_bfs, fit.position_report);
  print_report(out, "orientation", p.n_bfs_o, fit.orientation_report);
  out << "model " << a.output << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// rollout

struct RolloutArgs {
  std::string model;
  std::string output;
  std::string start, goal, start_quat, goal_quat;
  std::optional<long long> points;
  double horizon_scale = 1.0;
};

int cmd_rollout(const Globals& g, const RolloutArgs& a, std::ostream& out, std::ostream& err) {
  (void)err;
  RolloutConfig rc;
  if (!a.start.empty()) rc.start_override = parse_vec3("--start", a.start);
  if (!a.goal.empty()) rc.goal_override = parse_vec3("--goal", a.goal);
  if (!a.start_quat.empty()) rc.start_quat_override = parse_quat("--start-quat", a.start_quat);
  if (!a.goal_quat.empty()) rc.goal_quat_override = parse_quat("--goal-quat", a.goal_quat);
  if (a.points && *a.points < 3) {
    throw UsageError("--points must be at least 3 for the integrator to take a step past the start, got " +
                     std::to_string(*a.points));
  }
  if (!(a.horizon_scale >= 1.0) || !std::isfinite(a.horizon_scale)) {
    throw UsageError("--horizon-scale must be a finite number >= 1");
  }
  rc.horizon_scale = a.horizon_scale;

  const ModelFile mf = load_model(a.model);
  const PoseDmpModel model = mf.pose_model();
  if (a.points) {
    rc.n_pts = static_cast<std::size_t>(*a.points);
  } else if (!g.profile.empty()) {
    rc.n_pts = resolve_config(g).profile(g.profile).n_pts;
  } else {
    rc.n_pts = mf.n_pts;
  }

  TimedPoseTrajectory traj = rollout_pose(model, rc);
  if (!model.profile.empty()) traj.label = model.profile;
  save_trajectory(a.output, {traj, "world"});
  const auto q = traj.orientations.back().to_array();
  out << "points " << traj.size() << "  duration " << format_number(traj.duration()) << " s\n";
  out << "end " << format_number(traj.positions.back().x()) << ' ' << format_number(traj.positions.back().y()) << ' '
      << format_number(traj.positions.back().z()) << "  quat " << format_number(q[0]) << ' ' << format_number(q[1])
      << ' ' << format_number(q[2]) << ' ' << format_number(q[3]) << '\n';
  out << "trajectory " << a.output << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string reference;
  std::string test;
  std::string ref_dir;
  std::string test_dir;
  bool json = false;
};

constexpr const char* kFieldNames[6] = {"start_pos_mm", "goal_pos_mm", "traj_pos_mm",
                                        "start_ori_deg", "goal_ori_deg", "traj_ori_deg"};

std::array<double, 6> fields(const ErrorReport& r) {
  return {r.start_pos, r.goal_pos, r.traj_pos, r.start_ori, r.goal_ori, r.traj_ori};
}

std::array<FieldStats, 6> fields(const ErrorSummary& s) {
  return {s.start_pos, s.goal_pos, s.traj_pos, s.start_ori, s.goal_ori, s.traj_ori};
}

json report_json(const ErrorReport& r) {
  json j;
  const auto f = fields(r);
  for (std::size_t i = 0; i < 6; ++i) j[kFieldNames[i]] = f[i];
  return j;
}

std::vector<std::string> trajectory_names(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".traj") names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

int cmd_eval(const Globals&, const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const bool batch = !a.ref_dir.empty() || !a.test_dir.empty();
  if (batch) {
    if (a.ref_dir.empty() || a.test_dir.empty()) throw UsageError("batch eval needs both --ref-dir and --test-dir");
    if (!a.reference.empty() || !a.test.empty()) throw UsageError("give either two files or --ref-dir/--test-dir");
  } else if (a.reference.empty() || a.test.empty()) {
    throw UsageError("eval needs a reference and a test trajectory");
  }

  std::vector<std::pair<std::string, ErrorReport>> rows;
  if (batch) {
    const auto ref_names = trajectory_names(a.ref_dir);
    const auto test_names = trajectory_names(a.test_dir);
    const std::set<std::string> tests(test_names.begin(), test_names.end());
    for (const auto& name : ref_names) {
      if (!tests.count(name)) {
        err << "warning: no test trajectory for " << name << '\n';
        continue;
      }
      const auto ref = load_trajectory(fs::path(a.ref_dir) / name).trajectory;
      const auto test = load_trajectory(fs::path(a.test_dir) / name).trajectory;
      rows.emplace_back(name, error_report(ref, test));
    }
    for (const auto& name : test_names) {
      if (!std::binary_search(ref_names.begin(), ref_names.end(), name)) {
        err << "warning: no reference trajectory for " << name << '\n';
      }
    }
    if (rows.empty()) throw Error("no trajectory pairs found");
  } else {
    const auto ref = load_trajectory(a.reference).trajectory;
    const auto test = load_trajectory(a.test).trajectory;
    rows.emplace_back(fs::path(a.test).filename().string(), error_report(ref, test));
  }

  std::vector<ErrorReport> reports;
  for (const auto& r : rows) reports.push_back(r.second);

  if (a.json) {
    json j;
    j["pairs"] = json::array();
    for (const auto& [name, r] : rows) {
      json p = report_json(r);
      p["name"] = name;
      j["pairs"].push_back(p);
    }
    if (batch) {
      const ErrorSummary s = summarize_errors(reports);
      const auto f = fields(s);
      for (std::size_t i = 0; i < 6; ++i) {
        j["summary"][kFieldNames[i]] = {{"mean", f[i].mean}, {"std", f[i].std}, {"median", f[i].median}};
      }
      j["summary"]["count"] = s.count;
    }
    out << j.dump(2) << '\n';
    return kExitOk;
  }

  if (!batch) {
    const auto f = fields(rows.front().second);
    for (std::size_t i = 0; i < 6; ++i) out << std::left << std::setw(14) << kFieldNames[i] << ' ' << fixed(f[i], 4) << '\n';
    return kExitOk;
  }

  out << std::left << std::setw(24) << "pair";
  for (const char* n : kFieldNames) out << std::right << std::setw(14) << n;
  out << '\n';
  for (const auto& [name, r] : rows) {
    out << std::left << std::setw(24) << name;
    for (double v : fields(r)) out << std::right << std::setw(14) << fixed(v, 4);
    out << '\n';
  }
  const ErrorSummary s = summarize_errors(reports);
  out << "\nsummary over " << s.count << " pairs\n";
  out << std::left << std::setw(14) << "field" << std::right << std::setw(12) << "mean" << std::setw(12) << "std"
      << std::setw(12) << "median" << '\n';
  const auto f = fields(s);
  for (std::size_t i = 0; i < 6; ++i) {
    out << std::left << std::setw(14) << kFieldNames[i] << std::right << std::setw(12) << fixed(f[i].mean, 4)
        << std::setw(12) << fixed(f[i].std, 4) << std::setw(12) << fixed(f[i].median, 4) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// score

struct ScoreArgs {
  std::string trajectory;
  std::string scenes;
  std::string scene_name;
  std::string reference;
  std::string runs_dir;
  std::string reference_dir;
  std::string matrix;
  std::optional<double> needle_radius;
  std::optional<double> arc_deg;
};

std::string level_text(const GeneralityScore& s) { return fixed(s.level, 1); }

int cmd_score(const Globals& g, const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  const LfdConfig cfg = resolve_config(g);
  NeedleGeometry needle;
  needle.radius = a.needle_radius.value_or(cfg.needle.radius);
  needle.arc_angle = a.arc_deg.value_or(cfg.needle.arc_angle_deg) * std::numbers::pi / 180.0;
  needle.validate();
  const double reasonable = cfg.scene.reasonable_tol;

  if (!fs::exists(a.scenes)) throw Error("scene file not found: " + a.scenes);
  const auto scenes = load_scenes(a.scenes, cfg.scene.entry_tol, cfg.scene.exit_tol);
  std::map<std::string, SutureScene> by_name;
  for (const auto& s : scenes) by_name.emplace(s.name, s.scene);

  auto tips_of = [&](const fs::path& p) { return needle_tip_path(load_trajectory(p).trajectory, needle); };

  if (a.runs_dir.empty()) {
    if (a.trajectory.empty()) throw UsageError("score needs a trajectory file or --runs-dir");
    if (!a.matrix.empty() || !a.reference_dir.empty()) {
      throw UsageError("--matrix and --reference-dir apply to batch scoring with --runs-dir");
    }
    const auto tips = tips_of(a.trajectory);
    std::optional<std::vector<Vec3>> ref;
    if (!a.reference.empty()) ref = tips_of(a.reference);
    bool any = false;
    for (const auto& s : scenes) {
      if (!a.scene_name.empty() && s.name != a.scene_name) continue;
      any = true;
      std::optional<std::span<const Vec3>> ref_span;
      if (ref) ref_span = std::span<const Vec3>(*ref);
      const GeneralityScore score = score_generality(tips, s.scene, ref_span, reasonable);
      print_warnings(err, s.name, score.warnings);
      out << s.name << "  level " << level_text(score) << "  reason " << reason_name(score.reason) << '\n';
    }
    if (!any) throw Error("scene '" + a.scene_name + "' not in " + a.scenes);
    return kExitOk;
  }

  if (!a.trajectory.empty() || !a.reference.empty()) {
    throw UsageError("batch scoring takes --runs-dir (and --reference-dir), not single files");
  }
  // Runs are named <marker>__<training>.traj; the marker names a scene.
  std::set<std::string> markers, trainings;
  std::map<std::pair<std::string, std::string>, GeneralityScore> cells;
  std::vector<CompletionReason> reasons;
  for (const auto& name : trajectory_names(a.runs_dir)) {
    const std::string stem = fs::path(name).stem().string();
    const auto sep = stem.find("__");
    if (sep == std::string::npos || sep == 0 || sep + 2 >= stem.size()) {
      throw Error("run file '" + name + "' is not named <marker>__<training>.traj");
    }
    const std::string marker = stem.substr(0, sep);
    const std::string training = stem.substr(sep + 2);
    const auto it = by_name.find(marker);
    if (it == by_name.end()) throw Error("run '" + name + "' names unknown scene '" + marker + "'");

    std::optional<std::vector<Vec3>> ref;
    if (!a.reference_dir.empty()) {
      const fs::path rp = fs::path(a.reference_dir) / (marker + ".traj");
      if (fs::exists(rp)) ref = tips_of(rp);
    }
    std::optional<std::span<const Vec3>> ref_span;
    if (ref) ref_span = std::span<const Vec3>(*ref);
    const GeneralityScore score = score_generality(tips_of(fs::path(a.runs_dir) / name), it->second, ref_span,
                                                   reasonable);
    print_warnings(err, stem, score.warnings);
    out << stem << "  level " << level_text(score) << "  reason " << reason_name(score.reason) << '\n';
    markers.insert(marker);
    trainings.insert(training);
    reasons.push_back(score.reason);
    cells.emplace(std::make_pair(marker, training), score);
  }
  if (reasons.empty()) throw Error("no runs found in " + a.runs_dir);
  const double mean = mean_generality(reasons);
  out << "runs " << reasons.size() << "  mean " << format_number(mean) << '\n';

  if (!a.matrix.empty()) {
    std::ofstream m(a.matrix);
    if (!m) throw Error("cannot open " + a.matrix + " for writing");
    m << "# generality levels: rows marker pairs, columns training pairs, '-' not run\n";
    m << "marker";
    for (const auto& t : trainings) m << ' ' << t;
    m << '\n';
    for (const auto& mk : markers) {
      m << mk;
      for (const auto& t : trainings) {
        const auto c = cells.find({mk, t});
        m << ' ' << (c == cells.end() ? std::string("-") : level_text(c->second));
      }
      m << '\n';
    }
    m << "mean " << format_number(mean) << '\n';
    if (!m) throw Error("failed writing " + a.matrix);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learning-from-demonstration toolkit for suturing motions", "lfd"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Globals g;
  app.add_option("--config", g.config_path, std::string("JSON config file (default: $") + kConfigEnvVar + ")");
  app.add_option("--profile", g.profile, "Hyperparameter profile")->check(CLI::IsMember({"task-ii", "task-iv"}));

  SegmentArgs seg;
  auto* c_seg = app.add_subcommand("segment", "Split a recording at pauses");
  c_seg->add_option("input", seg.input, "Trajectory file")->required();
  c_seg->add_option("--out-dir", seg.out_dir, "Directory for segment files and the manifest")->required();
  c_seg->add_option("--prefix", seg.prefix, "Segment file prefix (default: input stem)");

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Fit a paired position/orientation model to one segment");
  c_fit->add_option("input", fit.input, "Segment trajectory file")->required();
  c_fit->add_option("--out", fit.output, "Model file to write")->required();

  RolloutArgs ro;
  auto* c_ro = app.add_subcommand("rollout", "Regenerate a trajectory from a model");
  c_ro->add_option("model", ro.model, "Model file")->required();
  c_ro->add_option("--out", ro.output, "Trajectory file to write")->required();
  c_ro->add_option("--start", ro.start, "Start position x,y,z (m)");
  c_ro->add_option("--goal", ro.goal, "Goal position x,y,z (m)");
  c_ro->add_option("--start-quat", ro.start_quat, "Start orientation w,x,y,z");
  c_ro->add_option("--goal-quat", ro.goal_quat, "Goal orientation w,x,y,z");
  c_ro->add_option("--points", ro.points, "Number of output samples (default: model profile)");
  c_ro->add_option("--horizon-scale", ro.horizon_scale, "Integrate this multiple of the nominal duration");

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("eval", "Compare regenerated trajectories with references");
  c_ev->add_option("reference", ev.reference, "Reference trajectory file");
  c_ev->add_option("test", ev.test, "Test trajectory file");
  c_ev->add_option("--ref-dir", ev.ref_dir, "Batch mode: directory of reference .traj files");
  c_ev->add_option("--test-dir", ev.test_dir, "Batch mode: directory of test .traj files with matching names");
  c_ev->add_flag("--json", ev.json, "Machine-readable output");

  ScoreArgs sc;
  auto* c_sc = app.add_subcommand("score", "Grade needle trajectories against suture scenes");
  c_sc->add_option("trajectory", sc.trajectory, "Needle-center trajectory file");
  c_sc->add_option("--scenes", sc.scenes, "Scene file")->required();
  c_sc->add_option("--scene", sc.scene_name, "Score against this scene only");
  c_sc->add_option("--reference", sc.reference, "Reference trajectory for partial-credit grading");
  c_sc->add_option("--needle-radius", sc.needle_radius, "Needle radius (m)");
  c_sc->add_option("--arc-deg", sc.arc_deg, "Needle arc angle (degrees)");
  c_sc->add_option("--runs-dir", sc.runs_dir, "Batch mode: directory of <marker>__<training>.traj runs");
  c_sc->add_option("--reference-dir", sc.reference_dir, "Batch mode: directory of <marker>.traj references");
  c_sc->add_option("--matrix", sc.matrix, "Batch mode: write the marker x training level matrix here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (c_seg->parsed()) return cmd_segment(g, seg, out, err);
    if (c_fit->parsed()) return cmd_fit(g, fit, out, err);
    if (c_ro->parsed()) return cmd_rollout(g, ro, out, err);
    if (c_ev->parsed()) return cmd_eval(g, ev, out, err);
    if (c_sc->parsed()) return cmd_score(g, sc, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace lfd::cli
