#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "lfd/basis.hpp"
#include "lfd/dmp_position.hpp"
#include "lfd/pose_dmp.hpp"
#include "lfd/preprocess.hpp"

namespace lfd {

/// Resolution settings for one suturing subtask.
struct Profile {
  std::string name;
  std::size_t n_pts = 500;
  std::size_t n_bfs = 100;
  std::size_t n_bfs_o = 40;
};

struct SceneTolerances {
  double entry_tol = 0.0015;       // m
  double exit_tol = 0.0015;        // m
  double reasonable_tol = 0.005;   // m, DTW mean tip error for a partial completion
};

struct NeedleDefaults {
  double radius = 0.01018;       // m
  double arc_angle_deg = 120.0;
};

/// Hyperparameters; default-constructed values are the reference model settings
/// (alpha_x 1, alpha 25, beta 6.25; task-ii 500/100/40, task-iv 100/50/20).
struct LfdConfig {
  CanonicalSystem canonical;
  DmpGains position_gains;
  DmpGains orientation_gains;
  Profile task_ii{"task-ii", 500, 100, 40};
  Profile task_iv{"task-iv", 100, 50, 20};
  SegmentationConfig segmentation;
  SceneTolerances scene;
  NeedleDefaults needle;

  /// "task-ii" or "task-iv"; throws InvalidArgument otherwise.
  const Profile& profile(const std::string& name) const;
  FitSettings fit_settings(const std::string& profile_name) const;
};

/// Environment variable naming a default config file.
inline constexpr const char* kConfigEnvVar = "LFD_CONFIG";

/// JSON config; keys left out keep their defaults. Throws ParseError on malformed input.
LfdConfig load_config(const std::filesystem::path& path);
LfdConfig parse_config(const std::string& json_text);
std::string dump_config(const LfdConfig& cfg);

}  // namespace lfd
