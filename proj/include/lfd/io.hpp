#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lfd/dmp_orientation.hpp"
#include "lfd/dmp_position.hpp"
#include "lfd/pose_dmp.hpp"
#include "lfd/scene.hpp"
#include "lfd/trajectory.hpp"

namespace lfd {

// All formats are line-oriented text: one keyword-led record per line, '#' starts a
// comment line, numbers are written with 17 significant digits so that finite doubles
// survive a write/read cycle exactly. Units are meters, seconds and scalar-first
// quaternions; the header states them and readers reject anything else.

/// Shortest-to-parse canonical rendering used by every writer.
std::string format_number(double x);

struct TrajectoryFile {
  TimedPoseTrajectory trajectory;
  std::string frame = "world";
};

void write_trajectory(std::ostream& out, const TrajectoryFile& file);
/// Throws ParseError with the offending line number.
TrajectoryFile read_trajectory(std::istream& in);

void save_trajectory(const std::filesystem::path& path, const TrajectoryFile& file);
TrajectoryFile load_trajectory(const std::filesystem::path& path);

enum class ModelKind { Position, Orientation, Paired };

struct ModelFile {
  ModelKind kind = ModelKind::Paired;
  std::string profile;
  std::size_t n_pts = 500;  // default rollout resolution
  std::optional<PositionDmpModel> position;
  std::optional<OrientationDmpModel> orientation;

  static ModelFile paired(const PoseDmpModel& model);
  /// Throws InvalidArgument unless both parts are present.
  PoseDmpModel pose_model() const;
};

void write_model(std::ostream& out, const ModelFile& file);
ModelFile read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path);

struct NamedScene {
  std::string name;
  SutureScene scene;
};

/// A scene library holds one or more named marker pairs.
void write_scenes(std::ostream& out, const std::vector<NamedScene>& scenes);
/// Tolerances missing from a block take `default_entry_tol` / `default_exit_tol`.
std::vector<NamedScene> read_scenes(std::istream& in, double default_entry_tol = 0.0015,
                                    double default_exit_tol = 0.0015);

void save_scenes(const std::filesystem::path& path, const std::vector<NamedScene>& scenes);
std::vector<NamedScene> load_scenes(const std::filesystem::path& path, double default_entry_tol = 0.0015,
                                    double default_exit_tol = 0.0015);

}  // namespace lfd
