#include "lfd/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "lfd/errors.hpp"

namespace lfd {

namespace {

constexpr const char* kTrajectoryFormat = "lfd-trajectory";
constexpr const char* kModelFormat = "lfd-model";
constexpr const char* kSceneFormat = "lfd-scene";
constexpr int kVersion = 1;

struct Line {
  std::size_t number = 0;
  std::vector<std::string> tokens;
};

// Non-empty, non-comment lines split on whitespace.
std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::istringstream ss(raw);
    Line line{number, {}};
    std::string tok;
    while (ss >> tok) line.tokens.push_back(tok);
    if (line.tokens.empty() || line.tokens.front().front() == '#') continue;
    lines.push_back(std::move(line));
  }
  return lines;
}

double parse_number(const std::string& tok, std::size_t line) {
  double value = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError("expected a finite number, got '" + tok + "'", line);
  }
  return value;
}

std::size_t parse_count(const std::string& tok, std::size_t line) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("expected a non-negative integer, got '" + tok + "'", line);
  }
  return value;
}

std::vector<double> numbers(const Line& line, std::size_t from, std::size_t expected) {
  if (line.tokens.size() != from + expected) {
    throw ParseError("'" + line.tokens.front() + "' expects " + std::to_string(expected) + " values, got " +
                         std::to_string(line.tokens.size() - from),
                     line.number);
  }
  std::vector<double> out;
  out.reserve(expected);
  for (std::size_t i = from; i < line.tokens.size(); ++i) out.push_back(parse_number(line.tokens[i], line.number));
  return out;
}

void expect_header(const std::vector<Line>& lines, const char* format) {
  if (lines.empty()) throw ParseError(std::string("empty file, expected '") + format + "' header", 0);
  const Line& h = lines.front();
  if (h.tokens.size() != 3 || h.tokens[0] != "format" || h.tokens[1] != format) {
    throw ParseError(std::string("expected 'format ") + format + " <version>'", h.number);
  }
  if (parse_count(h.tokens[2], h.number) != static_cast<std::size_t>(kVersion)) {
    throw ParseError("unsupported format version " + h.tokens[2], h.number);
  }
}

void write_values(std::ostream& out, const std::string& key, std::span<const double> values) {
  out << key;
  for (double v : values) out << ' ' << format_number(v);
  out << '\n';
}

void write_vec3(std::ostream& out, const std::string& key, const Vec3& v) {
  const double a[3] = {v.x(), v.y(), v.z()};
  write_values(out, key, a);
}

void write_quat(std::ostream& out, const std::string& key, const UnitQuat& q) {
  const auto a = q.to_array();
  write_values(out, key, a);
}

void write_eigen(std::ostream& out, const std::string& key, const Eigen::VectorXd& v) {
  write_values(out, key, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

// Keyed records of a model file.
class Records {
 public:
  explicit Records(const std::vector<Line>& lines) {
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const Line& l = lines[i];
      if (!by_key_.emplace(l.tokens.front(), l).second) {
        throw ParseError("duplicate record '" + l.tokens.front() + "'", l.number);
      }
    }
  }

  bool has(const std::string& key) const { return by_key_.count(key) != 0; }

  const Line& get(const std::string& key) const {
    const auto it = by_key_.find(key);
    if (it == by_key_.end()) throw ParseError("missing record '" + key + "'", 0);
    return it->second;
  }

  std::vector<double> values(const std::string& key, std::size_t expected) const {
    return numbers(get(key), 1, expected);
  }

  double scalar(const std::string& key) const { return values(key, 1).front(); }

  Vec3 vec3(const std::string& key) const {
    const auto v = values(key, 3);
    return {v[0], v[1], v[2]};
  }

  UnitQuat quat(const std::string& key) const {
    const auto v = values(key, 4);
    const Line& l = get(key);
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
    if (std::abs(n - 1.0) > 1e-6) throw ParseError("quaternion '" + key + "' is not unit-norm", l.number);
    return {v[0], v[1], v[2], v[3]};
  }

  Eigen::VectorXd vector(const std::string& key, std::size_t expected) const {
    const auto v = values(key, expected);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  std::size_t count(const std::string& key) const {
    const Line& l = get(key);
    if (l.tokens.size() != 2) throw ParseError("'" + key + "' expects one integer", l.number);
    return parse_count(l.tokens[1], l.number);
  }

  const std::string& word(const std::string& key) const {
    const Line& l = get(key);
    if (l.tokens.size() != 2) throw ParseError("'" + key + "' expects one word", l.number);
    return l.tokens[1];
  }

 private:
  std::map<std::string, Line> by_key_;
};

void write_section(std::ostream& out, const std::string& prefix, const DmpGains& gains, const BasisSet& basis,
                   const AxisWeights& weights, double duration) {
  const double g[2] = {gains.alpha, gains.beta};
  write_values(out, prefix + ".gains", g);
  const double d[1] = {duration};
  write_values(out, prefix + ".duration", d);
  out << prefix << ".n_bfs " << basis.size() << '\n';
  write_values(out, prefix + ".centers", basis.centers);
  write_values(out, prefix + ".widths", basis.widths);
  write_eigen(out, prefix + ".weights.x", weights[0]);
  write_eigen(out, prefix + ".weights.y", weights[1]);
  write_eigen(out, prefix + ".weights.z", weights[2]);
}

struct Section {
  DmpGains gains;
  BasisSet basis;
  AxisWeights weights;
  double duration = 1.0;
};

Section read_section(const Records& rec, const std::string& prefix) {
  Section s;
  const auto g = rec.values(prefix + ".gains", 2);
  s.gains = {g[0], g[1]};
  s.duration = rec.scalar(prefix + ".duration");
  const std::size_t n = rec.count(prefix + ".n_bfs");
  if (n == 0) throw ParseError(prefix + ".n_bfs must be positive", rec.get(prefix + ".n_bfs").number);
  s.basis.centers = rec.values(prefix + ".centers", n);
  s.basis.widths = rec.values(prefix + ".widths", n);
  s.weights[0] = rec.vector(prefix + ".weights.x", n);
  s.weights[1] = rec.vector(prefix + ".weights.y", n);
  s.weights[2] = rec.vector(prefix + ".weights.z", n);
  return s;
}

const char* kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Position: return "position";
    case ModelKind::Orientation: return "orientation";
    case ModelKind::Paired: return "paired";
  }
  return "paired";
}

template <typename F>
void with_output_file(const std::filesystem::path& path, F&& write) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write(out);
  if (!out) throw Error("failed writing " + path.string());
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  return in;
}

}  // namespace

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Trajectories

void write_trajectory(std::ostream& out, const TrajectoryFile& file) {
  const TimedPoseTrajectory& t = file.trajectory;
  out << "format " << kTrajectoryFormat << ' ' << kVersion << '\n';
  out << "units m s wxyz\n";
  out << "frame " << file.frame << '\n';
  if (t.label) out << "label " << *t.label << '\n';
  out << "columns t x y z qw qx qy qz\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto q = t.orientations[k].to_array();
    out << format_number(t.stamps[k]) << ' ' << format_number(t.positions[k].x()) << ' '
        << format_number(t.positions[k].y()) << ' ' << format_number(t.positions[k].z()) << ' '
        << format_number(q[0]) << ' ' << format_number(q[1]) << ' ' << format_number(q[2]) << ' '
        << format_number(q[3]) << '\n';
  }
}

TrajectoryFile read_trajectory(std::istream& in) {
  const std::vector<Line> lines = tokenize(in);
  expect_header(lines, kTrajectoryFormat);

  TrajectoryFile file;
  TimedPoseTrajectory& t = file.trajectory;
  bool units_seen = false;
  std::size_t i = 1;
  for (; i < lines.size(); ++i) {
    const Line& l = lines[i];
    const std::string& key = l.tokens.front();
    if (key == "columns") {
      const std::vector<std::string> expected = {"columns", "t", "x", "y", "z", "qw", "qx", "qy", "qz"};
      if (l.tokens != expected) throw ParseError("expected 'columns t x y z qw qx qy qz'", l.number);
      ++i;
      break;
    }
    if (key == "units") {
      if (l.tokens.size() != 4 || l.tokens[1] != "m" || l.tokens[2] != "s" || l.tokens[3] != "wxyz") {
        throw ParseError("unsupported units, expected 'units m s wxyz'", l.number);
      }
      units_seen = true;
    } else if (key == "frame") {
      if (l.tokens.size() != 2) throw ParseError("'frame' expects one word", l.number);
      file.frame = l.tokens[1];
    } else if (key == "label") {
      if (l.tokens.size() != 2) throw ParseError("'label' expects one word", l.number);
      t.label = l.tokens[1];
    } else {
      throw ParseError("unknown header record '" + key + "'", l.number);
    }
  }
  if (!units_seen) throw ParseError("missing 'units' header", 0);
  if (i >= lines.size()) throw ParseError("missing 'columns' header or data rows", 0);

  for (; i < lines.size(); ++i) {
    const Line& l = lines[i];
    if (l.tokens.size() != 8) {
      throw ParseError("row expects 8 values (t x y z qw qx qy qz), got " + std::to_string(l.tokens.size()),
                       l.number);
    }
    std::array<double, 8> v{};
    for (std::size_t c = 0; c < 8; ++c) v[c] = parse_number(l.tokens[c], l.number);
    if (!t.stamps.empty() && !(v[0] > t.stamps.back())) {
      throw ParseError("time stamps must strictly increase", l.number);
    }
    const double qn = std::sqrt(v[4] * v[4] + v[5] * v[5] + v[6] * v[6] + v[7] * v[7]);
    if (std::abs(qn - 1.0) > 1e-6) {
      throw ParseError("quaternion is not unit-norm (|q| = " + format_number(qn) + ")", l.number);
    }
    t.stamps.push_back(v[0]);
    t.positions.emplace_back(v[1], v[2], v[3]);
    t.orientations.emplace_back(v[4], v[5], v[6], v[7]);
  }
  if (t.size() < 2) throw ParseError("trajectory needs at least two rows", 0);
  t = ingest(std::move(t));
  return file;
}

void save_trajectory(const std::filesystem::path& path, const TrajectoryFile& file) {
  with_output_file(path, [&](std::ostream& out) { write_trajectory(out, file); });
}

TrajectoryFile load_trajectory(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_trajectory(in);
}

// ---------------------------------------------------------------------------
// Models

ModelFile ModelFile::paired(const PoseDmpModel& model) {
  ModelFile f;
  f.kind = ModelKind::Paired;
  f.profile = model.profile;
  f.position = model.position;
  f.orientation = model.orientation;
  return f;
}

PoseDmpModel ModelFile::pose_model() const {
  if (!position || !orientation) throw InvalidArgument("model file does not hold a paired model");
  return {*position, *orientation, profile};
}

void write_model(std::ostream& out, const ModelFile& file) {
  const bool want_pos = file.kind != ModelKind::Orientation;
  const bool want_ori = file.kind != ModelKind::Position;
  if (file.n_pts < 2) throw InvalidArgument("write_model: n_pts must be at least 2");
  if ((want_pos && !file.position) || (want_ori && !file.orientation)) {
    throw InvalidArgument("write_model: model kind and contents disagree");
  }
  const CanonicalSystem cs = want_pos ? file.position->canonical : file.orientation->canonical;
  if (want_pos && want_ori &&
      (file.position->canonical.alpha_x != file.orientation->canonical.alpha_x ||
       file.position->canonical.tau != file.orientation->canonical.tau)) {
    throw InvalidArgument("write_model: paired parts must share one canonical system");
  }

  out << "format " << kModelFormat << ' ' << kVersion << '\n';
  out << "kind " << kind_name(file.kind) << '\n';
  if (!file.profile.empty()) out << "profile " << file.profile << '\n';
  out << "n_pts " << file.n_pts << '\n';
  const double c[1] = {cs.alpha_x};
  write_values(out, "canonical.alpha_x", c);
  const double tau[1] = {cs.tau};
  write_values(out, "canonical.tau", tau);
  if (want_pos) {
    const PositionDmpModel& m = *file.position;
    write_vec3(out, "position.y0", m.y0);
    write_vec3(out, "position.g", m.g);
    write_section(out, "position", m.gains, m.basis, m.weights, m.duration);
  }
  if (want_ori) {
    const OrientationDmpModel& m = *file.orientation;
    write_quat(out, "orientation.q0", m.q0);
    write_quat(out, "orientation.g_o", m.g_o);
    write_vec3(out, "orientation.scaling", m.scaling);
    write_section(out, "orientation", m.gains, m.basis, m.weights, m.duration);
  }
}

ModelFile read_model(std::istream& in) {
  const std::vector<Line> lines = tokenize(in);
  expect_header(lines, kModelFormat);
  const Records rec(lines);

  ModelFile file;
  const std::string& kind = rec.word("kind");
  if (kind == "position") {
    file.kind = ModelKind::Position;
  } else if (kind == "orientation") {
    file.kind = ModelKind::Orientation;
  } else if (kind == "paired") {
    file.kind = ModelKind::Paired;
  } else {
    throw ParseError("unknown model kind '" + kind + "'", rec.get("kind").number);
  }
  if (rec.has("profile")) file.profile = rec.word("profile");
  file.n_pts = rec.count("n_pts");
  if (file.n_pts < 2) throw ParseError("n_pts must be at least 2", rec.get("n_pts").number);

  CanonicalSystem cs;
  cs.alpha_x = rec.scalar("canonical.alpha_x");
  cs.tau = rec.scalar("canonical.tau");
  if (!(cs.alpha_x > 0.0 && cs.tau > 0.0)) throw ParseError("canonical parameters must be positive", 0);

  try {
    if (file.kind != ModelKind::Orientation) {
      const Section s = read_section(rec, "position");
      PositionDmpModel m{s.gains, cs, s.basis, s.weights, rec.vec3("position.y0"), rec.vec3("position.g"),
                         s.duration};
      validate(m);
      file.position = std::move(m);
    }
    if (file.kind != ModelKind::Position) {
      const Section s = read_section(rec, "orientation");
      OrientationDmpModel m{s.gains,
                            cs,
                            s.basis,
                            s.weights,
                            rec.quat("orientation.q0"),
                            rec.quat("orientation.g_o"),
                            rec.vec3("orientation.scaling"),
                            s.duration};
      validate(m);
      file.orientation = std::move(m);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("inconsistent model: ") + e.what(), 0);
  }
  return file;
}

void save_model(const std::filesystem::path& path, const ModelFile& file) {
  with_output_file(path, [&](std::ostream& out) { write_model(out, file); });
}

ModelFile load_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_model(in);
}

// ---------------------------------------------------------------------------
// Scenes

void write_scenes(std::ostream& out, const std::vector<NamedScene>& scenes) {
  out << "format " << kSceneFormat << ' ' << kVersion << '\n';
  for (const auto& s : scenes) {
    out << "scene " << s.name << '\n';
    write_vec3(out, "entry", s.scene.entry);
    write_vec3(out, "exit", s.scene.exit);
    const double et[1] = {s.scene.entry_tol};
    write_values(out, "entry_tol", et);
    const double xt[1] = {s.scene.exit_tol};
    write_values(out, "exit_tol", xt);
    write_vec3(out, "normal", s.scene.surface_normal);
  }
}

std::vector<NamedScene> read_scenes(std::istream& in, double default_entry_tol, double default_exit_tol) {
  const std::vector<Line> lines = tokenize(in);
  expect_header(lines, kSceneFormat);

  std::vector<NamedScene> scenes;
  struct Pending {
    NamedScene named;
    bool entry = false;
    bool exit = false;
    std::size_t line = 0;
  };
  std::optional<Pending> cur;
  auto finish = [&]() {
    if (!cur) return;
    if (!cur->entry || !cur->exit) {
      throw ParseError("scene '" + cur->named.name + "' needs both entry and exit", cur->line);
    }
    try {
      cur->named.scene.validate();
    } catch (const Error& e) {
      throw ParseError("scene '" + cur->named.name + "': " + e.what(), cur->line);
    }
    scenes.push_back(std::move(cur->named));
    cur.reset();
  };

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& l = lines[i];
    const std::string& key = l.tokens.front();
    if (key == "scene") {
      finish();
      if (l.tokens.size() != 2) throw ParseError("'scene' expects a name", l.number);
      for (const auto& s : scenes) {
        if (s.name == l.tokens[1]) throw ParseError("duplicate scene '" + l.tokens[1] + "'", l.number);
      }
      cur = Pending{};
      cur->named.name = l.tokens[1];
      cur->named.scene.entry_tol = default_entry_tol;
      cur->named.scene.exit_tol = default_exit_tol;
      cur->line = l.number;
      continue;
    }
    if (!cur) throw ParseError("record '" + key + "' outside a scene block", l.number);
    SutureScene& s = cur->named.scene;
    if (key == "entry") {
      const auto v = numbers(l, 1, 3);
      s.entry = {v[0], v[1], v[2]};
      cur->entry = true;
    } else if (key == "exit") {
      const auto v = numbers(l, 1, 3);
      s.exit = {v[0], v[1], v[2]};
      cur->exit = true;
    } else if (key == "entry_tol") {
      s.entry_tol = numbers(l, 1, 1).front();
    } else if (key == "exit_tol") {
      s.exit_tol = numbers(l, 1, 1).front();
    } else if (key == "normal") {
      const auto v = numbers(l, 1, 3);
      const Vec3 n(v[0], v[1], v[2]);
      if (n.norm() == 0.0) throw ParseError("surface normal must be non-zero", l.number);
      s.surface_normal = std::abs(n.norm() - 1.0) <= 1e-15 ? n : Vec3(n.normalized());
    } else {
      throw ParseError("unknown scene record '" + key + "'", l.number);
    }
  }
  finish();
  if (scenes.empty()) throw ParseError("scene file holds no scenes", 0);
  return scenes;
}

void save_scenes(const std::filesystem::path& path, const std::vector<NamedScene>& scenes) {
  with_output_file(path, [&](std::ostream& out) { write_scenes(out, scenes); });
}

std::vector<NamedScene> load_scenes(const std::filesystem::path& path, double default_entry_tol,
                                    double default_exit_tol) {
  auto in = open_input(path);
  return read_scenes(in, default_entry_tol, default_exit_tol);
}

}  // namespace lfd
