#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tiltvtol/sim.hpp"

namespace tiltvtol {

namespace {

using json = nlohmann::json;

// ---- enums ----------------------------------------------------------------

template <typename E>
struct EnumNames;

template <>
struct EnumNames<PrimaryMode> {
  static constexpr std::pair<PrimaryMode, const char*> v[] = {{PrimaryMode::kVelocity, "velocity"},
                                                              {PrimaryMode::kPosition, "position"}};
};
template <>
struct EnumNames<SecondaryMode> {
  static constexpr std::pair<SecondaryMode, const char*> v[] = {
      {SecondaryMode::kDirection, "direction"}, {SecondaryMode::kAttitude, "attitude"}};
};
template <>
struct EnumNames<InnerLoopMode> {
  static constexpr std::pair<InnerLoopMode, const char*> v[] = {
      {InnerLoopMode::kFull, "full"},
      {InnerLoopMode::kReduced, "reduced"},
      {InnerLoopMode::kIdeal, "ideal"}};
};
template <>
struct EnumNames<RateSource> {
  static constexpr std::pair<RateSource, const char*> v[] = {{RateSource::kFiltered, "filtered"},
                                                             {RateSource::kModel, "model"}};
};
template <>
struct EnumNames<TrajectoryKind> {
  static constexpr std::pair<TrajectoryKind, const char*> v[] = {
      {TrajectoryKind::kLissajous, "lissajous"},
      {TrajectoryKind::kHover, "hover"},
      {TrajectoryKind::kConstantVelocity, "constant_velocity"}};
};

template <typename E>
std::string enum_name(E e) {
  for (const auto& [k, s] : EnumNames<E>::v) {
    if (k == e) return s;
  }
  return "?";
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json mat_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return rows;
}

// ---- strict reader ----------------------------------------------------------

/// Walks one JSON object, collecting type errors and unknown keys instead of
/// stopping at the first one.
class Reader {
 public:
  Reader(const json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {
    if (!obj_.is_object()) {
      fail("", "expected an object");
      ok_ = false;
    }
  }

  ~Reader() {
    if (!ok_) return;
    for (const auto& [key, _] : obj_.items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        fail(key, "unknown key");
      }
    }
  }

  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  void number(const char* key, double& out) {
    if (const json* j = find(key)) {
      if (j->is_number()) {
        out = j->get<double>();
      } else {
        fail(key, "expected a number");
      }
    }
  }

  void integer(const char* key, int& out) {
    if (const json* j = find(key)) {
      if (j->is_number_integer() && j->get<long long>() >= std::numeric_limits<int>::min() &&
          j->get<long long>() <= std::numeric_limits<int>::max()) {
        out = j->get<int>();
      } else {
        fail(key, "expected an integer");
      }
    }
  }

  void unsigned64(const char* key, std::uint64_t& out) {
    if (const json* j = find(key)) {
      if (j->is_number_unsigned() || (j->is_number_integer() && j->get<long long>() >= 0)) {
        out = j->get<std::uint64_t>();
      } else {
        fail(key, "expected a non-negative integer");
      }
    }
  }

  void string(const char* key, std::string& out) {
    if (const json* j = find(key)) {
      if (j->is_string()) {
        out = j->get<std::string>();
      } else {
        fail(key, "expected a string");
      }
    }
  }

  void vec3(const char* key, Vec3& out) {
    if (const json* j = find(key)) {
      if (!read_vec(*j, out)) fail(key, "expected an array of 3 numbers");
    }
  }

  void mat3(const char* key, Mat3& out) {
    if (const json* j = find(key)) {
      bool good = j->is_array() && j->size() == 3;
      Mat3 m = Mat3::Zero();
      for (int r = 0; good && r < 3; ++r) {
        Vec3 row;
        good = read_vec((*j)[static_cast<std::size_t>(r)], row);
        m.row(r) = row.transpose();
      }
      if (good) {
        out = m;
      } else {
        fail(key, "expected a 3x3 array of numbers (row-major)");
      }
    }
  }

  /// A positive number or null (no limit).
  void optional_number(const char* key, std::optional<double>& out) {
    if (const json* j = find(key)) {
      if (j->is_null()) {
        out.reset();
      } else if (j->is_number()) {
        out = j->get<double>();
      } else {
        fail(key, "expected a number or null");
      }
    }
  }

  template <typename E>
  void enumeration(const char* key, E& out) {
    if (const json* j = find(key)) {
      if (j->is_string()) {
        const auto s = j->get<std::string>();
        for (const auto& [k, name] : EnumNames<E>::v) {
          if (s == name) {
            out = k;
            return;
          }
        }
      }
      std::string choices;
      for (const auto& [k, name] : EnumNames<E>::v) {
        choices += (choices.empty() ? "" : ", ") + std::string(name);
      }
      fail(key, "expected one of: " + choices);
    }
  }

  /// Nested object; returns nullptr when absent.
  const json* object(const char* key) { return find(key); }

  std::string child_path(const char* key) const {
    return path_.empty() ? std::string(key) : path_ + "." + key;
  }

 private:
  const json* find(const char* key) {
    if (!ok_) return nullptr;
    seen_.emplace_back(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  static bool read_vec(const json& j, Vec3& out) {
    if (!j.is_array() || j.size() != 3) return false;
    for (std::size_t i = 0; i < 3; ++i) {
      if (!j[i].is_number()) return false;
    }
    out = Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
    return true;
  }

  void fail(const std::string& key, const std::string& what) {
    const std::string where = key.empty() ? path_ : child_path(key.c_str());
    errors_.push_back((where.empty() ? std::string("<root>") : where) + ": " + what);
  }

  const json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::vector<std::string> seen_;
  bool ok_ = true;
};

// ---- sections ---------------------------------------------------------------

json to_json(const VehicleParams& p) {
  return {{"mass", p.mass},
          {"inertia", mat_json(p.inertia)},
          {"h", p.h},
          {"d", p.d},
          {"mu", p.mu},
          {"kappa", p.kappa},
          {"c_drag", p.c_drag},
          {"c_induced", p.c_induced},
          {"delta", p.delta},
          {"gravity", p.gravity}};
}

void read(Reader& r, VehicleParams& p) {
  r.number("mass", p.mass);
  r.mat3("inertia", p.inertia);
  r.number("h", p.h);
  r.number("d", p.d);
  r.number("mu", p.mu);
  r.number("kappa", p.kappa);
  r.number("c_drag", p.c_drag);
  r.number("c_induced", p.c_induced);
  r.number("delta", p.delta);
  r.number("gravity", p.gravity);
}

json to_json(const Gains& g) {
  return {{"k1", g.k1},           {"k2", g.k2},       {"k3", g.k3},
          {"k4", g.k4},           {"k_u", g.k_u},     {"k_omega", g.k_omega},
          {"k_integral", g.k_integral}, {"beta", g.beta}, {"eta", g.eta},
          {"k_z", g.k_z},         {"k_zdot", g.k_zdot}, {"zddot_max", g.zddot_max},
          {"delta_z", g.delta_z}};
}

void read(Reader& r, Gains& g) {
  r.number("k1", g.k1);
  r.number("k2", g.k2);
  r.number("k3", g.k3);
  r.number("k4", g.k4);
  r.number("k_u", g.k_u);
  r.number("k_omega", g.k_omega);
  r.number("k_integral", g.k_integral);
  r.number("beta", g.beta);
  r.number("eta", g.eta);
  r.number("k_z", g.k_z);
  r.number("k_zdot", g.k_zdot);
  r.number("zddot_max", g.zddot_max);
  r.number("delta_z", g.delta_z);
}

json to_json(const Thresholds& t) {
  return {{"min_force", t.min_force},
          {"min_alignment", t.min_alignment},
          {"antipodal_attitude", t.antipodal_attitude},
          {"omega_max", t.omega_max},
          {"rate_filter_tau", t.rate_filter_tau}};
}

void read(Reader& r, Thresholds& t) {
  r.number("min_force", t.min_force);
  r.number("min_alignment", t.min_alignment);
  r.number("antipodal_attitude", t.antipodal_attitude);
  r.number("omega_max", t.omega_max);
  r.number("rate_filter_tau", t.rate_filter_tau);
}

json to_json(const SecondaryTarget& s) {
  return {{"direction", vec_json(s.direction)},
          {"spin", s.spin},
          {"attitude", mat_json(s.attitude)}};
}

void read(Reader& r, SecondaryTarget& s) {
  r.vec3("direction", s.direction);
  r.number("spin", s.spin);
  r.mat3("attitude", s.attitude);
}

json to_json(const TrajectoryConfig& t) {
  return {{"kind", enum_name(t.kind)},
          {"frequency", t.frequency},
          {"amplitude", t.amplitude},
          {"position", vec_json(t.position)},
          {"velocity", vec_json(t.velocity)}};
}

void read(Reader& r, TrajectoryConfig& t) {
  r.enumeration("kind", t.kind);
  r.number("frequency", t.frequency);
  r.number("amplitude", t.amplitude);
  r.vec3("position", t.position);
  r.vec3("velocity", t.velocity);
}

json to_json(const InitialState& s) {
  return {{"position", vec_json(s.position)},
          {"velocity", vec_json(s.velocity)},
          {"attitude", mat_json(s.attitude)},
          {"omega", vec_json(s.omega)},
          {"thrust_dir", vec_json(s.thrust_dir)},
          {"position_jitter", s.position_jitter}};
}

void read(Reader& r, InitialState& s) {
  r.vec3("position", s.position);
  r.vec3("velocity", s.velocity);
  r.mat3("attitude", s.attitude);
  r.vec3("omega", s.omega);
  r.vec3("thrust_dir", s.thrust_dir);
  r.number("position_jitter", s.position_jitter);
}

template <typename T>
void section(Reader& parent, const char* key, T& out, std::vector<std::string>& errors) {
  if (const json* j = parent.object(key)) {
    Reader child(*j, parent.child_path(key), errors);
    read(child, out);
  }
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["vehicle"] = to_json(c.vehicle);
  j["gains"] = to_json(c.gains);
  j["thresholds"] = to_json(c.thresholds);
  j["primary"] = enum_name(c.primary);
  j["secondary"] = enum_name(c.secondary);
  j["inner_loop"] = enum_name(c.inner_loop);
  j["rates"] = enum_name(c.rates);
  j["secondary_target"] = to_json(c.secondary_target);
  j["trajectory"] = to_json(c.trajectory);
  j["initial_state"] = to_json(c.initial);
  j["duration"] = c.duration;
  j["dt"] = c.dt;
  j["control_decimation"] = c.control_decimation;
  j["csv_decimate"] = c.csv_decimate;
  j["transient"] = c.transient;
  j["wind"] = vec_json(c.wind);
  j["rotor_max_speed_sq"] =
      c.rotor_limits.max_speed_sq ? json(*c.rotor_limits.max_speed_sq) : json(nullptr);
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  return j;
}

ScenarioConfig from_json(const json& doc) {
  ScenarioConfig c;
  std::vector<std::string> errors;
  {
    Reader r(doc, "", errors);
    r.string("name", c.name);
    section(r, "vehicle", c.vehicle, errors);
    section(r, "gains", c.gains, errors);
    section(r, "thresholds", c.thresholds, errors);
    r.enumeration("primary", c.primary);
    r.enumeration("secondary", c.secondary);
    r.enumeration("inner_loop", c.inner_loop);
    r.enumeration("rates", c.rates);
    section(r, "secondary_target", c.secondary_target, errors);
    section(r, "trajectory", c.trajectory, errors);
    section(r, "initial_state", c.initial, errors);
    r.number("duration", c.duration);
    r.number("dt", c.dt);
    r.integer("control_decimation", c.control_decimation);
    r.integer("csv_decimate", c.csv_decimate);
    r.number("transient", c.transient);
    r.vec3("wind", c.wind);
    r.optional_number("rotor_max_speed_sq", c.rotor_limits.max_speed_sq);
    r.string("output_dir", c.output_dir);
    r.unsigned64("seed", c.seed);
  }

  if (errors.empty()) {
    c.validate();
    return c;
  }

  // Report schema problems together with whatever validation finds on the
  // partially read config.
  try {
    c.validate();
  } catch (const Error& e) {
    std::istringstream is(e.what());
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
      const auto first = line.find_first_not_of(' ');
      if (first != std::string::npos) errors.push_back(line.substr(first));
    }
  }
  std::ostringstream os;
  os << "invalid config (" << errors.size() << " problems):";
  for (const auto& e : errors) os << "\n  " << e;
  throw Error(ErrorCode::kInvalidConfig, os.str());
}

json parse_text(std::string_view text, const std::string& origin) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidConfig, origin + ": " + e.what());
  }
}

}  // namespace

ScenarioConfig parse_config(std::string_view json_text) {
  return from_json(parse_text(json_text, "config"));
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(parse_text(buf.str(), path.string()));
}

std::string dump_config(const ScenarioConfig& config) { return to_json(config).dump(2); }

void save_config(const ScenarioConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << dump_config(config) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

ScenarioConfig with_override(const ScenarioConfig& base, std::string_view dotted_key,
                             std::string_view json_value) {
  json doc = to_json(base);
  const json value = parse_text(json_value, std::string(dotted_key));

  json* node = &doc;
  std::string key(dotted_key);
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (!node->is_object() || !node->contains(part)) {
      throw Error(ErrorCode::kInvalidConfig, "unknown parameter '" + key + "'");
    }
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = value;
  return from_json(doc);
}

std::string metrics_json(const Metrics& m, const RunDiagnostics& d) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j = {{"rows", m.rows},
            {"max_tilt_deg", num(m.max_tilt_deg)},
            {"max_inclination_deg", num(m.max_inclination_deg)},
            {"max_inclination_steady_deg", num(m.max_inclination_steady_deg)},
            {"rms_position_error", num(m.rms_position_error)},
            {"max_position_error_steady", num(m.max_position_error_steady)},
            {"final_position_error", num(m.final_position_error)},
            {"saturation_duty_cycle", num(m.saturation_duty_cycle)},
            {"mean_ground_speed", num(m.mean_ground_speed)},
            {"diagnostics",
             {{"max_identity_residual", num(d.max_identity_residual)},
              {"max_unit_norm_error", num(d.max_unit_norm_error)},
              {"max_tilt_sine", num(d.max_tilt_sine)},
              {"max_integrator_norm", num(d.max_integrator_norm)},
              {"control_steps", d.control_steps},
              {"infeasible_steps", d.infeasible_steps}}}};
  return j.dump(2);
}

}  // namespace tiltvtol
