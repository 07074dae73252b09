#include "satprec/config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include <fmt/format.h>

namespace satprec::config {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Thrown by value parsers; the caller adds location and key.
struct BadValue {
  std::string expected;
};

double parse_double(const std::string& v) {
  if (v.empty()) throw BadValue{"a number"};
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || errno == ERANGE) throw BadValue{"a number"};
  return d;
}

template <class Int>
Int parse_int(const std::string& v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw BadValue{"an integer"};
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw BadValue{"true or false"};
}

std::string fmt_double(double d) { return fmt::format("{}", d); }

struct Binding {
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

Binding num(double& ref) {
  return {[&ref](const std::string& v) { ref = parse_double(v); },
          [&ref] { return fmt_double(ref); }};
}
Binding deg(double& ref) {
  return {[&ref](const std::string& v) { ref = deg2rad(parse_double(v)); },
          [&ref] { return fmt_double(rad2deg(ref)); }};
}
Binding integer(int& ref) {
  return {[&ref](const std::string& v) { ref = parse_int<int>(v); },
          [&ref] { return std::to_string(ref); }};
}
Binding boolean(bool& ref) {
  return {[&ref](const std::string& v) { ref = parse_bool(v); },
          [&ref] { return std::string(ref ? "true" : "false"); }};
}
Binding text(std::string& ref) {
  return {[&ref](const std::string& v) { ref = v; }, [&ref] { return ref; }};
}

using Section = std::vector<std::pair<std::string, Binding>>;

// Ordered section table; layers are handled separately.
std::vector<std::pair<std::string, Section>> sections(RunConfig& c) {
  auto& ch = c.channel;
  auto& e = c.env;
  auto& d = c.ddpg;
  Binding seed{[&c](const std::string& v) { c.seed = parse_int<std::uint64_t>(v); },
               [&c] { return std::to_string(c.seed); }};
  Binding optimizer{[&d](const std::string& v) {
                      if (v == "adam") d.optimizer = nn::OptimizerConfig::Kind::adam;
                      else if (v == "sgd") d.optimizer = nn::OptimizerConfig::Kind::sgd;
                      else throw BadValue{"adam or sgd"};
                    },
                    [&d] {
                      return std::string(d.optimizer == nn::OptimizerConfig::Kind::adam ? "adam" : "sgd");
                    }};
  return {
      {"run", {{"seed", seed}, {"output_dir", text(c.output_dir)}}},
      {"constellation", {{"earth_rotation", boolean(c.constellation.earth_rotation)}}},
      {"channel",
       {{"frequency_hz", num(ch.frequency)},
        {"m_x", integer(ch.geom.m_x)},
        {"m_y", integer(ch.geom.m_y)},
        {"spacing_over_wavelength", num(ch.geom.spacing_over_wavelength)},
        {"min_paths", integer(ch.min_paths)},
        {"max_paths", integer(ch.max_paths)},
        {"kappa_min", num(ch.kappa_min)},
        {"kappa_max", num(ch.kappa_max)},
        {"refresh_period_s", num(ch.refresh_period)},
        {"user_speed_mps", num(ch.user_speed)},
        {"max_excess_delay_s", num(ch.max_excess_delay)},
        {"gain_db", num(ch.gain_db)},
        {"reference_altitude_m", num(ch.reference_altitude)},
        {"reference_elevation_deg", deg(ch.reference_elevation)}}},
      {"env",
       {{"delay_steps", integer(e.delay_steps)},
        {"delta_t_s", num(e.delta_t)},
        {"users", integer(e.users)},
        {"power_w", num(e.power)},
        {"temperature_k", num(e.temperature)},
        {"bandwidth_fraction", num(e.bandwidth_fraction)},
        {"sigma2_w", num(e.sigma2)},
        {"eta1", num(e.eta1)},
        {"eta2", num(e.eta2)},
        {"obs_scale", num(e.obs_scale)},
        {"episode_length", integer(e.episode_length)},
        {"start_time_s", num(e.start_time)},
        {"epsilon", num(e.epsilon)},
        {"min_elevation_deg", deg(e.min_elevation)},
        {"center_latitude_deg", deg(e.center_latitude)},
        {"center_longitude_deg", deg(e.center_longitude)},
        {"coverage_radius_m", num(e.coverage_radius)}}},
      {"ddpg",
       {{"discount", num(d.discount)},
        {"tau", num(d.tau)},
        {"buffer_capacity", integer(d.buffer_capacity)},
        {"batch_size", integer(d.batch_size)},
        {"actor_lr", num(d.actor_lr)},
        {"critic_lr", num(d.critic_lr)},
        {"noise_var_init", num(d.noise_var_init)},
        {"noise_decay", num(d.noise_decay)},
        {"noise_var_floor", num(d.noise_var_floor)},
        {"episodes", integer(d.episodes)},
        {"bootstrap_all", boolean(d.bootstrap_all)},
        {"optimizer", optimizer},
        {"checkpoint_every", integer(d.checkpoint_every)}}},
      {"eval",
       {{"episodes", integer(c.eval_episodes)},
        {"baseline", text(c.baseline)},
        {"csi", text(c.csi)}}},
      {"trace", {{"duration_s", num(c.trace_duration)}, {"step_s", num(c.trace_step)}}},
  };
}

Section layer_section(orbits::LayerSpec& l) {
  return {{"planes", integer(l.plane_count)},
          {"sats_per_plane", integer(l.sats_per_plane)},
          {"altitude_m", num(l.altitude)},
          {"inclination_deg", deg(l.inclination)},
          {"raan_offset_deg", deg(l.raan_offset)},
          {"phase_offset_deg", deg(l.phase_offset)},
          {"phasing", integer(l.phasing)}};
}

// Layer index from "layer.N", or -1 when the name is not a layer section.
int layer_index(const std::string& section) {
  if (section.rfind("layer.", 0) != 0) return -1;
  try {
    const int n = parse_int<int>(section.substr(6));
    return n >= 0 ? n : -2;
  } catch (const BadValue&) {
    return -2;
  }
}

// Sets `key` inside `section`; `where` prefixes error messages.
void assign(RunConfig& cfg, const std::string& section, const std::string& key,
            const std::string& value, const std::string& where) {
  const std::string full = section + "." + key;
  Section layer;
  const Section* table = nullptr;
  std::vector<std::pair<std::string, Section>> all;
  if (const int li = layer_index(section); li >= 0) {
    if (li >= static_cast<int>(cfg.constellation.layers.size())) {
      throw ConfigError(fmt::format("{}: layer {} does not exist", where, li));
    }
    layer = layer_section(cfg.constellation.layers[static_cast<std::size_t>(li)]);
    table = &layer;
  } else {
    all = sections(cfg);
    for (const auto& [name, s] : all) {
      if (name == section) table = &s;
    }
  }
  if (!table) throw ConfigError(fmt::format("{}: unknown section '{}'", where, section));
  for (const auto& [name, binding] : *table) {
    if (name != key) continue;
    try {
      binding.set(value);
    } catch (const BadValue& bad) {
      throw ConfigError(fmt::format("{}: key '{}' expects {}, got '{}'", where, full,
                                    bad.expected, value));
    }
    return;
  }
  throw ConfigError(fmt::format("{}: unknown key '{}'", where, full));
}

}  // namespace

void RunConfig::validate() const {
  constellation.validate();
  channel.validate();
  env.validate();
  ddpg.validate();
  if (eval_episodes < 0) throw ConfigError("eval.episodes must be >= 0");
  if (!(trace_duration >= 0.0)) throw ConfigError("trace.duration_s must be >= 0");
  if (!(trace_step > 0.0)) throw ConfigError("trace.step_s must be positive");
}

RunConfig parse(std::istream& is, const std::string& source) {
  RunConfig cfg;
  std::string line, section;
  int lineno = 0;
  bool layers_cleared = false;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const std::string where = fmt::format("{}:{}", source, lineno);
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      const int li = layer_index(section);
      if (li == -2) throw ConfigError(fmt::format("{}: bad layer section '{}'", where, section));
      if (li >= 0) {
        auto& layers = cfg.constellation.layers;
        if (!layers_cleared) {
          layers.clear();
          layers_cleared = true;
        }
        if (li != static_cast<int>(layers.size())) {
          throw ConfigError(fmt::format("{}: layer sections must be numbered 0, 1, ... in order", where));
        }
        layers.emplace_back();
      }
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    if (section.empty()) throw ConfigError(where + ": key outside any section");
    assign(cfg, section, trim(body.substr(0, eq)), trim(body.substr(eq + 1)), where);
  }
  return cfg;
}

RunConfig load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse(in, path.string());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const std::string lhs = trim(assignment.substr(0, eq));
  const auto dot = lhs.rfind('.');
  if (eq == std::string::npos || dot == std::string::npos || dot == 0) {
    throw ConfigError("override '" + assignment + "' must look like section.key=value");
  }
  assign(cfg, lhs.substr(0, dot), lhs.substr(dot + 1), trim(assignment.substr(eq + 1)),
         "override");
}

std::string to_ini(const RunConfig& cfg) {
  RunConfig copy = cfg;  // bindings need mutable references
  std::ostringstream os;
  for (const auto& [name, table] : sections(copy)) {
    os << '[' << name << "]\n";
    for (const auto& [key, binding] : table) os << key << " = " << binding.get() << '\n';
    os << '\n';
  }
  for (std::size_t i = 0; i < copy.constellation.layers.size(); ++i) {
    os << "[layer." << i << "]\n";
    for (const auto& [key, binding] : layer_section(copy.constellation.layers[i])) {
      os << key << " = " << binding.get() << '\n';
    }
    os << '\n';
  }
  return os.str();
}

void save(const RunConfig& cfg, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << to_ini(cfg);
}

}  // namespace satprec::config
