#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "satprec/agent.hpp"
#include "satprec/channel.hpp"
#include "satprec/env.hpp"
#include "satprec/orbits.hpp"

namespace satprec::config {

/// Everything a run needs. Serialised as INI: `[section]` headers and
/// `key = value` lines; `#` and `;` start comments. Angles are in degrees on
/// disk and radians in memory.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "runs/default";
  orbits::ConstellationSpec constellation = orbits::ConstellationSpec::starlink_four_layer();
  channel::ChannelConfig channel;
  env::EnvConfig env;
  agent::DdpgConfig ddpg;
  int eval_episodes = 5;
  std::string baseline = "zf";
  std::string csi = "delayed";
  double trace_duration = 360.0;  // s
  double trace_step = 1.0;        // s

  void validate() const;
};

/// Parses INI text. The first `[layer.N]` section replaces the default
/// constellation; layer sections must then be numbered 0, 1, ... without gaps.
/// Errors name the source, line and key.
RunConfig parse(std::istream& is, const std::string& source = "<config>");
RunConfig load(const std::filesystem::path& path);

/// Applies one `section.key=value` override (e.g. `env.users=4`,
/// `layer.0.altitude_m=550000`).
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Full snapshot; parsing it yields the same configuration.
std::string to_ini(const RunConfig& cfg);
void save(const RunConfig& cfg, const std::filesystem::path& path);

}  // namespace satprec::config
