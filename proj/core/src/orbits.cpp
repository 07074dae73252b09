#include "satprec/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "satprec/rng.hpp"

namespace satprec::orbits {

void LayerSpec::validate() const {
  if (plane_count < 1 || sats_per_plane < 1) {
    throw ConfigError("layer needs at least one plane and one satellite per plane");
  }
  if (!(altitude > 0.0)) throw ConfigError("layer altitude must be positive");
  if (inclination < 0.0 || inclination > kPi) {
    throw ConfigError("layer inclination must lie in [0, pi]");
  }
}

ConstellationSpec ConstellationSpec::starlink_four_layer() {
  ConstellationSpec spec;
  spec.layers = {
      {72, 22, 550e3, deg2rad(53.0)},
      {36, 20, 570e3, deg2rad(70.0)},
      {6, 58, 560e3, deg2rad(97.6)},
      {72, 22, 540e3, deg2rad(53.2)},
  };
  return spec;
}

void ConstellationSpec::validate() const {
  if (layers.empty()) throw ConfigError("constellation has no layers");
  for (const auto& l : layers) l.validate();
}

std::size_t ConstellationSpec::satellite_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) {
    n += static_cast<std::size_t>(l.plane_count) * static_cast<std::size_t>(l.sats_per_plane);
  }
  return n;
}

std::string SatelliteId::str() const {
  return fmt::format("L{}P{}S{}", layer, plane, slot);
}

GroundUser GroundUser::at(double latitude, double longitude, double altitude,
                          double speed) {
  GroundUser u;
  u.latitude = latitude;
  u.longitude = longitude;
  u.altitude = altitude;
  u.speed = speed;
  const double r = kEarthRadius + altitude;
  u.position = Vec3(r * std::cos(latitude) * std::cos(longitude),
                    r * std::cos(latitude) * std::sin(longitude),
                    r * std::sin(latitude));
  return u;
}

double orbital_radius(double altitude) { return kEarthRadius + altitude; }

double orbital_speed(double altitude) {
  return std::sqrt(kEarthMu / orbital_radius(altitude));
}

double orbital_period(double altitude) {
  const double r = orbital_radius(altitude);
  return 2.0 * kPi * std::sqrt(r * r * r / kEarthMu);
}

namespace {

SatelliteState state_of(const ConstellationSpec& spec, const LayerSpec& layer,
                        SatelliteId id, double t) {
  const double r = orbital_radius(layer.altitude);
  const double n = std::sqrt(kEarthMu / (r * r * r));
  const double planes = layer.plane_count;
  const double per_plane = layer.sats_per_plane;

  const double raan = layer.raan_offset + 2.0 * kPi * id.plane / planes;
  const double u = layer.phase_offset + 2.0 * kPi * id.slot / per_plane +
                   layer.phasing * 2.0 * kPi * id.plane / (planes * per_plane) +
                   n * t;

  const double cO = std::cos(raan), sO = std::sin(raan);
  const double cu = std::cos(u), su = std::sin(u);
  const double ci = std::cos(layer.inclination), si = std::sin(layer.inclination);

  Vec3 pos(r * (cO * cu - sO * su * ci), r * (sO * cu + cO * su * ci), r * su * si);
  const double v = r * n;
  Vec3 vel(v * (-cO * su - sO * cu * ci), v * (-sO * su + cO * cu * ci), v * cu * si);

  if (spec.earth_rotation) {
    const double th = kEarthRotationRate * t;
    const double c = std::cos(th), s = std::sin(th);
    pos = Vec3(c * pos.x() + s * pos.y(), -s * pos.x() + c * pos.y(), pos.z());
    vel = Vec3(c * vel.x() + s * vel.y(), -s * vel.x() + c * vel.y(), vel.z());
  }
  return {id, pos, vel};
}

}  // namespace

std::vector<SatelliteState> propagate(const ConstellationSpec& spec, double t) {
  std::vector<SatelliteState> out;
  out.reserve(spec.satellite_count());
  for (int l = 0; l < static_cast<int>(spec.layers.size()); ++l) {
    const auto& layer = spec.layers[l];
    for (int p = 0; p < layer.plane_count; ++p) {
      for (int s = 0; s < layer.sats_per_plane; ++s) {
        out.push_back(state_of(spec, layer, {l, p, s}, t));
      }
    }
  }
  return out;
}

SatelliteState propagate_one(const ConstellationSpec& spec, SatelliteId id,
                             double t) {
  if (id.layer < 0 || id.layer >= static_cast<int>(spec.layers.size())) {
    throw ConfigError("satellite id " + id.str() + " outside constellation");
  }
  return state_of(spec, spec.layers[id.layer], id, t);
}

SlantGeometry slant_geometry(const Vec3& sat_position, const GroundUser& point) {
  const Vec3 los = sat_position - point.position;
  const double d = los.norm();
  const Vec3 up = point.position.normalized();
  const double s = std::clamp(los.dot(up) / d, -1.0, 1.0);
  return {d, std::asin(s)};
}

GroundUser destination(const GroundUser& origin, double ground_distance,
                       double bearing) {
  const double delta = ground_distance / kEarthRadius;
  const double lat1 = origin.latitude;
  const double lat2 = std::asin(std::sin(lat1) * std::cos(delta) +
                                std::cos(lat1) * std::sin(delta) * std::cos(bearing));
  const double lon2 =
      origin.longitude +
      std::atan2(std::sin(bearing) * std::sin(delta) * std::cos(lat1),
                 std::cos(delta) - std::sin(lat1) * std::sin(lat2));
  return GroundUser::at(lat2, lon2, origin.altitude, origin.speed);
}

std::vector<GroundUser> place_users(const GroundUser& center, int count,
                                    double radius, double speed, Rng& rng) {
  std::vector<GroundUser> users;
  users.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    const double rho = radius * std::sqrt(rng.uniform());
    const double bearing = rng.uniform(0.0, 2.0 * kPi);
    auto u = destination(center, rho, bearing);
    u.speed = speed;
    users.push_back(u);
  }
  return users;
}

HandoverStep select_and_handover(const HandoverPolicy& policy,
                                 std::span<const SatelliteState> sats,
                                 const GroundUser& center, double min_elevation) {
  if (!(policy.epsilon >= 0.0 && policy.epsilon < 1.0)) {
    throw ConfigError("handover epsilon must lie in [0, 1)");
  }
  std::size_t best = sats.size();
  double best_d = std::numeric_limits<double>::infinity();
  std::size_t serving = sats.size();
  SlantGeometry serving_geo;
  bool serving_visible = false;
  std::vector<SlantGeometry> geo(sats.size());

  for (std::size_t i = 0; i < sats.size(); ++i) {
    geo[i] = slant_geometry(sats[i], center);
    const bool visible = geo[i].elevation >= min_elevation;
    if (policy.serving && sats[i].id == *policy.serving) {
      serving = i;
      serving_geo = geo[i];
      serving_visible = visible;
    }
    if (!visible) continue;
    if (geo[i].distance < best_d ||
        (geo[i].distance == best_d && sats[i].id < sats[best].id)) {
      best = i;
      best_d = geo[i].distance;
    }
  }
  if (best == sats.size()) {
    throw NoVisibleSatellite("no satellite above the elevation mask");
  }

  HandoverStep step;
  step.policy = policy;
  auto take = [&](std::size_t i, bool counted) {
    step.policy.serving = sats[i].id;
    step.serving_index = i;
    step.geometry = geo[i];
    step.handover = counted;
    if (counted) ++step.policy.handover_count;
  };

  if (!policy.serving) {
    take(best, false);
  } else if (serving == sats.size() || !serving_visible) {
    take(best, true);
  } else if (best != serving && best_d / serving_geo.distance < 1.0 - policy.epsilon) {
    take(best, true);
  } else {
    step.serving_index = serving;
    step.geometry = serving_geo;
  }
  return step;
}

HandoverTrace simulate_handovers(const ConstellationSpec& spec,
                                 const GroundUser& center, double epsilon,
                                 double duration, double dt, double min_elevation) {
  if (!(dt > 0.0)) throw ConfigError("trace step must be positive");
  HandoverTrace trace;
  HandoverPolicy policy;
  policy.epsilon = epsilon;
  const auto steps = static_cast<long>(std::floor(duration / dt + 1e-9));
  for (long n = 0; n <= steps; ++n) {
    const double t = n * dt;
    const auto sats = propagate(spec, t);
    const auto step = select_and_handover(policy, sats, center, min_elevation);
    policy = step.policy;
    trace.points.push_back(
        {t, *policy.serving, step.geometry.distance, step.geometry.elevation, step.handover});
  }
  trace.handover_count = policy.handover_count;
  return trace;
}

}  // namespace satprec::orbits
