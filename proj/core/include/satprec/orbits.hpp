#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "satprec/common.hpp"

namespace satprec {
class Rng;
}

namespace satprec::orbits {

using Vec3 = Eigen::Vector3d;

/// One Walker-style shell of circular orbits.
///
/// Planes are spaced uniformly in right ascension; satellites are spaced
/// uniformly within each plane, and plane p is advanced in-plane by
/// `phasing * 2π * p / (plane_count * sats_per_plane)`.
struct LayerSpec {
  int plane_count = 1;
  int sats_per_plane = 1;
  double altitude = 550e3;     // m
  double inclination = 0.0;    // rad
  double raan_offset = 0.0;    // rad
  double phase_offset = 0.0;   // rad
  int phasing = 11;            // Walker phasing factor F

  void validate() const;
};

struct ConstellationSpec {
  std::vector<LayerSpec> layers;
  bool earth_rotation = true;

  /// Four-layer Starlink-like constellation (72x22 @550 km 53°, 36x20 @570 km
  /// 70°, 6x58 @560 km 97.6°, 72x22 @540 km 53.2°).
  static ConstellationSpec starlink_four_layer();

  void validate() const;
  std::size_t satellite_count() const;
};

struct SatelliteId {
  int layer = 0;
  int plane = 0;
  int slot = 0;

  auto operator<=>(const SatelliteId&) const = default;
  std::string str() const;  // "L<layer>P<plane>S<slot>"
};

struct SatelliteState {
  SatelliteId id;
  Vec3 position;  // Earth-fixed, m
  // Inertial velocity expressed in Earth-fixed axes, m/s. Its norm is the
  // circular orbital speed regardless of Earth rotation.
  Vec3 velocity;
};

struct GroundUser {
  double latitude = 0.0;   // rad
  double longitude = 0.0;  // rad
  double altitude = 0.0;   // m
  double speed = 0.0;      // m/s
  Vec3 position = Vec3::Zero();

  static GroundUser at(double latitude, double longitude, double altitude = 0.0,
                       double speed = 0.0);
};

// Coverage area used throughout the study (Lake District, UK).
inline constexpr double kCoverageLatitude = deg2rad(54.526);
inline constexpr double kCoverageLongitude = deg2rad(-3.3);
inline constexpr double kCoverageRadius = 40e3;
inline constexpr double kDefaultMinElevation = deg2rad(25.0);

double orbital_radius(double altitude);
double orbital_speed(double altitude);
double orbital_period(double altitude);

/// Positions and velocities of every satellite at time `t` (seconds since
/// epoch). Ordered by (layer, plane, slot).
std::vector<SatelliteState> propagate(const ConstellationSpec& spec, double t);
SatelliteState propagate_one(const ConstellationSpec& spec, SatelliteId id,
                             double t);

struct SlantGeometry {
  double distance = 0.0;   // m
  double elevation = 0.0;  // rad, above the local horizon plane
};

SlantGeometry slant_geometry(const Vec3& sat_position, const GroundUser& point);
inline SlantGeometry slant_geometry(const SatelliteState& sat,
                                    const GroundUser& point) {
  return slant_geometry(sat.position, point);
}

/// Point reached by travelling `ground_distance` metres from `origin` along
/// the great circle with initial `bearing` (rad, clockwise from north).
GroundUser destination(const GroundUser& origin, double ground_distance,
                       double bearing);

/// `count` users uniformly distributed over the disc of `radius` metres
/// around `center`.
std::vector<GroundUser> place_users(const GroundUser& center, int count,
                                    double radius, double speed, Rng& rng);

struct HandoverPolicy {
  double epsilon = 0.0;
  std::optional<SatelliteId> serving;
  int handover_count = 0;
};

struct HandoverStep {
  HandoverPolicy policy;
  bool handover = false;
  std::size_t serving_index = 0;  // index into the satellite list
  SlantGeometry geometry;         // serving satellite w.r.t. the centre
};

/// Satellite selection with ε-hysteresis.
///
/// The nearest visible satellite S(t) replaces the serving one only when
/// d(S(t)) / d(serving) < 1 - ε. The first assignment is not a handover.
/// If the serving satellite has dropped below the mask (or is absent from
/// `sats`) the nearest visible satellite takes over and it is counted.
/// Throws NoVisibleSatellite when nothing is above `min_elevation` and
/// ConfigError when ε is outside [0, 1).
HandoverStep select_and_handover(const HandoverPolicy& policy,
                                 std::span<const SatelliteState> sats,
                                 const GroundUser& center,
                                 double min_elevation = kDefaultMinElevation);

struct TracePoint {
  double t = 0.0;
  SatelliteId serving;
  double distance = 0.0;
  double elevation = 0.0;
  bool handover = false;
};

struct HandoverTrace {
  std::vector<TracePoint> points;
  int handover_count = 0;
};

/// Runs the handover rule over [0, duration] at step `dt`.
HandoverTrace simulate_handovers(const ConstellationSpec& spec,
                                 const GroundUser& center, double epsilon,
                                 double duration, double dt,
                                 double min_elevation = kDefaultMinElevation);

}  // namespace satprec::orbits
