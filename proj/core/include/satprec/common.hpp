#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace satprec {

// Physical constants. Earth values match the spherical-Earth model used
// throughout (no oblateness).
inline constexpr double kEarthRadius = 6.371e6;          // m
inline constexpr double kGravitationalConstant = 6.674e-11;
inline constexpr double kEarthMass = 5.972e24;            // kg
inline constexpr double kEarthMu = kGravitationalConstant * kEarthMass;
inline constexpr double kEarthRotationRate = 7.2921159e-5;  // rad/s
inline constexpr double kSpeedOfLight = 299792458.0;        // m/s
inline constexpr double kBoltzmann = 1.380649e-23;          // J/K
inline constexpr double kPi = std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Error hierarchy. Every failure surfaced by the library derives from Error so
// callers (the CLI in particular) can report a single diagnostic line.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SATPREC_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

SATPREC_DEFINE_ERROR(NoVisibleSatellite);
SATPREC_DEFINE_ERROR(DegenerateGeometry);
SATPREC_DEFINE_ERROR(DimensionMismatch);
SATPREC_DEFINE_ERROR(NumericalFailure);
SATPREC_DEFINE_ERROR(LengthMismatch);
SATPREC_DEFINE_ERROR(NotInitialized);
SATPREC_DEFINE_ERROR(ShapeMismatch);
SATPREC_DEFINE_ERROR(RankDeficient);
SATPREC_DEFINE_ERROR(ZeroColumn);
SATPREC_DEFINE_ERROR(EmptyBatch);
SATPREC_DEFINE_ERROR(ConfigError);

#undef SATPREC_DEFINE_ERROR

}  // namespace satprec
