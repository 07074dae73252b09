#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "satprec/orbits.hpp"

namespace satprec {
class Rng;
}

namespace satprec::channel {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

struct UpaGeometry {
  int m_x = 3;
  int m_y = 3;
  double spacing_over_wavelength = 0.5;

  int elements() const { return m_x * m_y; }
  void validate() const;
};

/// ULA steering vector: entry n is exp(-j 2π (d/λ) n φ) / sqrt(N).
CVec steering_vector(double phi, int n, double spacing_over_wavelength = 0.5);

/// UPA response a(cosθ sinψ, Mx) ⊗ a(cosψ, My). Entry ix*My + iy.
CVec upa_response(double theta, double psi, const UpaGeometry& geom);

/// Free-space path loss as an amplitude divisor, 4π d f / c.
double fspl(double distance, double frequency);

/// Doppler shift from satellite motion, (q / c) f cos ω.
double sat_doppler(double speed, double frequency, double omega);

/// Minimum coherence interval for a satellite at `altitude` seen at
/// `elevation`. Throws DegenerateGeometry at (numerically) zenith.
double coherence_time(double frequency, double altitude, double elevation);

/// Thermal noise power K_B T B in watts.
double noise_power(double temperature, double bandwidth);

/// Parameters of one user's link for one refresh epoch.
struct UserChannelParams {
  int path_count = 2;
  double kappa = 81.0;  // linear Rician factor
  double theta = kPi / 2;
  double psi = kPi / 2;
  std::vector<cplx> nlos_gains;
  double los_delay = 0.0;
  std::vector<double> nlos_delays;
  double sat_doppler = 0.0;   // identical on every path
  double ue_doppler_los = 0.0;
  std::vector<double> ue_dopplers;
  double sat_trajectory_angle = kPi / 2;

  void validate() const;
};

CVec los_component(const UserChannelParams& p, double t, double frequency,
                   const UpaGeometry& geom);
CVec nlos_component(const UserChannelParams& p, double t, double frequency,
                    const UpaGeometry& geom);

struct ChannelConfig {
  double frequency = 2e9;
  UpaGeometry geom;
  int min_paths = 2;
  int max_paths = 7;
  double kappa_min = 81.0;
  double kappa_max = 90.0;
  // Period after which every random draw (P, κ, angles, gains, delays, user
  // Doppler angles) is refreshed. <= 0 selects the minimum coherence time.
  double refresh_period = 0.0;
  double user_speed = 1.0;          // m/s
  double max_excess_delay = 1e-6;   // s, NLOS excess over LOS
  double gain_db = 45.0;            // combined antenna gain on top of FSPL
  double reference_altitude = 540e3;
  double reference_elevation = deg2rad(80.0);

  void validate() const;
  double effective_refresh_period() const;
  double amplitude_gain() const;
};

struct ChannelRealization {
  CMat H;  // M x K, column k is user k
  double t = 0.0;
  double frequency = 0.0;
  std::vector<UserChannelParams> params;
  std::vector<double> fspl;
};

/// Random variates for one user and one refresh epoch, before they are
/// mapped through the current geometry.
struct UserDraw {
  int path_count = 2;
  double kappa = 81.0;
  double u_theta = 0.5;
  double u_psi = 0.5;
  std::vector<cplx> gains;
  std::vector<double> excess_delays;
  double ue_angle_los = 0.0;
  std::vector<double> ue_angles;
};

UserDraw draw_user(const ChannelConfig& cfg, Rng& rng);

/// Maps a draw through the satellite/user geometry at the current instant.
UserChannelParams realize(const UserDraw& draw, const orbits::SatelliteState& sat,
                          const orbits::GroundUser& user, const ChannelConfig& cfg);

/// Channel matrix for all users at time `t`. Draws are a pure function of
/// (seed, refresh epoch, serving satellite, user index), so repeated calls
/// are identical and nearby instants in the same epoch stay correlated.
ChannelRealization sample_channel(std::span<const orbits::GroundUser> users,
                                  const orbits::SatelliteState& sat, double t,
                                  const ChannelConfig& cfg, std::uint64_t seed);

}  // namespace satprec::channel
