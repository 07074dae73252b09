#include "satprec/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "satprec/rng.hpp"

namespace satprec::channel {

void UpaGeometry::validate() const {
  if (m_x < 1 || m_y < 1) throw ConfigError("UPA dimensions must be >= 1");
  if (!(spacing_over_wavelength > 0.0)) throw ConfigError("UPA spacing must be positive");
}

CVec steering_vector(double phi, int n, double spacing_over_wavelength) {
  if (n < 1) throw DimensionMismatch("steering vector length must be >= 1");
  CVec a(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    a(i) = scale * std::polar(1.0, -2.0 * kPi * spacing_over_wavelength * i * phi);
  }
  return a;
}

CVec upa_response(double theta, double psi, const UpaGeometry& geom) {
  geom.validate();
  const CVec ax = steering_vector(std::cos(theta) * std::sin(psi), geom.m_x,
                                  geom.spacing_over_wavelength);
  const CVec ay = steering_vector(std::cos(psi), geom.m_y, geom.spacing_over_wavelength);
  CVec u(geom.elements());
  for (int ix = 0; ix < geom.m_x; ++ix) {
    for (int iy = 0; iy < geom.m_y; ++iy) u(ix * geom.m_y + iy) = ax(ix) * ay(iy);
  }
  return u;
}

double fspl(double distance, double frequency) {
  return 4.0 * kPi * distance * frequency / kSpeedOfLight;
}

double sat_doppler(double speed, double frequency, double omega) {
  return speed / kSpeedOfLight * frequency * std::cos(omega);
}

double coherence_time(double frequency, double altitude, double elevation) {
  const double c = std::cos(elevation);
  if (c <= 1e-12) throw DegenerateGeometry("coherence time undefined at zenith");
  if (!(frequency > 0.0)) throw DegenerateGeometry("frequency must be positive");
  return kSpeedOfLight * std::sqrt(kEarthRadius + altitude) /
         (frequency * std::sqrt(kEarthMu) * c);
}

double noise_power(double temperature, double bandwidth) {
  return kBoltzmann * temperature * bandwidth;
}

void UserChannelParams::validate() const {
  if (path_count < 1) throw ConfigError("path count must be >= 1");
  const auto n = static_cast<std::size_t>(path_count);
  if (nlos_gains.size() != n || nlos_delays.size() != n || ue_dopplers.size() != n) {
    throw DimensionMismatch("per-path vectors must have path_count entries");
  }
}

CVec los_component(const UserChannelParams& p, double t, double frequency,
                   const UpaGeometry& geom) {
  const double amp = std::sqrt(p.kappa / (1.0 + p.kappa));
  const cplx rot = std::polar(1.0, 2.0 * kPi * t * (p.sat_doppler + p.ue_doppler_los)) *
                   std::polar(1.0, -2.0 * kPi * frequency * p.los_delay);
  return (amp * rot) * upa_response(p.theta, p.psi, geom);
}

CVec nlos_component(const UserChannelParams& p, double t, double frequency,
                    const UpaGeometry& geom) {
  p.validate();
  cplx sum{0.0, 0.0};
  for (int i = 0; i < p.path_count; ++i) {
    // Satellite Doppler is shared by every path; only the user term varies.
    sum += p.nlos_gains[i] *
           std::polar(1.0, 2.0 * kPi * t * (p.sat_doppler + p.ue_dopplers[i])) *
           std::polar(1.0, -2.0 * kPi * frequency * p.nlos_delays[i]);
  }
  const double amp = 1.0 / std::sqrt(p.path_count * (1.0 + p.kappa));
  // Negligible angular spread: every NLOS path shares the LOS response.
  return (amp * sum) * upa_response(p.theta, p.psi, geom);
}

void ChannelConfig::validate() const {
  geom.validate();
  if (!(frequency > 0.0)) throw ConfigError("channel frequency must be positive");
  if (min_paths < 1 || max_paths < min_paths) throw ConfigError("invalid NLOS path range");
  if (!(kappa_min >= 0.0) || kappa_max < kappa_min) throw ConfigError("invalid Rician range");
  if (user_speed < 0.0) throw ConfigError("user speed must be >= 0");
  if (max_excess_delay < 0.0) throw ConfigError("excess delay must be >= 0");
}

double ChannelConfig::effective_refresh_period() const {
  if (refresh_period > 0.0) return refresh_period;
  return coherence_time(frequency, reference_altitude, reference_elevation);
}

double ChannelConfig::amplitude_gain() const { return std::pow(10.0, gain_db / 20.0); }

UserDraw draw_user(const ChannelConfig& cfg, Rng& rng) {
  UserDraw d;
  d.path_count = rng.uniform_int(cfg.min_paths, cfg.max_paths);
  d.kappa = rng.uniform(cfg.kappa_min, cfg.kappa_max);
  d.u_theta = rng.uniform();
  d.u_psi = rng.uniform();
  d.ue_angle_los = rng.uniform(0.0, 2.0 * kPi);
  for (int p = 0; p < d.path_count; ++p) {
    d.gains.push_back(rng.complex_normal(1.0));
    d.excess_delays.push_back(rng.uniform(0.0, cfg.max_excess_delay));
    d.ue_angles.push_back(rng.uniform(0.0, 2.0 * kPi));
  }
  return d;
}

UserChannelParams realize(const UserDraw& draw, const orbits::SatelliteState& sat,
                          const orbits::GroundUser& user, const ChannelConfig& cfg) {
  const auto geo = orbits::slant_geometry(sat, user);
  if (geo.elevation <= 0.0) {
    throw NoVisibleSatellite("satellite " + sat.id.str() + " below a user's horizon");
  }
  const double f = cfg.frequency;
  const double elev = std::min(geo.elevation, kPi / 2);
  const double span = kPi - 2.0 * elev;

  UserChannelParams p;
  p.path_count = draw.path_count;
  p.kappa = draw.kappa;
  p.theta = elev + draw.u_theta * span;
  p.psi = elev + draw.u_psi * span;
  p.nlos_gains = draw.gains;
  p.los_delay = geo.distance / kSpeedOfLight;
  for (double e : draw.excess_delays) p.nlos_delays.push_back(p.los_delay + e);

  const double q = sat.velocity.norm();
  const orbits::Vec3 los = user.position - sat.position;
  double cos_omega = 0.0;
  if (q > 0.0) cos_omega = std::clamp(sat.velocity.dot(los) / (q * los.norm()), -1.0, 1.0);
  p.sat_trajectory_angle = std::acos(cos_omega);
  p.sat_doppler = sat_doppler(q, f, p.sat_trajectory_angle);

  const double ue_max = user.speed / kSpeedOfLight * f;
  p.ue_doppler_los = ue_max * std::cos(draw.ue_angle_los);
  for (double a : draw.ue_angles) p.ue_dopplers.push_back(ue_max * std::cos(a));
  return p;
}

ChannelRealization sample_channel(std::span<const orbits::GroundUser> users,
                                  const orbits::SatelliteState& sat, double t,
                                  const ChannelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const int m = cfg.geom.elements();
  const int k_users = static_cast<int>(users.size());
  if (t < 0.0) throw DegenerateGeometry("channel time must be >= 0");
  const double period = cfg.effective_refresh_period();
  const auto epoch = static_cast<std::uint64_t>(std::floor(t / period));
  const double gain = cfg.amplitude_gain();

  const std::uint64_t sat_key = (static_cast<std::uint64_t>(sat.id.layer) << 40) ^
                                (static_cast<std::uint64_t>(sat.id.plane) << 20) ^
                                static_cast<std::uint64_t>(sat.id.slot);
  const std::uint64_t epoch_seed = derive_seed(derive_seed(seed, "channel-epoch", epoch),
                                               "channel-satellite", sat_key);

  ChannelRealization out;
  out.H.resize(m, k_users);
  out.t = t;
  out.frequency = cfg.frequency;
  for (int k = 0; k < k_users; ++k) {
    auto rng = Rng::stream(epoch_seed, "channel-user", static_cast<std::uint64_t>(k));
    const auto draw = draw_user(cfg, rng);
    auto params = realize(draw, sat, users[k], cfg);
    const double loss = fspl(params.los_delay * kSpeedOfLight, cfg.frequency);
    out.H.col(k) = (gain / loss) * (los_component(params, t, cfg.frequency, cfg.geom) +
                                    nlos_component(params, t, cfg.frequency, cfg.geom));
    out.params.push_back(std::move(params));
    out.fspl.push_back(loss);
  }
  return out;
}

}  // namespace satprec::channel
