#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Geometry>

#include "satprec/channel.hpp"
#include "satprec/orbits.hpp"
#include "satprec/rng.hpp"
#include "support/oracles.hpp"

using namespace satprec;
using namespace satprec::channel;

namespace {

UserChannelParams params(int paths, double kappa) {
  UserChannelParams p;
  p.path_count = paths;
  p.kappa = kappa;
  p.theta = 1.1;
  p.psi = 1.7;
  p.nlos_gains.assign(paths, {1.0, 0.0});
  p.nlos_delays.assign(paths, 0.0);
  p.ue_dopplers.assign(paths, 0.0);
  return p;
}

orbits::SatelliteState above(const orbits::GroundUser& u, double height) {
  orbits::SatelliteState s;
  s.position = u.position.normalized() * (u.position.norm() + height);
  // Horizontal velocity, so the line of sight is perpendicular to it.
  s.velocity = orbits::Vec3(0.0, 0.0, 1.0).cross(u.position).normalized() * orbits::orbital_speed(height);
  return s;
}

}  // namespace

TEST(Steering, Examples) {
  const auto a = steering_vector(0.0, 4, 0.5);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(a(i), cplx(0.5, 0.0));
  const auto b = steering_vector(1.0, 2, 0.5);
  EXPECT_NEAR(std::abs(b(0) - cplx(1 / std::sqrt(2.0), 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(b(1) - cplx(-1 / std::sqrt(2.0), 0)), 0.0, 1e-15);
  for (double phi : {-0.7, 0.1, 0.93}) EXPECT_NEAR(steering_vector(phi, 7).norm(), 1.0, 1e-14);
}

TEST(Upa, BroadsideAndKroneckerOrder) {
  const auto u = upa_response(oracle::kPi / 2, oracle::kPi / 2, {3, 3, 0.5});
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(std::abs(u(i) - cplx(1.0 / 3.0, 0)), 0.0, 1e-15);
  const auto v = upa_response(0.0, oracle::kPi / 2, {2, 2, 0.5});
  const double expect[] = {0.5, 0.5, -0.5, -0.5};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(v(i) - cplx(expect[i], 0)), 0.0, 1e-15);
}

TEST(Upa, UnitNormForAllAngles) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto u = upa_response(rng.uniform(0, oracle::kPi), rng.uniform(0, oracle::kPi),
                                {rng.uniform_int(1, 5), rng.uniform_int(1, 5), 0.5});
    EXPECT_NEAR(u.norm(), 1.0, 1e-12);
  }
}

TEST(PathLoss, Examples) {
  // 4π·550e3·2e9 / c; tolerance covers the rounding of c in the quoted value.
  EXPECT_NEAR(fspl(550e3, 2e9), 4.606e7, 4.606e7 * 2e-3);
  EXPECT_NEAR(fspl(oracle::kC / (4 * oracle::kPi * 2e9), 2e9), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(fspl(1100e3, 2e9), 2.0 * fspl(550e3, 2e9));
}

TEST(Doppler, Examples) {
  EXPECT_NEAR(sat_doppler(7590.0, 2e9, oracle::kPi / 2), 0.0, 1e-9);
  EXPECT_NEAR(sat_doppler(7590.0, 2e9, 0.0), 50.63e3, 10.0);
  EXPECT_DOUBLE_EQ(sat_doppler(7590.0, 2e9, oracle::kPi - 0.3), -sat_doppler(7590.0, 2e9, 0.3));
}

TEST(Coherence, ValuesAndScaling) {
  const double el = 80.0 * oracle::kPi / 180.0;
  const double reference = oracle::kC / (2e9 * oracle::circular_speed(540e3) * std::cos(el));
  EXPECT_NEAR(coherence_time(2e9, 540e3, el), reference, 1e-15);
  EXPECT_NEAR(coherence_time(2e9, 540e3, el), 115e-6, 2e-6);
  EXPECT_NEAR(coherence_time(1e9, 540e3, el), 2.0 * coherence_time(2e9, 540e3, el), 1e-15);
  EXPECT_NEAR(coherence_time(5e9, 540e3, el), 46e-6, 1e-6);
  EXPECT_THROW(coherence_time(2e9, 540e3, oracle::kPi / 2), DegenerateGeometry);
}

TEST(Noise, Values) {
  EXPECT_NEAR(noise_power(280.0, 40e6), oracle::kBoltzmann * 280.0 * 40e6, 1e-25);
  EXPECT_NEAR(noise_power(280.0, 40e6), 1.547e-13, 1.547e-13 * 1e-3);
  EXPECT_NEAR(noise_power(280.0, 100e6), 3.866e-13, 3.866e-13 * 1e-3);
  EXPECT_DOUBLE_EQ(noise_power(280.0, 80e6), 2.0 * noise_power(280.0, 40e6));
}

TEST(Los, NormAndZeroPhase) {
  const UpaGeometry g{3, 3, 0.5};
  auto p = params(2, 81.0);
  EXPECT_NEAR(los_component(p, 0.3, 2e9, g).norm(), std::sqrt(81.0 / 82.0), 1e-12);
  p.kappa = 1e12;
  EXPECT_NEAR(los_component(p, 0.3, 2e9, g).norm(), 1.0, 1e-9);
  p.kappa = 85.0;
  const auto los = los_component(p, 0.0, 2e9, g);
  const CVec expect = std::sqrt(85.0 / 86.0) * upa_response(p.theta, p.psi, g);
  EXPECT_NEAR((los - expect).norm(), 0.0, 1e-15);
}

TEST(Nlos, SinglePathAndLinearity) {
  const UpaGeometry g{3, 3, 0.5};
  auto p = params(1, 81.0);
  const auto n = nlos_component(p, 0.0, 2e9, g);
  EXPECT_NEAR((n - upa_response(p.theta, p.psi, g) / std::sqrt(82.0)).norm(), 0.0, 1e-15);
  auto q = params(4, 81.0);
  q.nlos_gains = {{0.3, 0.1}, {-1.0, 0.4}, {0.2, -0.9}, {0.5, 0.5}};
  q.nlos_delays = {1e-7, 2e-7, 3e-7, 4e-7};
  const auto base = nlos_component(q, 0.01, 2e9, g);
  for (auto& x : q.nlos_gains) x *= cplx(2.0, -1.0);
  EXPECT_NEAR((nlos_component(q, 0.01, 2e9, g) - cplx(2.0, -1.0) * base).norm(), 0.0, 1e-14);
}

TEST(Nlos, SharedAnglesAcrossPaths) {
  const UpaGeometry g{2, 3, 0.5};
  auto p = params(5, 83.0);
  Rng rng(2);
  for (auto& x : p.nlos_gains) x = rng.complex_normal();
  const auto n = nlos_component(p, 0.02, 2e9, g);
  const auto u = upa_response(p.theta, p.psi, g);
  // n is a scalar multiple of u.
  const cplx alpha = u.dot(n);
  EXPECT_NEAR((n - alpha * u).norm(), 0.0, 1e-14);
}

TEST(Nlos, ExpectedPowerMonteCarlo) {
  const UpaGeometry g{3, 3, 0.5};
  Rng rng(11);
  const int draws = 100000;
  for (int paths : {2, 7}) {
    const double kappa = 84.0;
    auto p = params(paths, kappa);
    double nlos = 0.0, total = 0.0;
    for (int i = 0; i < draws; ++i) {
      for (auto& x : p.nlos_gains) x = rng.complex_normal();
      const auto n = nlos_component(p, 0.0, 2e9, g);
      nlos += n.squaredNorm();
      total += (n + los_component(p, 0.0, 2e9, g)).squaredNorm();
    }
    EXPECT_NEAR(nlos / draws, 1.0 / (1.0 + kappa), 0.01 / (1.0 + kappa));
    EXPECT_NEAR(total / draws, 1.0, 0.01);
  }
}

TEST(Channel, FsplOnlyColumnNormAtZenith) {
  ChannelConfig cfg;
  cfg.gain_db = 0.0;
  cfg.min_paths = cfg.max_paths = 2;
  cfg.kappa_min = cfg.kappa_max = 81.0;
  const auto user = orbits::GroundUser::at(0.4, -0.2);
  const auto sat = above(user, 550e3);
  std::vector<orbits::GroundUser> users{user};
  double sum = 0.0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) sum += sample_channel(users, sat, 0.0, cfg, 100 + i).H.col(0).squaredNorm();
  const double expected = 1.0 / fspl(550e3, 2e9);
  EXPECT_NEAR(std::sqrt(sum / n), expected, 0.05 * expected);
  EXPECT_NEAR(expected, 2.17e-8, 0.01e-8);
}

TEST(Channel, DefaultGainGivesMicroScaleEntries) {
  ChannelConfig cfg;  // 3x3 array, default gain
  const auto user = orbits::GroundUser::at(0.4, -0.2);
  std::vector<orbits::GroundUser> users{user};
  const auto H = sample_channel(users, above(user, 550e3), 0.0, cfg, 4).H;
  const double entry = H.col(0).norm() / std::sqrt(9.0);
  EXPECT_GT(entry, 1e-7);
  EXPECT_LT(entry, 1e-5);
}

TEST(Channel, DeterministicAndEpochScoped) {
  ChannelConfig cfg;
  cfg.refresh_period = 0.1;
  const auto c = orbits::GroundUser::at(0.4, -0.2);
  std::vector<orbits::GroundUser> users{c, orbits::destination(c, 10e3, 0.5)};
  const auto sat = above(c, 550e3);
  const auto a = sample_channel(users, sat, 0.05, cfg, 9), b = sample_channel(users, sat, 0.05, cfg, 9);
  EXPECT_EQ(a.H, b.H);
  const auto same_epoch = sample_channel(users, sat, 0.07, cfg, 9);
  const auto next_epoch = sample_channel(users, sat, 0.15, cfg, 9);
  EXPECT_EQ(a.params[0].path_count, same_epoch.params[0].path_count);
  EXPECT_EQ(a.params[0].nlos_gains, same_epoch.params[0].nlos_gains);
  EXPECT_NE(a.params[0].nlos_gains, next_epoch.params[0].nlos_gains);
  for (const auto& p : a.params) {
    EXPECT_GE(p.path_count, 2);
    EXPECT_LE(p.path_count, 7);
    EXPECT_GE(p.kappa, 81.0);
    EXPECT_LE(p.kappa, 90.0);
    EXPECT_EQ(p.nlos_delays.size(), static_cast<std::size_t>(p.path_count));
    for (double d : p.nlos_delays) {
      EXPECT_GE(d, p.los_delay);
      EXPECT_LE(d, p.los_delay + 1e-6);
    }
  }
  EXPECT_THROW(sample_channel(users, sat, -1.0, cfg, 9), DegenerateGeometry);
}

TEST(Channel, AnglesStayInsideElevationBand) {
  ChannelConfig cfg;
  const auto user = orbits::GroundUser::at(0.1, 0.2);
  auto sat = above(user, 550e3);
  sat.position += orbits::Vec3(0.0, 0.0, 400e3);  // tilt off zenith
  const double elev = orbits::slant_geometry(sat, user).elevation;
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const auto p = realize(draw_user(cfg, rng), sat, user, cfg);
    EXPECT_GE(p.theta, elev - 1e-12);
    EXPECT_LE(p.theta, oracle::kPi - elev + 1e-12);
    EXPECT_GE(p.psi, elev - 1e-12);
    EXPECT_LE(p.psi, oracle::kPi - elev + 1e-12);
    EXPECT_NEAR(p.los_delay, orbits::slant_geometry(sat, user).distance / oracle::kC, 1e-18);
  }
}

TEST(Channel, TemporalCorrelationApproachesOne) {
  ChannelConfig cfg;
  cfg.refresh_period = 1.0;
  const auto user = orbits::GroundUser::at(0.1, 0.2);
  std::vector<orbits::GroundUser> users{user};
  const auto sat = above(user, 550e3);
  double prev = 0.0;
  for (double dt : {1e-3, 1e-4, 1e-5, 1e-6}) {
    const auto a = sample_channel(users, sat, 0.2, cfg, 1).H.col(0);
    const auto b = sample_channel(users, sat, 0.2 + dt, cfg, 1).H.col(0);
    const double rho = std::abs(a.dot(b)) / (a.norm() * b.norm());
    EXPECT_GE(rho, prev - 1e-12);
    prev = rho;
  }
  EXPECT_GT(prev, 1.0 - 1e-9);
}
