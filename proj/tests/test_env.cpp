#include <gtest/gtest.h>

#include <cmath>

#include "satprec/env.hpp"
#include "support/oracles.hpp"

using namespace satprec;
using namespace satprec::env;

namespace {

DelayedCsiEnv make_env(int delay, std::uint64_t seed = 1) {
  channel::ChannelConfig ch;
  ch.geom = {2, 2, 0.5};
  EnvConfig cfg;
  cfg.delay_steps = delay;
  cfg.episode_length = 20;
  return DelayedCsiEnv(orbits::ConstellationSpec::starlink_four_layer(), ch, cfg, seed);
}

VectorXd random_action(int n, Rng& rng) {
  VectorXd a(n);
  for (auto& v : a) v = rng.uniform(-0.5, 0.5);
  return a;
}

double scalar_sum(const CMat& H, const CMat& V, double sigma2) {
  double s = 0.0;
  for (double r : oracle::scalar_rates(H, V, sigma2)) s += r;
  return s;
}

}  // namespace

TEST(Projection, Examples) {
  const VectorXd x = (VectorXd(3) << 2.0, 0.0, 0.0).finished();
  EXPECT_EQ(project_action(x, 1.0), x / 2.0);
  const VectorXd y = (VectorXd(2) << 0.3, 0.4).finished();
  EXPECT_EQ(project_action(y, 1.0), y);
  EXPECT_EQ(project_action(VectorXd::Zero(4), 1.0), VectorXd::Zero(4));
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    VectorXd z(8);
    for (auto& v : z) v = rng.normal(0.0, 2.0);
    const VectorXd p = project_action(z, 1.5);
    EXPECT_LE(p.norm(), 1.5 + 1e-12);
    EXPECT_LT((project_action(p, 1.5) - p).norm(), 1e-14);
  }
}

TEST(ActionMapping, BasisAndRoundTrip) {
  EXPECT_EQ(action_to_precoder(VectorXd::Zero(12), 3, 2), CMat::Zero(3, 2));
  VectorXd e0 = VectorXd::Zero(12);
  e0(0) = 1.0;
  const CMat V0 = action_to_precoder(e0, 3, 2);
  EXPECT_EQ(V0(0, 0), channel::cplx(1.0, 0.0));
  EXPECT_EQ(V0.cwiseAbs().sum(), 1.0);
  VectorXd e = VectorXd::Zero(12);
  e(6 + 1 * 3 + 2) = 1.0;  // imaginary part of V(2, 1)
  EXPECT_EQ(action_to_precoder(e, 3, 2)(2, 1), channel::cplx(0.0, 1.0));
  std::mt19937_64 gen(2);
  const CMat V = oracle::random_complex(3, 2, gen);
  EXPECT_LT((action_to_precoder(precoder_to_action(V), 3, 2) - V).norm(), 1e-15);
  EXPECT_THROW(action_to_precoder(VectorXd::Zero(11), 3, 2), LengthMismatch);
}

TEST(DelaySteps, Examples) {
  const double tau = 1.9e-3;
  EXPECT_EQ(compute_delay_steps(tau * oracle::kC, 115e-6), 16);
  EXPECT_EQ(compute_delay_steps(tau * oracle::kC, tau), 1);
  EXPECT_EQ(compute_delay_steps(0.0, tau), 0);
  EXPECT_EQ(compute_delay_steps(10.0, tau), 1);
  EXPECT_THROW(compute_delay_steps(1.0, 0.0), ConfigError);
}

TEST(QuantizedReward, Examples) {
  EXPECT_EQ(quantize_reward(6.5, 6.0, 4.0, 2.0), 2.0);
  EXPECT_EQ(quantize_reward(3.0, 3.5, 4.0, 2.0), -2.0);
  EXPECT_EQ(quantize_reward(6.5, 6.5, 4.0, 2.0), 1.0);
  EXPECT_EQ(quantize_reward(5.0, 0.0, 4.0, 2.0), 0.0);
}

TEST(QuantizedReward, BoundsOverRandomInputs) {
  Rng rng(3);
  const double r_max = 12.0;
  for (int i = 0; i < 1000; ++i) {
    const double r = rng.uniform(0.0, r_max), prev = rng.uniform(0.0, r_max);
    const double q = quantize_reward(r, prev, 4.0, 2.0);
    EXPECT_GE(q, -2.0);
    EXPECT_LE(q, std::ceil(r_max - 4.0) - 2.0 + 1.0);
    EXPECT_EQ(q, std::floor(q));
  }
}

TEST(Ball, UniformDrawsStayInside) {
  Rng rng(4);
  double mean_norm = 0.0;
  const int n = 4000, dim = 8;
  for (int i = 0; i < n; ++i) {
    const double r = random_in_ball(dim, 2.0, rng).norm();
    EXPECT_LE(r, 2.0);
    mean_norm += r / n;
  }
  // E‖x‖ = R·d/(d+1) for a uniform point in a d-ball.
  EXPECT_NEAR(mean_norm, 2.0 * dim / (dim + 1.0), 0.02);
}

TEST(Env, ResolvedNoiseAndScale) {
  channel::ChannelConfig ch;
  EnvConfig cfg;
  EXPECT_NEAR(resolved_sigma2(cfg, ch), oracle::kBoltzmann * 280.0 * 40e6, 1e-25);
  EXPECT_NEAR(resolved_sigma2(cfg, ch), 1.547e-13, 1e-16);
  cfg.sigma2 = 2e-13;
  EXPECT_EQ(resolved_sigma2(cfg, ch), 2e-13);
  const double fspl_ref = 4.0 * oracle::kPi * 540e3 * 2e9 / oracle::kC;
  EXPECT_NEAR(resolved_obs_scale(cfg, ch), fspl_ref / std::pow(10.0, ch.gain_db / 20.0), 1e-6);
  cfg.obs_scale = 3.0;
  EXPECT_EQ(resolved_obs_scale(cfg, ch), 3.0);
}

TEST(Env, ConfigValidation) {
  EnvConfig cfg;
  cfg.episode_length = cfg.delay_steps;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.delay_steps = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Env, RequiresReset) {
  auto env = make_env(1);
  EXPECT_FALSE(env.initialized());
  EXPECT_THROW(env.step(VectorXd::Zero(env.action_size())), NotInitialized);
  EXPECT_THROW(env.observation(), NotInitialized);
  env.reset();
  EXPECT_THROW(env.step(VectorXd::Zero(env.action_size() + 1)), LengthMismatch);
}

TEST(Env, ObservationLength) {
  for (int d : {0, 1, 3}) {
    auto env = make_env(d);
    EXPECT_EQ(env.reset().size(), 2 * (d + 2) * 4 * 2);
    EXPECT_EQ(env.observation_size(), 2 * (d + 2) * 4 * 2);
  }
}

TEST(Env, ChannelBlockLagsByDelaySteps) {
  const int d = 3;
  auto env = make_env(d);
  env.reset();
  Rng rng(5);
  std::vector<CMat> seen;
  for (int i = 0; i < 12; ++i) {
    seen.push_back(env.channel_now());
    if (i >= d) {
      EXPECT_EQ(env.channel_delayed(), seen[i - d]);
      const VectorXd obs = env.observation();
      EXPECT_EQ(obs.head(env.action_size()), env.obs_scale() * precoder_to_action(seen[i - d]));
    }
    env.step(random_action(env.action_size(), rng));
  }
}

TEST(Env, PrecoderBlocksHoldRecentActions) {
  const int d = 2;
  auto env = make_env(d);
  env.reset();
  Rng rng(6);
  std::vector<VectorXd> applied;
  for (int i = 0; i < 6; ++i) {
    const auto r = env.step(random_action(env.action_size(), rng) * 3.0);
    applied.push_back(r.applied_action);
    EXPECT_LE(r.applied_action.squaredNorm(), env.power() + 1e-9);
    if (i >= d) {
      const int n = env.action_size();
      for (int b = 0; b <= d; ++b) {
        EXPECT_EQ(r.obs.segment((b + 1) * n, n), applied[i - d + b]);
      }
    }
  }
}

TEST(Env, RewardUsesDelayedChannelAndPrecoder) {
  auto env = make_env(1);
  env.reset();
  Rng rng(7);
  VectorXd prev_action;
  double prev_rcon = 0.0;
  for (int i = 0; i < 8; ++i) {
    const CMat H_delayed = env.channel_delayed(), H_now = env.channel_now();
    const auto r = env.step(random_action(env.action_size(), rng));
    const CMat V = action_to_precoder(r.applied_action, 4, 2);
    EXPECT_NEAR(r.info.sum_rate, scalar_sum(H_now, V, env.sigma2()), 1e-10);
    if (i > 0) {
      const CMat V_delayed = action_to_precoder(prev_action, 4, 2);
      EXPECT_NEAR(r.r_con, scalar_sum(H_delayed, V_delayed, env.sigma2()), 1e-10);
      EXPECT_EQ(r.reward, quantize_reward(r.r_con, prev_rcon, 4.0, 2.0));
    }
    prev_action = r.applied_action;
    prev_rcon = r.r_con;
  }
}

TEST(Env, ZeroDelayRewardsTheAppliedPrecoder) {
  auto env = make_env(0);
  env.reset();
  Rng rng(8);
  for (int i = 0; i < 4; ++i) {
    const CMat H = env.channel_now();
    EXPECT_EQ(env.channel_delayed(), H);
    const auto r = env.step(random_action(env.action_size(), rng));
    EXPECT_NEAR(r.r_con, r.info.sum_rate, 1e-12);
  }
}

TEST(Env, RewardIgnoresTheCurrentActionUnderDelay) {
  auto env = make_env(2);
  env.reset();
  Rng rng(9);
  for (int i = 0; i < 3; ++i) env.step(random_action(env.action_size(), rng));
  auto copy = env;
  const auto a = env.step(random_action(env.action_size(), rng));
  const auto b = copy.step(-random_action(copy.action_size(), rng));
  EXPECT_EQ(a.r_con, b.r_con);
  EXPECT_EQ(a.reward, b.reward);
  EXPECT_NE(a.info.sum_rate, b.info.sum_rate);
}

TEST(Env, DeterministicForASeedAndContiguousInTime) {
  auto a = make_env(1, 11), b = make_env(1, 11);
  EXPECT_EQ(a.reset(), b.reset());
  const double t0 = a.time();
  Rng r1(3), r2(3);
  for (int i = 0; i < 5; ++i) {
    const auto x = a.step(random_action(a.action_size(), r1));
    const auto y = b.step(random_action(b.action_size(), r2));
    EXPECT_EQ(x.obs, y.obs);
    EXPECT_EQ(x.reward, y.reward);
  }
  EXPECT_NEAR(a.time(), t0 + 5 * a.config().delta_t, 1e-12);
  a.reset();
  EXPECT_NEAR(a.time(), t0 + 5 * a.config().delta_t, 1e-12);
  EXPECT_NE(make_env(1, 12).reset(), make_env(1, 11).reset());
}
