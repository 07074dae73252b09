#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "satprec/agent.hpp"
#include "support/oracles.hpp"

using namespace satprec;
using namespace satprec::agent;
using nn::Activation;
using nn::Mlp;

namespace {

// Zero-weight critic whose output bias is `value`.
Mlp constant_critic(int states, int actions, double value) {
  Mlp c(nn::critic_layers(states, actions));
  c.layers().back().b(0) = value;
  return c;
}

Batch random_batch(int states, int actions, int n, Rng& rng) {
  Batch b;
  b.s = MatrixXd(states, n);
  b.a = MatrixXd(actions, n);
  b.s_next = MatrixXd(states, n);
  b.r = VectorXd(n);
  for (auto& v : b.s.reshaped()) v = rng.uniform(-1, 1);
  for (auto& v : b.a.reshaped()) v = rng.uniform(-1, 1);
  for (auto& v : b.s_next.reshaped()) v = rng.uniform(-1, 1);
  for (auto& v : b.r) v = rng.uniform(-2, 2);
  return b;
}

env::DelayedCsiEnv small_env(int delay, int episode_length) {
  channel::ChannelConfig ch;
  ch.geom = {2, 2, 0.5};
  env::EnvConfig cfg;
  cfg.delay_steps = delay;
  cfg.episode_length = episode_length;
  return env::DelayedCsiEnv(orbits::ConstellationSpec::starlink_four_layer(), ch, cfg, 5);
}

}  // namespace

TEST(Noise, ClosedFormDecayAndFloor) {
  NoiseSchedule n(0.11, 0.99996, 0.05);
  EXPECT_EQ(n.next(), 0.11);
  for (int i = 1; i < 1000; ++i) n.next();
  EXPECT_NEAR(n.variance(), 0.11 * std::pow(0.99996, 1000), 1e-12);
  double prev = n.variance();
  for (int i = 1000; i < 20000; ++i) {
    n.next();
    EXPECT_LE(n.variance(), prev);
    prev = n.variance();
  }
  EXPECT_GT(0.05, 0.11 * std::pow(0.99996, 20000));
  EXPECT_EQ(n.variance(), 0.05);
  EXPECT_EQ(n.next(), 0.05);
  EXPECT_EQ(n.variance(), 0.05);
}

TEST(SelectAction, ZeroActorWithoutNoiseGivesZero) {
  const Mlp actor(nn::actor_layers(6, 4));
  NoiseSchedule quiet(0.0, 1.0, 0.0);
  Rng rng(1);
  EXPECT_EQ(select_action(actor, VectorXd::Ones(6), 1.0, quiet, rng), VectorXd::Zero(4));
}

TEST(SelectAction, AlwaysInsideThePowerBall) {
  Rng init(2);
  const Mlp actor = Mlp::random(nn::actor_layers(6, 4), init);
  NoiseSchedule noise(5.0, 1.0, 0.0);
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    VectorXd s(6);
    for (auto& v : s) v = rng.uniform(-3, 3);
    EXPECT_LE(select_action(actor, s, 2.0, noise, rng).squaredNorm(), 2.0 + 1e-9);
  }
}

TEST(SelectAction, PolicyIsScaledAndProjected) {
  Mlp actor({{1, 3, Activation::tanh}});
  actor.layers()[0].b << 0.3, -0.2, 0.1;  // inside the ball after √P scaling
  const VectorXd a = policy_action(actor, VectorXd::Zero(1), 4.0);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a(i), 2.0 * std::tanh(actor.layers()[0].b(i)), 1e-15);
  actor.layers()[0].b << 5.0, 5.0, 5.0;
  EXPECT_NEAR(policy_action(actor, VectorXd::Zero(1), 4.0).norm(), 2.0, 1e-12);
}

TEST(Targets, Examples) {
  const int states = 3, actions = 2;
  Rng init(4);
  const Mlp target_actor = Mlp::random(nn::actor_layers(states, actions), init);
  Batch b = random_batch(states, actions, 2, init);
  b.r << 1.0, 1.0;
  const auto q = q_targets(b, target_actor, constant_critic(states, actions, 10.0), 0.95, 1.0, false);
  EXPECT_NEAR(q(0), 10.5, 1e-12);
  EXPECT_EQ(q(1), 1.0);
  const auto all = q_targets(b, target_actor, constant_critic(states, actions, 10.0), 0.95, 1.0, true);
  EXPECT_NEAR(all(1), 10.5, 1e-12);

  Batch big = random_batch(states, actions, 8, init);
  const Mlp critic = Mlp::random(nn::critic_layers(states, actions), init);
  EXPECT_EQ(q_targets(big, target_actor, critic, 0.0, 1.0, true), big.r);
  EXPECT_EQ(q_targets(big, target_actor, constant_critic(states, actions, 0.0), 0.95, 1.0, true), big.r);
  Batch empty;
  EXPECT_THROW(q_targets(empty, target_actor, critic, 0.95, 1.0, false), EmptyBatch);
}

TEST(Targets, BootstrapMatchesDirectEvaluation) {
  const int states = 4, actions = 2;
  Rng init(5);
  const Mlp ta = Mlp::random(nn::actor_layers(states, actions), init);
  const Mlp tc = Mlp::random(nn::critic_layers(states, actions), init);
  const Batch b = random_batch(states, actions, 5, init);
  const auto q = q_targets(b, ta, tc, 0.9, 2.0, false);
  for (int j = 0; j < 4; ++j) {
    VectorXd z(states + actions);
    z << b.s_next.col(j), policy_action(ta, b.s_next.col(j), 2.0);
    EXPECT_NEAR(q(j), b.r(j) + 0.9 * tc.forward(z)(0), 1e-12);
  }
  EXPECT_EQ(q(4), b.r(4));
}

TEST(Critic, PerfectCriticHasZeroLossAndGradient) {
  const int states = 3, actions = 2;
  Rng rng(6);
  const Mlp critic = constant_critic(states, actions, 1.5);
  const Batch b = random_batch(states, actions, 6, rng);
  const VectorXd q = VectorXd::Constant(6, 1.5);
  EXPECT_EQ(critic_loss(critic, b, q), 0.0);
  EXPECT_EQ(critic_gradient(critic, b, q).squared_norm(), 0.0);
}

TEST(Critic, LossMatchesDuplicateEvaluation) {
  const int states = 3, actions = 2;
  Rng rng(7);
  const Mlp critic = Mlp::random(nn::critic_layers(states, actions), rng);
  const Batch b = random_batch(states, actions, 9, rng);
  VectorXd q(9);
  for (auto& v : q) v = rng.normal();
  double expect = 0.0;
  for (int j = 0; j < 9; ++j) {
    VectorXd z(states + actions);
    z << b.s.col(j), b.a.col(j);
    expect += std::pow(q(j) - critic.forward(z)(0), 2) / 9.0;
  }
  EXPECT_NEAR(critic_loss(critic, b, q), expect, 1e-12);
}

TEST(Critic, UpdateDescendsOnALinearCritic) {
  Rng rng(8);
  Mlp critic = Mlp::random({{3, 1, Activation::none}}, rng);
  Batch b = random_batch(2, 1, 1, rng);
  const VectorXd q = VectorXd::Constant(1, 4.0);
  nn::OptimizerConfig cfg;
  cfg.kind = nn::OptimizerConfig::Kind::sgd;
  cfg.learning_rate = 1e-3;
  nn::Optimizer opt(critic, cfg);
  const double before = critic_update(critic, opt, b, q);
  EXPECT_LT(critic_loss(critic, b, q), before);
}

TEST(Critic, GradientMatchesFiniteDifferences) {
  Rng rng(9);
  Mlp critic = Mlp::random(nn::critic_layers(4, 2), rng);
  const Batch b = random_batch(4, 2, 5, rng);
  VectorXd q(5);
  for (auto& v : q) v = rng.normal();
  const auto g = Mlp::flatten(critic_gradient(critic, b, q));
  for (int trial = 0; trial < 50; ++trial) {
    const auto i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(g.size()) - 1));
    const double orig = critic.parameter(i), h = 1e-6;
    critic.set_parameter(i, orig + h);
    const double fp = critic_loss(critic, b, q);
    critic.set_parameter(i, orig - h);
    const double fm = critic_loss(critic, b, q);
    critic.set_parameter(i, orig);
    const double fd = (fp - fm) / (2 * h);
    EXPECT_LT(std::abs(fd - g[i]) / std::max({std::abs(fd), std::abs(g[i]), 1e-6}), 1e-4);
  }
}

TEST(Actor, CriticBlindToActionsGivesZeroUpdate) {
  const int states = 3, actions = 2;
  Rng rng(10);
  Mlp actor = Mlp::random(nn::actor_layers(states, actions), rng);
  Mlp critic = Mlp::random(nn::critic_layers(states, actions), rng);
  critic.layers()[0].W.rightCols(actions).setZero();
  const Batch b = random_batch(states, actions, 4, rng);
  EXPECT_EQ(actor_gradient(actor, critic, b.s, 1.0).squared_norm(), 0.0);
  const Mlp before = actor;
  nn::Optimizer opt(actor, {});
  actor_update(actor, critic, opt, b.s, 1.0);
  EXPECT_TRUE(actor == before);
}

TEST(Actor, ToyQuadraticDrivesOutputToOptimum) {
  // Q(s, a) = −(a − 3)² with a = √P · tanh(b) and P = 16.
  Mlp actor({{1, 1, Activation::tanh}});
  nn::OptimizerConfig cfg;
  cfg.learning_rate = 1e-2;
  nn::Optimizer opt(actor, cfg);
  const MatrixXd S = MatrixXd::Zero(1, 1);
  for (int i = 0; i < 3000; ++i) {
    const double a = policy_action(actor, VectorXd::Zero(1), 16.0)(0);
    policy_gradient_step(actor, opt, S, MatrixXd::Constant(1, 1, 4.0 * -2.0 * (a - 3.0)));
  }
  EXPECT_NEAR(policy_action(actor, VectorXd::Zero(1), 16.0)(0), 3.0, 1e-2);
}

TEST(Actor, GradientMatchesComposedFiniteDifferences) {
  const int states = 3, actions = 4;
  for (double power : {0.05, 1.0}) {  // small power keeps the projection active
    Rng rng(11);
    Mlp actor = Mlp::random(nn::actor_layers(states, actions), rng);
    const Mlp critic = Mlp::random(nn::critic_layers(states, actions), rng);
    MatrixXd S(states, 6);
    for (auto& v : S.reshaped()) v = rng.uniform(-2, 2);
    auto objective = [&] {
      double s = 0.0;
      for (int j = 0; j < S.cols(); ++j) {
        VectorXd z(states + actions);
        z << S.col(j), policy_action(actor, S.col(j), power);
        s += critic.forward(z)(0);
      }
      return s / static_cast<double>(S.cols());
    };
    const auto g = Mlp::flatten(actor_gradient(actor, critic, S, power));
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double orig = actor.parameter(i), h = 1e-6;
      actor.set_parameter(i, orig + h);
      const double fp = objective();
      actor.set_parameter(i, orig - h);
      const double fm = objective();
      actor.set_parameter(i, orig);
      const double fd = (fp - fm) / (2 * h);
      EXPECT_LT(std::abs(fd - g[i]) / std::max({std::abs(fd), std::abs(g[i]), 1e-5}), 1e-3) << i;
    }
  }
}

TEST(Replay, FifoEvictionAndDistinctSamples) {
  ReplayBuffer buf(5);
  for (int i = 0; i < 8; ++i) buf.push({VectorXd::Constant(1, i), VectorXd::Zero(1), double(i), VectorXd::Zero(1)});
  EXPECT_EQ(buf.size(), 5);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(buf.at(i).r, i + 3.0);
  Rng rng(12);
  std::set<double> seen;
  for (int k = 0; k < 200; ++k) {
    const auto b = buf.sample(5, rng);
    std::set<double> inside(b.r.data(), b.r.data() + 5);
    EXPECT_EQ(inside.size(), 5u);
    const auto c = buf.sample(2, rng);
    seen.insert(c.r.data(), c.r.data() + 2);
  }
  EXPECT_EQ(seen.size(), 5u);
  EXPECT_THROW(buf.sample(6, rng), EmptyBatch);
  EXPECT_THROW(ReplayBuffer(3).sample(1, rng), EmptyBatch);
}

TEST(Replay, SamplingIsRoughlyUniform) {
  ReplayBuffer buf(10);
  for (int i = 0; i < 10; ++i) buf.push({VectorXd::Zero(1), VectorXd::Zero(1), double(i), VectorXd::Zero(1)});
  Rng rng(13);
  std::vector<int> counts(10, 0);
  const int draws = 20000;
  for (int k = 0; k < draws; ++k) {
    const auto b = buf.sample(3, rng);
    for (int j = 0; j < 3; ++j) ++counts[static_cast<int>(b.r(j))];
  }
  for (int c : counts) EXPECT_NEAR(c, draws * 3 / 10.0, 400);
}

TEST(Agent, TargetsMoveByExactlyOneSoftUpdate) {
  DdpgConfig cfg;
  cfg.batch_size = 4;
  DdpgAgent agent(3, 2, 1.0, cfg, 1);
  Rng rng(14);
  EXPECT_TRUE(agent.target_actor() == agent.actor());
  for (int i = 0; i < 3; ++i) {
    agent.observe({VectorXd::Random(3), VectorXd::Random(2), 1.0, VectorXd::Random(3)});
    EXPECT_FALSE(agent.learn());
  }
  agent.observe({VectorXd::Random(3), VectorXd::Random(2), 1.0, VectorXd::Random(3)});
  Mlp expect = agent.target_actor();
  ASSERT_TRUE(agent.learn());
  nn::soft_update(expect, agent.actor(), cfg.tau);
  EXPECT_TRUE(expect == agent.target_actor());
}

TEST(Train, BoundaryAccountingAndDeterminism) {
  for (int d : {0, 2}) {
    auto env = small_env(d, d + 1);
    DdpgConfig cfg;
    cfg.episodes = 1;
    DdpgAgent agent(env.observation_size(), env.action_size(), env.power(), cfg, 3);
    const auto log = train(env, agent);
    EXPECT_EQ(agent.buffer().size(), d + 1);
    ASSERT_EQ(log.episodes.size(), 1u);
    EXPECT_EQ(log.steps.size(), static_cast<std::size_t>(d + 1));
  }
  auto run = [] {
    auto env = small_env(1, 40);
    DdpgConfig cfg;
    cfg.episodes = 2;
    cfg.batch_size = 16;
    DdpgAgent agent(env.observation_size(), env.action_size(), env.power(), cfg, 9);
    auto log = train(env, agent);
    return std::make_pair(log, agent.actor());
  };
  const auto [a, actor_a] = run();
  const auto [b, actor_b] = run();
  EXPECT_TRUE(actor_a == actor_b);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].r_quant, b.steps[i].r_quant);
    EXPECT_EQ(a.steps[i].sum_rate, b.steps[i].sum_rate);
  }
  for (std::size_t i = 0; i < a.episodes.size(); ++i) {
    EXPECT_EQ(a.episodes[i].critic_loss, b.episodes[i].critic_loss);
    EXPECT_EQ(a.episodes[i].noise_var, b.episodes[i].noise_var);
  }
}
