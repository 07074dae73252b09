#include <benchmark/benchmark.h>

#include <random>

#include "satprec/agent.hpp"
#include "satprec/baselines.hpp"
#include "satprec/channel.hpp"
#include "satprec/env.hpp"
#include "satprec/orbits.hpp"
#include "satprec/rate.hpp"

using namespace satprec;

namespace {

Eigen::MatrixXcd random_channel(int m, int k, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXcd H(m, k);
  for (auto& v : H.reshaped()) v = rng.complex_normal();
  return H;
}

env::DelayedCsiEnv make_env(int side) {
  channel::ChannelConfig ch;
  ch.geom = {side, side, 0.5};
  env::EnvConfig cfg;
  cfg.episode_length = 1 << 30;
  return env::DelayedCsiEnv(orbits::ConstellationSpec::starlink_four_layer(), ch, cfg, 1);
}

void BM_Propagate(benchmark::State& state) {
  const auto spec = orbits::ConstellationSpec::starlink_four_layer();
  double t = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(orbits::propagate(spec, t += 1.0));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(spec.satellite_count()));
}
BENCHMARK(BM_Propagate);

void BM_SampleChannel(benchmark::State& state) {
  channel::ChannelConfig cfg;
  cfg.geom = {static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 0.5};
  const auto c = orbits::GroundUser::at(orbits::kCoverageLatitude, orbits::kCoverageLongitude);
  std::vector<orbits::GroundUser> users{c, orbits::destination(c, 5e3, 1.0)};
  const auto sats = orbits::propagate(orbits::ConstellationSpec::starlink_four_layer(), 0.0);
  const auto sat = sats[orbits::select_and_handover({}, sats, c).serving_index];
  double t = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(channel::sample_channel(users, sat, t += 1.9e-3, cfg, 3));
}
BENCHMARK(BM_SampleChannel)->Arg(2)->Arg(3);

void BM_SumRate(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto H = random_channel(m, 2, 1), V = random_channel(m, 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(rate::sum_rate(H, V, 0.1));
}
BENCHMARK(BM_SumRate)->Arg(4)->Arg(9);

void BM_ZeroForcing(benchmark::State& state) {
  const auto H = random_channel(9, 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(baselines::zf_precoder(H, 1.0));
}
BENCHMARK(BM_ZeroForcing);

void BM_EnvStep(benchmark::State& state) {
  auto env = make_env(static_cast<int>(state.range(0)));
  env.reset();
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(env.action_size(), 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(env.step(a));
}
BENCHMARK(BM_EnvStep)->Arg(2)->Arg(3);

void BM_DdpgLearn(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const int actions = 2 * side * side * 2, states = 3 * actions;
  agent::DdpgConfig cfg;
  agent::DdpgAgent ag(states, actions, 1.0, cfg, 1);
  Rng rng(4);
  auto draw = [&](int n) {
    Eigen::VectorXd v(n);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
  };
  for (int i = 0; i < cfg.batch_size; ++i) ag.observe({draw(states), draw(actions), -1.0, draw(states)});
  for (auto _ : state) benchmark::DoNotOptimize(ag.learn());
}
BENCHMARK(BM_DdpgLearn)->Arg(2)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
