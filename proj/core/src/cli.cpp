#include "satprec/cli.hpp"

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "satprec/agent.hpp"
#include "satprec/baselines.hpp"
#include "satprec/csv.hpp"
#include "satprec/oracles.hpp"
#include "satprec/rng.hpp"

namespace satprec::cli {
namespace fs = std::filesystem;

env::DelayedCsiEnv make_env(const config::RunConfig& cfg, double start_offset) {
  auto e = cfg.env;
  e.start_time += start_offset;
  return env::DelayedCsiEnv(cfg.constellation, cfg.channel, e, derive_seed(cfg.seed, "env"));
}

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  std::int64_t seed = -1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config_path, "INI configuration file")->check(CLI::ExistingFile);
  sub->add_option("-s,--set", c.overrides, "Override, e.g. env.users=4 (repeatable)");
  sub->add_option("-o,--out", c.out, "Output directory");
  sub->add_option("--seed", c.seed, "Root seed");
}

config::RunConfig resolve(const Common& c) {
  config::RunConfig cfg = c.config_path.empty() ? config::RunConfig{} : config::load(c.config_path);
  for (const auto& o : c.overrides) config::apply_override(cfg, o);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  cfg.validate();
  return cfg;
}

void freeze(const config::RunConfig& cfg) {
  config::save(cfg, fs::path(cfg.output_dir) / "config.ini");
}

int cmd_constellation(const config::RunConfig& cfg) {
  const auto center = orbits::GroundUser::at(cfg.env.center_latitude, cfg.env.center_longitude);
  const auto trace = orbits::simulate_handovers(cfg.constellation, center, cfg.env.epsilon,
                                                cfg.trace_duration, cfg.trace_step,
                                                cfg.env.min_elevation);
  freeze(cfg);
  csv::write_handovers(fs::path(cfg.output_dir) / "handovers.csv", trace);
  fmt::print("handovers: {} over {} s (epsilon {})\n", trace.handover_count, cfg.trace_duration,
             cfg.env.epsilon);
  return 0;
}

int cmd_train(const config::RunConfig& cfg) {
  auto environment = make_env(cfg);
  agent::DdpgAgent learner(environment.observation_size(), environment.action_size(),
                           environment.power(), cfg.ddpg, derive_seed(cfg.seed, "agent"));
  freeze(cfg);
  const fs::path dir = cfg.output_dir;
  const int every = cfg.ddpg.checkpoint_every;
  const int total = cfg.ddpg.episodes;
  auto log = agent::train(environment, learner, [&](const agent::EpisodeRow& row, const agent::DdpgAgent& a) {
    if (every > 0 && (row.episode + 1) % every == 0) a.save(dir, fmt::format("_ep{}", row.episode + 1));
    if (total <= 20 || (row.episode + 1) % std::max(1, total / 20) == 0 || row.episode + 1 == total) {
      fmt::print(stderr, "episode {}/{}: reward {:.3f}, sum rate {:.4f}, noise var {:.4f}\n",
                 row.episode + 1, total, row.mean_reward, row.mean_sum_rate, row.noise_var);
    }
  });
  learner.save(dir);
  csv::write_episodes(dir / "training_log.csv", log.episodes);
  csv::write_steps(dir / "train_steps.csv", log.steps);
  fmt::print("trained {} episodes; final mean sum rate {:.6g}\n", total,
             log.episodes.empty() ? 0.0 : log.episodes.back().mean_sum_rate);
  return 0;
}

double training_span(const config::RunConfig& cfg) {
  return static_cast<double>(cfg.ddpg.episodes) * cfg.env.episode_length * cfg.env.delta_t;
}

int cmd_eval(const config::RunConfig& cfg, const std::string& actor_path) {
  const fs::path path = actor_path.empty() ? fs::path(cfg.output_dir) / "actor.ckpt" : fs::path(actor_path);
  const auto actor = nn::load(path);
  auto environment = make_env(cfg, training_span(cfg));
  if (actor.input_width() != environment.observation_size() ||
      actor.output_width() != environment.action_size()) {
    throw ShapeMismatch(fmt::format("checkpoint {}x{} does not match environment {}x{}",
                                    actor.input_width(), actor.output_width(),
                                    environment.observation_size(), environment.action_size()));
  }
  auto baseline_env = environment;
  const auto rows = agent::evaluate(environment, actor, cfg.eval_episodes);
  auto rng = Rng::stream(cfg.seed, "eval-random");
  const auto random_rows =
      baselines::rollout(baseline_env, baselines::Kind::random, baselines::Csi::delayed,
                         cfg.eval_episodes, rng);
  freeze(cfg);
  csv::write_steps(fs::path(cfg.output_dir) / "eval_steps.csv", rows);
  fmt::print("policy mean sum rate {:.6g}; random precoder {:.6g}\n", agent::mean_sum_rate(rows),
             agent::mean_sum_rate(random_rows));
  return 0;
}

int cmd_baseline(const config::RunConfig& cfg, bool channel_trace) {
  const auto kind = baselines::parse_kind(cfg.baseline);
  const auto csi = baselines::parse_csi(cfg.csi);
  auto environment = make_env(cfg, training_span(cfg));
  auto trace_env = environment;
  auto rng = Rng::stream(cfg.seed, "baseline");
  const auto rows = baselines::rollout(environment, kind, csi, cfg.eval_episodes, rng);
  freeze(cfg);
  const fs::path dir = cfg.output_dir;
  csv::write_steps(dir / fmt::format("baseline_{}_{}.csv", cfg.baseline, cfg.csi), rows);
  if (channel_trace) {
    csv::write_channels(dir / "channels.csv",
                        baselines::record_trace(trace_env, cfg.env.episode_length));
  }
  fmt::print("{} ({} CSI) mean sum rate {:.6g}\n", cfg.baseline, cfg.csi, agent::mean_sum_rate(rows));
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Delayed-CSI downlink precoding simulator for LEO satellites"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common common;
  auto* constellation = app.add_subcommand("constellation", "Trace serving satellite and handovers");
  double epsilon = -1.0, duration = -1.0, step = -1.0;
  constellation->add_option("--epsilon", epsilon, "Handover hysteresis");
  constellation->add_option("--duration", duration, "Trace length in seconds");
  constellation->add_option("--step", step, "Time step in seconds");

  auto* train = app.add_subcommand("train", "Train the DDPG precoder");
  int episodes = -1, steps = -1, delay = -1;
  train->add_option("--episodes", episodes, "Episodes (Z)");
  train->add_option("--steps", steps, "Steps per episode (J)");
  train->add_option("--delay-steps", delay, "Observation delay T_d");

  auto* eval = app.add_subcommand("eval", "Evaluate a trained actor");
  std::string actor_path;
  eval->add_option("--actor", actor_path, "Actor checkpoint (default <out>/actor.ckpt)");
  eval->add_option("--episodes", episodes, "Evaluation episodes");

  auto* baseline = app.add_subcommand("baseline", "Run a ZF, MRT or random precoder");
  std::string kind, csi;
  bool channel_trace = false;
  baseline->add_option("--kind", kind, "zf, mrt or random");
  baseline->add_option("--csi", csi, "perfect or delayed");
  baseline->add_option("--episodes", episodes, "Episodes");
  baseline->add_flag("--channel-trace", channel_trace, "Also export one episode of channels");

  auto* check = app.add_subcommand("check", "Run the numerical self-checks");

  for (auto* sub : {constellation, train, eval, baseline, check}) add_common(sub, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    auto cfg = resolve(common);
    if (*constellation) {
      if (epsilon >= 0.0) cfg.env.epsilon = epsilon;
      if (duration >= 0.0) cfg.trace_duration = duration;
      if (step > 0.0) cfg.trace_step = step;
      cfg.validate();
      return cmd_constellation(cfg);
    }
    if (*train) {
      if (episodes >= 0) cfg.ddpg.episodes = episodes;
      if (steps > 0) cfg.env.episode_length = steps;
      if (delay >= 0) cfg.env.delay_steps = delay;
      cfg.validate();
      return cmd_train(cfg);
    }
    if (*eval) {
      if (episodes >= 0) cfg.eval_episodes = episodes;
      return cmd_eval(cfg, actor_path);
    }
    if (*baseline) {
      if (!kind.empty()) cfg.baseline = kind;
      if (!csi.empty()) cfg.csi = csi;
      if (episodes >= 0) cfg.eval_episodes = episodes;
      return cmd_baseline(cfg, channel_trace);
    }
    const bool ok = oracles::report(oracles::run_all(cfg.seed), std::cout);
    return ok ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("satprec");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace satprec::cli
