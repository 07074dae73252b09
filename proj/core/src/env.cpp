#include "satprec/env.hpp"

#include <algorithm>
#include <cmath>

namespace satprec::env {

void EnvConfig::validate() const {
  if (delay_steps < 0) throw ConfigError("env.delay_steps must be >= 0");
  if (!(delta_t > 0.0)) throw ConfigError("env.delta_t must be positive");
  if (users < 1) throw ConfigError("env.users must be >= 1");
  if (!(power > 0.0)) throw ConfigError("env.power must be positive");
  if (episode_length <= delay_steps) throw ConfigError("env.episode_length must exceed delay_steps");
  if (!std::isfinite(eta1) || !std::isfinite(eta2)) throw ConfigError("reward thresholds must be finite");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ConfigError("env.epsilon must lie in [0, 1)");
  if (start_time < 0.0) throw ConfigError("env.start_time must be >= 0");
}

double resolved_sigma2(const EnvConfig& env, const channel::ChannelConfig& ch) {
  if (env.sigma2 > 0.0) return env.sigma2;
  return channel::noise_power(env.temperature, env.bandwidth_fraction * ch.frequency);
}

double resolved_obs_scale(const EnvConfig& env, const channel::ChannelConfig& ch) {
  if (env.obs_scale > 0.0) return env.obs_scale;
  return channel::fspl(ch.reference_altitude, ch.frequency) / ch.amplitude_gain();
}

VectorXd project_action(const VectorXd& x, double radius) {
  const double n = x.norm();
  if (n == 0.0) return x;
  return radius * x / (n + std::max(0.0, radius - n));
}

CMat action_to_precoder(const VectorXd& a, int m, int k) {
  const Eigen::Index mk = static_cast<Eigen::Index>(m) * k;
  if (a.size() != 2 * mk) throw LengthMismatch("action length must be 2MK");
  CMat V(m, k);
  for (int col = 0; col < k; ++col) {
    for (int row = 0; row < m; ++row) {
      const Eigen::Index idx = static_cast<Eigen::Index>(col) * m + row;
      V(row, col) = {a(idx), a(mk + idx)};
    }
  }
  return V;
}

VectorXd precoder_to_action(const CMat& V) {
  const Eigen::Index m = V.rows(), k = V.cols(), mk = m * k;
  VectorXd a(2 * mk);
  for (Eigen::Index col = 0; col < k; ++col) {
    for (Eigen::Index row = 0; row < m; ++row) {
      a(col * m + row) = V(row, col).real();
      a(mk + col * m + row) = V(row, col).imag();
    }
  }
  return a;
}

int compute_delay_steps(double distance, double delta_t) {
  if (!(delta_t > 0.0)) throw ConfigError("delta_t must be positive");
  if (distance <= 0.0) return 0;
  const double steps = std::floor(distance / kSpeedOfLight / delta_t + 1e-9);
  return std::max(1, static_cast<int>(steps));
}

double quantize_reward(double r_con, double r_con_prev, double eta1, double eta2) {
  double r = std::max(std::ceil(r_con - eta1), 0.0) - eta2;
  if (r_con > r_con_prev) r += 1.0;
  return r;
}

VectorXd random_in_ball(int dim, double radius, Rng& rng) {
  VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x(i) = rng.normal();
  const double n = x.norm();
  if (n == 0.0) return VectorXd::Zero(dim);
  const double r = radius * std::pow(rng.uniform(), 1.0 / dim);
  return x * (r / n);
}

StepRow make_row(int episode, int step, const StepResult& r) {
  return {episode, step, r.t, r.r_con, r.reward, r.info.sum_rate, r.serving, r.handover};
}

DelayedCsiEnv::DelayedCsiEnv(orbits::ConstellationSpec constellation,
                             channel::ChannelConfig channel, EnvConfig config,
                             std::uint64_t seed)
    : constellation_(std::move(constellation)),
      channel_cfg_(std::move(channel)),
      cfg_(config),
      channel_seed_(derive_seed(seed, "channel")),
      warmup_rng_(Rng::stream(seed, "warmup")) {
  constellation_.validate();
  channel_cfg_.validate();
  cfg_.validate();
  center_ = orbits::GroundUser::at(cfg_.center_latitude, cfg_.center_longitude);
  auto user_rng = Rng::stream(seed, "users");
  users_ = orbits::place_users(center_, cfg_.users, cfg_.coverage_radius,
                               channel_cfg_.user_speed, user_rng);
  policy_.epsilon = cfg_.epsilon;
  sigma2_ = resolved_sigma2(cfg_, channel_cfg_);
  obs_scale_ = resolved_obs_scale(cfg_, channel_cfg_);
  // First decision instant leaves room for the delayed-channel pre-roll.
  step_index_ = cfg_.delay_steps;
}

double DelayedCsiEnv::time_of(long step) const {
  return cfg_.start_time + static_cast<double>(step) * cfg_.delta_t;
}

double DelayedCsiEnv::time() const { return time_of(step_index_); }

DelayedCsiEnv::Instant DelayedCsiEnv::advance_handover(double t) {
  const auto sats = orbits::propagate(constellation_, t);
  const auto step = orbits::select_and_handover(policy_, sats, center_, cfg_.min_elevation);
  policy_ = step.policy;
  return {sats[step.serving_index], step.handover};
}

CMat DelayedCsiEnv::channel_at(const orbits::SatelliteState& sat, double t) const {
  return channel::sample_channel(users_, sat, t, channel_cfg_, channel_seed_).H;
}

VectorXd DelayedCsiEnv::reset() {
  const double t = time();
  const auto now = advance_handover(t);
  serving_ = now.serving;
  handover_pending_ = now.handover;

  channels_.clear();
  for (int lag = cfg_.delay_steps; lag >= 0; --lag) {
    const double tl = time_of(step_index_ - lag);
    const auto sat = orbits::propagate_one(constellation_, serving_.id, tl);
    channels_.push_back(channel_at(sat, tl));
  }

  precoders_.clear();
  const double radius = std::sqrt(cfg_.power);
  for (int i = 0; i <= cfg_.delay_steps; ++i) {
    precoders_.push_back(action_to_precoder(random_in_ball(action_size(), radius, warmup_rng_),
                                            antennas(), users()));
  }
  r_con_prev_ = 0.0;
  initialized_ = true;
  return observation();
}

const CMat& DelayedCsiEnv::channel_now() const {
  if (!initialized_) throw NotInitialized("environment not reset");
  return channels_.back();
}

const CMat& DelayedCsiEnv::channel_delayed() const {
  if (!initialized_) throw NotInitialized("environment not reset");
  return channels_.front();
}

VectorXd DelayedCsiEnv::observation() const {
  if (!initialized_) throw NotInitialized("environment not reset");
  const int block = action_size();
  VectorXd obs(observation_size());
  obs.segment(0, block) = obs_scale_ * precoder_to_action(channels_.front());
  for (std::size_t i = 0; i < precoders_.size(); ++i) {
    obs.segment(static_cast<Eigen::Index>(i + 1) * block, block) =
        precoder_to_action(precoders_[i]);
  }
  return obs;
}

StepResult DelayedCsiEnv::step(const VectorXd& action) {
  if (!initialized_ || static_cast<int>(precoders_.size()) != cfg_.delay_steps + 1 ||
      static_cast<int>(channels_.size()) != cfg_.delay_steps + 1) {
    throw NotInitialized("environment history shorter than the observation delay");
  }
  if (action.size() != action_size()) throw LengthMismatch("action length must be 2MK");

  StepResult out;
  out.t = time();
  out.serving = serving_.id;
  out.handover = handover_pending_;
  out.applied_action = project_action(action, std::sqrt(cfg_.power));
  const CMat V = action_to_precoder(out.applied_action, antennas(), users());

  // V(t − T_d): the just-applied precoder when there is no delay.
  const CMat& V_delayed = cfg_.delay_steps == 0 ? V : precoders_[1];
  out.r_con = rate::sum_rate(channels_.front(), V_delayed, sigma2_).sum_rate;
  out.reward = quantize_reward(out.r_con, r_con_prev_, cfg_.eta1, cfg_.eta2);
  r_con_prev_ = out.r_con;
  out.info = rate::sum_rate(channels_.back(), V, sigma2_);

  precoders_.pop_front();
  precoders_.push_back(V);

  ++step_index_;
  const double t = time();
  const auto next = advance_handover(t);
  serving_ = next.serving;
  handover_pending_ = next.handover;
  channels_.pop_front();
  channels_.push_back(channel_at(serving_, t));

  out.obs = observation();
  return out;
}

}  // namespace satprec::env
