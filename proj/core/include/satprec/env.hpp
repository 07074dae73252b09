#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include <Eigen/Core>

#include "satprec/channel.hpp"
#include "satprec/orbits.hpp"
#include "satprec/rate.hpp"
#include "satprec/rng.hpp"

namespace satprec::env {

using Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;

struct EnvConfig {
  int delay_steps = 1;           // T_d
  double delta_t = 1.9e-3;       // s between pilots
  int users = 2;                 // K
  double power = 1.0;            // W
  double temperature = 280.0;    // K
  double bandwidth_fraction = 0.02;
  double sigma2 = 0.0;           // W; <= 0 derives K_B T B with B = fraction * f
  double eta1 = 4.0;
  double eta2 = 2.0;
  double obs_scale = 0.0;        // <= 0 selects FSPL(reference altitude) / gain
  int episode_length = 480;      // J
  double start_time = 0.0;       // s
  double epsilon = 0.1;          // handover hysteresis
  double min_elevation = orbits::kDefaultMinElevation;
  double center_latitude = orbits::kCoverageLatitude;
  double center_longitude = orbits::kCoverageLongitude;
  double coverage_radius = orbits::kCoverageRadius;

  void validate() const;
};

/// Noise power implied by the configuration.
double resolved_sigma2(const EnvConfig& env, const channel::ChannelConfig& ch);
/// Observation scale implied by the configuration.
double resolved_obs_scale(const EnvConfig& env, const channel::ChannelConfig& ch);

/// Radial projection onto {‖x‖ ≤ radius}: radius·x / (‖x‖ + max(0, radius − ‖x‖)).
VectorXd project_action(const VectorXd& x, double radius);

/// a[k·M + m] = Re V(m,k), a[MK + k·M + m] = Im V(m,k).
CMat action_to_precoder(const VectorXd& a, int m, int k);
VectorXd precoder_to_action(const CMat& V);

/// floor((distance / c) / Δt + 1e-9), at least 1 for a positive distance.
int compute_delay_steps(double distance, double delta_t);

/// max(⌈r − η1⌉, 0) − η2, plus one when r strictly exceeds the previous value.
double quantize_reward(double r_con, double r_con_prev, double eta1, double eta2);

/// Uniform draw from the ball of `radius` in `dim` dimensions.
VectorXd random_in_ball(int dim, double radius, Rng& rng);

struct StepResult {
  VectorXd obs;                // observation for the next decision
  double reward = 0.0;         // quantized
  double r_con = 0.0;          // delayed-CSI sum rate driving the reward
  rate::RateReport info;       // rate of the applied precoder on the true channel
  VectorXd applied_action;     // after projection
  double t = 0.0;              // time the action was applied at
  orbits::SatelliteId serving;
  bool handover = false;       // a handover happened at this step's instant
};

/// Per-step log row shared by training, evaluation and baselines.
struct StepRow {
  int episode = 0;
  int step = 0;
  double t = 0.0;
  double r_con = 0.0;
  double r_quant = 0.0;
  double sum_rate = 0.0;
  orbits::SatelliteId serving;
  bool handover = false;
};

StepRow make_row(int episode, int step, const StepResult& r);

/// Constant-delay MDP over the satellite downlink.
///
/// The observation used to choose V(t) holds the delayed channel H(t − T_d)
/// followed by the T_d + 1 most recent precoders V(t − T_d − 1) … V(t − 1),
/// each as real parts then imaginary parts. The reward for V(t) is computed
/// from H(t − T_d) and V(t − T_d). Time runs on continuously across episodes.
class DelayedCsiEnv {
 public:
  DelayedCsiEnv(orbits::ConstellationSpec constellation, channel::ChannelConfig channel,
                EnvConfig config, std::uint64_t seed);

  VectorXd reset();
  StepResult step(const VectorXd& action);

  int antennas() const { return channel_cfg_.geom.elements(); }
  int users() const { return cfg_.users; }
  int delay_steps() const { return cfg_.delay_steps; }
  int action_size() const { return 2 * antennas() * users(); }
  int observation_size() const { return (cfg_.delay_steps + 2) * action_size(); }
  double power() const { return cfg_.power; }
  double sigma2() const { return sigma2_; }
  double obs_scale() const { return obs_scale_; }
  double time() const;
  bool initialized() const { return initialized_; }
  int handover_count() const { return policy_.handover_count; }

  const EnvConfig& config() const { return cfg_; }
  const channel::ChannelConfig& channel_config() const { return channel_cfg_; }
  const std::vector<orbits::GroundUser>& user_positions() const { return users_; }

  /// H(t) at the current decision instant (not visible to the agent).
  const CMat& channel_now() const;
  /// H(t − T_d), the CSI the agent observes.
  const CMat& channel_delayed() const;
  VectorXd observation() const;

 private:
  struct Instant {
    orbits::SatelliteState serving;
    bool handover = false;
  };
  Instant advance_handover(double t);
  CMat channel_at(const orbits::SatelliteState& sat, double t) const;
  double time_of(long step) const;

  orbits::ConstellationSpec constellation_;
  channel::ChannelConfig channel_cfg_;
  EnvConfig cfg_;
  std::uint64_t channel_seed_;
  Rng warmup_rng_;
  orbits::GroundUser center_;
  std::vector<orbits::GroundUser> users_;
  orbits::HandoverPolicy policy_;
  double sigma2_ = 0.0;
  double obs_scale_ = 1.0;

  bool initialized_ = false;
  long step_index_ = 0;
  std::deque<CMat> channels_;    // H(t − T_d) … H(t)
  std::deque<CMat> precoders_;   // V(t − T_d − 1) … V(t − 1)
  double r_con_prev_ = 0.0;
  orbits::SatelliteState serving_;
  bool handover_pending_ = false;
};

}  // namespace satprec::env
