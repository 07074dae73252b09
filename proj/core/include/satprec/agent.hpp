#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "satprec/env.hpp"
#include "satprec/nn.hpp"
#include "satprec/rng.hpp"

namespace satprec::agent {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct DdpgConfig {
  double discount = 0.95;        // λ
  double tau = 0.005;
  int buffer_capacity = 50000;   // C
  int batch_size = 64;           // T_B
  double actor_lr = 1e-3;        // β
  double critic_lr = 2e-3;       // α
  double noise_var_init = 0.11;
  double noise_decay = 0.99996;
  double noise_var_floor = 0.05;
  int episodes = 416;            // Z
  bool bootstrap_all = false;    // bootstrap every sample, not just all but the last
  nn::OptimizerConfig::Kind optimizer = nn::OptimizerConfig::Kind::adam;
  int checkpoint_every = 0;      // episodes; 0 disables intermediate checkpoints

  void validate() const;
};

struct Transition {
  VectorXd s;
  VectorXd a;
  double r = 0.0;
  VectorXd s_next;
};

struct Batch {
  MatrixXd s;       // states x B
  MatrixXd a;       // actions x B
  VectorXd r;       // B
  MatrixXd s_next;  // states x B
  int size() const { return static_cast<int>(r.size()); }
};

/// Ring buffer; the oldest transition is evicted once full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);

  void push(Transition t);
  int size() const { return static_cast<int>(items_.size()); }
  int capacity() const { return capacity_; }
  /// i-th oldest stored transition.
  const Transition& at(int i) const;
  /// Uniform sample without replacement inside a batch.
  Batch sample(int batch_size, Rng& rng) const;

 private:
  int capacity_;
  std::size_t head_ = 0;  // next slot to overwrite once full
  std::vector<Transition> items_;
};

/// Exploration variance σ²: returned, then multiplied by `decay`, never
/// below `floor`.
class NoiseSchedule {
 public:
  NoiseSchedule(double initial, double decay, double floor);
  double variance() const { return variance_; }
  double next();

 private:
  double variance_, decay_, floor_;
};

/// Deterministic policy μ(s) = project(√P · actor(s)).
VectorXd policy_action(const nn::Mlp& actor, const VectorXd& s, double power);
MatrixXd policy_actions(const nn::Mlp& actor, const MatrixXd& S, double power);

/// μ(s) plus Gaussian noise with the schedule's current variance, projected
/// back onto the power ball. Decays the schedule once.
VectorXd select_action(const nn::Mlp& actor, const VectorXd& s, double power,
                       NoiseSchedule& noise, Rng& rng);

/// q_i = r_i + λ Q*(s'_i, μ*(s'_i)); the last sample keeps q = r unless
/// `bootstrap_all`.
VectorXd q_targets(const Batch& batch, const nn::Mlp& target_actor, const nn::Mlp& target_critic,
                   double discount, double power, bool bootstrap_all);

/// Mean squared error of the critic against `q`, before the update.
double critic_loss(const nn::Mlp& critic, const Batch& batch, const VectorXd& q);
/// Gradient of the mean squared error.
nn::Gradients critic_gradient(const nn::Mlp& critic, const Batch& batch, const VectorXd& q);
/// One optimizer step on the critic; returns the pre-update loss.
double critic_update(nn::Mlp& critic, nn::Optimizer& opt, const Batch& batch, const VectorXd& q);

struct ActorStep {
  double gradient_norm = 0.0;
  double mean_q = 0.0;
};

/// Gradient of (1/B) Σ Q(s_i, μ(s_i)) w.r.t. the actor parameters, chained
/// through the power-ball projection.
nn::Gradients actor_gradient(const nn::Mlp& actor, const nn::Mlp& critic, const MatrixXd& S,
                             double power, double* mean_q = nullptr);
/// Ascent step given dQ/d(actor output), one column per state.
nn::Gradients policy_gradient_step(nn::Mlp& actor, nn::Optimizer& opt, const MatrixXd& S,
                                   const MatrixXd& dq_dout);
ActorStep actor_update(nn::Mlp& actor, const nn::Mlp& critic, nn::Optimizer& opt,
                       const MatrixXd& S, double power);

struct EpisodeRow {
  int episode = 0;
  double mean_reward = 0.0;
  double mean_sum_rate = 0.0;
  double actor_loss_proxy = 0.0;  // −mean Q over the episode's actor updates
  double critic_loss = 0.0;
  double noise_var = 0.0;
  int handovers = 0;
};

struct TrainingLog {
  std::vector<EpisodeRow> episodes;
  std::vector<env::StepRow> steps;
};

class DdpgAgent {
 public:
  DdpgAgent(int states, int actions, double power, DdpgConfig cfg, std::uint64_t seed);

  VectorXd act(const VectorXd& s);                 // exploratory
  VectorXd act_greedy(const VectorXd& s) const;    // deterministic
  VectorXd act_uniform(int dim);                   // warm-up draw from the power ball
  void observe(Transition t);
  /// Critic, actor, then target update when the buffer holds a full batch.
  bool learn(double* critic_loss_out = nullptr, double* mean_q_out = nullptr);

  const nn::Mlp& actor() const { return actor_; }
  const nn::Mlp& critic() const { return critic_; }
  const nn::Mlp& target_actor() const { return target_actor_; }
  const nn::Mlp& target_critic() const { return target_critic_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const NoiseSchedule& noise() const { return noise_; }
  const DdpgConfig& config() const { return cfg_; }

  void save(const std::filesystem::path& dir, const std::string& suffix = "") const;

 private:
  DdpgConfig cfg_;
  double power_;
  nn::Mlp actor_, critic_, target_actor_, target_critic_;
  nn::Optimizer actor_opt_, critic_opt_;
  ReplayBuffer buffer_;
  NoiseSchedule noise_;
  Rng noise_rng_, buffer_rng_, warmup_rng_;
};

using EpisodeCallback = std::function<void(const EpisodeRow&, const DdpgAgent&)>;

/// Runs `cfg.episodes` episodes of `env.config().episode_length` steps.
/// Random warm-up actions fill the first T_d steps of every episode.
TrainingLog train(env::DelayedCsiEnv& env, DdpgAgent& agent, const EpisodeCallback& on_episode = {});

/// Rolls out the deterministic policy (no noise, no learning).
std::vector<env::StepRow> evaluate(env::DelayedCsiEnv& env, const nn::Mlp& actor, int episodes);

double mean_sum_rate(const std::vector<env::StepRow>& rows);

}  // namespace satprec::agent
