#include "satprec/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace satprec::agent {

void DdpgConfig::validate() const {
  if (!(discount >= 0.0 && discount <= 1.0)) throw ConfigError("ddpg.discount must lie in [0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("ddpg.tau must lie in (0, 1]");
  if (buffer_capacity < 1) throw ConfigError("ddpg.buffer_capacity must be >= 1");
  if (batch_size < 1 || batch_size > buffer_capacity) {
    throw ConfigError("ddpg.batch_size must lie in [1, buffer_capacity]");
  }
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw ConfigError("learning rates must be positive");
  if (noise_var_init < 0.0 || noise_var_floor < 0.0) throw ConfigError("noise variance must be >= 0");
  if (!(noise_decay > 0.0 && noise_decay <= 1.0)) throw ConfigError("ddpg.noise_decay must lie in (0, 1]");
  if (episodes < 0) throw ConfigError("ddpg.episodes must be >= 0");
  if (checkpoint_every < 0) throw ConfigError("ddpg.checkpoint_every must be >= 0");
}

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw ConfigError("replay capacity must be >= 1");
  items_.reserve(static_cast<std::size_t>(std::min(capacity, 4096)));
}

void ReplayBuffer::push(Transition t) {
  if (size() < capacity_) {
    items_.push_back(std::move(t));
    return;
  }
  items_[head_] = std::move(t);
  head_ = (head_ + 1) % items_.size();
}

const Transition& ReplayBuffer::at(int i) const {
  if (i < 0 || i >= size()) throw std::out_of_range("replay index");
  return items_[(head_ + static_cast<std::size_t>(i)) % items_.size()];
}

Batch ReplayBuffer::sample(int batch_size, Rng& rng) const {
  if (items_.empty()) throw EmptyBatch("replay buffer is empty");
  if (batch_size < 1 || batch_size > size()) throw EmptyBatch("batch larger than buffer");
  // Floyd's algorithm: distinct indices without touching the whole buffer.
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(batch_size));
  for (int j = size() - batch_size; j < size(); ++j) {
    const int pick = rng.uniform_int(0, j);
    if (std::find(idx.begin(), idx.end(), pick) == idx.end()) {
      idx.push_back(pick);
    } else {
      idx.push_back(j);
    }
  }
  const auto& first = items_.front();
  Batch b;
  b.s.resize(first.s.size(), batch_size);
  b.a.resize(first.a.size(), batch_size);
  b.r.resize(batch_size);
  b.s_next.resize(first.s_next.size(), batch_size);
  for (int i = 0; i < batch_size; ++i) {
    const auto& t = items_[idx[i]];
    b.s.col(i) = t.s;
    b.a.col(i) = t.a;
    b.r(i) = t.r;
    b.s_next.col(i) = t.s_next;
  }
  return b;
}

NoiseSchedule::NoiseSchedule(double initial, double decay, double floor)
    : variance_(std::max(initial, floor)), decay_(decay), floor_(floor) {}

double NoiseSchedule::next() {
  const double v = variance_;
  variance_ = std::max(variance_ * decay_, floor_);
  return v;
}

VectorXd policy_action(const nn::Mlp& actor, const VectorXd& s, double power) {
  const double radius = std::sqrt(power);
  return env::project_action(radius * actor.forward(s), radius);
}

MatrixXd policy_actions(const nn::Mlp& actor, const MatrixXd& S, double power) {
  const double radius = std::sqrt(power);
  MatrixXd A = radius * actor.forward(S);
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    A.col(j) = env::project_action(A.col(j), radius);
  }
  return A;
}

VectorXd select_action(const nn::Mlp& actor, const VectorXd& s, double power,
                       NoiseSchedule& noise, Rng& rng) {
  const double radius = std::sqrt(power);
  VectorXd x = radius * actor.forward(s);
  const double sd = std::sqrt(noise.next());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += rng.normal(0.0, sd);
  return env::project_action(x, radius);
}

namespace {

MatrixXd stack(const MatrixXd& top, const MatrixXd& bottom) {
  MatrixXd z(top.rows() + bottom.rows(), top.cols());
  z << top, bottom;
  return z;
}

}  // namespace

VectorXd q_targets(const Batch& batch, const nn::Mlp& target_actor, const nn::Mlp& target_critic,
                   double discount, double power, bool bootstrap_all) {
  const int n = batch.size();
  if (n == 0) throw EmptyBatch("empty batch");
  const MatrixXd mu = policy_actions(target_actor, batch.s_next, power);
  const MatrixXd q_next = target_critic.forward(stack(batch.s_next, mu));
  VectorXd q = batch.r + discount * q_next.row(0).transpose();
  if (!bootstrap_all) q(n - 1) = batch.r(n - 1);
  return q;
}

double critic_loss(const nn::Mlp& critic, const Batch& batch, const VectorXd& q) {
  if (batch.size() == 0) throw EmptyBatch("empty batch");
  const MatrixXd Q = critic.forward(stack(batch.s, batch.a));
  return (q - Q.row(0).transpose()).squaredNorm() / batch.size();
}

nn::Gradients critic_gradient(const nn::Mlp& critic, const Batch& batch, const VectorXd& q) {
  const int n = batch.size();
  if (n == 0) throw EmptyBatch("empty batch");
  if (q.size() != n) throw ShapeMismatch("target count differs from batch size");
  nn::ForwardCache cache;
  const MatrixXd Q = critic.forward(stack(batch.s, batch.a), cache);
  const MatrixXd upstream = (2.0 / n) * (Q - q.transpose());
  return critic.backward(cache, upstream);
}

double critic_update(nn::Mlp& critic, nn::Optimizer& opt, const Batch& batch, const VectorXd& q) {
  const double loss = critic_loss(critic, batch, q);
  opt.step(critic, critic_gradient(critic, batch, q));
  return loss;
}

nn::Gradients actor_gradient(const nn::Mlp& actor, const nn::Mlp& critic, const MatrixXd& S,
                             double power, double* mean_q) {
  const Eigen::Index n = S.cols();
  if (n == 0) throw EmptyBatch("empty batch");
  const double radius = std::sqrt(power);

  nn::ForwardCache actor_cache;
  const MatrixXd X = radius * actor.forward(S, actor_cache);
  MatrixXd A(X.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) A.col(j) = env::project_action(X.col(j), radius);

  nn::ForwardCache critic_cache;
  const MatrixXd Q = critic.forward(stack(S, A), critic_cache);
  if (mean_q) *mean_q = Q.mean();
  const MatrixXd ones = MatrixXd::Constant(1, n, 1.0 / static_cast<double>(n));
  const MatrixXd dz = critic.backward(critic_cache, ones).input;
  MatrixXd dq_dy = dz.bottomRows(A.rows());

  for (Eigen::Index j = 0; j < n; ++j) {
    const double norm = X.col(j).norm();
    if (norm > radius) {
      // Outside the ball the projection is x ↦ R x / ‖x‖.
      const VectorXd x = X.col(j);
      const VectorXd g = dq_dy.col(j);
      dq_dy.col(j) = (radius / norm) * (g - x * (x.dot(g) / (norm * norm)));
    }
  }
  dq_dy *= radius;
  return actor.backward(actor_cache, dq_dy);
}

nn::Gradients policy_gradient_step(nn::Mlp& actor, nn::Optimizer& opt, const MatrixXd& S,
                                   const MatrixXd& dq_dout) {
  if (S.cols() == 0) throw EmptyBatch("empty batch");
  nn::ForwardCache cache;
  actor.forward(S, cache);
  auto grads = actor.backward(cache, dq_dout);
  opt.step(actor, grads, /*ascend=*/true);
  return grads;
}

ActorStep actor_update(nn::Mlp& actor, const nn::Mlp& critic, nn::Optimizer& opt,
                       const MatrixXd& S, double power) {
  ActorStep out;
  const auto grads = actor_gradient(actor, critic, S, power, &out.mean_q);
  out.gradient_norm = std::sqrt(grads.squared_norm());
  opt.step(actor, grads, /*ascend=*/true);
  return out;
}

DdpgAgent::DdpgAgent(int states, int actions, double power, DdpgConfig cfg, std::uint64_t seed)
    : cfg_(cfg),
      power_(power),
      buffer_(cfg.buffer_capacity),
      noise_(cfg.noise_var_init, cfg.noise_decay, cfg.noise_var_floor),
      noise_rng_(Rng::stream(seed, "noise")),
      buffer_rng_(Rng::stream(seed, "buffer")),
      warmup_rng_(Rng::stream(seed, "warmup-actions")) {
  cfg_.validate();
  auto init = Rng::stream(seed, "init");
  actor_ = nn::Mlp::random(nn::actor_layers(states, actions), init);
  critic_ = nn::Mlp::random(nn::critic_layers(states, actions), init);
  target_actor_ = actor_;
  target_critic_ = critic_;
  actor_opt_ = nn::Optimizer(actor_, {cfg_.optimizer, cfg_.actor_lr});
  critic_opt_ = nn::Optimizer(critic_, {cfg_.optimizer, cfg_.critic_lr});
}

VectorXd DdpgAgent::act(const VectorXd& s) {
  return select_action(actor_, s, power_, noise_, noise_rng_);
}

VectorXd DdpgAgent::act_greedy(const VectorXd& s) const { return policy_action(actor_, s, power_); }

VectorXd DdpgAgent::act_uniform(int dim) {
  return env::random_in_ball(dim, std::sqrt(power_), warmup_rng_);
}

void DdpgAgent::observe(Transition t) { buffer_.push(std::move(t)); }

bool DdpgAgent::learn(double* critic_loss_out, double* mean_q_out) {
  if (buffer_.size() < cfg_.batch_size) return false;
  const Batch batch = buffer_.sample(cfg_.batch_size, buffer_rng_);
  const VectorXd q = q_targets(batch, target_actor_, target_critic_, cfg_.discount, power_,
                               cfg_.bootstrap_all);
  const double loss = critic_update(critic_, critic_opt_, batch, q);
  const auto step = actor_update(actor_, critic_, actor_opt_, batch.s, power_);
  nn::soft_update(target_critic_, critic_, cfg_.tau);
  nn::soft_update(target_actor_, actor_, cfg_.tau);
  if (critic_loss_out) *critic_loss_out = loss;
  if (mean_q_out) *mean_q_out = step.mean_q;
  return true;
}

void DdpgAgent::save(const std::filesystem::path& dir, const std::string& suffix) const {
  std::filesystem::create_directories(dir);
  nn::save(actor_, dir / ("actor" + suffix + ".ckpt"));
  nn::save(critic_, dir / ("critic" + suffix + ".ckpt"));
}

TrainingLog train(env::DelayedCsiEnv& env, DdpgAgent& agent, const EpisodeCallback& on_episode) {
  const auto& cfg = agent.config();
  const int steps = env.config().episode_length;
  const int warmup = env.delay_steps();
  TrainingLog log;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    VectorXd s = env.reset();
    const int handovers_before = env.handover_count();
    EpisodeRow row;
    row.episode = ep;
    double loss_sum = 0.0, q_sum = 0.0;
    int updates = 0;
    for (int n = 0; n < steps; ++n) {
  const VectorXd a = n < warmup ? agent.act_uniform(env.action_size()) : agent.act(s);
      auto res = env.step(a);
      agent.observe({s, res.applied_action, res.reward, res.obs});
      double loss = 0.0, mean_q = 0.0;
      if (agent.learn(&loss, &mean_q)) {
        loss_sum += loss;
        q_sum += mean_q;
        ++updates;
      }
      row.mean_reward += res.reward;
      row.mean_sum_rate += res.info.sum_rate;
      log.steps.push_back(env::make_row(ep, n, res));
      s = std::move(res.obs);
    }
    row.mean_reward /= steps;
    row.mean_sum_rate /= steps;
    if (updates > 0) {
      row.critic_loss = loss_sum / updates;
      row.actor_loss_proxy = -q_sum / updates;
    }
    row.noise_var = agent.noise().variance();
    row.handovers = env.handover_count() - handovers_before;
    log.episodes.push_back(row);
    if (on_episode) on_episode(row, agent);
  }
  return log;
}

std::vector<env::StepRow> evaluate(env::DelayedCsiEnv& env, const nn::Mlp& actor, int episodes) {
  std::vector<env::StepRow> rows;
  for (int ep = 0; ep < episodes; ++ep) {
    VectorXd s = env.reset();
    for (int n = 0; n < env.config().episode_length; ++n) {
      auto res = env.step(policy_action(actor, s, env.power()));
      rows.push_back(env::make_row(ep, n, res));
      s = std::move(res.obs);
    }
  }
  return rows;
}

double mean_sum_rate(const std::vector<env::StepRow>& rows) {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) s += r.sum_rate;
  return s / static_cast<double>(rows.size());
}

}  // namespace satprec::agent
