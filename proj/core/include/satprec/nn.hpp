#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "satprec/common.hpp"

namespace satprec {
class Rng;
}

namespace satprec::nn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Activation : std::uint32_t { none = 0, relu = 1, tanh = 2 };

struct LayerSpec {
  int in_width = 1;
  int out_width = 1;
  Activation activation = Activation::none;
};

struct Layer {
  MatrixXd W;  // out x in
  VectorXd b;
  Activation activation = Activation::none;
};

struct Gradients {
  std::vector<MatrixXd> dW;
  std::vector<VectorXd> db;
  MatrixXd input;  // d objective / d input, one column per sample

  double squared_norm() const;
};

/// Activations kept from a batched forward pass for the backward pass.
struct ForwardCache {
  std::vector<MatrixXd> inputs;  // input to each layer
  std::vector<MatrixXd> pre;     // pre-activation of each layer
  MatrixXd output;
};

/// Dense feed-forward network. Batches are column-major: one sample per
/// column.
class Mlp {
 public:
  Mlp() = default;
  /// Zero-initialised network.
  explicit Mlp(const std::vector<LayerSpec>& specs);
  /// Uniform ±1/sqrt(fan_in) initialisation for weights and biases.
  static Mlp random(const std::vector<LayerSpec>& specs, Rng& rng);

  int input_width() const;
  int output_width() const;
  std::size_t parameter_count() const;
  std::vector<LayerSpec> specs() const;

  VectorXd forward(const VectorXd& x) const;
  MatrixXd forward(const MatrixXd& X) const;
  MatrixXd forward(const MatrixXd& X, ForwardCache& cache) const;

  /// Gradients of Σ_samples upstream ⊙ output w.r.t. every parameter and the
  /// input. ReLU uses subgradient 0 at exactly zero.
  Gradients backward(const ForwardCache& cache, const MatrixXd& upstream) const;

  // Flat parameter view (layer by layer: W row-major, then b).
  double parameter(std::size_t i) const;
  void set_parameter(std::size_t i, double value);
  static std::vector<double> flatten(const Gradients& g);

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  bool operator==(const Mlp& other) const;

 private:
  std::vector<Layer> layers_;
};

struct OptimizerConfig {
  enum class Kind { adam, sgd };
  Kind kind = Kind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam (bias-corrected) with an SGD fallback; moments mirror the network.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(const Mlp& net, OptimizerConfig cfg);

  /// Descends along `grads` (or ascends when `ascend`).
  void step(Mlp& net, const Gradients& grads, bool ascend = false);

  long steps() const { return t_; }
  const OptimizerConfig& config() const { return cfg_; }

 private:
  OptimizerConfig cfg_;
  long t_ = 0;
  std::vector<MatrixXd> mW_, vW_;
  std::vector<VectorXd> mb_, vb_;
};

/// Polyak average θ* ← τ θ + (1 − τ) θ*.
void soft_update(Mlp& target, const Mlp& source, double tau);

/// Actor: 4 hidden ReLU layers of width `actions`, tanh output.
std::vector<LayerSpec> actor_layers(int states, int actions);
/// Critic on concatenated [state; action]: hidden ReLU widths
/// {2, 3.46, 1.8, 0.96, 0.54, 0.26} x actions (rounded, min 1), linear scalar.
std::vector<LayerSpec> critic_layers(int states, int actions);

// Checkpoint layout (little-endian): "SPMLP\0\0\1" magic, u32 layer count,
// then per layer u32 in, u32 out, u32 activation, W row-major f64, b f64.
void save(const Mlp& net, std::ostream& os);
Mlp load(std::istream& is);
void save(const Mlp& net, const std::filesystem::path& path);
Mlp load(const std::filesystem::path& path);

}  // namespace satprec::nn
