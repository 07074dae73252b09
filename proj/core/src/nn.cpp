#include "satprec/nn.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "satprec/rng.hpp"

namespace satprec::nn {

double Gradients::squared_norm() const {
  double s = 0.0;
  for (const auto& w : dW) s += w.squaredNorm();
  for (const auto& b : db) s += b.squaredNorm();
  return s;
}

Mlp::Mlp(const std::vector<LayerSpec>& specs) {
  int prev = -1;
  for (const auto& s : specs) {
    if (s.in_width < 1 || s.out_width < 1) throw ShapeMismatch("layer widths must be >= 1");
    if (prev != -1 && prev != s.in_width) throw ShapeMismatch("layer chain widths disagree");
    prev = s.out_width;
    layers_.push_back({MatrixXd::Zero(s.out_width, s.in_width), VectorXd::Zero(s.out_width),
                       s.activation});
  }
}

Mlp Mlp::random(const std::vector<LayerSpec>& specs, Rng& rng) {
  Mlp net(specs);
  for (auto& l : net.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.W.cols()));
    for (Eigen::Index r = 0; r < l.W.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.W.cols(); ++c) l.W(r, c) = rng.uniform(-bound, bound);
    }
    for (Eigen::Index r = 0; r < l.b.size(); ++r) l.b(r) = rng.uniform(-bound, bound);
  }
  return net;
}

int Mlp::input_width() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.front().W.cols());
}

int Mlp::output_width() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().W.rows());
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.W.size() + l.b.size());
  return n;
}

std::vector<LayerSpec> Mlp::specs() const {
  std::vector<LayerSpec> out;
  for (const auto& l : layers_) {
    out.push_back({static_cast<int>(l.W.cols()), static_cast<int>(l.W.rows()), l.activation});
  }
  return out;
}

namespace {

void activate(MatrixXd& z, Activation a) {
  switch (a) {
    case Activation::relu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::tanh:
      z = z.array().tanh().matrix();
      break;
    case Activation::none:
      break;
  }
}

}  // namespace

VectorXd Mlp::forward(const VectorXd& x) const {
  MatrixXd X = x;
  return forward(X).col(0);
}

MatrixXd Mlp::forward(const MatrixXd& X) const {
  if (X.rows() != input_width()) throw ShapeMismatch("input width does not match network");
  MatrixXd h = X;
  for (const auto& l : layers_) {
    MatrixXd z = l.W * h;
    z.colwise() += l.b;
    activate(z, l.activation);
    h = std::move(z);
  }
  return h;
}

MatrixXd Mlp::forward(const MatrixXd& X, ForwardCache& cache) const {
  if (X.rows() != input_width()) throw ShapeMismatch("input width does not match network");
  cache.inputs.clear();
  cache.pre.clear();
  MatrixXd h = X;
  for (const auto& l : layers_) {
    cache.inputs.push_back(h);
    MatrixXd z = l.W * h;
    z.colwise() += l.b;
    cache.pre.push_back(z);
    activate(z, l.activation);
    h = std::move(z);
  }
  cache.output = h;
  return h;
}

Gradients Mlp::backward(const ForwardCache& cache, const MatrixXd& upstream) const {
  if (cache.pre.size() != layers_.size()) throw ShapeMismatch("forward cache does not match network");
  if (upstream.rows() != cache.output.rows() || upstream.cols() != cache.output.cols()) {
    throw ShapeMismatch("upstream gradient shape does not match output");
  }
  Gradients g;
  g.dW.resize(layers_.size());
  g.db.resize(layers_.size());
  MatrixXd delta = upstream;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const auto& l = layers_[i];
    const MatrixXd& z = cache.pre[i];
    switch (l.activation) {
      case Activation::relu:
        delta = delta.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
        break;
      case Activation::tanh:
        delta = delta.cwiseProduct((1.0 - z.array().tanh().square()).matrix());
        break;
      case Activation::none:
        break;
    }
    g.dW[i] = delta * cache.inputs[i].transpose();
    g.db[i] = delta.rowwise().sum();
    delta = l.W.transpose() * delta;
  }
  g.input = std::move(delta);
  return g;
}

double Mlp::parameter(std::size_t i) const {
  for (const auto& l : layers_) {
    const auto nw = static_cast<std::size_t>(l.W.size());
    if (i < nw) return l.W(static_cast<Eigen::Index>(i / l.W.cols()),
                           static_cast<Eigen::Index>(i % l.W.cols()));
    i -= nw;
    const auto nb = static_cast<std::size_t>(l.b.size());
    if (i < nb) return l.b(static_cast<Eigen::Index>(i));
    i -= nb;
  }
  throw ShapeMismatch("parameter index out of range");
}

void Mlp::set_parameter(std::size_t i, double value) {
  for (auto& l : layers_) {
    const auto nw = static_cast<std::size_t>(l.W.size());
    if (i < nw) {
      l.W(static_cast<Eigen::Index>(i / l.W.cols()), static_cast<Eigen::Index>(i % l.W.cols())) =
          value;
      return;
    }
    i -= nw;
    const auto nb = static_cast<std::size_t>(l.b.size());
    if (i < nb) {
      l.b(static_cast<Eigen::Index>(i)) = value;
      return;
    }
    i -= nb;
  }
  throw ShapeMismatch("parameter index out of range");
}

std::vector<double> Mlp::flatten(const Gradients& g) {
  std::vector<double> out;
  for (std::size_t i = 0; i < g.dW.size(); ++i) {
    for (Eigen::Index r = 0; r < g.dW[i].rows(); ++r) {
      for (Eigen::Index c = 0; c < g.dW[i].cols(); ++c) out.push_back(g.dW[i](r, c));
    }
    for (Eigen::Index r = 0; r < g.db[i].size(); ++r) out.push_back(g.db[i](r));
  }
  return out;
}

bool Mlp::operator==(const Mlp& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& a = layers_[i];
    const auto& b = other.layers_[i];
    if (a.activation != b.activation || a.W.rows() != b.W.rows() || a.W.cols() != b.W.cols()) {
      return false;
    }
    if (a.W != b.W || a.b != b.b) return false;
  }
  return true;
}

Optimizer::Optimizer(const Mlp& net, OptimizerConfig cfg) : cfg_(cfg) {
  for (const auto& l : net.layers()) {
    mW_.push_back(MatrixXd::Zero(l.W.rows(), l.W.cols()));
    vW_.push_back(MatrixXd::Zero(l.W.rows(), l.W.cols()));
    mb_.push_back(VectorXd::Zero(l.b.size()));
    vb_.push_back(VectorXd::Zero(l.b.size()));
  }
}

void Optimizer::step(Mlp& net, const Gradients& grads, bool ascend) {
  auto& layers = net.layers();
  if (grads.dW.size() != layers.size() || mW_.size() != layers.size()) {
    throw ShapeMismatch("gradient/optimizer layout does not match network");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (grads.dW[i].rows() != layers[i].W.rows() || grads.dW[i].cols() != layers[i].W.cols() ||
        grads.db[i].size() != layers[i].b.size()) {
      throw ShapeMismatch("gradient shape does not match layer");
    }
  }
  const double sign = ascend ? 1.0 : -1.0;
  ++t_;
  if (cfg_.kind == OptimizerConfig::Kind::sgd) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      layers[i].W += sign * cfg_.learning_rate * grads.dW[i];
      layers[i].b += sign * cfg_.learning_rate * grads.db[i];
    }
    return;
  }
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = cfg_.learning_rate;
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    param.array() += sign * lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg_.epsilon);
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    update(layers[i].W, mW_[i], vW_[i], grads.dW[i]);
    update(layers[i].b, mb_[i], vb_[i], grads.db[i]);
  }
}

void soft_update(Mlp& target, const Mlp& source, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ShapeMismatch("tau must lie in (0, 1]");
  auto& tl = target.layers();
  const auto& sl = source.layers();
  if (tl.size() != sl.size()) throw ShapeMismatch("soft update between different networks");
  for (std::size_t i = 0; i < tl.size(); ++i) {
    if (tl[i].W.rows() != sl[i].W.rows() || tl[i].W.cols() != sl[i].W.cols()) {
      throw ShapeMismatch("soft update between different layer shapes");
    }
  }
  for (std::size_t i = 0; i < tl.size(); ++i) {
    tl[i].W = tau * sl[i].W + (1.0 - tau) * tl[i].W;
    tl[i].b = tau * sl[i].b + (1.0 - tau) * tl[i].b;
  }
}

std::vector<LayerSpec> actor_layers(int states, int actions) {
  return {{states, actions, Activation::relu},
          {actions, actions, Activation::relu},
          {actions, actions, Activation::relu},
          {actions, actions, Activation::relu},
          {actions, actions, Activation::tanh}};
}

std::vector<LayerSpec> critic_layers(int states, int actions) {
  constexpr std::array<double, 6> factors{2.0, 3.46, 1.8, 0.96, 0.54, 0.26};
  std::vector<LayerSpec> specs;
  int prev = states + actions;
  for (double f : factors) {
    const int w = std::max(1, static_cast<int>(std::lround(f * actions)));
    specs.push_back({prev, w, Activation::relu});
    prev = w;
  }
  specs.push_back({prev, 1, Activation::none});
  return specs;
}

namespace {

constexpr std::array<char, 8> kMagic{'S', 'P', 'M', 'L', 'P', '\0', '\0', '\1'};

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ShapeMismatch("truncated network checkpoint");
  return v;
}

}  // namespace

void save(const Mlp& net, std::ostream& os) {
  os.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(os, static_cast<std::uint32_t>(net.layers().size()));
  for (const auto& l : net.layers()) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(l.W.cols()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(l.W.rows()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(l.activation));
    for (Eigen::Index r = 0; r < l.W.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.W.cols(); ++c) put<double>(os, l.W(r, c));
    }
    for (Eigen::Index r = 0; r < l.b.size(); ++r) put<double>(os, l.b(r));
  }
}

Mlp load(std::istream& is) {
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw ShapeMismatch("not a network checkpoint");
  const auto n = get<std::uint32_t>(is);
  std::vector<LayerSpec> specs;
  std::vector<Layer> layers;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto in = get<std::uint32_t>(is);
    const auto out = get<std::uint32_t>(is);
    const auto act = get<std::uint32_t>(is);
    if (act > 2) throw ShapeMismatch("unknown activation in checkpoint");
    specs.push_back({static_cast<int>(in), static_cast<int>(out), static_cast<Activation>(act)});
    Layer l{MatrixXd(out, in), VectorXd(out), static_cast<Activation>(act)};
    for (Eigen::Index r = 0; r < l.W.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.W.cols(); ++c) l.W(r, c) = get<double>(is);
    }
    for (Eigen::Index r = 0; r < l.b.size(); ++r) l.b(r) = get<double>(is);
    layers.push_back(std::move(l));
  }
  Mlp net(specs);
  net.layers() = std::move(layers);
  return net;
}

void save(const Mlp& net, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write checkpoint " + path.string());
  save(net, os);
}

Mlp load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read checkpoint " + path.string());
  return load(is);
}

}  // namespace satprec::nn
