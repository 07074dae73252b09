#include "satprec/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "satprec/agent.hpp"
#include "satprec/baselines.hpp"
#include "satprec/channel.hpp"
#include "satprec/env.hpp"
#include "satprec/orbits.hpp"
#include "satprec/rate.hpp"
#include "satprec/rng.hpp"

namespace satprec::oracles {
namespace {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

CMat random_matrix(int rows, int cols, Rng& rng) {
  CMat m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = rng.complex_normal(1.0);
  }
  return m;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// Sign pattern of every ReLU pre-activation for a batch, flattened.
std::vector<bool> relu_pattern(const nn::Mlp& net, const Eigen::MatrixXd& X) {
  nn::ForwardCache cache;
  net.forward(X, cache);
  std::vector<bool> out;
  for (std::size_t l = 0; l < cache.pre.size(); ++l) {
    if (net.layers()[l].activation != nn::Activation::relu) continue;
    const auto& pre = cache.pre[l];
    for (Eigen::Index i = 0; i < pre.size(); ++i) out.push_back(pre.data()[i] > 0.0);
  }
  return out;
}

CheckResult identity_check(Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = rng.uniform_int(2, 16);
    const CVec h = random_matrix(m, 1, rng).col(0);
    const CVec v = random_matrix(m, 1, rng).col(0);
    const CMat F = v * v.adjoint();
    const double gamma = rng.uniform(0.1, 10.0);
    const auto r = rate::lower_bound_identity_check(h, F, gamma);
    worst = std::max(worst, rel(r.lhs, r.rhs));
  }
  return {"determinant identity (100 draws)", worst < 1e-9, fmt::format("max rel err {:.3e}", worst)};
}

CheckResult rank_one_check(Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int m = rng.uniform_int(2, 9), k = rng.uniform_int(1, 4);
    const CMat H = random_matrix(m, k, rng), V = random_matrix(m, k, rng);
    const double sigma2 = rng.uniform(0.1, 2.0);
    const auto F = rate::rank_one_covariances(V);
    const auto report = rate::sum_rate(H, V, sigma2);
    for (int u = 0; u < k; ++u) {
      const double bound = rate::lmmse_rate_bound(H.col(u), F, static_cast<std::size_t>(u), sigma2);
      worst = std::max(worst, rel(bound, report.per_user_rate[static_cast<std::size_t>(u)]));
    }
  }
  return {"rank-one bound equals closed-form rate", worst < 1e-9, fmt::format("max rel err {:.3e}", worst)};
}

CheckResult actor_gradient_check(Rng& rng) {
  const int states = 2 * 3 * 18, actions = 36;
  const double power = 1.0;
  auto actor = nn::Mlp::random(nn::actor_layers(states, actions), rng);
  auto critic = nn::Mlp::random(nn::critic_layers(states, actions), rng);
  Eigen::MatrixXd S(states, 4);
  for (Eigen::Index i = 0; i < S.size(); ++i) S.data()[i] = rng.normal();
  const auto analytic = nn::Mlp::flatten(agent::actor_gradient(actor, critic, S, power));
  auto objective = [&](const nn::Mlp& a) {
    const Eigen::MatrixXd A = agent::policy_actions(a, S, power);
    Eigen::MatrixXd Z(states + actions, S.cols());
    Z << S, A;
    return critic.forward(Z).mean();
  };
  auto same = [&](const nn::Mlp& a, const nn::Mlp& b) {
    const Eigen::MatrixXd A0 = agent::policy_actions(a, S, power), A1 = agent::policy_actions(b, S, power);
    Eigen::MatrixXd Z0(states + actions, S.cols()), Z1(states + actions, S.cols());
    Z0 << S, A0;
    Z1 << S, A1;
    return relu_pattern(a, S) == relu_pattern(b, S) && relu_pattern(critic, Z0) == relu_pattern(critic, Z1);
  };
  const auto g = finite_difference_check(actor, analytic, objective, same);
  return {"actor gradient vs central differences", g.max_relative_error < 1e-5 && g.checked > 0,
          fmt::format("max rel err {:.3e} over {} params ({} skipped)", g.max_relative_error, g.checked, g.skipped)};
}

CheckResult critic_gradient_check(Rng& rng) {
  const int states = 2 * 3 * 18, actions = 36;
  auto critic = nn::Mlp::random(nn::critic_layers(states, actions), rng);
  agent::Batch b;
  b.s.resize(states, 4);
  b.a.resize(actions, 4);
  for (Eigen::Index i = 0; i < b.s.size(); ++i) b.s.data()[i] = rng.normal();
  for (Eigen::Index i = 0; i < b.a.size(); ++i) b.a.data()[i] = rng.normal(0.0, 0.2);
  b.r = Eigen::VectorXd::Zero(4);
  b.s_next = b.s;
  Eigen::VectorXd q(4);
  for (int i = 0; i < 4; ++i) q(i) = rng.normal();
  const auto analytic = nn::Mlp::flatten(agent::critic_gradient(critic, b, q));
  Eigen::MatrixXd Z(states + actions, 4);
  Z << b.s, b.a;
  auto objective = [&](const nn::Mlp& c) { return agent::critic_loss(c, b, q); };
  auto same = [&](const nn::Mlp& x, const nn::Mlp& y) { return relu_pattern(x, Z) == relu_pattern(y, Z); };
  const auto g = finite_difference_check(critic, analytic, objective, same);
  return {"critic gradient vs central differences", g.max_relative_error < 1e-5 && g.checked > 0,
          fmt::format("max rel err {:.3e} over {} params ({} skipped)", g.max_relative_error, g.checked, g.skipped)};
}

CheckResult projection_check(Rng& rng) {
  bool ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x(36);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal(0.0, rng.uniform(0.01, 2.0));
    const double radius = rng.uniform(0.5, 2.0);
    const auto p = env::project_action(x, radius);
    const auto pp = env::project_action(p, radius);
    ok = ok && p.norm() <= radius * (1 + 1e-12) && (pp - p).norm() <= 1e-12 * std::max(1.0, p.norm());
    if (x.norm() <= radius) ok = ok && (p - x).norm() <= 1e-12;
  }
  return {"power-ball projection is idempotent and feasible", ok, ""};
}

CheckResult zf_check(Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const CMat H = random_matrix(9, 3, rng);
    const CMat V = baselines::zf_precoder(H, 1.0);
    const CMat G = H.adjoint() * V;
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) {
        if (i != k) worst = std::max(worst, std::abs(G(i, k)) / std::abs(G(k, k)));
      }
    }
  }
  return {"zero-forcing nulls inter-user interference", worst < 1e-10, fmt::format("max leakage {:.3e}", worst)};
}

CheckResult physics_check() {
  const double period = orbits::orbital_period(550e3);
  const double tc = channel::coherence_time(2e9, 540e3, deg2rad(80.0));
  const bool ok = std::abs(period - 5730.4) < 1.0 && std::abs(tc - 113.7e-6) < 0.5e-6;
  return {"orbital period and coherence time", ok,
          fmt::format("T(550 km) = {:.1f} s, T_c = {:.2f} us", period, tc * 1e6)};
}

}  // namespace

GradientCheck finite_difference_check(nn::Mlp& net, const std::vector<double>& analytic,
                                       const std::function<double(const nn::Mlp&)>& objective,
                                       const std::function<bool(const nn::Mlp&, const nn::Mlp&)>& same_pattern,
                                       double step) {
  if (analytic.size() != net.parameter_count()) throw ShapeMismatch("gradient length differs from parameter count");
  GradientCheck out;
  const nn::Mlp reference = net;
  // Entries far below the largest one are dominated by round-off in the
  // differences; measure them against a floor instead of their own size.
  double largest = 0.0;
  for (double g : analytic) largest = std::max(largest, std::abs(g));
  const double floor = std::max(1e-3 * largest, 1e-12);
  for (std::size_t i = 0; i < net.parameter_count(); ++i) {
    const double orig = net.parameter(i);
    net.set_parameter(i, orig + step);
    const nn::Mlp plus = net;
    const double fp = objective(net);
    net.set_parameter(i, orig - step);
    const double fm = objective(net);
    const bool smooth = same_pattern(reference, plus) && same_pattern(reference, net);
    net.set_parameter(i, orig);
    if (!smooth) {
      ++out.skipped;
      continue;
    }
    const double fd = (fp - fm) / (2.0 * step);
    const double scale = std::max({std::abs(fd), std::abs(analytic[i]), floor});
    out.max_relative_error = std::max(out.max_relative_error, std::abs(fd - analytic[i]) / scale);
    ++out.checked;
  }
  return out;
}

std::vector<CheckResult> run_all(std::uint64_t seed) {
  auto rng = Rng::stream(seed, "oracles");
  return {identity_check(rng), rank_one_check(rng), actor_gradient_check(rng),
          critic_gradient_check(rng), projection_check(rng), zf_check(rng), physics_check()};
}

bool report(const std::vector<CheckResult>& results, std::ostream& os) {
  bool all = true;
  for (const auto& r : results) {
    fmt::print(os, "[{}] {}{}\n", r.passed ? "PASS" : "FAIL", r.name,
               r.detail.empty() ? "" : "  (" + r.detail + ")");
    all = all && r.passed;
  }
  return all;
}

}  // namespace satprec::oracles
