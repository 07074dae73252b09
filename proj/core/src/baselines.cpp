#include "satprec/baselines.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace satprec::baselines {

CMat zf_precoder(const CMat& H, double power) {
  if (H.cols() == 0 || H.cols() > H.rows()) {
    throw RankDeficient("zero-forcing needs 1 <= K <= M");
  }
  Eigen::JacobiSVD<CMat> svd(H);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) >= 1e-12 * sv(0)) || sv(0) == 0.0) {
    throw RankDeficient("channel matrix is rank deficient");
  }
  const CMat gram = H.adjoint() * H;
  CMat V = H * gram.ldlt().solve(CMat::Identity(H.cols(), H.cols()));
  V *= std::sqrt(power) / V.norm();
  return V;
}

CMat mrt_precoder(const CMat& H, double power) {
  CMat V = H;
  const double per_user = std::sqrt(power / static_cast<double>(H.cols()));
  for (Eigen::Index k = 0; k < V.cols(); ++k) {
    const double n = V.col(k).norm();
    if (n == 0.0) throw ZeroColumn("channel column " + std::to_string(k) + " is zero");
    V.col(k) *= per_user / n;
  }
  return V;
}

CMat random_precoder(int m, int k, double power, Rng& rng) {
  CMat V(m, k);
  for (int c = 0; c < k; ++c) {
    for (int r = 0; r < m; ++r) V(r, c) = rng.complex_normal(1.0);
  }
  const double n = V.norm();
  if (n > 0.0) V *= std::sqrt(power) / n;
  return V;
}

Kind parse_kind(const std::string& s) {
  if (s == "zf") return Kind::zf;
  if (s == "mrt") return Kind::mrt;
  if (s == "random") return Kind::random;
  throw ConfigError("unknown baseline '" + s + "' (expected zf, mrt or random)");
}

Csi parse_csi(const std::string& s) {
  if (s == "perfect") return Csi::perfect;
  if (s == "delayed") return Csi::delayed;
  throw ConfigError("unknown CSI view '" + s + "' (expected perfect or delayed)");
}

std::string to_string(Kind k) {
  switch (k) {
    case Kind::zf: return "zf";
    case Kind::mrt: return "mrt";
    case Kind::random: return "random";
  }
  return "?";
}

std::string to_string(Csi c) { return c == Csi::perfect ? "perfect" : "delayed"; }

namespace {

CMat design(Kind kind, const CMat& H, double power, Rng& rng) {
  switch (kind) {
    case Kind::zf: return zf_precoder(H, power);
    case Kind::mrt: return mrt_precoder(H, power);
    case Kind::random: return random_precoder(static_cast<int>(H.rows()), static_cast<int>(H.cols()), power, rng);
  }
  throw ConfigError("unknown baseline");
}

}  // namespace

std::vector<TraceStep> record_trace(env::DelayedCsiEnv& env, int steps) {
  std::vector<TraceStep> out;
  env.reset();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(env.action_size());
  for (int n = 0; n < steps; ++n) {
    out.push_back({env.time(), env.channel_now(), env.channel_delayed()});
    if (n + 1 < steps) env.step(zero);
  }
  return out;
}

std::vector<rate::RateReport> evaluate_baseline(Kind kind, Csi csi,
                                                const std::vector<TraceStep>& trace,
                                                double power, double sigma2, Rng& rng) {
  std::vector<rate::RateReport> out;
  out.reserve(trace.size());
  for (const auto& step : trace) {
    const CMat& basis = csi == Csi::perfect ? step.now : step.delayed;
    out.push_back(rate::sum_rate(step.now, design(kind, basis, power, rng), sigma2));
  }
  return out;
}

std::vector<env::StepRow> rollout(env::DelayedCsiEnv& env, Kind kind, Csi csi, int episodes,
                                  Rng& rng) {
  std::vector<env::StepRow> rows;
  for (int ep = 0; ep < episodes; ++ep) {
    env.reset();
    for (int n = 0; n < env.config().episode_length; ++n) {
      const CMat& basis = csi == Csi::perfect ? env.channel_now() : env.channel_delayed();
      const CMat V = design(kind, basis, env.power(), rng);
      rows.push_back(env::make_row(ep, n, env.step(env::precoder_to_action(V))));
    }
  }
  return rows;
}

}  // namespace satprec::baselines
