#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "satprec/env.hpp"
#include "satprec/rate.hpp"
#include "satprec/rng.hpp"

namespace satprec::baselines {

using CMat = Eigen::MatrixXcd;

/// Zero-forcing H (Hᴴ H)⁻¹ scaled so that trace(VVᴴ) = P.
/// Throws RankDeficient when σ_min(H) < 1e-12 σ_max(H).
CMat zf_precoder(const CMat& H, double power);
/// Matched filter: v_k = √(P/K) h_k / ‖h_k‖. Throws ZeroColumn.
CMat mrt_precoder(const CMat& H, double power);
/// i.i.d. CN(0, 1) entries scaled to trace(VVᴴ) = P.
CMat random_precoder(int m, int k, double power, Rng& rng);

enum class Kind { zf, mrt, random };
enum class Csi { perfect, delayed };

Kind parse_kind(const std::string& s);
Csi parse_csi(const std::string& s);
std::string to_string(Kind k);
std::string to_string(Csi c);

/// Channels seen at one decision instant.
struct TraceStep {
  double t = 0.0;
  CMat now;      // H(t)
  CMat delayed;  // H(t − T_d)
};

/// Records `steps` decision instants from a freshly reset episode; the env is
/// driven with zero actions.
std::vector<TraceStep> record_trace(env::DelayedCsiEnv& env, int steps);

/// Sum rate on the true channel for a precoder designed from the chosen CSI.
std::vector<rate::RateReport> evaluate_baseline(Kind kind, Csi csi,
                                                const std::vector<TraceStep>& trace,
                                                double power, double sigma2, Rng& rng);

/// Runs whole episodes in the env, feeding the baseline precoder as action.
std::vector<env::StepRow> rollout(env::DelayedCsiEnv& env, Kind kind, Csi csi, int episodes,
                                  Rng& rng);

}  // namespace satprec::baselines
