#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "satprec/common.hpp"

namespace satprec::rate {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Transmit precoder V (M x K) with its trace power budget.
struct Precoder {
  CMat V;
  double power_budget = 1.0;  // W

  double power() const { return V.squaredNorm(); }
  bool feasible(double tol = 1e-9) const { return power() <= power_budget + tol; }
};

struct RateReport {
  std::vector<double> per_user_rate;  // bit/s/Hz
  std::vector<double> sinr;
  double sum_rate = 0.0;
};

/// Per-user SINR and achievable rate with treating interference as noise.
/// Rates use log base 2. Throws DimensionMismatch on shape disagreement.
RateReport sum_rate(const CMat& H, const CMat& V, double sigma2);
inline RateReport sum_rate(const CMat& H, const Precoder& p, double sigma2) {
  return sum_rate(H, p.V, sigma2);
}

// ---------------------------------------------------------------------------
// LMMSE lower-bound machinery. These are exposed as oracles for the closed
// form above; the runtime path never uses them.

/// Interference-plus-noise term Γ_k = Σ_{i≠k} h^H F_i h + σ².
double interference_plus_noise(const CVec& h, std::span<const CMat> F_all,
                               std::size_t k, double sigma2);

/// LMMSE receive row g = h^H F_k / (h^H F_k h + Γ_k), returned as a column
/// vector holding the entries of that row.
CVec lmmse_gain(const CVec& h, std::span<const CMat> F_all, std::size_t k,
                double sigma2);

/// E|t_k - g y_k|² as a trace for a given receive row `g` (column layout as
/// returned by lmmse_gain).
double lmmse_error(const CVec& h, std::span<const CMat> F_all, std::size_t k,
                   double sigma2, const CVec& g);

struct IdentityCheck {
  double lhs = 0.0;  // log2 det(I + h h^H F / γ)
  double rhs = 0.0;  // log2(1 + h^H F h / γ)
};

/// Both sides of the Sylvester determinant step. Throws NumericalFailure if
/// the determinant is not finite or not real-positive.
IdentityCheck lower_bound_identity_check(const CVec& h, const CMat& F, double gamma);

/// Rate bound log2(1 + h^H F_k h / Γ_k) for user k.
double lmmse_rate_bound(const CVec& h, std::span<const CMat> F_all, std::size_t k,
                        double sigma2);

/// F_i = v_i v_i^H for every column of V.
std::vector<CMat> rank_one_covariances(const CMat& V);

}  // namespace satprec::rate
