#include "satprec/rate.hpp"

#include <cmath>
#include <complex>

#include <Eigen/LU>

namespace satprec::rate {

RateReport sum_rate(const CMat& H, const CMat& V, double sigma2) {
  if (H.rows() != V.rows() || H.cols() != V.cols()) {
    throw DimensionMismatch("channel and precoder shapes differ");
  }
  if (!(sigma2 > 0.0)) throw DimensionMismatch("noise power must be positive");
  const auto K = H.cols();
  // G(k, i) = h_k^H v_i
  const CMat G = H.adjoint() * V;
  RateReport r;
  r.per_user_rate.resize(static_cast<std::size_t>(K));
  r.sinr.resize(static_cast<std::size_t>(K));
  for (Eigen::Index k = 0; k < K; ++k) {
    const double signal = std::norm(G(k, k));
    const double interference = G.row(k).squaredNorm() - signal;
    const double sinr = signal / (std::max(interference, 0.0) + sigma2);
    r.sinr[k] = sinr;
    r.per_user_rate[k] = std::log2(1.0 + sinr);
    r.sum_rate += r.per_user_rate[k];
  }
  return r;
}

namespace {

void check_covariances(const CVec& h, std::span<const CMat> F_all, std::size_t k) {
  if (k >= F_all.size()) throw DimensionMismatch("user index out of range");
  for (const auto& F : F_all) {
    if (F.rows() != h.size() || F.cols() != h.size()) {
      throw DimensionMismatch("covariance must be M x M");
    }
  }
}

double quad(const CVec& h, const CMat& F) { return (h.adjoint() * F * h)(0, 0).real(); }

}  // namespace

double interference_plus_noise(const CVec& h, std::span<const CMat> F_all,
                               std::size_t k, double sigma2) {
  check_covariances(h, F_all, k);
  double gamma = sigma2;
  for (std::size_t i = 0; i < F_all.size(); ++i) {
    if (i != k) gamma += quad(h, F_all[i]);
  }
  return gamma;
}

CVec lmmse_gain(const CVec& h, std::span<const CMat> F_all, std::size_t k,
                double sigma2) {
  const double gamma = interference_plus_noise(h, F_all, k, sigma2);
  const double denom = quad(h, F_all[k]) + gamma;
  // Row h^H F_k stored as a column: (h^H F_k)^T.
  return (h.adjoint() * F_all[k]).transpose() / denom;
}

double lmmse_error(const CVec& h, std::span<const CMat> F_all, std::size_t k,
                   double sigma2, const CVec& g) {
  check_covariances(h, F_all, k);
  // t = v s (M-vector) with E[t t^H] = F_k; y = h^H Σ t_i + n.
  // E|t - g y|^2 (trace of error covariance), with g^T the receive row.
  const CMat& Fk = F_all[k];
  const CVec row = g;  // entries of g
  const double total_y = quad(h, Fk) + interference_plus_noise(h, F_all, k, sigma2);
  // E[t y^*] = F_k h ; E|y|^2 = total_y
  const CVec t_y = Fk * h;
  const double err = Fk.trace().real() - 2.0 * (row.transpose() * t_y)(0, 0).real() +
                     row.squaredNorm() * total_y;
  return err;
}

IdentityCheck lower_bound_identity_check(const CVec& h, const CMat& F, double gamma) {
  if (F.rows() != h.size() || F.cols() != h.size()) {
    throw DimensionMismatch("covariance must be M x M");
  }
  if (!(gamma > 0.0)) throw NumericalFailure("gamma must be positive");
  const auto m = h.size();
  const CMat A = CMat::Identity(m, m) + (h * h.adjoint() * F) / gamma;
  const std::complex<double> det = A.determinant();
  if (!std::isfinite(det.real()) || !std::isfinite(det.imag()) || det.real() <= 0.0) {
    throw NumericalFailure("determinant is not finite and positive");
  }
  IdentityCheck out;
  out.lhs = std::log2(std::abs(det));
  out.rhs = std::log2(1.0 + quad(h, F) / gamma);
  return out;
}

double lmmse_rate_bound(const CVec& h, std::span<const CMat> F_all, std::size_t k,
                        double sigma2) {
  const double gamma = interference_plus_noise(h, F_all, k, sigma2);
  return std::log2(1.0 + quad(h, F_all[k]) / gamma);
}

std::vector<CMat> rank_one_covariances(const CMat& V) {
  std::vector<CMat> F;
  F.reserve(static_cast<std::size_t>(V.cols()));
  for (Eigen::Index i = 0; i < V.cols(); ++i) F.push_back(V.col(i) * V.col(i).adjoint());
  return F;
}

}  // namespace satprec::rate
