#pragma once
// Analytic expressions and empirical aggregation: collision rate, the
// single-group misdetection bound with its input statistics, frame-level
// bound chain (exact binomial tail and its closed-form relaxations), the
// recovery-constraint inequality checks, and binomial confidence intervals.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "msra/linalg.hpp"
#include "msra/rng.hpp"
#include "msra/waveform.hpp"

namespace msra {

// ---------------------------------------------------------------------------
// collision analytics
// ---------------------------------------------------------------------------

// Probability that an arriving user's resource choice collides with at least
// one other arrival: 1 - exp(-mean_active / N_RR).
inline double analytic_collision_rate(double mean_active, double N_RR) {
  return 1.0 - std::exp(-mean_active / N_RR);
}

// ---------------------------------------------------------------------------
// projection helpers
// ---------------------------------------------------------------------------

namespace detail {

// Normalized copies of selected columns.
inline Mat take_normalized(const Mat& A, const std::vector<int>& idx) {
  Mat out(A.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = A.col(idx[j]);
    const double n = out.col(static_cast<Eigen::Index>(j)).norm();
    if (n > 0) out.col(static_cast<Eigen::Index>(j)) /= n;
  }
  return out;
}

}  // namespace detail

// Q = I - P_J: orthogonal-complement projector of the span of the (column-
// normalized) subensemble indexed by J.
inline Mat projector_complement(const Mat& cols, const std::vector<int>& J) {
  if (J.empty())
    return Mat::Identity(cols.rows(), cols.rows());
  std::vector<int> Js = J;
  std::sort(Js.begin(), Js.end());
  return complement_projector(detail::take_normalized(cols, Js));
}

// ---------------------------------------------------------------------------
// single-group misdetection bound
// ---------------------------------------------------------------------------

// Input statistics for the single-group bound, evaluated on per-layer
// ensembles for a given support Lambda and already-recovered subset J.
//
// Estimator conventions (documented design decisions):
//  * eta is the expected noise-correlation sum under CN(0, sigma2) noise,
//    computed in closed form from projection traces; eta_p99 is an empirical
//    99th-percentile alternative from noise resampling (when requested).
//  * |w_max|^2 is the expected maximum of |Lambda-bar| layer-summed squared
//    Gaussian sums, approximated Gumbel-style by upsilon*sigma2*H_n (harmonic
//    number); wmax2_emp is the empirical alternative.
struct BoundInputs {
  double c = 0.0;        // min over remaining support of sum_l ||Q phi||^4
  double d = 0.0;        // max cross-correlation statistic scaled by |w_max|^2
  double eta = 0.0;      // expected noise-correlation sum
  double eta_p99 = 0.0;  // empirical 99th percentile (0 when not sampled)
  double wmax2 = 0.0;
  double wmax2_emp = 0.0;  // 0 when not sampled
  double gamma = 0.0;
  bool applicable = false;  // premise eta < (c-d)*sqrt(2/pi)*upsilon
  bool defined = false;     // c + d > 0
  double bound_raw = 0.0;   // |U1| * 2^|Lambda| * exp(-upsilon*gamma^2/pi)
  int upsilon = 0;
  int lam_size = 0;
  int u1_size = 0;
};

inline double harmonic_number(int n) {
  double h = 0.0;
  for (int i = 1; i <= n; ++i) h += 1.0 / i;
  return h;
}

inline BoundInputs compute_bound_inputs(const std::vector<Mat>& layers,
                                        const std::vector<int>& Lam,
                                        const std::vector<int>& J,
                                        int U1_size, double sigma2,
                                        int empirical_draws = 0,
                                        std::uint64_t empirical_seed = 0) {
  BoundInputs bi;
  bi.upsilon = static_cast<int>(layers.size());
  bi.u1_size = U1_size;
  std::vector<int> lam_sorted = Lam;
  std::sort(lam_sorted.begin(), lam_sorted.end());
  lam_sorted.erase(std::unique(lam_sorted.begin(), lam_sorted.end()),
                   lam_sorted.end());
  bi.lam_size = static_cast<int>(lam_sorted.size());
  std::vector<int> rest;
  for (int m : lam_sorted)
    if (std::find(J.begin(), J.end(), m) == J.end()) rest.push_back(m);
  if (rest.empty()) return bi;
  const int nCols = static_cast<int>(layers[0].cols());
  std::vector<int> outside;
  for (int k = 0; k < nCols; ++k)
    if (!std::binary_search(lam_sorted.begin(), lam_sorted.end(), k))
      outside.push_back(k);
  const int nbar = U1_size - bi.lam_size;

  RVec c_terms = RVec::Zero(static_cast<Eigen::Index>(rest.size()));
  RVec d_terms = RVec::Zero(static_cast<Eigen::Index>(outside.size()));
  double eta = 0.0;
  std::vector<Mat> QP_store;  // kept for the empirical eta resampling
  QP_store.reserve(layers.size());
  for (const Mat& Phi : layers) {
    Mat Pn = Phi;
    for (Eigen::Index j = 0; j < Pn.cols(); ++j) {
      const double n = Pn.col(j).norm();
      if (n > 0) Pn.col(j) /= n;
    }
    const Mat Q = projector_complement(Phi, J);
    const Mat QP = Q * Pn;
    for (std::size_t j = 0; j < rest.size(); ++j) {
      const double qn2 = QP.col(rest[j]).squaredNorm();
      c_terms(static_cast<Eigen::Index>(j)) += qn2 * qn2;
    }
    for (Eigen::Index j = 0; j < QP.cols(); ++j)
      eta += sigma2 * QP.col(j).squaredNorm();
    for (std::size_t kk = 0; kk < outside.size(); ++kk) {
      double acc = 0.0;
      for (int m : rest)
        acc += std::norm(Pn.col(m).dot(QP.col(outside[kk])));
      d_terms(static_cast<Eigen::Index>(kk)) += acc;
    }
    if (empirical_draws > 0) QP_store.push_back(QP);
  }
  bi.c = c_terms.minCoeff();
  bi.eta = eta;
  bi.wmax2 = nbar > 0 ? bi.upsilon * sigma2 * harmonic_number(nbar) : 0.0;
  bi.d = outside.empty() ? 0.0 : bi.wmax2 * d_terms.maxCoeff();

  if (empirical_draws > 0 && sigma2 > 0) {
    Rng rng(empirical_seed);
    std::vector<double> eta_samples;
    eta_samples.reserve(static_cast<std::size_t>(empirical_draws));
    double wmax_acc = 0.0;
    for (int t = 0; t < empirical_draws; ++t) {
      double es = 0.0;
      for (const Mat& QP : QP_store) {
        Vec w(QP.rows());
        for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.cnormal(sigma2);
        es += (QP.adjoint() * w).squaredNorm();
      }
      eta_samples.push_back(es);
      // empirical |w_max|^2: max over nbar independent layer-summed sums
      double wm = 0.0;
      for (int k = 0; k < nbar; ++k) {
        double s = 0.0;
        for (int l = 0; l < bi.upsilon; ++l) s += std::norm(rng.cnormal(sigma2));
        wm = std::max(wm, s);
      }
      wmax_acc += wm;
    }
    std::sort(eta_samples.begin(), eta_samples.end());
    const std::size_t q =
        std::min(eta_samples.size() - 1,
                 static_cast<std::size_t>(0.99 * eta_samples.size()));
    bi.eta_p99 = eta_samples[q];
    bi.wmax2_emp = wmax_acc / empirical_draws;
  }

  if (bi.c + bi.d <= 0) return bi;
  bi.defined = true;
  bi.gamma = (bi.c - bi.d - bi.eta / std::sqrt(2.0 * bi.upsilon / M_PI)) /
             (bi.c + bi.d);
  bi.applicable = bi.eta < (bi.c - bi.d) * std::sqrt(2.0 / M_PI) * bi.upsilon;
  bi.bound_raw = static_cast<double>(U1_size) *
                 std::pow(2.0, bi.lam_size) *
                 std::exp(-bi.upsilon * bi.gamma * bi.gamma / M_PI);
  return bi;
}

// The single-group misdetection bound (raw; may exceed 1 — it is a bound,
// not a probability). Use std::min(b, 1.0) for the clamped form.
inline double bound_single_group(const BoundInputs& bi) { return bi.bound_raw; }

// ---------------------------------------------------------------------------
// frame-level bound chain
// ---------------------------------------------------------------------------

inline double binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Exact binomial tail P[X > n/2] for X ~ Binomial(n, p).
inline double binomial_majority_tail(double p, int n) {
  p = std::clamp(p, 0.0, 1.0);
  double tail = 0.0;
  for (int k = n / 2 + 1; k <= n; ++k)
    tail += binomial_coefficient(n, k) * std::pow(p, k) *
            std::pow(1.0 - p, n - k);
  return tail;
}

struct FrameBound {
  double p1 = 0.0;          // clamped single-group bound K1*exp(-upsilon*K2)
  double tail_exact = 0.0;  // exact majority tail at p1
  double chernoff = 0.0;    // (N_g/2)(2e)^{N_g/2} p1^{N_g/2}; valid p1 <= 1/2
  bool chernoff_valid = false;
  double closed_form = 0.0;  // (N_g/2)(2e)^{N_g/2} K1 exp(-(K2*ups-1)N_g/2)
  double K1 = 0.0, K2 = 0.0, K3 = 0.0;
};

// Frame-level misdetection bound chain for one group-level failure
// probability bound p1 = K1 exp(-upsilon*K2), K1 = N_T * 2^|Lambda|,
// K2 = gamma^2/pi, majority vote over N_g groups.
inline FrameBound bound_frame(double gamma, int upsilon, int N_T, int lam_size,
                              int N_g) {
  FrameBound fb;
  fb.K1 = static_cast<double>(N_T) * std::pow(2.0, lam_size);
  fb.K2 = gamma * gamma / M_PI;
  fb.K3 = (N_g / 2.0) * std::pow(2.0 * M_E, N_g / 2.0) * fb.K1;
  fb.p1 = std::min(1.0, fb.K1 * std::exp(-upsilon * fb.K2));
  fb.tail_exact = binomial_majority_tail(fb.p1, N_g);
  fb.chernoff_valid = fb.p1 <= 0.5;
  fb.chernoff = fb.chernoff_valid
                    ? (N_g / 2.0) * std::pow(2.0 * M_E, N_g / 2.0) *
                          std::pow(fb.p1, N_g / 2.0)
                    : std::numeric_limits<double>::quiet_NaN();
  fb.closed_form = (N_g / 2.0) * std::pow(2.0 * M_E, N_g / 2.0) * fb.K1 *
                   std::exp(-(fb.K2 * upsilon - 1.0) * N_g / 2.0);
  return fb;
}

// ---------------------------------------------------------------------------
// recovery-constraint inequality checks
// ---------------------------------------------------------------------------

// Both sides of the two constraint inequalities on per-layer ensembles for a
// support Lambda and recovered subset J:
//   lhs_cross = max_{k notin Lambda} sum_l sum_{m in Lambda\J} |phi_m^H Q_J phi_k|^2
//   rhs_cross = sum_l mu2_l(J) / (1 - delta_l(J))
//   lhs_self  = min_{m in Lambda\J} sum_l ||Q_J phi_m||
//   rhs_self  = upsilon - sum_l mu2_l(J)^2 / (1 - delta_l(J))
// The pass conditions are lhs_cross <= rhs_cross and lhs_self >= rhs_self.
// Projection correlations use atoms normalized to unit norm; the self term
// ||Q phi_m|| is the correlation of phi_m with its own projection direction
// (normalized by both vectors' norms). mu2 and delta are evaluated on the
// recovered subset J, so the check requires a non-empty J strictly inside
// Lambda; instances outside that domain, or where some layer's J-support
// loses rank (delta >= 1), return nullopt.
struct ChainCheck {
  double lhs_cross = 0.0, rhs_cross = 0.0;
  double lhs_self = 0.0, rhs_self = 0.0;
  bool pass_cross() const { return lhs_cross <= rhs_cross + 1e-9; }
  bool pass_self() const { return lhs_self >= rhs_self - 1e-9; }
};

inline std::optional<ChainCheck> constraint_chain_check(
    const std::vector<Mat>& layers, const std::vector<int>& Lam,
    const std::vector<int>& J) {
  const int nCols = static_cast<int>(layers[0].cols());
  std::vector<int> lam_sorted = Lam;
  std::sort(lam_sorted.begin(), lam_sorted.end());
  std::vector<int> rest;
  for (int m : lam_sorted)
    if (std::find(J.begin(), J.end(), m) == J.end()) rest.push_back(m);
  std::vector<int> outside;
  for (int k = 0; k < nCols; ++k)
    if (!std::binary_search(lam_sorted.begin(), lam_sorted.end(), k))
      outside.push_back(k);
  if (J.empty() || rest.empty() || outside.empty()) return std::nullopt;

  RVec lhs_cross_k = RVec::Zero(static_cast<Eigen::Index>(outside.size()));
  RVec lhs_self_m = RVec::Zero(static_cast<Eigen::Index>(rest.size()));
  double rhs_cross = 0.0, rhs_self_acc = 0.0;
  for (const Mat& Phi : layers) {
    const double mu = babel_coherence_2(Phi, J);
    const double de = isometry_constant(Phi, J);
    if (de >= 1.0 - 1e-9) return std::nullopt;
    rhs_cross += mu / (1.0 - de);
    rhs_self_acc += mu * mu / (1.0 - de);
    Mat Pn = Phi;
    for (Eigen::Index j = 0; j < Pn.cols(); ++j) {
      const double n = Pn.col(j).norm();
      if (n > 0) Pn.col(j) /= n;
    }
    const Mat Q = projector_complement(Phi, J);
    const Mat QP = Q * Pn;
    for (std::size_t kk = 0; kk < outside.size(); ++kk) {
      double acc = 0.0;
      for (int m : rest) acc += std::norm(Pn.col(m).dot(QP.col(outside[kk])));
      lhs_cross_k(static_cast<Eigen::Index>(kk)) += acc;
    }
    for (std::size_t j = 0; j < rest.size(); ++j)
      lhs_self_m(static_cast<Eigen::Index>(j)) += QP.col(rest[j]).norm();
  }
  ChainCheck cc;
  cc.lhs_cross = lhs_cross_k.maxCoeff();
  cc.rhs_cross = rhs_cross;
  cc.lhs_self = lhs_self_m.minCoeff();
  cc.rhs_self = static_cast<double>(layers.size()) - rhs_self_acc;
  return cc;
}

// ---------------------------------------------------------------------------
// aggregation
// ---------------------------------------------------------------------------

struct Estimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  long n = 0;
};

// Wilson score interval at 95% for a binomial proportion. Count-based, hence
// permutation-invariant over the underlying outcome list.
inline Estimate binomial_ci(long successes, long n) {
  Estimate e;
  e.n = n;
  if (n <= 0) return e;
  const double z = 1.959963984540054;
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  e.value = p;
  e.ci_low = std::max(0.0, center - half);
  e.ci_high = std::min(1.0, center + half);
  return e;
}

// Normal-approximation 95% CI for a real-valued sample mean.
inline Estimate mean_ci(const std::vector<double>& xs) {
  Estimate e;
  e.n = static_cast<long>(xs.size());
  if (xs.empty()) return e;
  double s = 0.0;
  for (double x : xs) s += x;
  const double mean = s / xs.size();
  double v = 0.0;
  for (double x : xs) v += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(v / (xs.size() - 1)) : 0.0;
  const double half = 1.959963984540054 * sd / std::sqrt(static_cast<double>(xs.size()));
  e.value = mean;
  e.ci_low = mean - half;
  e.ci_high = mean + half;
  return e;
}

// Least-squares line fit of log(y) on x; returns {slope, intercept, r2}.
struct LogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  int points = 0;
};

inline LogFit fit_log_line(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  LogFit f;
  f.points = static_cast<int>(xs.size());
  if (xs.size() < 2) return f;
  const int n = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> ly(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ly[static_cast<std::size_t>(i)] = std::log(ys[static_cast<std::size_t>(i)]);
    sx += xs[static_cast<std::size_t>(i)];
    sy += ly[static_cast<std::size_t>(i)];
    sxx += xs[static_cast<std::size_t>(i)] * xs[static_cast<std::size_t>(i)];
    sxy += xs[static_cast<std::size_t>(i)] * ly[static_cast<std::size_t>(i)];
  }
  const double det = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (int i = 0; i < n; ++i) {
    const double pred = f.slope * xs[static_cast<std::size_t>(i)] + f.intercept;
    ss_res += (ly[static_cast<std::size_t>(i)] - pred) * (ly[static_cast<std::size_t>(i)] - pred);
    ss_tot += (ly[static_cast<std::size_t>(i)] - mean) * (ly[static_cast<std::size_t>(i)] - mean);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace msra
