#pragma once
// Two-stage receiver: threshold-based initial active-user detection on the
// preamble slot, least-squares channel estimation, frequency lift,
// measurement-ensemble assembly, weighted-SOMP inner recovery per symbol
// group, an iterative outer loop with cross-group weight updates, and final
// channel re-estimation plus QPSK demapping.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "msra/airlink.hpp"
#include "msra/channel.hpp"
#include "msra/config.hpp"
#include "msra/linalg.hpp"
#include "msra/rng.hpp"
#include "msra/waveform.hpp"

namespace msra {

// ---------------------------------------------------------------------------
// immutable per-configuration context (pools and cached factors)
// ---------------------------------------------------------------------------

struct LinkContext {
  SystemConfig cfg;
  BasePool base;
  SignaturePool sig;
  PreamblePool pool;
  Mat PM;          // N_zc x (tau*N_p) block circulant preamble matrix
  Mat PM_minnorm;  // cached (tau*N_p) x N_zc min-norm factor PM^H (PM PM^H)^+
};

inline LinkContext build_context(const SystemConfig& cfg) {
  LinkContext ctx;
  ctx.cfg = cfg;
  ctx.base = gen_base_pool(cfg.M, cfg.N_s,
                           derive_seed(cfg.master_seed, hash_tag("base-pool")));
  ctx.sig = build_signature_pool(cfg.N_T, cfg.N_s, cfg.upsilon, cfg.spreading,
                                 derive_seed(cfg.master_seed, hash_tag("signatures")));
  ctx.pool = gen_zc_preambles(cfg.N_zc, cfg.tau, cfg.N_p);
  ctx.PM = build_preamble_matrix(ctx.pool);
  ctx.PM_minnorm = ctx.PM.adjoint() * pinv_hermitian(ctx.PM * ctx.PM.adjoint());
  return ctx;
}

// ---------------------------------------------------------------------------
// stage 1: initial active-user detection
// ---------------------------------------------------------------------------

struct Stage1Result {
  std::vector<int> U1;  // hypothesized preamble indices (ascending)
  RVec energies;        // per-preamble matched block energy
};

// U1 = { m : ||(P_m)^H y_p||^2 >= xi }, P_m the tau-column block of preamble m.
inline Stage1Result initial_aud(const Vec& y_p, const Mat& PM, int tau,
                                double xi) {
  const int N_p = static_cast<int>(PM.cols()) / tau;
  Stage1Result out;
  out.energies = RVec::Zero(N_p);
  const Vec z = PM.adjoint() * y_p;
  for (int m = 0; m < N_p; ++m) {
    double e = 0.0;
    for (int t = 0; t < tau; ++t)
      e += std::norm(z(static_cast<Eigen::Index>(m) * tau + t));
    out.energies(m) = e;
    if (e >= xi) out.U1.push_back(m);
  }
  return out;
}

// Default stage-1 threshold: xi = c0 * (1 + sigma2 * tau). The matched block
// of an active preamble captures about unit energy under power control, plus
// tau noise dimensions of sigma2 each.
inline double stage1_threshold(const SystemConfig& cfg) {
  const double s2 = cfg.sigma2();
  return s2 > 0 ? cfg.stage1_c0 * (1.0 + s2 * cfg.tau) : 1e-9;
}

// Optional greedy pruning pass (off by default): block OMP over the stage-1
// hypotheses until the preamble-plane residual drops below xi; returns the
// selected subset (ascending).
inline std::vector<int> stage1_prune(const Vec& y_p, const Mat& PM, int tau,
                                     const std::vector<int>& U1, double xi) {
  std::vector<int> kept;
  Mat Q(y_p.size(), 0);
  Vec r = y_p;
  std::set<int> remaining(U1.begin(), U1.end());
  while (!remaining.empty() && r.squaredNorm() > xi) {
    int best_m = -1;
    double best = -1.0;
    for (int m : remaining) {
      double e = 0.0;
      for (int t = 0; t < tau; ++t)
        e += std::norm(PM.col(static_cast<Eigen::Index>(m) * tau + t).dot(r));
      if (e > best) {
        best = e;
        best_m = m;
      }
    }
    if (best_m < 0 || best <= 0) break;
    remaining.erase(best_m);
    kept.push_back(best_m);
    bool grew = false;
    for (int t = 0; t < tau; ++t)
      grew |= mgs_append(Q, PM.col(static_cast<Eigen::Index>(best_m) * tau + t));
    if (grew) r = y_p - Q * (Q.adjoint() * y_p);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

// ---------------------------------------------------------------------------
// channel estimation
// ---------------------------------------------------------------------------

struct ChannelEstimate {
  Mat h;  // |U| x tau time-domain estimates, row order matching U (ascending)
  bool min_norm = false;
  bool ill_conditioned = false;
  double cond = 0.0;
};

// LS estimate over the hypothesized blocks: h_Gamma(U) = (P_Gamma(U))^+ y_p.
// Underdetermined systems yield the minimum-norm solution (flagged).
inline ChannelEstimate ls_channel_estimate(const Vec& y_p, const Mat& PM,
                                           int tau,
                                           const std::vector<int>& U) {
  ChannelEstimate est;
  const int nU = static_cast<int>(U.size());
  Mat A(y_p.size(), static_cast<Eigen::Index>(nU) * tau);
  for (int j = 0; j < nU; ++j)
    for (int t = 0; t < tau; ++t)
      A.col(static_cast<Eigen::Index>(j) * tau + t) =
          PM.col(static_cast<Eigen::Index>(U[static_cast<std::size_t>(j)]) * tau + t);
  const LsSolution sol = pinv_solve_wide(A, y_p);
  est.min_norm = sol.min_norm;
  est.ill_conditioned = sol.ill_conditioned;
  est.cond = sol.cond;
  est.h = Mat(nU, tau);
  for (int j = 0; j < nU; ++j)
    for (int t = 0; t < tau; ++t)
      est.h(j, t) = sol.x(static_cast<Eigen::Index>(j) * tau + t);
  return est;
}

// Fast path when every preamble is hypothesized: uses the cached min-norm
// factor of the full preamble matrix.
inline ChannelEstimate ls_channel_estimate_full(const LinkContext& ctx,
                                                const Vec& y_p) {
  const int tau = ctx.cfg.tau;
  ChannelEstimate est;
  est.min_norm = ctx.PM.rows() < ctx.PM.cols();
  const Vec x = ctx.PM_minnorm * y_p;
  est.h = Mat(ctx.cfg.N_p, tau);
  for (int m = 0; m < ctx.cfg.N_p; ++m)
    for (int t = 0; t < tau; ++t)
      est.h(m, t) = x(static_cast<Eigen::Index>(m) * tau + t);
  return est;
}

// Frequency lift of one estimated tap row (zero-padded DFT).
inline Vec freq_lift(const Mat& h, int row, int N_sc_d) {
  Vec taps(h.cols());
  for (Eigen::Index t = 0; t < h.cols(); ++t) taps(t) = h(row, t);
  return dft_pad(taps, N_sc_d);
}

// ---------------------------------------------------------------------------
// measurement-ensemble assembly
// ---------------------------------------------------------------------------

// Phi[i][l] is M x |U|: column j is diag(hhat_i^(U[j])) * s_{U[j], l}.
using LayerEnsembles = std::vector<std::vector<Mat>>;

inline LayerEnsembles assemble_measurement(const LinkContext& ctx,
                                           const std::vector<int>& U,
                                           const Mat& h) {
  const SystemConfig& cfg = ctx.cfg;
  const int nU = static_cast<int>(U.size());
  std::vector<Vec> freq(static_cast<std::size_t>(nU));
  for (int j = 0; j < nU; ++j)
    freq[static_cast<std::size_t>(j)] = freq_lift(h, j, cfg.N_sc_d);
  LayerEnsembles Phi(static_cast<std::size_t>(cfg.N_g),
                     std::vector<Mat>(static_cast<std::size_t>(cfg.upsilon)));
  for (int i = 0; i < cfg.N_g; ++i) {
    Mat Hg(cfg.M, nU);
    for (int j = 0; j < nU; ++j)
      Hg.col(j) = group_slice(freq[static_cast<std::size_t>(j)], i, cfg.M);
    for (int l = 0; l < cfg.upsilon; ++l) {
      Mat P(cfg.M, nU);
      for (int j = 0; j < nU; ++j)
        P.col(j) = Hg.col(j).cwiseProduct(
            ctx.base.S.col(ctx.sig.assign(U[static_cast<std::size_t>(j)], l)));
      Phi[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] = std::move(P);
    }
  }
  return Phi;
}

// Stacked measurement matrix A_i (upsilon*M x upsilon*|U|): column block j,
// layer column l holds Phi[i][l].col(j) in row block l.
inline Mat stacked_measurement(const std::vector<Mat>& Phi_i) {
  const int upsilon = static_cast<int>(Phi_i.size());
  const int M = static_cast<int>(Phi_i[0].rows());
  const int nU = static_cast<int>(Phi_i[0].cols());
  Mat A = Mat::Zero(static_cast<Eigen::Index>(upsilon) * M,
                    static_cast<Eigen::Index>(upsilon) * nU);
  for (int j = 0; j < nU; ++j)
    for (int l = 0; l < upsilon; ++l)
      A.block(static_cast<Eigen::Index>(l) * M,
              static_cast<Eigen::Index>(j) * upsilon + l, M, 1) =
          Phi_i[static_cast<std::size_t>(l)].col(j);
  return A;
}

// ---------------------------------------------------------------------------
// weighted SOMP
// ---------------------------------------------------------------------------

struct WsompResult {
  std::vector<int> selected;             // local column indices, pick order
  std::vector<double> residual_history;  // squared norms, starts at ||y||^2
  double ortho_max = 0.0;  // max |<selected col, residual>| (normalized) seen
  bool zero_weights = false;
};

// Greedy block selection: m* = argmax_m w_m^2 ||Phi(:,m)^H r||^2 / ||block||_F^2
// (lowest index wins ties), orthogonal residual update per layer via MGS with
// re-orthogonalization, stop when the squared residual falls below
// max(xi2, 1e-12*||y||^2), max_atoms is reached, or no positive-weight
// candidate remains.
inline WsompResult wsomp(const std::vector<Mat>& Phi_i, const Mat& Y_i,
                         const RVec& w, double xi2, int max_atoms) {
  const int upsilon = static_cast<int>(Phi_i.size());
  const int nU = static_cast<int>(Phi_i[0].cols());
  WsompResult out;
  RVec colnorm2 = RVec::Zero(nU);
  for (int l = 0; l < upsilon; ++l)
    for (int m = 0; m < nU; ++m)
      colnorm2(m) += Phi_i[static_cast<std::size_t>(l)].col(m).squaredNorm();
  Mat r = Y_i;
  std::vector<Mat> Q(static_cast<std::size_t>(upsilon), Mat(Y_i.rows(), 0));
  const double y2 = Y_i.squaredNorm();
  const double floor = std::max(xi2, 1e-12 * y2);
  out.residual_history.push_back(y2);
  if (w.size() == 0 || w.maxCoeff() <= 0.0) {
    out.zero_weights = true;
    return out;
  }
  std::vector<char> picked(static_cast<std::size_t>(nU), 0);
  while (static_cast<int>(out.selected.size()) < max_atoms) {
    if (r.squaredNorm() <= floor) break;
    // scores
    RVec num = RVec::Zero(nU);
    for (int l = 0; l < upsilon; ++l) {
      const Vec corr =
          Phi_i[static_cast<std::size_t>(l)].adjoint() * r.col(l);
      num += corr.cwiseAbs2();
    }
    int best_m = -1;
    double best = 0.0;
    for (int m = 0; m < nU; ++m) {
      if (picked[static_cast<std::size_t>(m)] || w(m) <= 0.0 ||
          colnorm2(m) <= 1e-24)
        continue;
      const double score =
          w(m) * w(m) * num(m) / std::max(colnorm2(m), 1e-300);
      if (score > best) {  // strict: lowest index wins ties
        best = score;
        best_m = m;
      }
    }
    if (best_m < 0 || best <= 0.0) break;
    picked[static_cast<std::size_t>(best_m)] = 1;
    out.selected.push_back(best_m);
    for (int l = 0; l < upsilon; ++l) {
      Mat& Ql = Q[static_cast<std::size_t>(l)];
      const Vec v = Phi_i[static_cast<std::size_t>(l)].col(best_m);
      Vec u = v;
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index j = 0; j < Ql.cols(); ++j)
          u -= Ql.col(j) * (Ql.col(j).dot(u));
      const double nu = u.norm();
      if (nu > 1e-10 * std::max(1.0, v.norm())) {
        Ql.conservativeResize(Eigen::NoChange, Ql.cols() + 1);
        Ql.col(Ql.cols() - 1) = u / nu;
        r.col(l) -= Ql.col(Ql.cols() - 1) *
                    (Ql.col(Ql.cols() - 1).dot(r.col(l)));
      }
    }
    // diagnostic: residual orthogonality against all selected blocks
    double omax = 0.0;
    for (int s : out.selected)
      for (int l = 0; l < upsilon; ++l) {
        const Vec& cl = Phi_i[static_cast<std::size_t>(l)].col(s);
        const double cn = cl.norm();
        if (cn > 0)
          omax = std::max(omax,
                          std::abs(cl.dot(r.col(l))) / (cn * std::max(r.col(l).norm(), 1e-300)));
      }
    out.ortho_max = std::max(out.ortho_max, omax);
    out.residual_history.push_back(r.squaredNorm());
  }
  return out;
}

// w_m = (number of groups whose support contains m) / N_g.
inline RVec update_weights(const std::vector<std::set<int>>& per_group,
                           int N_g, int nU) {
  RVec w = RVec::Zero(nU);
  for (const auto& sg : per_group)
    for (int m : sg) w(m) += 1.0;
  return w / static_cast<double>(N_g);
}

// ---------------------------------------------------------------------------
// outer loop
// ---------------------------------------------------------------------------

struct DetectionState {
  std::vector<int> hypothesis_u1;          // global signature indices
  RVec weights;                            // per hypothesis
  std::vector<std::set<int>> per_group;    // local supports U_i^(2)
  std::vector<int> final_local;            // local indices into hypothesis_u1
  int outer_iter = 0;
  bool converged = false;
};

inline double wsomp_stop_threshold(const SystemConfig& cfg) {
  const double s2 = cfg.sigma2();
  if (cfg.stop_rule == "plain") return cfg.upsilon * s2 * cfg.M;
  return cfg.upsilon * s2 *
         (cfg.M + 2.0 * std::sqrt(cfg.M * std::log(static_cast<double>(cfg.M))));
}

// Initialize w = 1, alternate N_g parallel wsomp runs with weight updates
// until all per-group supports agree (as sets) or max_outer is reached; on
// non-convergence the majority set {m : w_m > 1/2} is the fallback (flagged).
inline DetectionState iorls(const LayerEnsembles& Phi,
                            const std::vector<Mat>& Y,
                            const SystemConfig& cfg,
                            const std::vector<int>& U1) {
  DetectionState st;
  st.hypothesis_u1 = U1;
  const int nU = static_cast<int>(U1.size());
  st.weights = RVec::Ones(nU);
  const double xi2 = wsomp_stop_threshold(cfg);
  const int max_atoms = std::min(nU, cfg.M);
  for (int it = 0; it < cfg.max_outer; ++it) {
    st.per_group.assign(static_cast<std::size_t>(cfg.N_g), {});
    for (int i = 0; i < cfg.N_g; ++i) {
      const WsompResult ws =
          wsomp(Phi[static_cast<std::size_t>(i)],
                Y[static_cast<std::size_t>(i)], st.weights, xi2, max_atoms);
      st.per_group[static_cast<std::size_t>(i)] =
          std::set<int>(ws.selected.begin(), ws.selected.end());
    }
    st.weights = update_weights(st.per_group, cfg.N_g, nU);
    st.outer_iter = it + 1;
    bool all_equal = true;
    for (int i = 1; i < cfg.N_g; ++i)
      all_equal &= st.per_group[static_cast<std::size_t>(i)] == st.per_group[0];
    if (all_equal) {
      st.converged = true;
      st.final_local.assign(st.per_group[0].begin(), st.per_group[0].end());
      return st;
    }
  }
  st.converged = false;
  for (int m = 0; m < nU; ++m)
    if (st.weights(m) > 0.5) st.final_local.push_back(m);
  return st;
}

// ---------------------------------------------------------------------------
// finalization
// ---------------------------------------------------------------------------

struct PerUserOutcome {
  bool collided = false;
  bool preamble_detected = false;
  bool signature_detected = false;
  bool all_symbols_correct = false;
  int symbol_errors = 0;
};

struct DetectionReport {
  std::vector<int> final_support;  // global indices (ascending)
  Mat channel_time;                // |final| x tau second-round estimates
  std::vector<Mat> xhat;           // per group: |final| x upsilon coefficients
  std::vector<Mat> decisions;      // per group: |final| x upsilon QPSK points
  std::vector<double> group_residual;  // final LS residual norm per group
  std::vector<PerUserOutcome> per_user;  // only in simulation mode
  long symbol_error_num = 0;   // summed over scored users
  long symbol_error_den = 0;
  int outer_iterations = 0;
  bool converged = true;
  bool no_users_detected = false;
};

// Second-round channel estimation on the final support, block LS per
// (group, symbol), and nearest-point QPSK decisions. When ground truth is
// supplied, per-user outcomes and symbol-error counts are scored: a missed
// user has every one of its N_g*upsilon symbols counted as errors.
inline DetectionReport finalize(const LinkContext& ctx,
                                const SlotObservation& obs,
                                const std::vector<int>& final_support,
                                const Trial* truth = nullptr) {
  const SystemConfig& cfg = ctx.cfg;
  DetectionReport rep;
  rep.final_support = final_support;
  std::sort(rep.final_support.begin(), rep.final_support.end());
  const int nF = static_cast<int>(rep.final_support.size());
  const int total_symbols = cfg.N_g * cfg.upsilon;
  if (nF == 0) {
    rep.no_users_detected = true;
    if (truth) {
      for (std::size_t u = 0; u < truth->draw.chosen.size(); ++u) {
        PerUserOutcome o;
        o.collided = truth->draw.collided.count(truth->draw.chosen[u]) > 0;
        o.symbol_errors = total_symbols;
        rep.per_user.push_back(o);
        rep.symbol_error_num += total_symbols;
        rep.symbol_error_den += total_symbols;
      }
    }
    return rep;
  }
  const ChannelEstimate est =
      ls_channel_estimate(obs.y_p, ctx.PM, cfg.tau, rep.final_support);
  rep.channel_time = est.h;
  const LayerEnsembles Phi2 = assemble_measurement(ctx, rep.final_support, est.h);
  std::map<int, int> pos;
  for (int j = 0; j < nF; ++j) pos[rep.final_support[static_cast<std::size_t>(j)]] = j;
  rep.xhat.assign(static_cast<std::size_t>(cfg.N_g), Mat::Zero(nF, cfg.upsilon));
  rep.decisions.assign(static_cast<std::size_t>(cfg.N_g), Mat::Zero(nF, cfg.upsilon));
  rep.group_residual.assign(static_cast<std::size_t>(cfg.N_g), 0.0);
  for (int i = 0; i < cfg.N_g; ++i) {
    double res2 = 0.0;
    for (int l = 0; l < cfg.upsilon; ++l) {
      const Mat& A = Phi2[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)];
      const Vec y = obs.Y[static_cast<std::size_t>(i)].col(l);
      const LsSolution sol = pinv_solve(A, y);
      rep.xhat[static_cast<std::size_t>(i)].col(l) = sol.x;
      for (int j = 0; j < nF; ++j)
        rep.decisions[static_cast<std::size_t>(i)](j, l) = qpsk_demap(sol.x(j));
      res2 += (y - A * sol.x).squaredNorm();
    }
    rep.group_residual[static_cast<std::size_t>(i)] = std::sqrt(res2);
  }
  if (truth) {
    const std::size_t n_users = truth->draw.chosen.size();
    rep.per_user.assign(n_users, {});
    for (std::size_t u = 0; u < n_users; ++u) {
      PerUserOutcome& o = rep.per_user[u];
      const int m = truth->draw.chosen[u];
      o.collided = truth->draw.collided.count(m) > 0;
      const auto it = pos.find(m);
      o.signature_detected = it != pos.end();
      int errs = 0;
      for (int i = 0; i < cfg.N_g; ++i)
        for (int l = 0; l < cfg.upsilon; ++l) {
          if (it == pos.end()) {
            ++errs;
            continue;
          }
          const cxd dec = rep.decisions[static_cast<std::size_t>(i)](it->second, l);
          if (std::abs(dec - truth->frames[u].symbols(i, l)) > 1e-9) ++errs;
        }
      o.symbol_errors = errs;
      o.all_symbols_correct = errs == 0;
      rep.symbol_error_num += errs;
      rep.symbol_error_den += total_symbols;
    }
  }
  return rep;
}

// Line-delimited structured text form of a DetectionReport (documented field
// order; one `key: value` record per line).
inline void write_detection_report(std::ostream& os, const DetectionReport& r) {
  os << "final_support:";
  for (int m : r.final_support) os << " " << m;
  os << "\nconverged: " << (r.converged ? 1 : 0);
  os << "\nouter_iterations: " << r.outer_iterations;
  os << "\nno_users_detected: " << (r.no_users_detected ? 1 : 0);
  os << "\ngroup_residual:";
  for (double g : r.group_residual) {
    char buf[40];
    std::snprintf(buf, sizeof buf, " %.17g", g);
    os << buf;
  }
  os << "\nsymbol_errors: " << r.symbol_error_num << "/" << r.symbol_error_den;
  for (std::size_t u = 0; u < r.per_user.size(); ++u) {
    const PerUserOutcome& o = r.per_user[u];
    os << "\nuser " << u << ": collided=" << o.collided
       << " preamble_detected=" << o.preamble_detected
       << " signature_detected=" << o.signature_detected
       << " symbol_errors=" << o.symbol_errors;
  }
  os << "\n";
}

}  // namespace msra
