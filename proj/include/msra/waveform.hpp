#pragma once
// Sequence-domain objects: the base spreading pool, per-signature sequence
// assignments (multi-sequence and single-sequence constructions), the
// cyclic-shifted ZC preamble pool with its block circulant matrix form, and
// the coherence metrics evaluated on column ensembles.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "msra/config.hpp"
#include "msra/linalg.hpp"
#include "msra/rng.hpp"

namespace msra {

// ---------------------------------------------------------------------------
// base spreading pool
// ---------------------------------------------------------------------------

struct BasePool {
  Mat S;  // M x N_s, unit-norm columns
};

// i.i.d. complex Gaussian chips, each sequence scaled to unit l2 norm.
inline BasePool gen_base_pool(int M, int N_s, std::uint64_t seed) {
  Rng rng(seed);
  Mat S(M, N_s);
  for (int n = 0; n < N_s; ++n) {
    for (int m = 0; m < M; ++m) S(m, n) = rng.cnormal(1.0);
    S.col(n) /= S.col(n).norm();
  }
  return {std::move(S)};
}

// ---------------------------------------------------------------------------
// signature pool (sequence assignments)
// ---------------------------------------------------------------------------

struct SignaturePool {
  Eigen::MatrixXi assign;  // N_T x upsilon, entries in [0, N_s)
};

// MSRA: each signature row is a uniform draw of `upsilon` distinct base
// indices. SSRA: row m repeats base index (m mod N_s) upsilon times, i.e. the
// 1-based rule n = ((m-1) mod N_s) + 1.
inline SignaturePool build_signature_pool(int N_T, int N_s, int upsilon,
                                          Spreading spreading,
                                          std::uint64_t seed) {
  if (spreading == Spreading::MSRA && upsilon > N_s)
    throw std::invalid_argument("MSRA requires upsilon <= N_s");
  Eigen::MatrixXi A(N_T, upsilon);
  if (spreading == Spreading::SSRA) {
    for (int m = 0; m < N_T; ++m)
      for (int l = 0; l < upsilon; ++l) A(m, l) = m % N_s;
  } else {
    Rng rng(seed);
    for (int m = 0; m < N_T; ++m) {
      const std::vector<int> pick = rng.choice_without_replacement(N_s, upsilon);
      for (int l = 0; l < upsilon; ++l) A(m, l) = pick[static_cast<std::size_t>(l)];
    }
  }
  return {std::move(A)};
}

// Block-diagonal signature matrix S^(m): (upsilon*M) x upsilon, column l holds
// sequence s_{m,l} in row block l.
inline Mat block_signature_matrix(const BasePool& base,
                                  const SignaturePool& sig, int m) {
  const int M = static_cast<int>(base.S.rows());
  const int upsilon = static_cast<int>(sig.assign.cols());
  Mat B = Mat::Zero(static_cast<Eigen::Index>(upsilon) * M, upsilon);
  for (int l = 0; l < upsilon; ++l)
    B.block(static_cast<Eigen::Index>(l) * M, l, M, 1) =
        base.S.col(sig.assign(m, l));
  return B;
}

// Stacked signature atoms: column m is [s_{m,1}; ...; s_{m,upsilon}].
inline Mat stacked_signature_atoms(const BasePool& base,
                                   const SignaturePool& sig) {
  const int M = static_cast<int>(base.S.rows());
  const int N_T = static_cast<int>(sig.assign.rows());
  const int upsilon = static_cast<int>(sig.assign.cols());
  Mat st(static_cast<Eigen::Index>(upsilon) * M, N_T);
  for (int l = 0; l < upsilon; ++l)
    for (int m = 0; m < N_T; ++m)
      st.block(static_cast<Eigen::Index>(l) * M, m, M, 1) =
          base.S.col(sig.assign(m, l));
  return st;
}

// ---------------------------------------------------------------------------
// ZC preamble pool
// ---------------------------------------------------------------------------

struct PreamblePool {
  Mat P;  // N_zc x N_p, unit-norm columns
  int tau = 1;
};

// Root-major enumeration: for each root u (ascending over integers coprime to
// N_zc), cyclic shifts 0, tau, 2*tau, ...; the unshifted root sequence is
// x_u[n] = exp(-j*pi*u*n*(n+1)/N_zc)/sqrt(N_zc). The enumeration order is
// fixed so the preamble-to-signature association is stable across runs.
inline PreamblePool gen_zc_preambles(int N_zc, int tau, int N_p) {
  if (!is_prime(N_zc))
    throw std::invalid_argument("gen_zc_preambles: N_zc must be prime");
  const long capacity = static_cast<long>(N_zc - 1) * (N_zc / tau);
  if (N_p > capacity)
    throw std::invalid_argument(
        "gen_zc_preambles: N_p exceeds enumeration capacity");
  Mat P(N_zc, N_p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(N_zc));
  const int per_root = N_zc / tau;
  int idx = 0;
  for (int u = 1; u < N_zc && idx < N_p; ++u) {
    // N_zc prime: every u in 1..N_zc-1 is coprime.
    Vec base(N_zc);
    for (int n = 0; n < N_zc; ++n) {
      // exp(-j*pi*u*n*(n+1)/N_zc): reduce the integer phase mod 2*N_zc first
      // so the trigonometric argument stays small and exact.
      const long long k = (static_cast<long long>(u) * n % (2LL * N_zc)) *
                          (n + 1) % (2LL * N_zc);
      base(n) = std::polar(scale, -M_PI * static_cast<double>(k) / N_zc);
    }
    for (int s = 0; s < per_root && idx < N_p; ++s, ++idx)
      P.col(idx) = circshift(base, s * tau);
  }
  return {std::move(P), tau};
}

// Block circulant preamble matrix: N_zc x (tau*N_p); block m, column t is
// preamble m circularly shifted by t (t = 0..tau-1), so the product with a
// block-sparse tap vector reproduces the superposed circular convolutions.
inline Mat build_preamble_matrix(const PreamblePool& pool) {
  const int N_zc = static_cast<int>(pool.P.rows());
  const int N_p = static_cast<int>(pool.P.cols());
  Mat PM(N_zc, static_cast<Eigen::Index>(pool.tau) * N_p);
  for (int m = 0; m < N_p; ++m)
    for (int t = 0; t < pool.tau; ++t)
      PM.col(static_cast<Eigen::Index>(m) * pool.tau + t) =
          circshift(pool.P.col(m), t);
  return PM;
}

// ---------------------------------------------------------------------------
// coherence metrics
// ---------------------------------------------------------------------------

namespace detail {
inline Mat normalized_columns(const Mat& cols) {
  Mat A = cols;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    const double n = A.col(j).norm();
    if (n <= 0.0)
      throw std::invalid_argument("coherence: zero-norm atom");
    A.col(j) /= n;
  }
  return A;
}
}  // namespace detail

// 2-Babel coherence of the support: max over atoms k outside the support of
// sqrt( sum_{i in support} |<a_i, a_k>|^2 ), inner products on normalized
// atoms. Support must be a non-empty strict subset of the columns.
inline double babel_coherence_2(const Mat& cols, const std::vector<int>& support) {
  if (support.empty())
    throw std::invalid_argument("babel_coherence_2: empty support");
  if (static_cast<Eigen::Index>(support.size()) >= cols.cols())
    throw std::invalid_argument("babel_coherence_2: support must be strict subset");
  const Mat A = detail::normalized_columns(cols);
  std::vector<char> in_sup(static_cast<std::size_t>(cols.cols()), 0);
  for (int i : support) in_sup[static_cast<std::size_t>(i)] = 1;
  Mat As(A.rows(), static_cast<Eigen::Index>(support.size()));
  {
    std::vector<int> sup = support;
    std::sort(sup.begin(), sup.end());
    for (std::size_t j = 0; j < sup.size(); ++j)
      As.col(static_cast<Eigen::Index>(j)) = A.col(sup[j]);
  }
  double best = 0.0;
  for (Eigen::Index k = 0; k < A.cols(); ++k) {
    if (in_sup[static_cast<std::size_t>(k)]) continue;
    const double agg = (As.adjoint() * A.col(k)).squaredNorm();
    best = std::max(best, agg);  // ties: first (lowest) index wins via strict >
  }
  return std::sqrt(best);
}

// Isometry constant: delta = max(1 - lambda_min, lambda_max - 1) over the
// Gram spectrum of the normalized support submatrix. delta >= 1 flags a
// rank-deficient support.
inline double isometry_constant(const Mat& cols, const std::vector<int>& support) {
  if (support.empty())
    throw std::invalid_argument("isometry_constant: empty support");
  Mat sub(cols.rows(), static_cast<Eigen::Index>(support.size()));
  std::vector<int> sup = support;
  std::sort(sup.begin(), sup.end());
  for (std::size_t j = 0; j < sup.size(); ++j)
    sub.col(static_cast<Eigen::Index>(j)) = cols.col(sup[j]);
  sub = detail::normalized_columns(sub);
  const RVec ev = gram_eigenvalues(sub);
  return std::max(1.0 - ev(0), ev(ev.size() - 1) - 1.0);
}

// Per-layer coherence summary and the sufficient-condition margin
//   margin = upsilon - sum_l mu2_l(1 - mu2_l)/(1 - delta_l) - eta.
// A positive margin certifies the block-recovery sufficient condition for the
// evaluated support under noise correlation at most eta.
struct CoherenceReport {
  std::vector<double> mu2;    // per layer
  std::vector<double> delta;  // per layer
  double margin = 0.0;
  bool rank_deficient = false;  // some layer support submatrix lost rank
  std::vector<int> support;
};

inline CoherenceReport recovery_margin(const std::vector<Mat>& layers,
                                       const std::vector<int>& support,
                                       double eta) {
  CoherenceReport rep;
  rep.support = support;
  double acc = 0.0;
  for (const Mat& Phi : layers) {
    const double mu = babel_coherence_2(Phi, support);
    const double de = isometry_constant(Phi, support);
    rep.mu2.push_back(mu);
    rep.delta.push_back(de);
    if (de >= 1.0 - 1e-9) {
      rep.rank_deficient = true;
      continue;
    }
    acc += mu * (1.0 - mu) / (1.0 - de);
  }
  rep.margin = rep.rank_deficient
                   ? std::numeric_limits<double>::quiet_NaN()
                   : static_cast<double>(layers.size()) - acc - eta;
  return rep;
}

// ---------------------------------------------------------------------------
// text export/import (binary-free golden-test format)
// ---------------------------------------------------------------------------
// Header line: "# pool-export v1 kind=<kind> config=<hash> rows=<r> cols=<c>"
// then one row per sequence/assignment; complex entries are emitted as
// re/im pairs in %.17g scientific-capable notation (17 significant digits
// round-trip doubles exactly).

inline void export_complex_pool(std::ostream& os, const std::string& kind,
                                const std::string& config_hash, const Mat& A) {
  os << "# pool-export v1 kind=" << kind << " config=" << config_hash
     << " rows=" << A.cols() << " cols=" << 2 * A.rows() << "\n";
  char buf[64];
  for (Eigen::Index c = 0; c < A.cols(); ++c) {
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g", A(r, c).real(),
                    A(r, c).imag());
      os << (r ? " " : "") << buf;
    }
    os << "\n";
  }
}

inline void export_assignment_pool(std::ostream& os,
                                   const std::string& config_hash,
                                   const Eigen::MatrixXi& A) {
  os << "# pool-export v1 kind=assign config=" << config_hash
     << " rows=" << A.rows() << " cols=" << A.cols() << "\n";
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    for (Eigen::Index c = 0; c < A.cols(); ++c)
      os << (c ? " " : "") << A(r, c);
    os << "\n";
  }
}

struct PoolImport {
  std::string kind;
  std::string config_hash;
  Mat complex_data;           // sequences as columns (kind != assign)
  Eigen::MatrixXi int_data;   // kind == assign
};

inline PoolImport import_pool(std::istream& is) {
  PoolImport out;
  std::string header;
  if (!std::getline(is, header) || header.rfind("# pool-export v1", 0) != 0)
    throw std::runtime_error("pool import: bad header");
  long rows = -1, cols = -1;
  {
    std::istringstream hs(header);
    std::string tok;
    while (hs >> tok) {
      const auto eat = [&](const char* key) -> const char* {
        const std::size_t n = std::string(key).size();
        return tok.rfind(key, 0) == 0 ? tok.c_str() + n : nullptr;
      };
      if (const char* v = eat("kind=")) out.kind = v;
      else if (const char* v2 = eat("config=")) out.config_hash = v2;
      else if (const char* v3 = eat("rows=")) rows = std::stol(v3);
      else if (const char* v4 = eat("cols=")) cols = std::stol(v4);
    }
  }
  if (rows < 0 || cols < 0) throw std::runtime_error("pool import: bad header");
  if (out.kind == "assign") {
    out.int_data.resize(rows, cols);
    for (long r = 0; r < rows; ++r)
      for (long c = 0; c < cols; ++c)
        if (!(is >> out.int_data(r, c)))
          throw std::runtime_error("pool import: truncated data");
  } else {
    if (cols % 2) throw std::runtime_error("pool import: odd complex width");
    out.complex_data.resize(cols / 2, rows);  // sequences back into columns
    for (long r = 0; r < rows; ++r)
      for (long c = 0; c < cols / 2; ++c) {
        double re, im;
        if (!(is >> re >> im))
          throw std::runtime_error("pool import: truncated data");
        out.complex_data(c, r) = cxd(re, im);
      }
  }
  return out;
}

}  // namespace msra
