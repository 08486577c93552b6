#pragma once
// Thin numerical helpers over Eigen: rank-revealing least squares with the
// documented 1e-10 relative cutoff, plain DFT utilities sized for this
// problem (tap counts and subcarrier counts are tiny), and modified
// Gram-Schmidt with re-orthogonalization for the greedy solver.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

namespace msra {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kRankCutoff = 1e-10;  // relative singular-value cutoff

// ---------------------------------------------------------------------------
// least squares / pseudo-inverse
// ---------------------------------------------------------------------------

struct LsSolution {
  Vec x;
  double cond = 0.0;       // ratio of extreme retained pivots (estimate)
  bool min_norm = false;   // underdetermined system (minimum-norm solution)
  bool ill_conditioned = false;  // condition number above 1e8
};

// Minimum-norm least-squares solve via a rank-revealing complete orthogonal
// decomposition with relative cutoff kRankCutoff (pivots below
// cutoff * |largest pivot| are treated as zero).
inline LsSolution pinv_solve(const Mat& A, const Vec& b) {
  LsSolution out;
  if (A.cols() == 0) {
    out.x = Vec::Zero(0);
    return out;
  }
  Eigen::CompleteOrthogonalDecomposition<Mat> cod;
  cod.setThreshold(kRankCutoff);
  cod.compute(A);
  out.x = cod.solve(b);
  const Eigen::Index r = cod.rank();
  const Mat& T = cod.matrixT();
  const double pmax = std::abs(T(0, 0));
  const double pmin = r > 0 ? std::abs(T(r - 1, r - 1)) : 0.0;
  out.cond = pmin > 0 ? pmax / pmin : 0.0;
  out.min_norm = A.rows() < A.cols();
  out.ill_conditioned = out.cond > 1e8;
  return out;
}

// As above, but reusing one decomposition for several right-hand sides.
inline Mat pinv_solve_multi(const Mat& A, const Mat& B) {
  if (A.cols() == 0) return Mat::Zero(0, B.cols());
  Eigen::CompleteOrthogonalDecomposition<Mat> cod;
  cod.setThreshold(kRankCutoff);
  cod.compute(A);
  return cod.solve(B);
}

// Minimum-norm solve specialized for wide (rows < cols) systems using the
// identity A^+ b = A^H (A A^H)^{-1} b, which replaces a decomposition of the
// wide matrix with a Cholesky factorization of the small Gram matrix. Falls
// back to the rank-revealing path when the Gram factor is not numerically
// positive definite or its condition estimate is too large for a reliable
// Cholesky solve.
inline LsSolution pinv_solve_wide(const Mat& A, const Vec& b) {
  if (A.rows() >= A.cols() || A.cols() == 0) return pinv_solve(A, b);
  Mat G(A.rows(), A.rows());
  G.noalias() = A * A.adjoint();
  Eigen::LLT<Mat> llt(G);
  if (llt.info() == Eigen::Success) {
    const double rc = llt.rcond();
    if (rc > 0.0 && 1.0 / rc < 1e10) {
      LsSolution out;
      out.x = A.adjoint() * llt.solve(b);
      out.cond = std::sqrt(1.0 / rc);  // cond(A) ~ sqrt(cond(A A^H))
      out.min_norm = true;
      out.ill_conditioned = out.cond > 1e8;
      return out;
    }
  }
  return pinv_solve(A, b);
}

// Pseudo-inverse of a Hermitian positive semidefinite matrix (used for the
// cached all-preambles Gram factor).
inline Mat pinv_hermitian(const Mat& G) {
  Eigen::SelfAdjointEigenSolver<Mat> es(G);
  const RVec& ev = es.eigenvalues();
  const double emax = ev.size() ? ev(ev.size() - 1) : 0.0;
  const double cut = kRankCutoff * std::abs(emax);
  Mat D = Mat::Zero(ev.size(), ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cut) D(i, i) = 1.0 / ev(i);
  return es.eigenvectors() * D * es.eigenvectors().adjoint();
}

// Eigenvalues of the Hermitian Gram matrix A^H A (ascending).
inline RVec gram_eigenvalues(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(A.adjoint() * A,
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// ---------------------------------------------------------------------------
// DFT utilities (direct evaluation; sizes here are tens to hundreds)
// ---------------------------------------------------------------------------

// DFT of the first `in.size()` entries zero-padded to length n:
// out[k] = sum_t in[t] * exp(-2*pi*i*k*t/n).
inline Vec dft_pad(const Vec& in, int n) {
  Vec out = Vec::Zero(n);
  const double w = -2.0 * M_PI / n;
  for (int k = 0; k < n; ++k) {
    cxd acc = 0.0;
    for (Eigen::Index t = 0; t < in.size(); ++t)
      acc += in(t) * std::polar(1.0, w * k * static_cast<double>(t));
    out(k) = acc;
  }
  return out;
}

inline Vec dft(const Vec& in) { return dft_pad(in, static_cast<int>(in.size())); }

inline Vec idft(const Vec& in) {
  const int n = static_cast<int>(in.size());
  Vec out = Vec::Zero(n);
  const double w = 2.0 * M_PI / n;
  for (int k = 0; k < n; ++k) {
    cxd acc = 0.0;
    for (int t = 0; t < n; ++t)
      acc += in(t) * std::polar(1.0, w * k * t);
    out(k) = acc / static_cast<double>(n);
  }
  return out;
}

// Circular shift: out[i] = in[(i - s) mod n] (positive s moves content down).
inline Vec circshift(const Vec& in, int s) {
  const int n = static_cast<int>(in.size());
  Vec out(n);
  const int sh = ((s % n) + n) % n;
  for (int i = 0; i < n; ++i) out((i + sh) % n) = in(i);
  return out;
}

// Circular convolution of x with a tap vector h (h shorter than or equal to x).
inline Vec circular_convolve(const Vec& x, const Vec& h) {
  const int n = static_cast<int>(x.size());
  Vec out = Vec::Zero(n);
  for (Eigen::Index t = 0; t < h.size(); ++t)
    out += h(t) * circshift(x, static_cast<int>(t));
  return out;
}

// ---------------------------------------------------------------------------
// modified Gram-Schmidt
// ---------------------------------------------------------------------------

// Appends v to the orthonormal basis Q (columns) using MGS with one full
// re-orthogonalization pass. Returns false (and leaves Q unchanged) when the
// residual of v is numerically inside span(Q).
inline bool mgs_append(Mat& Q, const Vec& v) {
  Vec u = v;
  for (int pass = 0; pass < 2; ++pass)
    for (Eigen::Index j = 0; j < Q.cols(); ++j)
      u -= Q.col(j) * (Q.col(j).dot(u));
  const double nu = u.norm();
  if (nu <= 1e-10 * std::max(1.0, v.norm())) return false;
  Q.conservativeResize(v.size(), Q.cols() + 1);
  Q.col(Q.cols() - 1) = u / nu;
  return true;
}

// Orthogonal projector complement Q = I - B B^H where B is an orthonormal
// basis of span(cols); cols need not be normalized or independent.
inline Mat complement_projector(const Mat& cols) {
  const Eigen::Index m = cols.rows();
  Mat B(m, 0);
  for (Eigen::Index j = 0; j < cols.cols(); ++j) mgs_append(B, cols.col(j));
  return Mat::Identity(m, m) - B * B.adjoint();
}

}  // namespace msra
