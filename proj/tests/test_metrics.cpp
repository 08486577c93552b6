#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include <msra/metrics.hpp>
#include <msra/rng.hpp>
#include <msra/waveform.hpp>

using namespace msra;

TEST_CASE("analytic collision rate follows the Poisson-arrival model") {
  CHECK_THAT(analytic_collision_rate(17.0, 1024.0),
             Catch::Matchers::WithinRel(0.016464516004648044, 1e-12));
  CHECK(analytic_collision_rate(0.0, 1024.0) == 0.0);
  CHECK(analytic_collision_rate(1024.0, 1024.0) ==
        1.0 - std::exp(-1.0));
}

TEST_CASE("Wilson interval reproduces reference values and edge cases") {
  const Estimate mid = binomial_ci(5, 10);
  CHECK_THAT(mid.value, Catch::Matchers::WithinRel(0.5, 1e-15));
  CHECK_THAT(mid.ci_low, Catch::Matchers::WithinRel(0.236593090512564, 1e-12));
  CHECK_THAT(mid.ci_high,
             Catch::Matchers::WithinRel(0.76340690948743606, 1e-12));
  const Estimate low = binomial_ci(1, 10);
  CHECK_THAT(low.ci_low,
             Catch::Matchers::WithinRel(0.017876213095072896, 1e-12));
  CHECK_THAT(low.ci_high,
             Catch::Matchers::WithinRel(0.40415002679523848, 1e-12));
  const Estimate zero = binomial_ci(0, 50);
  CHECK(zero.value == 0.0);
  CHECK(zero.ci_low <= 1e-15);
  CHECK(zero.ci_high > 0.0);
  const Estimate none = binomial_ci(0, 0);
  CHECK(none.n == 0);
  CHECK(none.value == 0.0);
  const Estimate full = binomial_ci(20, 20);
  CHECK(full.ci_high == 1.0);
  CHECK(full.ci_low < 1.0);
}

TEST_CASE("mean interval is exact on constants and permutation-stable") {
  const Estimate c = mean_ci({0.7, 0.7, 0.7, 0.7});
  CHECK_THAT(c.value, Catch::Matchers::WithinRel(0.7, 1e-15));
  CHECK_THAT(c.ci_high - c.ci_low, Catch::Matchers::WithinAbs(0.0, 1e-15));
  const Estimate t = mean_ci({1.0, 2.0, 3.0});
  CHECK_THAT(t.value, Catch::Matchers::WithinRel(2.0, 1e-15));
  CHECK_THAT(t.ci_high - t.value,
             Catch::Matchers::WithinRel(1.959963984540054 / std::sqrt(3.0),
                                        1e-12));
  Rng rng(5);
  std::vector<double> xs(101);
  for (double& x : xs) x = rng.normal();
  std::vector<double> ys = xs;
  std::reverse(ys.begin(), ys.end());
  const Estimate a = mean_ci(xs), b = mean_ci(ys);
  CHECK_THAT(a.value, Catch::Matchers::WithinAbs(b.value, 1e-12));
  CHECK_THAT(a.ci_low, Catch::Matchers::WithinAbs(b.ci_low, 1e-12));
}

TEST_CASE("log-line fit recovers an exact exponential curve") {
  std::vector<double> xs = {1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(std::exp(1.3 - 0.75 * x));
  const LogFit f = fit_log_line(xs, ys);
  CHECK_THAT(f.slope, Catch::Matchers::WithinAbs(-0.75, 1e-12));
  CHECK_THAT(f.intercept, Catch::Matchers::WithinAbs(1.3, 1e-12));
  CHECK_THAT(f.r2, Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(f.points == 5);
}

TEST_CASE("binomial coefficient and exact majority tail") {
  CHECK(binomial_coefficient(6, 3) == 20.0);
  CHECK(binomial_coefficient(6, 0) == 1.0);
  CHECK(binomial_coefficient(6, 7) == 0.0);
  // strict majority of a fair coin over 4 groups: C(4,3)/16 + C(4,4)/16
  CHECK_THAT(binomial_majority_tail(0.5, 4),
             Catch::Matchers::WithinRel(5.0 / 16.0, 1e-12));
  CHECK(binomial_majority_tail(0.0, 8) == 0.0);
  CHECK_THAT(binomial_majority_tail(1.0, 8),
             Catch::Matchers::WithinRel(1.0, 1e-12));
}

TEST_CASE("frame bound chain orders the exact tail below the closed form") {
  Rng rng(51);
  for (int rep = 0; rep < 2000; ++rep) {
    const int v = static_cast<int>(rng.integers(1, 9));
    const int N_g = 2 * static_cast<int>(rng.integers(1, 5));
    const int nL = static_cast<int>(rng.integers(1, 9));
    const int nts[4] = {16, 64, 256, 1024};
    const int N_T = nts[rng.bounded(4)];
    const double gamma = 0.05 + 0.95 * rng.uniform();
    const FrameBound fb = bound_frame(gamma, v, N_T, nL, N_g);
    CHECK(fb.tail_exact <= fb.closed_form + 1e-12);
    if (fb.chernoff_valid) {
      CHECK(fb.tail_exact <= fb.chernoff + 1e-12);
      CHECK(fb.chernoff <= fb.closed_form * (1.0 + 1e-12));
    } else {
      CHECK(std::isnan(fb.chernoff));
    }
    CHECK(fb.K1 == static_cast<double>(N_T) * std::pow(2.0, nL));
  }
}

TEST_CASE("doubling the group count shifts the closed-form bound as derived") {
  const FrameBound a = bound_frame(0.5, 8, 1024, 4, 4);
  const FrameBound b = bound_frame(0.5, 8, 1024, 4, 8);
  const double dlog = std::log(b.closed_form) - std::log(a.closed_form);
  CHECK_THAT(dlog, Catch::Matchers::WithinAbs(4.806201996944672, 1e-9));
  // algebraic form of the same shift
  const double K2 = 0.25 / M_PI;
  const double expect =
      std::log(2.0) + 2.0 * (std::log(2.0 * M_E) + 1.0 - K2 * 8.0);
  CHECK_THAT(dlog, Catch::Matchers::WithinAbs(expect, 1e-12));
}

namespace {
std::vector<Mat> random_layers(Rng& rng, int M, int Ncol, int v,
                               bool modulate) {
  std::vector<Mat> layers;
  for (int l = 0; l < v; ++l) {
    Mat X(M, Ncol);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < Ncol; ++j) X(i, j) = rng.cnormal(1.0);
    for (int j = 0; j < Ncol; ++j) X.col(j) /= X.col(j).norm();
    if (modulate) {
      Vec g(M);
      for (int i = 0; i < M; ++i) g(i) = rng.cnormal(1.0);
      X = g.asDiagonal() * X;
    }
    layers.push_back(std::move(X));
  }
  return layers;
}
}  // namespace

TEST_CASE("constraint chain holds on random leave-out instances") {
  int evaluated = 0;
  for (int t = 0; t < 120; ++t) {
    Rng rng(derive_seed(41, static_cast<std::uint64_t>(t)));
    const int M = 16, Ncol = 32;
    const int v = static_cast<int>(rng.integers(1, 9));
    const int nL = static_cast<int>(rng.integers(2, 9));
    const std::vector<Mat> layers =
        random_layers(rng, M, Ncol, v, t % 2 == 1);
    std::vector<int> Lam = rng.choice_without_replacement(Ncol, nL);
    std::sort(Lam.begin(), Lam.end());
    for (int drop : {1, 2}) {
      if (nL - drop < 1) continue;
      std::vector<int> keep = rng.choice_without_replacement(nL, nL - drop);
      std::vector<int> J;
      for (int idx : keep) J.push_back(Lam[static_cast<std::size_t>(idx)]);
      std::sort(J.begin(), J.end());
      const auto chk = constraint_chain_check(layers, Lam, J);
      if (!chk) continue;
      ++evaluated;
      CAPTURE(t, drop, chk->lhs_cross, chk->rhs_cross, chk->lhs_self,
              chk->rhs_self);
      CHECK(chk->pass_cross());
      CHECK(chk->pass_self());
    }
  }
  // Large-|J| draws legitimately trip the delta >= 1 domain guard (the Gram
  // spectrum of ~7 random atoms in 16 rows regularly leaves [0,2)), so only a
  // wholesale rejection would be a bug. Deterministic seeds: evaluated == 127.
  CHECK(evaluated > 100);
}

TEST_CASE("chain check refuses out-of-domain subsets") {
  Rng rng(9);
  const std::vector<Mat> layers = random_layers(rng, 8, 12, 2, false);
  CHECK_FALSE(constraint_chain_check(layers, {1, 2, 3}, {}).has_value());
  CHECK_FALSE(constraint_chain_check(layers, {1, 2}, {1, 2}).has_value());
  // rank-deficient layer support: duplicate an atom inside J
  std::vector<Mat> bad = layers;
  bad[0].col(2) = bad[0].col(1);
  CHECK_FALSE(constraint_chain_check(bad, {1, 2, 5}, {1, 2}).has_value());
}

TEST_CASE("bound inputs on orthonormal layers have closed-form values") {
  const int M = 6, v = 3;
  std::vector<Mat> layers(static_cast<std::size_t>(v), Mat::Identity(M, M));
  const double sigma2 = 0.01;
  const BoundInputs bi =
      compute_bound_inputs(layers, {0, 2}, {}, /*U1_size=*/M, sigma2);
  REQUIRE(bi.defined);
  // every atom is its own projection: c = v, cross terms vanish
  CHECK_THAT(bi.c, Catch::Matchers::WithinRel(static_cast<double>(v), 1e-12));
  CHECK_THAT(bi.d, Catch::Matchers::WithinAbs(0.0, 1e-15));
  CHECK_THAT(bi.eta,
             Catch::Matchers::WithinRel(sigma2 * v * M, 1e-12));
  // wmax2 = v * sigma2 * H(|U1| - |Lam|)
  CHECK_THAT(bi.wmax2,
             Catch::Matchers::WithinRel(v * sigma2 * harmonic_number(M - 2),
                                        1e-12));
  const double q = std::sqrt(2.0 * v / M_PI);
  CHECK_THAT(bi.gamma,
             Catch::Matchers::WithinRel((bi.c - bi.d - bi.eta / q) /
                                            (bi.c + bi.d),
                                        1e-12));
  CHECK(bi.applicable ==
        (bi.eta < (bi.c - bi.d) * std::sqrt(2.0 / M_PI) * v));
  CHECK_THAT(bi.bound_raw,
             Catch::Matchers::WithinRel(
                 M * 4.0 * std::exp(-v * bi.gamma * bi.gamma / M_PI), 1e-12));
  CHECK(bi.upsilon == v);
  CHECK(bi.lam_size == 2);
  CHECK(bi.u1_size == M);
}

TEST_CASE("empirical noise resampling tracks the analytic noise term") {
  Rng rng(77);
  std::vector<Mat> layers = random_layers(rng, 8, 16, 4, false);
  const BoundInputs bi = compute_bound_inputs(layers, {1, 5, 9}, {1}, 16,
                                              0.02, /*empirical_draws=*/400,
                                              /*empirical_seed=*/11);
  REQUIRE(bi.defined);
  CHECK(bi.eta_p99 > 0.0);
  CHECK(bi.wmax2_emp > 0.0);
  // p99 of the sampled sum sits above its mean, same order of magnitude
  CHECK(bi.eta_p99 > bi.eta * 0.5);
  CHECK(bi.eta_p99 < bi.eta * 10.0);
}

TEST_CASE("harmonic numbers accumulate the truncated series") {
  CHECK(harmonic_number(0) == 0.0);
  CHECK_THAT(harmonic_number(1), Catch::Matchers::WithinRel(1.0, 1e-15));
  CHECK_THAT(harmonic_number(4),
             Catch::Matchers::WithinRel(1.0 + 0.5 + 1.0 / 3 + 0.25, 1e-15));
}

TEST_CASE("projector complement issues the identity for an empty subset") {
  Rng rng(13);
  Mat cols(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) cols(i, j) = rng.cnormal(1.0);
  const Mat I = projector_complement(cols, {});
  CHECK((I - Mat::Identity(5, 5)).norm() == 0.0);
  const Mat Q = projector_complement(cols, {0, 2});
  CHECK((Q * cols.col(0)).norm() <= 1e-12);
  CHECK((Q * cols.col(2)).norm() <= 1e-12);
  CHECK((Q * cols.col(1)).norm() > 0.1);
}
