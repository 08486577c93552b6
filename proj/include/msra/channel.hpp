#pragma once
// Per-user Rayleigh channels: time-domain taps with a flat power profile,
// frequency-domain subcarrier gains via zero-padded DFT, per-group slices,
// and complex white Gaussian noise.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "msra/config.hpp"
#include "msra/linalg.hpp"
#include "msra/rng.hpp"

namespace msra {

struct ChannelRealization {
  Vec taps;  // tau complex gains (time domain)
  Vec freq;  // N_sc_d complex gains (frequency domain)
};

// Frequency gains of symbol group i: subcarrier block [i*M, i*M + M) when it
// fits inside the data plane; otherwise groups reuse the first block (the
// group-to-grid mapping is bookkeeping with no effect on the math).
inline Vec group_slice(const Vec& freq, int i, int M) {
  const int N = static_cast<int>(freq.size());
  const int a = i * M;
  if (a + M <= N) return freq.segment(a, M);
  return freq.segment(0, M);
}

// One i.i.d. CN(0, 1/tau) tap draw (flat power profile, E||taps||^2 = 1) with
// its frequency lift.
inline ChannelRealization draw_channel(int tau, int N_sc_d, Rng& rng) {
  ChannelRealization ch;
  ch.taps = Vec(tau);
  for (int t = 0; t < tau; ++t) ch.taps(t) = rng.cnormal(1.0 / tau);
  ch.freq = dft_pad(ch.taps, N_sc_d);
  return ch;
}

inline std::vector<ChannelRealization> gen_channel(const SystemConfig& cfg,
                                                   int user_count,
                                                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ChannelRealization> out;
  out.reserve(static_cast<std::size_t>(user_count));
  for (int u = 0; u < user_count; ++u)
    out.push_back(draw_channel(cfg.tau, cfg.N_sc_d, rng));
  return out;
}

// Scales taps to exactly unit receive energy (perfect power control) and
// refreshes the frequency lift.
inline void apply_power_control(ChannelRealization& ch, int N_sc_d) {
  const double n = ch.taps.norm();
  if (n > 0) {
    ch.taps /= n;
    ch.freq = dft_pad(ch.taps, N_sc_d);
  }
}

// i.i.d. CN(0, sigma2) noise vector; sigma2 = 0 yields exact zeros.
inline Vec awgn(int len, double sigma2, Rng& rng) {
  Vec w = Vec::Zero(len);
  if (sigma2 > 0)
    for (int i = 0; i < len; ++i) w(i) = rng.cnormal(sigma2);
  return w;
}

// Applies the circulant time-domain channel matrix for `taps` to x; equals
// idft(diag(dft(taps)) * dft(x)) — the equivalence is a tested invariant.
inline Vec circulant_apply(const Vec& taps, const Vec& x) {
  return circular_convolve(x, taps);
}

}  // namespace msra
