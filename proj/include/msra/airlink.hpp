#pragma once
// Transmit-side modeling: user activity draws (with physical collisions),
// QPSK frame modulation, spreading per symbol group, and superposition of
// all active users' preamble and data transmissions into one observation.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "msra/channel.hpp"
#include "msra/config.hpp"
#include "msra/linalg.hpp"
#include "msra/rng.hpp"
#include "msra/waveform.hpp"

namespace msra {

// ---------------------------------------------------------------------------
// QPSK
// ---------------------------------------------------------------------------

inline const std::array<cxd, 4>& qpsk_alphabet() {
  static const std::array<cxd, 4> a = {
      cxd(1, 1) / std::sqrt(2.0), cxd(1, -1) / std::sqrt(2.0),
      cxd(-1, 1) / std::sqrt(2.0), cxd(-1, -1) / std::sqrt(2.0)};
  return a;
}

inline cxd qpsk_demap(cxd x) {
  double best = std::numeric_limits<double>::infinity();
  cxd out = qpsk_alphabet()[0];
  for (const cxd& s : qpsk_alphabet()) {
    const double d = std::norm(x - s);
    if (d < best) {  // ties: lowest alphabet index wins
      best = d;
      out = s;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// activity
// ---------------------------------------------------------------------------

struct ActivityDraw {
  std::vector<int> chosen;  // signature index per active user
  std::set<int> support;    // distinct chosen indices
  std::set<int> collided;   // indices chosen by >= 2 users
};

inline ActivityDraw finish_activity(std::vector<int> chosen) {
  ActivityDraw d;
  d.chosen = std::move(chosen);
  std::map<int, int> cnt;
  for (int m : d.chosen) ++cnt[m];
  for (const auto& [m, n] : cnt) {
    d.support.insert(m);
    if (n >= 2) d.collided.insert(m);
  }
  return d;
}

// Uniform i.i.d. signature choice per active user; user count is fixed(N_a)
// or Poisson(N_a) per the configured activity model.
inline ActivityDraw draw_activity(const SystemConfig& cfg, Rng& rng) {
  const long n = cfg.activity == ActivityModel::Fixed
                     ? static_cast<long>(cfg.N_a)
                     : rng.poisson(cfg.N_a);
  std::vector<int> chosen(static_cast<std::size_t>(n));
  for (auto& m : chosen) m = static_cast<int>(rng.integers(0, cfg.N_T));
  return finish_activity(std::move(chosen));
}

// ---------------------------------------------------------------------------
// frames
// ---------------------------------------------------------------------------

struct TxFrame {
  Mat symbols;  // N_g x upsilon QPSK symbols d_{i,l}
};

inline TxFrame modulate_frame(int N_g, int upsilon, Rng& rng) {
  TxFrame f;
  f.symbols = Mat(N_g, upsilon);
  for (int i = 0; i < N_g; ++i)
    for (int l = 0; l < upsilon; ++l)
      f.symbols(i, l) = qpsk_alphabet()[rng.integers(0, 4)];
  return f;
}

// ---------------------------------------------------------------------------
// superposition
// ---------------------------------------------------------------------------

// y_p = sum_k p^(k) (*) h^(k) + noise, via direct circular convolution.
inline Vec superpose_preambles(const ActivityDraw& draw,
                               const std::vector<ChannelRealization>& channels,
                               const PreamblePool& pool, double sigma2,
                               Rng& rng) {
  const int N_zc = static_cast<int>(pool.P.rows());
  Vec y = Vec::Zero(N_zc);
  for (std::size_t u = 0; u < draw.chosen.size(); ++u)
    y += circular_convolve(pool.P.col(draw.chosen[u]), channels[u].taps);
  y += awgn(N_zc, sigma2, rng);
  return y;
}

// y_{i,l} = sum_k diag(h_i^(k)) s_{k,l} d_{i,l}^(k) + noise.
// Output: one M x upsilon matrix per group (column l is y_{i,l}).
inline std::vector<Mat> superpose_data(
    const ActivityDraw& draw, const std::vector<ChannelRealization>& channels,
    const BasePool& base, const SignaturePool& sig,
    const std::vector<TxFrame>& frames, const SystemConfig& cfg, double sigma2,
    Rng& rng) {
  std::vector<Mat> Y(static_cast<std::size_t>(cfg.N_g),
                     Mat::Zero(cfg.M, cfg.upsilon));
  for (int i = 0; i < cfg.N_g; ++i) {
    for (int l = 0; l < cfg.upsilon; ++l) {
      Vec acc = Vec::Zero(cfg.M);
      for (std::size_t u = 0; u < draw.chosen.size(); ++u) {
        const Vec h = group_slice(channels[u].freq, i, cfg.M);
        const int m = draw.chosen[u];
        acc += h.cwiseProduct(base.S.col(sig.assign(m, l))) *
               frames[u].symbols(i, l);
      }
      acc += awgn(cfg.M, sigma2, rng);
      Y[static_cast<std::size_t>(i)].col(l) = acc;
    }
  }
  return Y;
}

// ---------------------------------------------------------------------------
// one full transmit realization
// ---------------------------------------------------------------------------

struct SlotObservation {
  Vec y_p;             // length N_zc
  std::vector<Mat> Y;  // N_g matrices, each M x upsilon
  double sigma2 = 0.0;
};

struct Trial {
  ActivityDraw draw;
  std::vector<ChannelRealization> channels;  // after power control
  std::vector<TxFrame> frames;
  SlotObservation obs;
};

// Draw order (fixed for determinism): activity, per-user taps, preamble
// noise, per-user frames, data noise per (group, symbol). Perfect power
// control scales each user's taps to exactly unit energy.
inline Trial make_trial(const SystemConfig& cfg, const BasePool& base,
                        const SignaturePool& sig, const PreamblePool& pool,
                        Rng& rng, bool noiseless = false) {
  Trial tr;
  tr.draw = draw_activity(cfg, rng);
  const int n_users = static_cast<int>(tr.draw.chosen.size());
  tr.channels.reserve(static_cast<std::size_t>(n_users));
  for (int u = 0; u < n_users; ++u) {
    ChannelRealization ch = draw_channel(cfg.tau, cfg.N_sc_d, rng);
    apply_power_control(ch, cfg.N_sc_d);
    tr.channels.push_back(std::move(ch));
  }
  const double s2 = noiseless ? 0.0 : cfg.sigma2();
  tr.obs.sigma2 = s2;
  tr.obs.y_p = superpose_preambles(tr.draw, tr.channels, pool, s2, rng);
  tr.frames.reserve(static_cast<std::size_t>(n_users));
  for (int u = 0; u < n_users; ++u)
    tr.frames.push_back(modulate_frame(cfg.N_g, cfg.upsilon, rng));
  tr.obs.Y = superpose_data(tr.draw, tr.channels, base, sig, tr.frames, cfg,
                            s2, rng);
  return tr;
}

// ---------------------------------------------------------------------------
// trial dump (fixed-precision text; the receiver accepts this format)
// ---------------------------------------------------------------------------

inline void write_trial_dump(std::ostream& os, const SystemConfig& cfg,
                             std::uint64_t seed, const Trial& tr) {
  char buf[80];
  os << "# trial-dump v1 config=" << cfg.hash() << " seed=" << seed << "\n";
  os << "chosen=";
  for (int m : tr.draw.chosen) os << " " << m;
  os << "\ncollided=";
  for (int m : tr.draw.collided) os << " " << m;
  os << "\n";
  for (std::size_t u = 0; u < tr.channels.size(); ++u) {
    os << "taps " << u << " =";
    for (Eigen::Index t = 0; t < tr.channels[u].taps.size(); ++t) {
      std::snprintf(buf, sizeof buf, " %.17g %.17g",
                    tr.channels[u].taps(t).real(), tr.channels[u].taps(t).imag());
      os << buf;
    }
    os << "\n";
  }
  os << "y_p =";
  for (Eigen::Index n = 0; n < tr.obs.y_p.size(); ++n) {
    std::snprintf(buf, sizeof buf, " %.17g %.17g", tr.obs.y_p(n).real(),
                  tr.obs.y_p(n).imag());
    os << buf;
  }
  os << "\n";
  for (std::size_t i = 0; i < tr.obs.Y.size(); ++i)
    for (Eigen::Index l = 0; l < tr.obs.Y[i].cols(); ++l) {
      os << "y " << i << " " << l << " =";
      for (Eigen::Index m = 0; m < tr.obs.Y[i].rows(); ++m) {
        std::snprintf(buf, sizeof buf, " %.17g %.17g",
                      tr.obs.Y[i](m, l).real(), tr.obs.Y[i](m, l).imag());
        os << buf;
      }
      os << "\n";
    }
}

struct TrialDump {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<int> chosen;
  std::vector<int> collided;
  std::vector<Vec> taps;
  SlotObservation obs;
};

inline TrialDump read_trial_dump(std::istream& is, const SystemConfig& cfg) {
  TrialDump d;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# trial-dump v1", 0) != 0)
    throw std::runtime_error("trial dump: bad header");
  {
    std::istringstream hs(line);
    std::string tok;
    while (hs >> tok) {
      if (tok.rfind("config=", 0) == 0) d.config_hash = tok.substr(7);
      if (tok.rfind("seed=", 0) == 0) d.seed = std::stoull(tok.substr(5));
    }
  }
  d.obs.Y.assign(static_cast<std::size_t>(cfg.N_g),
                 Mat::Zero(cfg.M, cfg.upsilon));
  d.obs.sigma2 = cfg.sigma2();
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "chosen=") {
      int m;
      while (ls >> m) d.chosen.push_back(m);
    } else if (key == "collided=") {
      int m;
      while (ls >> m) d.collided.push_back(m);
    } else if (key == "taps") {
      std::size_t u;
      std::string eq;
      ls >> u >> eq;
      std::vector<cxd> vals;
      double re, im;
      while (ls >> re >> im) vals.emplace_back(re, im);
      if (d.taps.size() <= u) d.taps.resize(u + 1);
      d.taps[u] = Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    } else if (key == "y_p") {
      std::string eq;
      ls >> eq;
      std::vector<cxd> vals;
      double re, im;
      while (ls >> re >> im) vals.emplace_back(re, im);
      d.obs.y_p = Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    } else if (key == "y") {
      int i, l;
      std::string eq;
      ls >> i >> l >> eq;
      double re, im;
      Eigen::Index m = 0;
      while (ls >> re >> im && m < cfg.M)
        d.obs.Y[static_cast<std::size_t>(i)](m++, l) = cxd(re, im);
    }
  }
  return d;
}

}  // namespace msra
