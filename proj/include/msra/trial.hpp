#pragma once
// One full simulated slot: draw a transmit realization, run the receiver
// end to end, and score the outcome against the ground truth. This is the
// unit of work the Monte Carlo harness parallelizes.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "msra/airlink.hpp"
#include "msra/config.hpp"
#include "msra/metrics.hpp"
#include "msra/receiver.hpp"
#include "msra/rng.hpp"

namespace msra {

struct TrialOptions {
  bool want_ser = false;          // run finalization and score symbol errors
  bool oracle_ser = false;        // additionally score with the true support
  bool collect_group_miss = false;  // single-round per-group miss + bound inputs
  bool noiseless = false;           // zero both slots' noise (receiver unchanged)
};

struct TrialResult {
  // ground truth
  std::vector<int> chosen;  // per arrival
  std::set<int> support;
  std::set<int> collided;
  // receiver outcome
  std::set<int> u1;
  std::set<int> final_support;
  bool frame_miss = false;  // some active signature absent from the final set
  int false_alarms = 0;
  int outer_iterations = 0;
  bool converged = true;
  bool ce_min_norm = false;
  bool ce_ill_conditioned = false;
  // per-arrival accounting
  int n_users = 0;
  int mis_users = 0;  // arrivals whose signature is absent from the final set
  std::vector<char> user_collided;
  std::vector<char> user_in_u1;
  std::vector<char> user_in_final;
  // optional extras
  int group_miss = 0;  // groups whose single-round support misses an active index
  std::optional<BoundInputs> bound;
  std::vector<int> user_errors;         // symbol errors per arrival (want_ser)
  std::vector<int> user_errors_oracle;  // same under true-support decoding
  int symbols_per_user = 0;
};

inline TrialResult run_single_trial(const LinkContext& ctx, std::uint64_t seed,
                                    const TrialOptions& opt = {}) {
  const SystemConfig& cfg = ctx.cfg;
  Rng rng(seed);
  const Trial tr =
      make_trial(cfg, ctx.base, ctx.sig, ctx.pool, rng, opt.noiseless);

  TrialResult res;
  res.chosen = tr.draw.chosen;
  res.support = tr.draw.support;
  res.collided = tr.draw.collided;
  res.n_users = static_cast<int>(tr.draw.chosen.size());
  res.symbols_per_user = cfg.N_g * cfg.upsilon;

  // stage 1 (or the single-stage variant hypothesizing every preamble)
  std::vector<int> U1;
  if (cfg.nb_single_stage) {
    U1.resize(static_cast<std::size_t>(cfg.N_p));
    for (int m = 0; m < cfg.N_p; ++m) U1[static_cast<std::size_t>(m)] = m;
  } else {
    U1 = initial_aud(tr.obs.y_p, ctx.PM, cfg.tau, stage1_threshold(cfg)).U1;
  }
  res.u1 = std::set<int>(U1.begin(), U1.end());

  auto fill_user_flags = [&]() {
    res.user_collided.resize(static_cast<std::size_t>(res.n_users));
    res.user_in_u1.resize(static_cast<std::size_t>(res.n_users));
    res.user_in_final.resize(static_cast<std::size_t>(res.n_users));
    res.mis_users = 0;
    for (int u = 0; u < res.n_users; ++u) {
      const int m = res.chosen[static_cast<std::size_t>(u)];
      res.user_collided[static_cast<std::size_t>(u)] =
          res.collided.count(m) > 0;
      res.user_in_u1[static_cast<std::size_t>(u)] = res.u1.count(m) > 0;
      res.user_in_final[static_cast<std::size_t>(u)] =
          res.final_support.count(m) > 0;
      if (!res.final_support.count(m)) ++res.mis_users;
    }
  };

  if (U1.empty()) {
    res.frame_miss = !res.support.empty();
    res.converged = true;
    fill_user_flags();
    if (opt.want_ser) {
      const DetectionReport rep = finalize(ctx, tr.obs, {}, &tr);
      res.user_errors.resize(static_cast<std::size_t>(res.n_users));
      for (int u = 0; u < res.n_users; ++u)
        res.user_errors[static_cast<std::size_t>(u)] =
            rep.per_user[static_cast<std::size_t>(u)].symbol_errors;
      if (opt.oracle_ser) {
        std::vector<int> sup(res.support.begin(), res.support.end());
        const DetectionReport rep_o = finalize(ctx, tr.obs, sup, &tr);
        res.user_errors_oracle.resize(static_cast<std::size_t>(res.n_users));
        for (int u = 0; u < res.n_users; ++u)
          res.user_errors_oracle[static_cast<std::size_t>(u)] =
              rep_o.per_user[static_cast<std::size_t>(u)].symbol_errors;
      }
    }
    return res;
  }

  // channel estimation + measurement assembly + outer detection loop
  const ChannelEstimate est =
      static_cast<int>(U1.size()) == cfg.N_p
          ? ls_channel_estimate_full(ctx, tr.obs.y_p)
          : ls_channel_estimate(tr.obs.y_p, ctx.PM, cfg.tau, U1);
  res.ce_min_norm = est.min_norm;
  res.ce_ill_conditioned = est.ill_conditioned;
  const LayerEnsembles Phi = assemble_measurement(ctx, U1, est.h);
  const DetectionState st = iorls(Phi, tr.obs.Y, cfg, U1);
  res.outer_iterations = st.outer_iter;
  res.converged = st.converged;
  for (int j : st.final_local)
    res.final_support.insert(U1[static_cast<std::size_t>(j)]);

  res.frame_miss = !std::includes(res.final_support.begin(),
                                  res.final_support.end(),
                                  res.support.begin(), res.support.end());
  for (int m : res.final_support)
    if (!res.support.count(m)) ++res.false_alarms;
  fill_user_flags();

  if (opt.collect_group_miss) {
    const int nU = static_cast<int>(U1.size());
    const RVec w1 = RVec::Ones(nU);
    const double xi2 = wsomp_stop_threshold(cfg);
    const int max_atoms = std::min(nU, cfg.M);
    std::map<int, int> u1map;
    for (int j = 0; j < nU; ++j) u1map[U1[static_cast<std::size_t>(j)]] = j;
    for (int i = 0; i < cfg.N_g; ++i) {
      const WsompResult ws = wsomp(Phi[static_cast<std::size_t>(i)],
                                   tr.obs.Y[static_cast<std::size_t>(i)], w1,
                                   xi2, max_atoms);
      std::set<int> got;
      for (int j : ws.selected) got.insert(U1[static_cast<std::size_t>(j)]);
      if (!std::includes(got.begin(), got.end(), res.support.begin(),
                         res.support.end()))
        ++res.group_miss;
    }
    // bound inputs on the first group's ensembles with the true channels
    // substituted for detected active arrivals (later arrivals overwrite on a
    // collision), nothing yet recovered
    std::vector<Mat> layers;
    layers.reserve(static_cast<std::size_t>(cfg.upsilon));
    for (int l = 0; l < cfg.upsilon; ++l) {
      Mat Pl = Phi[0][static_cast<std::size_t>(l)];
      for (int u = 0; u < res.n_users; ++u) {
        const int m = res.chosen[static_cast<std::size_t>(u)];
        const auto it = u1map.find(m);
        if (it == u1map.end()) continue;
        Pl.col(it->second) =
            group_slice(tr.channels[static_cast<std::size_t>(u)].freq, 0, cfg.M)
                .cwiseProduct(ctx.base.S.col(ctx.sig.assign(m, l)));
      }
      layers.push_back(std::move(Pl));
    }
    std::vector<int> Lam;
    for (int m : res.support) {
      const auto it = u1map.find(m);
      if (it != u1map.end()) Lam.push_back(it->second);
    }
    res.bound = compute_bound_inputs(layers, Lam, {}, nU, cfg.sigma2());
  }

  if (opt.want_ser) {
    std::vector<int> fin(res.final_support.begin(), res.final_support.end());
    const DetectionReport rep = finalize(ctx, tr.obs, fin, &tr);
    res.user_errors.resize(static_cast<std::size_t>(res.n_users));
    for (int u = 0; u < res.n_users; ++u)
      res.user_errors[static_cast<std::size_t>(u)] =
          rep.per_user[static_cast<std::size_t>(u)].symbol_errors;
    if (opt.oracle_ser) {
      std::vector<int> sup(res.support.begin(), res.support.end());
      const DetectionReport rep_o = finalize(ctx, tr.obs, sup, &tr);
      res.user_errors_oracle.resize(static_cast<std::size_t>(res.n_users));
      for (int u = 0; u < res.n_users; ++u)
        res.user_errors_oracle[static_cast<std::size_t>(u)] =
            rep_o.per_user[static_cast<std::size_t>(u)].symbol_errors;
    }
  }
  return res;
}

}  // namespace msra
