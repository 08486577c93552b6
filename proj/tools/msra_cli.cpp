// Command-line front end: configuration validation, coherence studies,
// Monte Carlo sweeps, theoretical bound evaluation, and figure recipes.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "msra/harness.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void cmd_validate(const std::string& config_path) {
  const msra::SystemConfig cfg = msra::SystemConfig::parse(read_file(config_path));
  const auto violations = cfg.validate();
  if (!violations.empty()) throw std::runtime_error(violations.front());
  std::cout << "ok: config valid, hash=" << cfg.hash() << "\n";
}

void cmd_coherence(const std::string& config_path, std::uint64_t seed_override,
                   bool seed_set, int trials) {
  msra::SystemConfig cfg = msra::SystemConfig::parse(read_file(config_path));
  if (seed_set) cfg.master_seed = seed_override;
  const auto violations = cfg.validate();
  if (!violations.empty()) throw std::runtime_error(violations.front());
  const msra::LinkContext ctx = msra::build_context(cfg);
  // signature-plane layer ensembles (no channel): layer l holds the l-th
  // sequence of every signature
  std::vector<msra::Mat> layers(static_cast<std::size_t>(cfg.upsilon),
                                msra::Mat(cfg.M, cfg.N_T));
  for (int l = 0; l < cfg.upsilon; ++l)
    for (int m = 0; m < cfg.N_T; ++m)
      layers[static_cast<std::size_t>(l)].col(m) =
          ctx.base.S.col(ctx.sig.assign(m, l));
  const msra::Mat atoms = msra::stacked_signature_atoms(ctx.base, ctx.sig);
  const int n_sup = std::max(1, cfg.fixed_user_count());
  std::vector<double> aggs;
  for (int t = 0; t < (trials > 0 ? trials : 1); ++t) {
    msra::Rng rng(msra::derive_seed(cfg.master_seed,
                                    msra::hash_tag("coherence-support"),
                                    static_cast<std::uint64_t>(t)));
    const std::vector<int> sup = rng.choice_without_replacement(cfg.N_T, n_sup);
    const msra::CoherenceReport rep = msra::recovery_margin(layers, sup, 0.0);
    const double agg = msra::babel_coherence_2(atoms, sup);
    aggs.push_back(agg);
    if (t == 0) {
      std::cout << "support_size: " << sup.size() << "\n";
      for (std::size_t l = 0; l < rep.mu2.size(); ++l)
        std::cout << "layer " << l << ": mu2=" << rep.mu2[l]
                  << " delta=" << rep.delta[l] << "\n";
      std::cout << "rank_deficient: " << (rep.rank_deficient ? 1 : 0) << "\n";
      std::cout << "margin: " << rep.margin << "\n";
    }
    std::cout << "draw " << t << ": mu2_aggregate=" << agg << "\n";
  }
  const msra::Estimate e = msra::mean_ci(aggs);
  std::cout << "mu2_aggregate_mean: " << e.value << " ci_low=" << e.ci_low
            << " ci_high=" << e.ci_high << " n=" << e.n << "\n";
}

void cmd_bound(const std::string& config_path, std::uint64_t seed_override,
               bool seed_set, int trials) {
  msra::SystemConfig cfg = msra::SystemConfig::parse(read_file(config_path));
  if (seed_set) cfg.master_seed = seed_override;
  const auto violations = cfg.validate();
  if (!violations.empty()) throw std::runtime_error(violations.front());
  const msra::LinkContext ctx = msra::build_context(cfg);
  msra::TrialOptions opt;
  opt.collect_group_miss = true;
  int applicable = 0, below_one = 0, n = 0;
  for (int t = 0; t < (trials > 0 ? trials : 1); ++t) {
    const std::uint64_t seed =
        msra::derive_seed(cfg.master_seed, msra::hash_tag("bound"),
                          static_cast<std::uint64_t>(t));
    const msra::TrialResult r = msra::run_single_trial(ctx, seed, opt);
    if (!r.bound || !r.bound->defined) {
      std::cout << "instance " << t << ": undefined (degenerate ensemble)\n";
      continue;
    }
    const msra::BoundInputs& b = *r.bound;
    ++n;
    applicable += b.applicable;
    below_one += b.applicable && b.bound_raw < 1.0;
    const msra::FrameBound fb =
        msra::bound_frame(b.gamma, b.upsilon, cfg.N_T, b.lam_size, cfg.N_g);
    std::cout << "instance " << t << ": c=" << b.c << " d=" << b.d
              << " eta=" << b.eta << " wmax2=" << b.wmax2
              << " gamma=" << b.gamma << " applicable=" << b.applicable
              << " group_bound=" << b.bound_raw
              << " frame_tail=" << fb.tail_exact
              << " frame_chernoff=" << fb.chernoff
              << " frame_closed_form=" << fb.closed_form
              << " empirical_group_miss="
              << static_cast<double>(r.group_miss) / cfg.N_g << "\n";
  }
  std::cout << "summary: instances=" << n << " applicable=" << applicable
            << " bound_below_one=" << below_one << "\n";
}

void cmd_sweep(const std::string& config_path, std::uint64_t seed_override,
               bool seed_set, int trials_override, int workers,
               const std::string& out_dir, bool dry_run) {
  msra::SweepSpec spec = msra::parse_sweep_file(read_file(config_path));
  if (seed_set) spec.base.master_seed = seed_override;
  if (trials_override >= 0) spec.trials = trials_override;
  if (!out_dir.empty()) spec.outputs = out_dir;
  if (spec.values.empty())
    throw std::runtime_error("sweep file must set axis= and values=");
  const auto violations = spec.base.validate();
  if (!violations.empty()) throw std::runtime_error(violations.front());
  if (dry_run) {
    std::cout << "axis: " << msra::axis_name(spec.axis) << "\n";
    std::cout << "trials_per_point: " << spec.trials << "\n";
    for (std::size_t p = 0; p < spec.values.size(); ++p) {
      const msra::SystemConfig cfg =
          msra::apply_axis(spec.base, spec.axis, spec.values[p]);
      std::cout << "point " << p << ": " << msra::axis_name(spec.axis) << "="
                << spec.values[p] << " config_hash=" << cfg.hash()
                << " trial_seeds=";
      for (int t = 0; t < std::min(3, std::max(1, spec.trials)); ++t)
        std::cout << (t ? "," : "")
                  << msra::derive_seed(spec.base.master_seed,
                                       static_cast<std::uint64_t>(p),
                                       static_cast<std::uint64_t>(t));
      std::cout << (spec.trials > 3 ? ",..." : "") << "\n";
    }
    std::cout << "dry-run: no files written\n";
    return;
  }
  const msra::SweepResult res = msra::run_sweep(spec, workers);
  for (const msra::PointAggregate& pt : res.points) {
    std::cout << msra::axis_name(spec.axis) << "=" << pt.axis_value << ":";
    for (const auto& [name, e] : pt.metrics)
      std::cout << " " << name << "=" << e.value;
    std::cout << "\n";
  }
  if (!spec.outputs.empty())
    std::cout << "outputs written to " << spec.outputs << "\n";
}

void cmd_reproduce(const std::string& id, const std::string& scale,
                   const std::string& out_dir, std::uint64_t seed,
                   int trials_override, int workers) {
  const bool desk = scale != "full";
  const std::string dir = out_dir.empty() ? ("figures_" + id + "_" + scale) : out_dir;
  const std::vector<std::string> files =
      msra::reproduce_figure(id, desk, dir, seed, trials_override, workers);
  for (const std::string& f : files) std::cout << dir << "/" << f << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grant-free random access link simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, scale = "desk", recipe_id;
  std::uint64_t seed = 1;
  int trials = -1, workers = 1;
  bool dry_run = false;

  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* c = sub->add_option("--config", config_path, "configuration file");
    if (need_config) c->required();
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--trials", trials, "trial/draw count override");
    sub->add_option("--workers", workers, "worker thread count");
    sub->add_option("--out", out_dir, "output directory");
    return sub;
  };

  auto* validate = add_common(
      app.add_subcommand("validate-config", "check a configuration file"),
      true);
  auto* coherence = add_common(
      app.add_subcommand("coherence", "coherence metrics on random supports"),
      true);
  auto* bound = add_common(
      app.add_subcommand("bound", "theoretical misdetection bound inputs"),
      true);
  auto* sweep = add_common(
      app.add_subcommand("sweep", "Monte Carlo sweep from a sweep file"), true);
  sweep->add_flag("--dry-run", dry_run, "print points and seeds, write nothing");
  auto* repro = app.add_subcommand("reproduce-fig", "run a figure recipe");
  repro->add_option("id", recipe_id, "recipe id")->required();
  repro->add_option("--scale", scale, "desk or full")
      ->check(CLI::IsMember({"desk", "full"}));
  repro->add_option("--seed", seed, "master seed");
  repro->add_option("--trials", trials, "trials-per-point override");
  repro->add_option("--workers", workers, "worker thread count");
  repro->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
    const bool seed_set = app.count_all() && (coherence->count("--seed") ||
                                              bound->count("--seed") ||
                                              sweep->count("--seed"));
    if (validate->parsed()) cmd_validate(config_path);
    if (coherence->parsed())
      cmd_coherence(config_path, seed, seed_set, trials);
    if (bound->parsed()) cmd_bound(config_path, seed, seed_set, trials);
    if (sweep->parsed())
      cmd_sweep(config_path, seed, seed_set, trials, workers, out_dir, dry_run);
    if (repro->parsed())
      cmd_reproduce(recipe_id, scale, out_dir, seed, trials, workers);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::ostringstream os;
    os << e.what();
    std::string msg = os.str();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "error: " << msg << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "error: " << msg << "\n";
    return 1;
  }
  return 0;
}
