#pragma once
// Monte Carlo orchestration: axis sweeps over a base configuration with
// seeded, worker-count-independent parallel trials, CSV/manifest persistence,
// a minimal SVG line-plot renderer, and named figure-reproduction recipes.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "msra/config.hpp"
#include "msra/metrics.hpp"
#include "msra/receiver.hpp"
#include "msra/trial.hpp"

namespace msra {

inline constexpr const char* kCodeVersion = "1.0.0";

// ---------------------------------------------------------------------------
// sweep specification
// ---------------------------------------------------------------------------

enum class SweepAxis { NumActive, SnrDb, Upsilon, FrameSize };

inline std::string axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::NumActive: return "N_a";
    case SweepAxis::SnrDb: return "snr_db";
    case SweepAxis::Upsilon: return "upsilon";
    case SweepAxis::FrameSize: return "N_c";
  }
  return "?";
}

inline SweepAxis parse_axis(const std::string& s) {
  if (s == "N_a" || s == "L") return SweepAxis::NumActive;
  if (s == "snr_db") return SweepAxis::SnrDb;
  if (s == "upsilon") return SweepAxis::Upsilon;
  if (s == "N_c") return SweepAxis::FrameSize;
  throw std::runtime_error("unknown sweep axis '" + s +
                           "' (expected N_a, L, snr_db, upsilon, or N_c)");
}

struct SweepSpec {
  SystemConfig base;
  SweepAxis axis = SweepAxis::NumActive;
  std::vector<double> values;
  int trials = 0;
  std::string outputs;     // directory; empty = no files written
  std::string recipe_id;   // optional figure tag
  TrialOptions trial_options;
  int dump_trials = 0;     // per point, first k trials dumped as text
};

// The swept configuration for one axis value. The derived quantities follow
// the documented coupling: sweeping upsilon rebalances N_g = N_c / upsilon;
// sweeping N_c keeps N_g and rebalances upsilon = N_c / N_g. Every result
// must satisfy the full configuration validity contract.
inline SystemConfig apply_axis(const SystemConfig& base, SweepAxis axis,
                               double value) {
  SystemConfig cfg = base;
  switch (axis) {
    case SweepAxis::NumActive:
      cfg.N_a = value;
      break;
    case SweepAxis::SnrDb:
      cfg.snr_db = value;
      break;
    case SweepAxis::Upsilon:
      cfg.upsilon = static_cast<int>(value);
      cfg.N_g = cfg.upsilon > 0 ? cfg.N_c / cfg.upsilon : 0;
      break;
    case SweepAxis::FrameSize:
      cfg.N_c = static_cast<int>(value);
      cfg.upsilon = cfg.N_g > 0 ? cfg.N_c / cfg.N_g : 0;
      break;
  }
  const auto violations = cfg.validate();
  if (!violations.empty()) {
    std::ostringstream os;
    os << "swept config invalid at " << axis_name(axis) << "=" << value << ": "
       << violations.front();
    throw std::runtime_error(os.str());
  }
  return cfg;
}

// A sweep file is a configuration file carrying extra sweep keys alongside
// the SystemConfig keys: axis=<N_a|L|snr_db|upsilon|N_c>, values=<list>
// (space or comma separated), trials=<n>, dump_trials=<n>, want_ser=<0|1>,
// oracle_ser=<0|1>. Axis 'L' interprets values as loads and scales by M.
inline SweepSpec parse_sweep_file(const std::string& text) {
  SweepSpec spec;
  std::ostringstream cfg_text;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool axis_is_load = false;
  auto trim = [](std::string s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  };
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    const std::string kv =
        trim(hash_pos == std::string::npos ? line : line.substr(0, hash_pos));
    if (kv.empty()) continue;
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("sweep file parse error at line " +
                               std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(kv.substr(0, eq));
    const std::string val = trim(kv.substr(eq + 1));
    if (key == "axis") {
      spec.axis = parse_axis(val);
      axis_is_load = val == "L";
    } else if (key == "values") {
      std::string v = val;
      for (char& c : v)
        if (c == ',') c = ' ';
      std::istringstream vs(v);
      double x;
      while (vs >> x) spec.values.push_back(x);
      if (!vs.eof())
        throw std::runtime_error("sweep file parse error at line " +
                                 std::to_string(lineno) + ": bad values list");
    } else if (key == "trials") {
      spec.trials = std::stoi(val);
    } else if (key == "dump_trials") {
      spec.dump_trials = std::stoi(val);
    } else if (key == "want_ser") {
      spec.trial_options.want_ser = val == "1" || val == "true";
    } else if (key == "oracle_ser") {
      spec.trial_options.oracle_ser = val == "1" || val == "true";
    } else {
      cfg_text << kv << "\n";
    }
  }
  spec.base = SystemConfig::parse(cfg_text.str());
  if (axis_is_load)
    for (double& v : spec.values) v *= spec.base.M;
  if (spec.trial_options.oracle_ser) spec.trial_options.want_ser = true;
  return spec;
}

// ---------------------------------------------------------------------------
// aggregation
// ---------------------------------------------------------------------------

struct PointAggregate {
  double axis_value = 0.0;
  long trials = 0;
  // fixed emission order
  std::vector<std::pair<std::string, Estimate>> metrics;
  const Estimate* find(const std::string& name) const {
    for (const auto& [k, v] : metrics)
      if (k == name) return &v;
    return nullptr;
  }
};

inline PointAggregate aggregate_point(double axis_value,
                                      const std::vector<TrialResult>& results,
                                      const TrialOptions& opt) {
  PointAggregate pt;
  pt.axis_value = axis_value;
  pt.trials = static_cast<long>(results.size());
  long frame_miss = 0, nonconv = 0;
  long users = 0, mis_users = 0, coll_users = 0, failed_users = 0;
  long fa_sum = 0;
  std::vector<double> fa_vals;
  fa_vals.reserve(results.size());
  long sym_err = 0, sym_tot = 0, sym_err_o = 0, sym_tot_o = 0;
  for (const TrialResult& r : results) {
    frame_miss += r.frame_miss;
    nonconv += !r.converged;
    fa_sum += r.false_alarms;
    fa_vals.push_back(static_cast<double>(r.false_alarms));
    users += r.n_users;
    mis_users += r.mis_users;
    for (int u = 0; u < r.n_users; ++u) {
      const bool coll = r.user_collided[static_cast<std::size_t>(u)];
      const bool ok = !coll && r.user_in_final[static_cast<std::size_t>(u)] &&
                      r.user_in_u1[static_cast<std::size_t>(u)];
      coll_users += coll;
      failed_users += !ok;
    }
    if (opt.want_ser) {
      for (int e : r.user_errors) sym_err += e;
      sym_tot += static_cast<long>(r.user_errors.size()) * r.symbols_per_user;
      for (int e : r.user_errors_oracle) sym_err_o += e;
      sym_tot_o +=
          static_cast<long>(r.user_errors_oracle.size()) * r.symbols_per_user;
    }
  }
  const long n = pt.trials;
  pt.metrics.emplace_back("P_mis", binomial_ci(frame_miss, n));
  {
    Estimate e = binomial_ci(mis_users, users);
    pt.metrics.emplace_back("P_mis_user", e);
  }
  {
    Estimate e = mean_ci(fa_vals);
    e.n = n;
    pt.metrics.emplace_back("mean_false_alarms", e);
  }
  pt.metrics.emplace_back("failure_rate", binomial_ci(failed_users, users));
  pt.metrics.emplace_back("collision_rate", binomial_ci(coll_users, users));
  pt.metrics.emplace_back("nonconv_rate", binomial_ci(nonconv, n));
  if (opt.want_ser) {
    pt.metrics.emplace_back("ser", binomial_ci(sym_err, sym_tot));
    if (opt.oracle_ser)
      pt.metrics.emplace_back("ser_oracle", binomial_ci(sym_err_o, sym_tot_o));
  }
  return pt;
}

// ---------------------------------------------------------------------------
// parallel execution (deterministic ordered reduction)
// ---------------------------------------------------------------------------

// Runs `trials` trials of one swept point into a preallocated result array.
// Workers claim trial indices from a shared counter; every trial's stream is
// derived only from (master seed, point index, trial index), so the stored
// array — and everything aggregated from it in index order — is identical
// for any worker count or scheduling.
inline std::vector<TrialResult> run_point(const LinkContext& ctx,
                                          std::uint64_t master_seed,
                                          int point_index, int trials,
                                          const TrialOptions& opt,
                                          int workers) {
  std::vector<TrialResult> results(static_cast<std::size_t>(trials));
  if (trials == 0) return results;
  workers = std::max(1, std::min(workers, trials));
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= trials) return;
      const std::uint64_t seed =
          derive_seed(master_seed, static_cast<std::uint64_t>(point_index),
                      static_cast<std::uint64_t>(t));
      results[static_cast<std::size_t>(t)] = run_single_trial(ctx, seed, opt);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return results;
}

// ---------------------------------------------------------------------------
// persistence
// ---------------------------------------------------------------------------

namespace detail {
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
inline std::string utc_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}
}  // namespace detail

inline void write_summary_csv(std::ostream& os,
                              const std::vector<PointAggregate>& points) {
  os << "# summary.csv schema v1\n";
  os << "axis_value,metric,value,ci_low,ci_high,trials\n";
  for (const PointAggregate& pt : points)
    for (const auto& [name, e] : pt.metrics)
      os << detail::fmt17(pt.axis_value) << "," << name << ","
         << detail::fmt17(e.value) << "," << detail::fmt17(e.ci_low) << ","
         << detail::fmt17(e.ci_high) << "," << e.n << "\n";
}

struct RunManifest {
  bool valid = true;
  std::string config_hash;
  std::string code_version = kCodeVersion;
  std::uint64_t master_seed = 0;
  std::string axis;
  std::vector<double> values;
  int trials = 0;
  std::vector<std::uint64_t> point_seeds;  // seed of trial 0 per point
  std::string started_utc, finished_utc;
  std::vector<std::string> output_files;
  std::string config_text;  // full serialized base configuration
};

inline void write_manifest(std::ostream& os, const RunManifest& m) {
  os << "# run-manifest v1\n";
  os << "status: " << (m.valid ? "valid" : "invalid") << "\n";
  os << "code_version: " << m.code_version << "\n";
  os << "config_hash: " << m.config_hash << "\n";
  os << "master_seed: " << m.master_seed << "\n";
  os << "axis: " << m.axis << "\n";
  os << "values:";
  for (double v : m.values) os << " " << detail::fmt17(v);
  os << "\ntrials: " << m.trials << "\n";
  os << "seed_rule: trial_seed = derive_seed(master_seed, point_index, "
        "trial_index)\n";
  for (std::size_t p = 0; p < m.point_seeds.size(); ++p)
    os << "point " << p << ": first_trial_seed=" << m.point_seeds[p] << "\n";
  os << "started: " << m.started_utc << "\n";
  os << "finished: " << m.finished_utc << "\n";
  os << "outputs:";
  for (const std::string& f : m.output_files) os << " " << f;
  os << "\nconfig:\n";
  std::istringstream cs(m.config_text);
  std::string line;
  while (std::getline(cs, line)) os << "  " << line << "\n";
}

// ---------------------------------------------------------------------------
// SVG line plots
// ---------------------------------------------------------------------------

struct PlotCurve {
  std::string label;
  std::vector<double> x, y;
};

// Minimal self-contained SVG polyline chart. In log-y mode nonpositive
// points are skipped (the polyline breaks around them).
inline void write_svg_plot(std::ostream& os, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::vector<PlotCurve>& curves, bool log_y) {
  const double W = 640, H = 440, L = 70, R = 20, T = 40, B = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const PlotCurve& c : curves)
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      const double yv = c.y[i];
      if (log_y && yv <= 0) continue;
      xmin = std::min(xmin, c.x[i]);
      xmax = std::max(xmax, c.x[i]);
      const double ly = log_y ? std::log10(yv) : yv;
      ymin = std::min(ymin, ly);
      ymax = std::max(ymax, ly);
    }
  if (xmin > xmax) { xmin = 0; xmax = 1; }
  if (ymin > ymax) { ymin = 0; ymax = 1; }
  if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
  if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }
  auto px = [&](double x) {
    return L + (x - xmin) / (xmax - xmin) * (W - L - R);
  };
  auto py = [&](double y) {
    const double ly = log_y ? std::log10(y) : y;
    return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  // axes
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\""
     << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R
     << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  // ticks (5 per axis)
  for (int k = 0; k <= 4; ++k) {
    const double fx = xmin + (xmax - xmin) * k / 4.0;
    const double gx = px(fx);
    os << "<line x1=\"" << gx << "\" y1=\"" << H - B << "\" x2=\"" << gx
       << "\" y2=\"" << H - B + 5 << "\" stroke=\"black\"/>\n";
    char lab[40];
    std::snprintf(lab, sizeof lab, "%g", fx);
    os << "<text x=\"" << gx << "\" y=\"" << H - B + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">" << lab << "</text>\n";
    const double fy = ymin + (ymax - ymin) * k / 4.0;
    const double gy = H - B - (fy - ymin) / (ymax - ymin) * (H - T - B);
    os << "<line x1=\"" << L - 5 << "\" y1=\"" << gy << "\" x2=\"" << L
       << "\" y2=\"" << gy << "\" stroke=\"black\"/>\n";
    if (log_y)
      std::snprintf(lab, sizeof lab, "1e%g", fy);
    else
      std::snprintf(lab, sizeof lab, "%g", fy);
    os << "<text x=\"" << L - 8 << "\" y=\"" << gy + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">" << lab << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\">" << xlabel << "</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\""
        " transform=\"rotate(-90 16 " << (T + H - B) / 2 << ")\">" << ylabel
     << "</text>\n";
  // curves + legend
  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    const PlotCurve& c = curves[ci];
    const char* col = colors[ci % 8];
    std::ostringstream pts;
    bool open = false;
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      if (log_y && c.y[i] <= 0) {
        if (open) {
          os << "<polyline fill=\"none\" stroke=\"" << col
             << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
          pts.str("");
          open = false;
        }
        continue;
      }
      pts << px(c.x[i]) << "," << py(c.y[i]) << " ";
      open = true;
      os << "<circle cx=\"" << px(c.x[i]) << "\" cy=\"" << py(c.y[i])
         << "\" r=\"2.5\" fill=\"" << col << "\"/>\n";
    }
    if (open)
      os << "<polyline fill=\"none\" stroke=\"" << col
         << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    const double ly = T + 16 * static_cast<double>(ci);
    os << "<line x1=\"" << W - R - 130 << "\" y1=\"" << ly << "\" x2=\""
       << W - R - 110 << "\" y2=\"" << ly << "\" stroke=\"" << col
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - R - 105 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << c.label
       << "</text>\n";
  }
  os << "</svg>\n";
}

// ---------------------------------------------------------------------------
// run_sweep
// ---------------------------------------------------------------------------

struct SweepResult {
  RunManifest manifest;
  std::vector<PointAggregate> points;
};

inline SweepResult run_sweep(const SweepSpec& spec, int workers = 1) {
  const auto base_violations = spec.base.validate();
  if (!base_violations.empty())
    throw std::runtime_error("base config invalid: " + base_violations.front());

  SweepResult out;
  RunManifest& man = out.manifest;
  man.config_hash = spec.base.hash();
  man.master_seed = spec.base.master_seed;
  man.axis = axis_name(spec.axis);
  man.values = spec.values;
  man.trials = spec.trials;
  man.config_text = spec.base.serialize();
  man.started_utc = detail::utc_now();

  // validate and build every swept point before running any trial
  std::vector<SystemConfig> configs;
  configs.reserve(spec.values.size());
  for (double v : spec.values) configs.push_back(apply_axis(spec.base, spec.axis, v));

  const bool writing = !spec.outputs.empty();
  namespace fs = std::filesystem;
  if (writing) fs::create_directories(spec.outputs);

  int dump_counter = 0;
  try {
    for (std::size_t p = 0; p < configs.size(); ++p) {
      const SystemConfig& cfg = configs[p];
      man.point_seeds.push_back(
          derive_seed(man.master_seed, static_cast<std::uint64_t>(p), 0));
      const LinkContext ctx = build_context(cfg);
      const std::vector<TrialResult> results =
          run_point(ctx, man.master_seed, static_cast<int>(p), spec.trials,
                    spec.trial_options, workers);
      out.points.push_back(
          aggregate_point(spec.values[p], results, spec.trial_options));
      if (writing && spec.dump_trials > 0) {
        const int k = std::min(spec.dump_trials, spec.trials);
        for (int t = 0; t < k; ++t) {
          const std::uint64_t seed =
              derive_seed(man.master_seed, static_cast<std::uint64_t>(p),
                          static_cast<std::uint64_t>(t));
          Rng rng(seed);
          const Trial tr = make_trial(cfg, ctx.base, ctx.sig, ctx.pool, rng,
                                      spec.trial_options.noiseless);
          char name[32];
          std::snprintf(name, sizeof name, "trial_%04d.txt", dump_counter++);
          std::ofstream df(fs::path(spec.outputs) / name);
          write_trial_dump(df, cfg, seed, tr);
          if (!df) throw std::runtime_error("failed to write trial dump");
          man.output_files.push_back(name);
        }
      }
    }
    if (writing) {
      std::ofstream cf(fs::path(spec.outputs) / "summary.csv");
      write_summary_csv(cf, out.points);
      if (!cf) throw std::runtime_error("failed to write summary.csv");
      man.output_files.insert(man.output_files.begin(), "summary.csv");
    }
  } catch (...) {
    man.valid = false;
    man.finished_utc = detail::utc_now();
    if (writing) {
      std::ofstream mf(fs::path(spec.outputs) / "manifest.txt");
      write_manifest(mf, man);
    }
    throw;
  }
  man.finished_utc = detail::utc_now();
  if (writing) {
    std::ofstream mf(fs::path(spec.outputs) / "manifest.txt");
    man.output_files.push_back("manifest.txt");
    write_manifest(mf, man);
    if (!mf) throw std::runtime_error("failed to write manifest.txt");
  }
  return out;
}

// ---------------------------------------------------------------------------
// figure recipes
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& known_recipes() {
  static const std::vector<std::string> ids = {
      "fig6", "fig7a", "fig7b", "fig8a", "fig8b", "fig9a", "fig9b", "fig10"};
  return ids;
}

namespace detail {

struct CurvePoints {
  std::string label;
  std::vector<double> x, y, lo, hi;
};

inline std::string sanitize_label(std::string s) {
  for (char& c : s)
    if (c == ' ' || c == '=' || c == ',') c = '_';
  return s;
}

inline std::vector<std::string> emit_figure(
    const std::string& id, const std::string& out_dir,
    const std::string& xlabel, const std::string& ylabel,
    const std::vector<CurvePoints>& curves, bool log_y) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> files;
  std::vector<PlotCurve> plot;
  for (const CurvePoints& c : curves) {
    const std::string name = id + "_" + sanitize_label(c.label) + ".csv";
    std::ofstream os(fs::path(out_dir) / name);
    os << "# figure-data schema v1 recipe=" << id << " curve=" << c.label
       << "\n";
    os << "x,y,ci_low,ci_high\n";
    for (std::size_t i = 0; i < c.x.size(); ++i)
      os << fmt17(c.x[i]) << "," << fmt17(c.y[i]) << "," << fmt17(c.lo[i])
         << "," << fmt17(c.hi[i]) << "\n";
    if (!os) throw std::runtime_error("failed to write " + name);
    files.push_back(name);
    plot.push_back(PlotCurve{c.label, c.x, c.y});
  }
  const std::string svg_name = id + ".svg";
  std::ofstream sv(fs::path(out_dir) / svg_name);
  write_svg_plot(sv, id, xlabel, ylabel, plot, log_y);
  if (!sv) throw std::runtime_error("failed to write " + svg_name);
  files.push_back(svg_name);
  return files;
}

inline CurvePoints curve_from_sweep(const std::string& label,
                                    const SweepResult& sr,
                                    const std::string& metric) {
  CurvePoints c;
  c.label = label;
  for (const PointAggregate& pt : sr.points) {
    const Estimate* e = pt.find(metric);
    if (!e) continue;
    c.x.push_back(pt.axis_value);
    c.y.push_back(e->value);
    c.lo.push_back(e->ci_low);
    c.hi.push_back(e->ci_high);
  }
  return c;
}

}  // namespace detail

// Reproduces one named figure's data files (x/y/CI columns per curve) plus an
// SVG rendering. Desk-scale variants shrink dimensions and trial counts so
// every recipe completes quickly; full-scale variants use the published
// dimensions and are correspondingly slow. `trials_override` (>0) replaces
// each recipe's default trials-per-point.
inline std::vector<std::string> reproduce_figure(const std::string& id,
                                                 bool desk,
                                                 const std::string& out_dir,
                                                 std::uint64_t seed,
                                                 int trials_override = -1,
                                                 int workers = 1) {
  using detail::CurvePoints;
  const auto& ids = known_recipes();
  if (std::find(ids.begin(), ids.end(), id) == ids.end())
    throw std::runtime_error("unknown recipe id '" + id + "'");

  auto trials_or = [&](int dflt) {
    return trials_override > 0 ? trials_override : dflt;
  };

  if (id == "fig6") {
    // layer-ensemble 2-Babel coherence vs number of active users
    const int M = desk ? 16 : 32;
    const int N_T = desk ? 128 : 256;
    const int ups = 8;
    const int draws = trials_or(desk ? 300 : 1000);
    const std::vector<int> nas = {8, 16, 24, 32};
    const BasePool base = gen_base_pool(M, N_T, derive_seed(seed, hash_tag("fig6-pool")));
    std::vector<CurvePoints> curves;
    for (const Spreading sp : {Spreading::MSRA, Spreading::SSRA}) {
      const SignaturePool sig = build_signature_pool(
          N_T, N_T, ups, sp, derive_seed(seed, hash_tag("fig6-sig")));
      const Mat atoms = stacked_signature_atoms(base, sig);
      CurvePoints c;
      c.label = sp == Spreading::MSRA ? "MSRA" : "SSRA";
      for (int na : nas) {
        std::vector<double> mus;
        for (int t = 0; t < draws; ++t) {
          Rng rng(derive_seed(seed, hash_tag("fig6-draw"),
                              static_cast<std::uint64_t>(na),
                              static_cast<std::uint64_t>(t)));
          const std::vector<int> sup =
              rng.choice_without_replacement(N_T, na);
          mus.push_back(babel_coherence_2(atoms, sup));
        }
        const Estimate e = mean_ci(mus);
        c.x.push_back(na);
        c.y.push_back(e.value);
        c.lo.push_back(e.ci_low);
        c.hi.push_back(e.ci_high);
      }
      curves.push_back(std::move(c));
    }
    return detail::emit_figure(id, out_dir, "N_a", "mu2", curves, false);
  }

  auto sweep_curve = [&](const SystemConfig& base_cfg, SweepAxis axis,
                         const std::vector<double>& values, int trials,
                         const TrialOptions& opt, const std::string& label,
                         const std::string& metric) {
    SweepSpec spec;
    spec.base = base_cfg;
    spec.axis = axis;
    spec.values = values;
    spec.trials = trials;
    spec.trial_options = opt;
    spec.recipe_id = id;
    const SweepResult sr = run_sweep(spec, workers);
    return detail::curve_from_sweep(label, sr, metric);
  };

  if (id == "fig7a" || id == "fig7b") {
    // NB misdetection (7a) / SER vs oracle (7b) as load grows
    SystemConfig cfg = desk ? presets::nb_desk() : presets::nb_full();
    cfg.master_seed = seed;
    const std::vector<double> nas =
        desk ? std::vector<double>{4, 8, 12, 16}
             : std::vector<double>{8, 16, 24, 32};
    const int trials = trials_or(desk ? 200 : 1000);
    std::vector<CurvePoints> curves;
    if (id == "fig7a") {
      for (int ups : {1, 4, 16, 32}) {
        if (cfg.N_c % ups != 0 || ups > cfg.N_s) continue;
        SystemConfig c2 = cfg;
        c2.upsilon = ups;
        c2.N_g = cfg.N_c / ups;
        c2.spreading = ups == 1 ? Spreading::SSRA : Spreading::MSRA;
        curves.push_back(sweep_curve(c2, SweepAxis::NumActive, nas, trials, {},
                                     (ups == 1 ? std::string("SSRA")
                                               : "MSRA v=" + std::to_string(ups)),
                                     "P_mis_user"));
      }
      return detail::emit_figure(id, out_dir, "N_a", "P_mis", curves, true);
    }
    SystemConfig c2 = cfg;
    c2.upsilon = std::min(16, cfg.N_c);
    c2.N_g = cfg.N_c / c2.upsilon;
    TrialOptions opt;
    opt.want_ser = true;
    opt.oracle_ser = true;
    curves.push_back(sweep_curve(c2, SweepAxis::NumActive, nas, trials, opt,
                                 "MSRA", "ser"));
    curves.push_back(sweep_curve(c2, SweepAxis::NumActive, nas, trials, opt,
                                 "oracle", "ser_oracle"));
    return detail::emit_figure(id, out_dir, "N_a", "SER", curves, true);
  }

  if (id == "fig8a" || id == "fig8b") {
    // NB misdetection vs frame size at fixed load; (b) at higher SNR
    SystemConfig cfg = desk ? presets::nb_desk() : presets::nb_full();
    cfg.master_seed = seed;
    cfg.snr_db = id == "fig8a" ? 10 : 16;
    const std::vector<double> ncs = {8, 16, 24, 32};
    const int trials = trials_or(desk ? 200 : 1000);
    std::vector<CurvePoints> curves;
    for (const Spreading sp : {Spreading::MSRA, Spreading::SSRA}) {
      SystemConfig c2 = cfg;
      c2.spreading = sp;
      c2.N_g = 1;  // upsilon tracks N_c on this axis
      c2.upsilon = c2.N_c;
      c2.N_a = sp == Spreading::MSRA ? cfg.M / 2 : static_cast<int>(0.9 * cfg.M);
      curves.push_back(sweep_curve(c2, SweepAxis::FrameSize, ncs, trials, {},
                                   sp == Spreading::MSRA ? "MSRA" : "SSRA",
                                   "P_mis_user"));
    }
    return detail::emit_figure(id, out_dir, "N_c", "P_mis", curves, true);
  }

  if (id == "fig9a" || id == "fig9b") {
    // WB misdetection (9a) / SER vs oracle (9b) as SNR grows
    SystemConfig cfg = desk ? presets::wb_desk_ser() : presets::wb_full();
    cfg.master_seed = seed;
    const std::vector<double> snrs = {0, 4, 8, 12, 16};
    const int trials = trials_or(desk ? 150 : 600);
    std::vector<CurvePoints> curves;
    if (id == "fig9a") {
      for (int ups : {1, 4, 16}) {
        if (cfg.N_c % ups != 0 || ups > cfg.N_s) continue;
        SystemConfig c2 = cfg;
        c2.upsilon = ups;
        c2.N_g = cfg.N_c / ups;
        c2.spreading = ups == 1 ? Spreading::SSRA : Spreading::MSRA;
        curves.push_back(sweep_curve(c2, SweepAxis::SnrDb, snrs, trials, {},
                                     (ups == 1 ? std::string("SSRA")
                                               : "MSRA v=" + std::to_string(ups)),
                                     "P_mis_user"));
      }
      return detail::emit_figure(id, out_dir, "SNR (dB)", "P_mis", curves, true);
    }
    TrialOptions opt;
    opt.want_ser = true;
    opt.oracle_ser = true;
    for (double na : {12.0, 14.0}) {
      SystemConfig c2 = cfg;
      c2.N_a = na;
      char lab[40];
      std::snprintf(lab, sizeof lab, "MSRA N_a=%g", na);
      curves.push_back(
          sweep_curve(c2, SweepAxis::SnrDb, snrs, trials, opt, lab, "ser"));
      std::snprintf(lab, sizeof lab, "oracle N_a=%g", na);
      curves.push_back(sweep_curve(c2, SweepAxis::SnrDb, snrs, trials, opt, lab,
                                   "ser_oracle"));
    }
    return detail::emit_figure(id, out_dir, "SNR (dB)", "SER", curves, true);
  }

  // fig10: failure rate vs load with the analytic collision lower bound
  SystemConfig cfg = desk ? presets::wb_desk_load() : presets::wb_full();
  cfg.master_seed = seed;
  const std::vector<double> nas = desk
      ? std::vector<double>{2, 4, 6, 8, 10, 12, 14, 16}
      : std::vector<double>{4, 8, 12, 16, 20, 24, 28, 31};
  const int trials = trials_or(desk ? 300 : 2000);
  std::vector<CurvePoints> curves;
  {
    SystemConfig c2 = cfg;
    c2.spreading = Spreading::SSRA;
    c2.upsilon = 1;
    c2.N_g = c2.N_c;
    curves.push_back(sweep_curve(c2, SweepAxis::NumActive, nas, trials, {},
                                 "SSRA", "failure_rate"));
  }
  for (int u : {4, 16, 32}) {  // 32 is v = N_c at desk scale
    if (cfg.N_c % u != 0 || u > cfg.N_s) continue;
    SystemConfig c2 = cfg;
    c2.spreading = Spreading::MSRA;
    c2.upsilon = u;
    c2.N_g = cfg.N_c / u;
    curves.push_back(sweep_curve(c2, SweepAxis::NumActive, nas, trials, {},
                                 "MSRA v=" + std::to_string(u),
                                 "failure_rate"));
  }
  {
    CurvePoints bound;
    bound.label = "collision bound";
    for (double na : nas) {
      bound.x.push_back(na);
      const double pc = analytic_collision_rate(na, cfg.N_T);
      bound.y.push_back(pc);
      bound.lo.push_back(pc);
      bound.hi.push_back(pc);
    }
    curves.push_back(std::move(bound));
  }
  return detail::emit_figure(id, out_dir, "N_a", "failure rate", curves, true);
}

}  // namespace msra
