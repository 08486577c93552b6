// Sweep harness: axis handling, sweep-file parsing, aggregation semantics,
// deterministic parallel execution, and run artifacts (CSV, manifest, dumps,
// figure data, SVG).
#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "msra/harness.hpp"

using namespace msra;
namespace fs = std::filesystem;

namespace {

// Smallest valid NB system that still exercises both groups and both layers.
SystemConfig tiny() {
  SystemConfig cfg = presets::nb_desk();
  cfg.M = 8;
  cfg.N_s = 16;
  cfg.N_T = 16;
  cfg.N_p = 16;
  cfg.N_zc = 17;
  cfg.tau = 1;
  cfg.upsilon = 2;
  cfg.N_g = 2;
  cfg.N_c = 4;
  cfg.N_sc_d = 16;
  cfg.N_sc_p = 17;
  cfg.snr_db = 10.0;
  cfg.N_a = 3;
  cfg.master_seed = 99;
  cfg.spreading = Spreading::MSRA;
  cfg.activity = ActivityModel::Fixed;
  cfg.nb_single_stage = true;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

long count_lines(const std::string& s) {
  long n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

long count_occurrences(const std::string& hay, const std::string& needle) {
  long n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

fs::path fresh_dir(const std::string& leaf) {
  const fs::path d = fs::temp_directory_path() / ("msra_harness_" + leaf);
  fs::remove_all(d);
  return d;
}

bool same_result(const TrialResult& a, const TrialResult& b) {
  return a.chosen == b.chosen && a.support == b.support &&
         a.collided == b.collided && a.u1 == b.u1 &&
         a.final_support == b.final_support && a.frame_miss == b.frame_miss &&
         a.false_alarms == b.false_alarms &&
         a.outer_iterations == b.outer_iterations &&
         a.converged == b.converged && a.n_users == b.n_users &&
         a.mis_users == b.mis_users && a.user_collided == b.user_collided &&
         a.user_in_u1 == b.user_in_u1 && a.user_in_final == b.user_in_final;
}

}  // namespace

TEST_CASE("axis names parse and print consistently", "[harness]") {
  for (SweepAxis a : {SweepAxis::NumActive, SweepAxis::SnrDb,
                      SweepAxis::Upsilon, SweepAxis::FrameSize})
    CHECK(parse_axis(axis_name(a)) == a);
  CHECK(parse_axis("L") == SweepAxis::NumActive);  // load alias
  CHECK_THROWS_WITH(parse_axis("bogus"),
                    Catch::Matchers::ContainsSubstring("unknown sweep axis"));
}

TEST_CASE("apply_axis couples the derived quantities", "[harness]") {
  const SystemConfig base = tiny();

  SECTION("N_a and snr_db are direct") {
    CHECK(apply_axis(base, SweepAxis::NumActive, 7).N_a == 7.0);
    CHECK(apply_axis(base, SweepAxis::SnrDb, -3.0).snr_db == -3.0);
  }

  SECTION("sweeping upsilon rebalances N_g") {
    const SystemConfig c = apply_axis(base, SweepAxis::Upsilon, 4);
    CHECK(c.upsilon == 4);
    CHECK(c.N_g == 1);
    CHECK(c.N_c == base.N_c);
    const SystemConfig c1 = apply_axis(base, SweepAxis::Upsilon, 1);
    CHECK(c1.N_g == 4);
  }

  SECTION("sweeping N_c keeps N_g and rebalances upsilon") {
    const SystemConfig c = apply_axis(base, SweepAxis::FrameSize, 8);
    CHECK(c.N_c == 8);
    CHECK(c.N_g == base.N_g);
    CHECK(c.upsilon == 4);
  }

  SECTION("every swept point is revalidated") {
    CHECK_THROWS_WITH(
        apply_axis(base, SweepAxis::Upsilon, 3),
        Catch::Matchers::ContainsSubstring("swept config invalid at upsilon=3"));
    // a frame size that N_g does not divide leaves N_c != upsilon * N_g
    CHECK_THROWS_WITH(
        apply_axis(base, SweepAxis::FrameSize, 7),
        Catch::Matchers::ContainsSubstring("swept config invalid at N_c=7"));
  }
}

TEST_CASE("sweep files parse into spec + config", "[harness]") {
  const SystemConfig base = tiny();

  SECTION("config keys pass through, sweep keys are consumed") {
    std::string text = base.serialize();
    text += "axis = N_a\nvalues = 2, 3 4\ntrials = 5\ndump_trials = 2\n";
    const SweepSpec spec = parse_sweep_file(text);
    CHECK(spec.axis == SweepAxis::NumActive);
    CHECK(spec.values == std::vector<double>{2, 3, 4});
    CHECK(spec.trials == 5);
    CHECK(spec.dump_trials == 2);
    CHECK_FALSE(spec.trial_options.want_ser);
    CHECK(spec.base.hash() == base.hash());
  }

  SECTION("axis L scales the values by M") {
    std::string text = base.serialize();
    text += "axis = L\nvalues = 0.5 1.0 1.5\ntrials = 1\n";
    const SweepSpec spec = parse_sweep_file(text);
    CHECK(spec.axis == SweepAxis::NumActive);
    CHECK(spec.values == std::vector<double>{4, 8, 12});
  }

  SECTION("oracle_ser implies want_ser") {
    std::string text = base.serialize();
    text += "axis = N_a\nvalues = 2\ntrials = 1\noracle_ser = 1\n";
    const SweepSpec spec = parse_sweep_file(text);
    CHECK(spec.trial_options.oracle_ser);
    CHECK(spec.trial_options.want_ser);
  }

  SECTION("comments and blank lines are tolerated") {
    std::string text = "# a comment\n\n" + base.serialize();
    text += "axis = N_a  # trailing comment\nvalues = 2\ntrials = 1\n";
    const SweepSpec spec = parse_sweep_file(text);
    CHECK(spec.values == std::vector<double>{2});
  }

  SECTION("malformed lines are rejected with a line number") {
    CHECK_THROWS_WITH(parse_sweep_file("axis = N_a\nnonsense line\n"),
                      Catch::Matchers::ContainsSubstring(
                          "sweep file parse error at line 2"));
    CHECK_THROWS_WITH(parse_sweep_file("values = 1 2 x\n"),
                      Catch::Matchers::ContainsSubstring("bad values list"));
  }

  SECTION("unknown keys fall through to the config parser and fail there") {
    CHECK_THROWS_WITH(
        parse_sweep_file(tiny().serialize() + "not_a_key = 3\n"),
        Catch::Matchers::ContainsSubstring("config parse error"));
  }
}

TEST_CASE("aggregate_point computes every metric from first principles",
          "[harness]") {
  // Three hand-built trials with known bookkeeping.
  TrialResult t0;
  t0.n_users = 2;
  t0.frame_miss = true;
  t0.false_alarms = 0;
  t0.converged = true;
  t0.mis_users = 1;
  t0.user_collided = {0, 0};
  t0.user_in_u1 = {1, 1};
  t0.user_in_final = {1, 0};
  t0.user_errors = {1, 0};
  t0.user_errors_oracle = {0, 0};
  t0.symbols_per_user = 4;

  TrialResult t1;
  t1.n_users = 1;
  t1.frame_miss = false;
  t1.false_alarms = 2;
  t1.converged = false;
  t1.mis_users = 0;
  t1.user_collided = {1};
  t1.user_in_u1 = {1};
  t1.user_in_final = {1};
  t1.user_errors = {2};
  t1.user_errors_oracle = {1};
  t1.symbols_per_user = 4;

  TrialResult t2;  // empty frame
  t2.n_users = 0;
  t2.converged = true;
  t2.symbols_per_user = 4;

  const std::vector<TrialResult> rs = {t0, t1, t2};

  SECTION("default options") {
    const PointAggregate pt = aggregate_point(7.0, rs, {});
    CHECK(pt.axis_value == 7.0);
    CHECK(pt.trials == 3);
    const std::vector<std::string> order = {
        "P_mis",           "P_mis_user",   "mean_false_alarms",
        "failure_rate",    "collision_rate", "nonconv_rate"};
    REQUIRE(pt.metrics.size() == order.size());
    for (std::size_t i = 0; i < order.size(); ++i)
      CHECK(pt.metrics[i].first == order[i]);

    // P_mis: 1 frame miss of 3 trials
    CHECK(pt.find("P_mis")->value == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(pt.find("P_mis")->n == 3);
    // P_mis_user: 1 missed arrival of 3 arrivals
    CHECK(pt.find("P_mis_user")->value ==
          Catch::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(pt.find("P_mis_user")->n == 3);
    // mean false alarms: mean of {0,2,0}, n reported as trials
    CHECK(pt.find("mean_false_alarms")->value ==
          Catch::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(pt.find("mean_false_alarms")->n == 3);
    // failure_rate: user ok iff !collided && in_final && in_u1.
    // t0: {ok, fail}; t1: {fail (collided)} -> 2 of 3 failed.
    CHECK(pt.find("failure_rate")->value ==
          Catch::Approx(2.0 / 3.0).epsilon(1e-12));
    // collision_rate: 1 collided arrival of 3
    CHECK(pt.find("collision_rate")->value ==
          Catch::Approx(1.0 / 3.0).epsilon(1e-12));
    // nonconv_rate: 1 trial of 3
    CHECK(pt.find("nonconv_rate")->value ==
          Catch::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(pt.find("ser") == nullptr);
    CHECK(pt.find("no_such_metric") == nullptr);
  }

  SECTION("symbol error rates appear when requested") {
    TrialOptions opt;
    opt.want_ser = true;
    opt.oracle_ser = true;
    const PointAggregate pt = aggregate_point(7.0, rs, opt);
    REQUIRE(pt.metrics.size() == 8);
    CHECK(pt.metrics[6].first == "ser");
    CHECK(pt.metrics[7].first == "ser_oracle");
    // errors {1,0}+{2} over (2+1) users * 4 symbols
    CHECK(pt.find("ser")->value == Catch::Approx(3.0 / 12.0).epsilon(1e-12));
    CHECK(pt.find("ser")->n == 12);
    CHECK(pt.find("ser_oracle")->value ==
          Catch::Approx(1.0 / 12.0).epsilon(1e-12));
  }

  SECTION("want_ser alone omits the oracle column") {
    TrialOptions opt;
    opt.want_ser = true;
    const PointAggregate pt = aggregate_point(7.0, rs, opt);
    REQUIRE(pt.metrics.size() == 7);
    CHECK(pt.metrics[6].first == "ser");
    CHECK(pt.find("ser_oracle") == nullptr);
  }

  SECTION("Wilson interval brackets the point estimate") {
    const PointAggregate pt = aggregate_point(7.0, rs, {});
    const Estimate* e = pt.find("P_mis");
    CHECK(e->ci_low < e->value);
    CHECK(e->value < e->ci_high);
    CHECK(e->ci_low >= 0.0);
    CHECK(e->ci_high <= 1.0);
  }
}

TEST_CASE("run_point derives each trial seed from (master, point, trial)",
          "[harness]") {
  const SystemConfig cfg = tiny();
  const LinkContext ctx = build_context(cfg);
  const std::uint64_t master = 777;
  const int point = 2, trials = 6;

  const std::vector<TrialResult> serial =
      run_point(ctx, master, point, trials, {}, 1);
  REQUIRE(serial.size() == static_cast<std::size_t>(trials));

  SECTION("matches manual run_single_trial at the documented seeds") {
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t seed =
          derive_seed(master, static_cast<std::uint64_t>(point),
                      static_cast<std::uint64_t>(t));
      const TrialResult ref = run_single_trial(ctx, seed, {});
      CHECK(same_result(serial[static_cast<std::size_t>(t)], ref));
    }
  }

  SECTION("worker count does not change any stored result") {
    for (int workers : {2, 3, 8}) {
      const std::vector<TrialResult> par =
          run_point(ctx, master, point, trials, {}, workers);
      REQUIRE(par.size() == serial.size());
      for (std::size_t t = 0; t < serial.size(); ++t)
        CHECK(same_result(par[t], serial[t]));
    }
  }

  SECTION("different points decouple") {
    const std::vector<TrialResult> other =
        run_point(ctx, master, point + 1, trials, {}, 1);
    bool any_diff = false;
    for (std::size_t t = 0; t < serial.size(); ++t)
      if (!same_result(other[t], serial[t])) any_diff = true;
    CHECK(any_diff);
  }

  SECTION("zero trials yields an empty result set") {
    CHECK(run_point(ctx, master, point, 0, {}, 4).empty());
  }
}

TEST_CASE("run_sweep writes reproducible artifacts", "[harness]") {
  SweepSpec spec;
  spec.base = tiny();
  spec.axis = SweepAxis::NumActive;
  spec.values = {2, 3};
  spec.trials = 4;
  spec.dump_trials = 1;

  const fs::path dir_a = fresh_dir("a");
  const fs::path dir_b = fresh_dir("b");
  spec.outputs = dir_a.string();
  const SweepResult ra = run_sweep(spec, 1);
  spec.outputs = dir_b.string();
  const SweepResult rb = run_sweep(spec, 3);  // different worker count

  SECTION("summary.csv layout and byte-identical reruns") {
    const std::string csv_a = slurp(dir_a / "summary.csv");
    const std::string csv_b = slurp(dir_b / "summary.csv");
    CHECK(csv_a == csv_b);
    std::istringstream is(csv_a);
    std::string l1, l2;
    std::getline(is, l1);
    std::getline(is, l2);
    CHECK(l1 == "# summary.csv schema v1");
    CHECK(l2 == "axis_value,metric,value,ci_low,ci_high,trials");
    // 2 points x 6 metrics
    CHECK(count_lines(csv_a) == 2 + 2 * 6);
    std::string l3;
    std::getline(is, l3);
    CHECK(l3.rfind("2,P_mis,", 0) == 0);
  }

  SECTION("in-memory aggregates match across worker counts") {
    REQUIRE(ra.points.size() == 2);
    REQUIRE(rb.points.size() == 2);
    for (std::size_t p = 0; p < ra.points.size(); ++p) {
      CHECK(ra.points[p].trials == 4);
      REQUIRE(ra.points[p].metrics.size() == rb.points[p].metrics.size());
      for (std::size_t m = 0; m < ra.points[p].metrics.size(); ++m) {
        CHECK(ra.points[p].metrics[m].first == rb.points[p].metrics[m].first);
        CHECK(ra.points[p].metrics[m].second.value ==
              rb.points[p].metrics[m].second.value);
      }
    }
  }

  SECTION("manifest records the full provenance") {
    const std::string man = slurp(dir_a / "manifest.txt");
    CHECK(man.rfind("# run-manifest v1\n", 0) == 0);
    CHECK(man.find("status: valid\n") != std::string::npos);
    CHECK(man.find(std::string("code_version: ") + kCodeVersion) !=
          std::string::npos);
    CHECK(man.find("config_hash: " + spec.base.hash()) != std::string::npos);
    CHECK(man.find("master_seed: 99") != std::string::npos);
    CHECK(man.find("axis: N_a") != std::string::npos);
    CHECK(man.find("values: 2 3") != std::string::npos);
    CHECK(man.find("trials: 4") != std::string::npos);
    CHECK(man.find("seed_rule: trial_seed = derive_seed(master_seed, "
                   "point_index, trial_index)") != std::string::npos);
    std::ostringstream p0;
    p0 << "point 0: first_trial_seed=" << derive_seed(99, 0, 0);
    std::ostringstream p1;
    p1 << "point 1: first_trial_seed=" << derive_seed(99, 1, 0);
    CHECK(man.find(p0.str()) != std::string::npos);
    CHECK(man.find(p1.str()) != std::string::npos);
    CHECK(man.find("summary.csv") != std::string::npos);
    CHECK(man.find("manifest.txt") != std::string::npos);
    CHECK(man.find("trial_0000.txt") != std::string::npos);
    CHECK(man.find("trial_0001.txt") != std::string::npos);
    // indented config block that round-trips to the same hash
    const auto cfg_pos = man.find("config:\n");
    REQUIRE(cfg_pos != std::string::npos);
    std::istringstream cs(man.substr(cfg_pos + 8));
    std::string line, cfg_text;
    while (std::getline(cs, line)) {
      REQUIRE(line.rfind("  ", 0) == 0);
      cfg_text += line.substr(2) + "\n";
    }
    CHECK(SystemConfig::parse(cfg_text).hash() == spec.base.hash());
  }

  SECTION("trial dumps carry the derived seed and round-trip") {
    // dumps identify the swept per-point config, not the base
    const SystemConfig cfg0 = apply_axis(spec.base, spec.axis, 2);
    const SystemConfig cfg1 = apply_axis(spec.base, spec.axis, 3);
    const std::string d0 = slurp(dir_a / "trial_0000.txt");
    std::ostringstream head;
    head << "# trial-dump v1 config=" << cfg0.hash()
         << " seed=" << derive_seed(99, 0, 0);
    CHECK(d0.rfind(head.str(), 0) == 0);
    std::istringstream is(d0);
    const TrialDump dump = read_trial_dump(is, cfg0);
    CHECK(dump.seed == derive_seed(99, 0, 0));
    CHECK(dump.config_hash == cfg0.hash());
    // dump 1 belongs to the second point
    const std::string d1 = slurp(dir_b / "trial_0001.txt");
    std::ostringstream head1;
    head1 << "# trial-dump v1 config=" << cfg1.hash()
          << " seed=" << derive_seed(99, 1, 0);
    CHECK(d1.rfind(head1.str(), 0) == 0);
  }

  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("run_sweep edge cases", "[harness]") {
  SECTION("no swept values produces a header-only summary") {
    SweepSpec spec;
    spec.base = tiny();
    spec.values = {};
    spec.trials = 5;
    const fs::path dir = fresh_dir("empty");
    spec.outputs = dir.string();
    const SweepResult r = run_sweep(spec);
    CHECK(r.points.empty());
    const std::string csv = slurp(dir / "summary.csv");
    CHECK(count_lines(csv) == 2);
    CHECK(slurp(dir / "manifest.txt").find("status: valid") !=
          std::string::npos);
    fs::remove_all(dir);
  }

  SECTION("zero trials still emits the metric rows with n=0") {
    SweepSpec spec;
    spec.base = tiny();
    spec.values = {2};
    spec.trials = 0;
    const SweepResult r = run_sweep(spec);
    REQUIRE(r.points.size() == 1);
    CHECK(r.points[0].trials == 0);
    CHECK(r.points[0].find("P_mis")->n == 0);
  }

  SECTION("an invalid base config is rejected before any work") {
    SweepSpec spec;
    spec.base = tiny();
    spec.base.N_c = 5;  // breaks N_c = upsilon * N_g
    spec.values = {2};
    spec.trials = 1;
    CHECK_THROWS_WITH(run_sweep(spec),
                      Catch::Matchers::ContainsSubstring("base config invalid"));
  }

  SECTION("an invalid swept point is rejected before any trial runs") {
    SweepSpec spec;
    spec.base = tiny();
    spec.axis = SweepAxis::Upsilon;
    spec.values = {2, 3};  // 3 does not divide N_c = 4
    spec.trials = 1;
    const fs::path dir = fresh_dir("invalid_point");
    spec.outputs = dir.string();
    CHECK_THROWS_WITH(
        run_sweep(spec),
        Catch::Matchers::ContainsSubstring("swept config invalid at upsilon=3"));
    // rejected during validation: no artifacts written at all
    CHECK_FALSE(fs::exists(dir / "summary.csv"));
    fs::remove_all(dir);
  }

  SECTION("a mid-run I/O failure leaves an invalid manifest and rethrows") {
    SweepSpec spec;
    spec.base = tiny();
    spec.values = {2};
    spec.trials = 2;
    spec.dump_trials = 1;
    const fs::path dir = fresh_dir("io_fail");
    // occupy the dump file name with a directory so the write must fail
    fs::create_directories(dir / "trial_0000.txt");
    spec.outputs = dir.string();
    CHECK_THROWS(run_sweep(spec));
    const std::string man = slurp(dir / "manifest.txt");
    CHECK(man.find("status: invalid") != std::string::npos);
    fs::remove_all(dir);
  }
}

TEST_CASE("SVG plots are well-formed and honor log-y gaps", "[harness]") {
  SECTION("linear plot") {
    std::ostringstream os;
    PlotCurve c{"demo", {1, 2, 3}, {0.5, 0.2, 0.9}};
    write_svg_plot(os, "test title", "xs", "ys", {c}, false);
    const std::string svg = os.str();
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count_occurrences(svg, "<polyline") == 1);
    CHECK(count_occurrences(svg, "<circle") == 3);
    CHECK(svg.find("test title") != std::string::npos);
    CHECK(svg.find("xs") != std::string::npos);
  }

  SECTION("log-y skips nonpositive points and splits the polyline") {
    std::ostringstream os;
    PlotCurve c{"gap", {1, 2, 3, 4, 5}, {0.5, 0.1, 0.0, 0.01, 0.002}};
    write_svg_plot(os, "t", "x", "y", {c}, true);
    const std::string svg = os.str();
    // the zero sample breaks the line into two segments and draws no marker
    CHECK(count_occurrences(svg, "<polyline") == 2);
    CHECK(count_occurrences(svg, "<circle") == 4);
    CHECK(svg.find("</svg>") != std::string::npos);
  }

  SECTION("all-nonpositive log plot still yields a valid document") {
    std::ostringstream os;
    PlotCurve c{"zeros", {1, 2}, {0.0, 0.0}};
    write_svg_plot(os, "t", "x", "y", {c}, true);
    const std::string svg = os.str();
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count_occurrences(svg, "<polyline") == 0);
  }
}

TEST_CASE("figure recipes", "[harness]") {
  SECTION("the recipe registry is fixed") {
    const auto& ids = known_recipes();
    const std::vector<std::string> expect = {"fig6",  "fig7a", "fig7b",
                                             "fig8a", "fig8b", "fig9a",
                                             "fig9b", "fig10"};
    CHECK(ids == expect);
  }

  SECTION("unknown ids are rejected") {
    CHECK_THROWS_WITH(
        reproduce_figure("fig99", true, fs::temp_directory_path().string(), 1),
        Catch::Matchers::ContainsSubstring("unknown recipe id"));
  }

  SECTION("the coherence recipe emits per-curve data and one SVG") {
    const fs::path dir = fresh_dir("fig6");
    const std::vector<std::string> files =
        reproduce_figure("fig6", true, dir.string(), 5, /*trials=*/3);
    REQUIRE(files.size() == 3);
    CHECK(files[0] == "fig6_MSRA.csv");
    CHECK(files[1] == "fig6_SSRA.csv");
    CHECK(files[2] == "fig6.svg");
    for (const std::string& f : files) CHECK(fs::exists(dir / f));
    const std::string csv = slurp(dir / files[0]);
    std::istringstream is(csv);
    std::string l1, l2;
    std::getline(is, l1);
    std::getline(is, l2);
    CHECK(l1 == "# figure-data schema v1 recipe=fig6 curve=MSRA");
    CHECK(l2 == "x,y,ci_low,ci_high");
    CHECK(count_lines(csv) == 2 + 4);  // four swept user counts

    // deterministic in the seed: a rerun reproduces the bytes
    const fs::path dir2 = fresh_dir("fig6_rerun");
    reproduce_figure("fig6", true, dir2.string(), 5, 3);
    CHECK(slurp(dir2 / files[0]) == csv);
    fs::remove_all(dir);
    fs::remove_all(dir2);
  }

  SECTION("a sweep-backed recipe runs end to end at reduced size") {
    const fs::path dir = fresh_dir("fig7a");
    const std::vector<std::string> files =
        reproduce_figure("fig7a", true, dir.string(), 3, /*trials=*/1);
    REQUIRE(files.size() >= 2);
    for (const std::string& f : files) CHECK(fs::exists(dir / f));
    CHECK(files.back() == "fig7a.svg");
    const std::string svg = slurp(dir / "fig7a.svg");
    CHECK(svg.find("</svg>") != std::string::npos);
    fs::remove_all(dir);
  }
}
