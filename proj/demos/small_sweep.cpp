// Reduced-size Monte Carlo sweep: misdetection vs layer count on the
// narrowband desk system. Writes summary.csv, a provenance manifest, and an
// SVG curve, and prints the aggregated table.
//
// usage: demo_small_sweep [out_dir] [trials]   (defaults ./small_sweep_out, 200)
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "msra/harness.hpp"

using namespace msra;

int main(int argc, char** argv) {
  const std::string out = argc > 1 ? argv[1] : "small_sweep_out";
  const int trials = argc > 2 ? std::atoi(argv[2]) : 200;
  const int workers = std::max(1u, std::thread::hardware_concurrency());

  SweepSpec spec;
  spec.base = presets::nb_desk();
  spec.axis = SweepAxis::Upsilon;
  spec.values = {1, 4, 8, 16};
  spec.trials = trials;
  spec.outputs = out;

  std::cout << "sweeping upsilon over {1,4,8,16} at N_a=" << spec.base.N_a
            << ", " << trials << " trials/point, " << workers << " worker(s)\n";
  const SweepResult sr = run_sweep(spec, workers);

  std::cout << "\n upsilon   P_mis      [95% CI]            mean FAs\n";
  PlotCurve curve{"P_mis", {}, {}};
  for (const PointAggregate& pt : sr.points) {
    const Estimate* pm = pt.find("P_mis");
    const Estimate* fa = pt.find("mean_false_alarms");
    std::printf(" %7g   %.4f   [%.4f, %.4f]    %.3f\n", pt.axis_value,
                pm->value, pm->ci_low, pm->ci_high, fa->value);
    curve.x.push_back(pt.axis_value);
    curve.y.push_back(pm->value);
  }

  const std::filesystem::path svg =
      std::filesystem::path(out) / "pmis_vs_upsilon.svg";
  std::ofstream os(svg);
  write_svg_plot(os, "misdetection vs layer count", "upsilon", "P_mis",
                 {curve}, /*log_y=*/true);

  std::cout << "\nwrote " << out << "/summary.csv, manifest.txt, "
            << svg.filename().string() << "\n";
  return 0;
}
