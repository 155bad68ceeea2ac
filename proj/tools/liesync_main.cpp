// liesync: sampled-data synchronization of identical kinematic agents on
// matrix Lie groups.  Subcommands: simulate, gain-bound, region, settling.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "liesync/errors.hpp"
#include "liesync/graph.hpp"
#include "liesync/lincoord.hpp"
#include "liesync/region.hpp"
#include "liesync/scenario_io.hpp"
#include "liesync/sim.hpp"

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw liesync::ConfigError("cannot open output file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw liesync::ConfigError("failed writing file: " + path);
}

/// 0 success; 2 configuration; 3 runtime numerical/controller failure;
/// 4 request outside the mathematical domain.
int classify(const liesync::Error& e) {
  if (dynamic_cast<const liesync::ConfigError*>(&e)) return 2;
  if (dynamic_cast<const liesync::ControllerUndefined*>(&e) ||
      dynamic_cast<const liesync::LeftGroup*>(&e) ||
      dynamic_cast<const liesync::NumericalFailure*>(&e) ||
      dynamic_cast<const liesync::EigenvalueOnNegativeRealAxis*>(&e))
    return 3;
  if (dynamic_cast<const liesync::DomainError*>(&e) ||
      dynamic_cast<const liesync::Disconnected*>(&e) ||
      dynamic_cast<const liesync::Unstable*>(&e) ||
      dynamic_cast<const liesync::ZeroGain*>(&e) ||
      dynamic_cast<const liesync::NotApplicable*>(&e) ||
      dynamic_cast<const liesync::OutsideLogNeighbourhood*>(&e))
    return 4;
  return 1;
}

struct SimulateOpts {
  std::string preset;
  std::string config;
  std::string out = "out";
  double period = 0.0;       // 0 = keep scenario value
  double gain = 0.0;         // 0 = keep scenario value
  int steps = -1;            // -1 = keep scenario value
  int intersample = -1;      // -1 = keep scenario value
  bool abort_outside = false;
  bool dump_config = false;
  double settling_eps = 0.0;  // 0 = skip measurement
};

int run_simulate(const SimulateOpts& o) {
  using liesync::io::make_preset;
  liesync::sim::Scenario sc =
      o.preset.empty() ? liesync::io::load_scenario_file(o.config) : make_preset(o.preset);
  if (o.period > 0.0) sc.cfg.T = o.period;
  if (o.gain != 0.0) sc.cfg.K = o.gain;
  if (o.steps >= 0) sc.steps = o.steps;
  if (o.intersample >= 0) sc.intersample_points = o.intersample;
  if (o.abort_outside) sc.abort_outside_log_neighbourhood = true;

  if (o.dump_config) {
    std::cout << liesync::io::scenario_to_text(sc) << "\n";
    return 0;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const liesync::sim::Trajectory tr = liesync::sim::run(sc);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string source = o.preset.empty() ? "file:" + o.config : "preset:" + o.preset;
  const liesync::io::RunManifest manifest = liesync::io::write_run(sc, tr, o.out, source, wall);

  std::cout << "scenario:        " << source << "\n";
  std::cout << "agents:          " << sc.agents << " on " << sc.descriptor->name() << "\n";
  std::cout << "steps recorded:  " << (tr.records.empty() ? 0 : tr.records.back().step) << "\n";
  if (!tr.records.empty() && !tr.records.back().err_norms.empty()) {
    double final_err = 0.0;
    for (double e : tr.records.back().err_norms) final_err = std::max(final_err, e);
    std::cout << "final max error: " << fmt(final_err) << "\n";
  }
  if (tr.left_log_neighbourhood)
    std::cout << "note:            left the log chart at step " << tr.first_step_outside << "\n";
  for (const auto& w : tr.warnings) std::cout << "warning:         " << w << "\n";
  std::cout << "output:          " << o.out << "/";
  for (std::size_t i = 0; i < manifest.files.size(); ++i)
    std::cout << (i ? ", " : "{") << manifest.files[i];
  std::cout << "}\n";

  if (o.settling_eps > 0.0) {
    const auto k = liesync::sim::measure_settling(sc, tr, o.settling_eps);
    if (k)
      std::cout << "settled (eps=" << fmt(o.settling_eps) << ") at step " << *k << "\n";
    else
      std::cout << "not settled to eps=" << fmt(o.settling_eps) << " within the horizon\n";
  }
  return 0;
}

struct GainBoundOpts {
  std::string graph_file;
  int complete_n = 0;
  double gain = 0.0;  // 0 = bound only
  bool as_json = false;
};

int run_gain_bound(const GainBoundOpts& o) {
  const liesync::graph::CommGraph g = o.graph_file.empty()
                                          ? liesync::graph::CommGraph::complete(o.complete_n)
                                          : liesync::io::load_graph_file(o.graph_file);
  const liesync::graph::LaplacianReport rep = liesync::graph::laplacian(g);
  if (o.gain != 0.0) {
    const liesync::lincoord::SpectralReport verdict = liesync::lincoord::stability_verdict(rep, o.gain);
    if (o.as_json) {
      std::cout << liesync::io::spectral_report_json(verdict) << "\n";
      return 0;
    }
    std::cout << "agents:           " << g.size() << "\n";
    std::cout << "gain K:           " << fmt(verdict.gain) << "\n";
    std::cout << "spectral radius:  " << fmt(verdict.spectral_radius) << "\n";
    std::cout << "stable:           " << (verdict.stable ? "yes" : "no") << "\n";
    std::cout << "exact bound:      K > " << fmt(verdict.exact_bound) << "\n";
    std::cout << "worst-case bound: K > " << fmt(verdict.kmin) << " (any graph on "
              << g.size() << " agents)\n";
    return 0;
  }
  const double bound = liesync::graph::exact_gain_bound(rep);
  const double kmin = liesync::graph::kmin_closed_form(g.size());
  if (o.as_json) {
    nlohmann::json j;
    j["agents"] = g.size();
    j["connected"] = rep.connected;
    j["exact_gain_bound"] = bound;
    j["kmin_closed_form"] = kmin;
    auto eigs = nlohmann::json::array();
    for (const auto& v : rep.spectrum.values) eigs.push_back({v.real(), v.imag()});
    j["laplacian_eigenvalues"] = eigs;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "agents:           " << g.size() << "\n";
  std::cout << "connected:        " << (rep.connected ? "yes" : "no") << "\n";
  std::cout << "exact bound:      K > " << fmt(bound) << "\n";
  std::cout << "worst-case bound: K > " << fmt(kmin) << " (any graph on " << g.size()
            << " agents)\n";
  std::cout << "laplacian eigenvalues:\n";
  for (const auto& v : rep.spectrum.values)
    std::cout << "  " << fmt(v.real()) << (v.imag() < 0 ? " - " : " + ")
              << fmt(std::abs(v.imag())) << "i\n";
  return 0;
}

struct RegionOpts {
  int n = 0;
  int samples = 2000;
  std::string out;
};

int run_region(const RegionOpts& o) {
  const liesync::region::RegionMaximum mx = liesync::region::region_maximum(o.n);
  std::cout << "agents:      " << o.n << "\n";
  std::cout << "max g:       " << fmt(mx.value) << " at sigma=" << fmt(mx.sigma)
            << ", omega=" << fmt(mx.omega) << " (locus " << mx.locus << ", " << mx.label
            << ")\n";
  std::cout << "closed form: " << fmt(liesync::graph::kmin_closed_form(o.n)) << "\n";
  std::cout << "candidates:\n";
  for (const auto& c : liesync::region::candidate_maxima(o.n))
    std::cout << "  " << c.label << " = " << fmt(c.value)
              << (c.on_boundary ? "" : "  (off the active boundary)") << "\n";
  if (!o.out.empty()) {
    const auto boundary = liesync::region::region_boundary(o.n, o.samples);
    write_text_file(o.out, liesync::io::region_csv(boundary));
    std::cout << "boundary:    " << o.out << " (" << boundary.size() << " points)\n";
  }
  return 0;
}

struct SettlingOpts {
  int n = 0;
  double gain = 0.0;
  double eps = 0.0;
  bool verify = false;
};

int run_settling(const SettlingOpts& o) {
  const liesync::lincoord::SettlingTime st = liesync::lincoord::settling_time(o.n, o.gain, o.eps);
  std::cout << "agents:         " << o.n << "\n";
  std::cout << "gain K:         " << fmt(o.gain) << "\n";
  std::cout << "settling steps: " << st.steps << (st.deadbeat ? " (deadbeat)" : "") << "\n";
  if (!st.deadbeat) {
    std::cout << "contraction:    " << fmt(std::abs(o.gain - o.n) / std::abs(o.gain))
              << " per step\n";
    std::cout << "d(steps)/dK:    "
              << fmt(liesync::lincoord::settling_time_derivative(o.n, o.gain, o.eps)) << "\n";
  }
  if (o.verify) {
    liesync::sim::Scenario sc;
    sc.descriptor = liesync::lie::GroupDescriptor::so2();
    sc.agents = o.n;
    sc.graph = liesync::graph::CommGraph::complete(o.n);
    sc.cfg.T = 1.0;
    sc.cfg.K = o.gain;
    sc.steps = std::max(2 * st.steps, 20);
    for (int i = 0; i < o.n; ++i) {
      Eigen::VectorXd t(1);
      t(0) = -0.2 + 0.4 * static_cast<double>(i) / static_cast<double>(o.n - 1);
      sc.initial_coordinates.push_back(t);
    }
    const liesync::sim::Trajectory tr = liesync::sim::run(sc);
    const auto k = liesync::sim::measure_settling(sc, tr, o.eps);
    if (k)
      std::cout << "simulated:      settled at step " << *k << " (horizon " << sc.steps << ")\n";
    else
      std::cout << "simulated:      not settled within " << sc.steps << " steps\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampled-data synchronization of identical kinematic agents on matrix Lie groups"};
  app.require_subcommand(1);

  SimulateOpts so;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Run a scenario and write trajectory CSV, scenario JSON, and a manifest");
  std::string preset_help = "Named preset (";
  {
    const auto names = liesync::io::preset_names();
    for (std::size_t i = 0; i < names.size(); ++i) preset_help += (i ? ", " : "") + names[i];
    preset_help += ")";
  }
  CLI::Option* opt_preset = sim->add_option("--preset", so.preset, preset_help);
  CLI::Option* opt_config = sim->add_option("--config", so.config, "Scenario JSON file");
  opt_preset->excludes(opt_config);
  opt_config->excludes(opt_preset);
  sim->add_option("--out", so.out, "Output directory")->capture_default_str();
  sim->add_option("--T", so.period, "Override the sampling period");
  sim->add_option("--K", so.gain, "Override the root gain");
  sim->add_option("--steps", so.steps, "Override the step count");
  sim->add_option("--intersample", so.intersample, "Intersample points per interval");
  sim->add_flag("--abort-outside-log", so.abort_outside,
                "Stop when a reference error leaves the log chart");
  sim->add_flag("--dump-config", so.dump_config, "Print the resolved scenario JSON and exit");
  sim->add_option("--settling", so.settling_eps,
                  "Also report the measured settling step for this tolerance");

  GainBoundOpts go;
  CLI::App* gb = app.add_subcommand(
      "gain-bound", "Exact and worst-case gain thresholds for a communication graph");
  CLI::Option* opt_graph = gb->add_option("--graph", go.graph_file, "Graph JSON file");
  CLI::Option* opt_complete =
      gb->add_option("--complete", go.complete_n, "Complete unweighted graph on N agents");
  opt_graph->excludes(opt_complete);
  opt_complete->excludes(opt_graph);
  gb->add_option("--K", go.gain, "Evaluate stability of this gain");
  gb->add_flag("--json", go.as_json, "Emit a JSON report");

  RegionOpts ro;
  CLI::App* rg = app.add_subcommand(
      "region", "Laplacian inclusion-region boundary and its worst-case gain");
  rg->add_option("N", ro.n, "Number of agents (>= 3)")->required();
  rg->add_option("--samples", ro.samples, "Boundary sample count")->capture_default_str();
  rg->add_option("--out", ro.out, "Write the sampled boundary as CSV");

  SettlingOpts to;
  CLI::App* st = app.add_subcommand(
      "settling", "Closed-form settling steps on the complete unweighted graph");
  st->add_option("N", to.n, "Number of agents")->required();
  st->add_option("K", to.gain, "Root gain")->required();
  st->add_option("EPS", to.eps, "Settling tolerance in (0, 1)")->required();
  st->add_flag("--verify", to.verify, "Cross-check against a simulated run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      if (so.preset.empty() == so.config.empty())
        throw liesync::ConfigError("simulate: exactly one of --preset or --config is required");
      return run_simulate(so);
    }
    if (gb->parsed()) {
      if (go.graph_file.empty() && go.complete_n <= 0)
        throw liesync::ConfigError("gain-bound: one of --graph or --complete is required");
      return run_gain_bound(go);
    }
    if (rg->parsed()) return run_region(ro);
    if (st->parsed()) return run_settling(to);
  } catch (const liesync::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify(e);
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
