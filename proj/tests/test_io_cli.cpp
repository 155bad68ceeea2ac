#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"

#include "liesync/errors.hpp"
#include "liesync/scenario_io.hpp"

using namespace liesync;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() /
                     ("liesync_tests_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot read ", p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out << content;
}

/// Runs the installed command-line binary; returns its exit code, with
/// stdout+stderr captured into `capture`.
int run_cli(const std::string& args, const fs::path& capture) {
  std::string cmd = std::string("\"") + LIESYNC_CLI_PATH + "\" " + args + " > " +
                    capture.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool same_descriptor(const lie::Descriptor& a, const lie::Descriptor& b) {
  if (a->kind() != b->kind()) return false;
  if (a->matrix_dim() != b->matrix_dim()) return false;
  if (a->algebra_dim() != b->algebra_dim()) return false;
  if (a->commutative() != b->commutative()) return false;
  if (a->kernel_periods() != b->kernel_periods()) return false;
  for (std::size_t i = 0; i < a->basis().size(); ++i) {
    if (testutil::dist(a->basis()[i], b->basis()[i]) > 0.0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("descriptor text round trips") {
  const std::vector<lie::Descriptor> all = {
      lie::GroupDescriptor::so2(),
      lie::GroupDescriptor::so3(),
      lie::GroupDescriptor::su2(),
      lie::GroupDescriptor::se2(),
      lie::GroupDescriptor::real_line(),
      lie::GroupDescriptor::torus_product(3),
      lie::GroupDescriptor::cylinder_product(2, 1),
      lie::GroupDescriptor::direct_product(
          {lie::GroupDescriptor::so2(), lie::GroupDescriptor::su2()}),
      lie::GroupDescriptor::custom("pauli-x",
                                   {lie::GroupDescriptor::su2()->basis()[0]}, {0.0}),
  };
  for (const auto& d : all) {
    const auto back = lie::descriptor_from_text(lie::descriptor_to_text(d));
    CHECK_MESSAGE(same_descriptor(d, back), d->name());
  }
  CHECK_THROWS_AS(lie::descriptor_from_text("\"Banana\""), ConfigError);

  // A structurally valid document whose basis is linearly dependent is a
  // config error at this layer, not a domain error.
  const std::string dependent = R"({
    "name": "Custom", "label": "bad", "matrix_dim": 2,
    "basis": [[[0,0],[-1,0],[1,0],[0,0]], [[0,0],[-2,0],[2,0],[0,0]]],
    "kernel_periods": [0, 0]
  })";
  CHECK_THROWS_AS(lie::descriptor_from_text(dependent), ConfigError);
}

TEST_CASE("scenario parsing: explicit documents") {
  const std::string good = R"({
    "group": "SO2",
    "N": 3,
    "graph": {"complete": true},
    "T": 0.5,
    "K": 2.0,
    "steps": 10,
    "initial": {"coordinates": [[0.1], [0.2], [0.3]]}
  })";
  const auto sc = io::parse_scenario_text(good);
  CHECK(sc.agents == 3);
  CHECK(sc.cfg.T == 0.5);
  CHECK(sc.cfg.K == 2.0);
  CHECK(sc.steps == 10);
  CHECK(sc.intersample_points == 0);
  CHECK(sc.mode == sim::Mode::Proposed);
  CHECK(sc.initial_coordinates.size() == 3);
  CHECK(sc.initial_coordinates[2](0) == 0.3);
  CHECK(sc.graph.neighbours(0).size() == 2);

  // One trailing step runs fine.
  CHECK_NOTHROW(sim::run(sc));

  const auto reject = [&](const std::string& text) {
    CHECK_THROWS_AS(io::parse_scenario_text(text), ConfigError);
  };
  reject("{ not json");
  reject("[1,2,3]");
  // Missing required fields.
  reject(R"({"group":"SO2","N":3,"graph":{"complete":true},"T":0.5,"K":2.0,"steps":10})");
  reject(R"({"group":"SO2","N":3,"graph":{"complete":true},"K":2.0,"steps":10,
            "initial":{"coordinates":[[0],[0],[0]]}})");
  // Unknown field.
  reject(R"({"group":"SO2","N":3,"graph":{"complete":true},"T":0.5,"K":2.0,"steps":10,
            "gain_schedule":[1,2],
            "initial":{"coordinates":[[0],[0],[0]]}})");
  // Initial must carry exactly one encoding.
  reject(R"({"group":"SO2","N":2,"graph":{"complete":true},"T":0.5,"K":2.0,"steps":2,
            "initial":{}})");
  reject(R"({"group":"SO2","N":2,"graph":{"complete":true},"T":0.5,"K":2.0,"steps":2,
            "initial":{"coordinates":[[0],[0]],
                       "matrices":[[[1,0],[0,0],[0,0],[1,0]]]}})");
  // Unknown mode.
  reject(R"({"group":"SO2","N":2,"graph":{"complete":true},"T":0.5,"K":2.0,"steps":2,
            "mode":"magic","initial":{"coordinates":[[0],[0]]}})");
}

TEST_CASE("scenario parsing: graphs") {
  // 1-based edge lists, weight defaulting to 1.
  {
    const auto g = io::parse_graph_text(
        R"({"N": 3, "edges": [[1, 2], [2, 1, 0.5], [3, 1]]})");
    CHECK(g.size() == 3);
    REQUIRE(g.neighbours(0).size() == 1);
    CHECK(g.neighbours(0)[0] == std::pair(1, 1.0));
    REQUIRE(g.neighbours(1).size() == 1);
    CHECK(g.neighbours(1)[0] == std::pair(0, 0.5));
    CHECK(g.neighbours(2)[0] == std::pair(0, 1.0));
  }
  // Laplacian matrices.
  {
    const auto g = io::parse_graph_text(R"({"laplacian": [[1, -1], [0, 0]]})");
    CHECK(g.size() == 2);
    CHECK(g.neighbours(0).size() == 1);
    CHECK(g.neighbours(1).empty());
  }
  CHECK_THROWS_AS(io::parse_graph_text(R"({"laplacian": [[1, -1], [0.5, 0]]})"),
                  ConfigError);
  CHECK_THROWS_AS(io::parse_graph_text(R"({"N": 2, "edges": [[1, 3]]})"), ConfigError);
  CHECK_THROWS_AS(io::parse_graph_text(R"({"N": 2})"), ConfigError);

  // The bundled demo Laplacian round-trips.
  const RealMat demo = io::demo_triangular_laplacian();
  CHECK(demo.rows() == 6);
  CHECK(graph::exact_gain_bound(
            graph::laplacian(graph::CommGraph::from_laplacian(demo))) ==
        doctest::Approx(0.45).epsilon(1e-10));
}

TEST_CASE("scenario parsing: presets and overrides") {
  const auto names = io::preset_names();
  CHECK(names.size() == 5);
  for (const auto& name : names) CHECK_NOTHROW(io::make_preset(name));
  CHECK_THROWS_AS(io::make_preset("banana"), ConfigError);

  {
    const auto sc = io::make_preset("fig2_kuramoto_t01");
    CHECK(sc.mode == sim::Mode::KuramotoBaseline);
    CHECK(sc.cfg.T == 0.1);
    CHECK(sc.steps == 200);
    CHECK(sc.agents == 3);
    CHECK(sc.initial_coordinates[0](0) == -0.8);
    CHECK(sc.initial_coordinates[1](0) == 0.2);
    CHECK(sc.initial_coordinates[2](0) == 0.5);
  }
  {
    const auto sc = io::make_preset("fig3_kuramoto_t08");
    CHECK(sc.mode == sim::Mode::KuramotoBaseline);
    CHECK(sc.cfg.T == 0.8);
  }
  {
    const auto sc = io::make_preset("fig4_kuramoto_proposed");
    CHECK(sc.mode == sim::Mode::Proposed);
    CHECK(sc.cfg.T == 0.8);
    CHECK(sc.cfg.K == 2.0);
    CHECK(sc.steps == 60);
  }
  {
    const auto sc = io::make_preset("fig5_su2");
    CHECK(sc.descriptor->kind() == lie::GroupDescriptor::Kind::SU2);
    CHECK(sc.agents == 6);
    CHECK(sc.cfg.T == 1.0);
    CHECK(sc.cfg.K == 3.5);
    CHECK(sc.steps == 100);
    CHECK(sc.initial_matrices.size() == 6);
    CHECK(sc.graph.neighbours(5).empty());  // leader listens to nobody
    CHECK(sc.graph.neighbours(0).size() == 5);
  }
  {
    const auto sc = io::make_preset("deadbeat_so2_n40");
    CHECK(sc.agents == 40);
    CHECK(sc.cfg.K == 40.0);
    CHECK(sc.initial_coordinates.front()(0) ==
          doctest::Approx(-testutil::kPi / 41.0).epsilon(1e-15));
    CHECK(sc.initial_coordinates.back()(0) ==
          doctest::Approx(testutil::kPi / 41.0).epsilon(1e-15));
  }

  // Preset documents allow run-shape overrides only.
  {
    const auto sc =
        io::parse_scenario_text(R"({"preset": "fig4_kuramoto_proposed", "steps": 7})");
    CHECK(sc.steps == 7);
    CHECK(sc.cfg.K == 2.0);
    CHECK(sc.preset == "fig4_kuramoto_proposed");
  }
  CHECK_THROWS_AS(
      io::parse_scenario_text(R"({"preset": "fig4_kuramoto_proposed", "N": 5})"),
      ConfigError);

  // Initial states can be borrowed from a preset.
  {
    const auto sc = io::parse_scenario_text(R"({
      "group": "SO2", "N": 3, "graph": {"complete": true},
      "T": 1.0, "K": 2.0, "steps": 5,
      "initial": {"preset": "fig2_kuramoto_t01"}
    })");
    CHECK(sc.initial_coordinates.size() == 3);
    CHECK(sc.initial_coordinates[0](0) == -0.8);
    CHECK(sc.mode == sim::Mode::Proposed);
  }
}

TEST_CASE("scenario serialization round-trips to identical trajectories") {
  for (const std::string name : {"fig4_kuramoto_proposed", "fig5_su2"}) {
    auto sc = io::make_preset(name);
    sc.steps = std::min(sc.steps, 40);
    const auto reparsed = io::parse_scenario_text(io::scenario_to_text(sc));
    const std::string a = io::trajectory_csv(sc, sim::run(sc));
    const std::string b = io::trajectory_csv(reparsed, sim::run(reparsed));
    CHECK(a == b);
    CHECK(a.rfind("step,time,pair,err_norm,omega_max,membership_residual\n", 0) == 0);
  }
}

TEST_CASE("trajectory CSV layout") {
  auto sc = io::make_preset("fig4_kuramoto_proposed");
  sc.steps = 2;
  sc.intersample_points = 1;
  const auto tr = sim::run(sc);
  const std::string csv = io::trajectory_csv(sc, tr);

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "step,time,pair,err_norm,omega_max,membership_residual");
  int rows = 0;
  int nan_rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.find(",1-") != std::string::npos);
    if (line.find("nan") != std::string::npos) ++nan_rows;
  }
  // 3 sampled records x 2 pairs + 2 stepping intervals x 1 point x 2 pairs.
  CHECK(rows == 10);
  CHECK(nan_rows == 4);  // membership is not evaluated between samples
}

TEST_CASE("region CSV layout") {
  const auto pts = region::region_boundary(3, 120);
  const std::string csv = io::region_csv(pts);
  CHECK(csv.rfind("locus,sigma,omega,g\n", 0) == 0);
  CHECK(static_cast<int>(std::count(csv.begin(), csv.end(), '\n')) ==
        static_cast<int>(pts.size()) + 1);
}

TEST_CASE("spectral report serialization") {
  const auto rep = graph::laplacian(graph::CommGraph::complete(6));
  const auto verdict = lincoord::stability_verdict(rep, 3.5);
  const auto j = nlohmann::json::parse(io::spectral_report_json(verdict));
  CHECK(j["gain"] == 3.5);
  CHECK(j["stable"] == true);
  CHECK(j["spectral_radius"].get<double>() ==
        doctest::Approx(6.0 / 3.5 - 1.0).epsilon(1e-12));
  CHECK(j["exact_gain_bound"].get<double>() == doctest::Approx(3.0));
  CHECK(j["kmin_closed_form"].get<double>() == doctest::Approx(3.0));
  CHECK(j["laplacian_eigenvalues"].size() == 6);
  CHECK(j["restricted_eigenvalues"].size() == 5);
  CHECK(j["full_eigenvalues"].size() == 6);
  CHECK(j["mapped_eigenvalues"].size() == 6);
}

TEST_CASE("checksums") {
  CHECK(io::fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(io::fnv1a64("abc") == 0xe71fa2190541574bull);
  CHECK(io::fnv1a64("step,time") == 0x980d74c62f1f7cd0ull);
}

TEST_CASE("run directories carry a verifiable manifest") {
  const fs::path dir = temp_dir("write_run");
  auto sc = io::make_preset("fig4_kuramoto_proposed");
  sc.steps = 5;
  const auto tr = sim::run(sc);
  const auto manifest = io::write_run(sc, tr, dir.string(), "test", 0.25);

  REQUIRE(manifest.files ==
          std::vector<std::string>{"trajectory.csv", "scenario.json", "manifest.json"});
  for (const auto& f : manifest.files) CHECK(fs::exists(dir / f));

  const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(j["source"] == "test");
  CHECK(j["preset"] == "fig4_kuramoto_proposed");
  CHECK(j["agents"] == 3);
  CHECK(j["steps_requested"] == 5);
  CHECK(j["steps_recorded"] == 5);
  CHECK(j["mode"] == "proposed");
  CHECK(j["wall_time_seconds"] == 0.25);
  REQUIRE(j["files"].size() == 2);
  for (const auto& entry : j["files"]) {
    const std::string content = slurp(dir / entry["name"].get<std::string>());
    CHECK(entry["bytes"].get<std::size_t>() == content.size());
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(io::fnv1a64(content)));
    CHECK(entry["fnv1a64"].get<std::string>() == hex);
  }

  // The emitted scenario reproduces the trajectory byte for byte.
  const auto back = io::load_scenario_file((dir / "scenario.json").string());
  CHECK(io::trajectory_csv(back, sim::run(back)) == slurp(dir / "trajectory.csv"));
}

TEST_CASE("command line: simulate") {
  const fs::path dir = temp_dir("cli_simulate");
  const fs::path out = dir / "run";
  const fs::path log = dir / "log.txt";

  // Preset run writes the full artifact set.
  CHECK(run_cli("simulate --preset fig4_kuramoto_proposed --out " + out.string(),
                log) == 0);
  CHECK(fs::exists(out / "trajectory.csv"));
  CHECK(fs::exists(out / "scenario.json"));
  CHECK(fs::exists(out / "manifest.json"));
  const std::string printed = slurp(log);
  CHECK(printed.find("final max error") != std::string::npos);

  // Deterministic: a second run produces identical bytes.
  const fs::path out2 = dir / "run2";
  CHECK(run_cli("simulate --preset fig4_kuramoto_proposed --out " + out2.string(),
                log) == 0);
  CHECK(slurp(out / "trajectory.csv") == slurp(out2 / "trajectory.csv"));

  // Settling report flows through.
  CHECK(run_cli("simulate --preset deadbeat_so2_n40 --out " + (dir / "db").string() +
                    " --settling 0.001",
                log) == 0);
  CHECK(slurp(log).find("settled (eps=0.001) at step 1") != std::string::npos);

  // Config documents are accepted, with overrides.
  const fs::path cfg = dir / "scenario.json";
  spit(cfg, R"({"preset": "fig4_kuramoto_proposed", "steps": 3})");
  CHECK(run_cli("simulate --config " + cfg.string() + " --steps 2 --out " +
                    (dir / "cfgrun").string(),
                log) == 0);
  const auto dumped = nlohmann::json::parse(slurp(dir / "cfgrun" / "scenario.json"));
  CHECK(dumped["steps"] == 2);

  // --dump-config prints the resolved document without running.
  CHECK(run_cli("simulate --preset fig2_kuramoto_t01 --dump-config", log) == 0);
  const auto doc = nlohmann::json::parse(slurp(log));
  CHECK(doc["preset"] == "fig2_kuramoto_t01");
  CHECK(doc["mode"] == "kuramoto_baseline");

  // Malformed config: exit code 2, no partial artifacts.
  const fs::path bad = dir / "bad.json";
  spit(bad, "{ this is not json");
  const fs::path badout = dir / "badout";
  CHECK(run_cli("simulate --config " + bad.string() + " --out " + badout.string(),
                log) == 2);
  CHECK_FALSE(fs::exists(badout / "trajectory.csv"));

  // Mutually exclusive inputs and missing inputs.
  CHECK(run_cli("simulate --preset fig2_kuramoto_t01 --config " + cfg.string(), log) ==
        2);
  CHECK(run_cli("simulate", log) == 2);
  CHECK(run_cli("simulate --preset banana", log) == 2);
}

TEST_CASE("command line: gain-bound") {
  const fs::path dir = temp_dir("cli_gainbound");
  const fs::path log = dir / "log.txt";

  CHECK(run_cli("gain-bound --complete 6 --json", log) == 0);
  {
    const auto j = nlohmann::json::parse(slurp(log));
    CHECK(j["agents"] == 6);
    CHECK(j["connected"] == true);
    CHECK(j["exact_gain_bound"].get<double>() == doctest::Approx(3.0));
    CHECK(j["kmin_closed_form"].get<double>() == doctest::Approx(3.0));
    CHECK(j["laplacian_eigenvalues"].size() == 6);
  }

  CHECK(run_cli("gain-bound --complete 19 --json", log) == 0);
  CHECK(nlohmann::json::parse(slurp(log))["kmin_closed_form"].get<double>() ==
        doctest::Approx(18.0));

  // Triangular demo Laplacian from a file.
  const fs::path graph_file = dir / "graph.json";
  {
    const RealMat l = io::demo_triangular_laplacian();
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < l.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < l.cols(); ++j) row.push_back(l(i, j));
      rows.push_back(row);
    }
    nlohmann::json doc;
    doc["laplacian"] = rows;
    spit(graph_file, doc.dump());
  }
  CHECK(run_cli("gain-bound --graph " + graph_file.string() + " --json", log) == 0);
  CHECK(nlohmann::json::parse(slurp(log))["exact_gain_bound"].get<double>() ==
        doctest::Approx(0.45).epsilon(1e-9));

  // Full verdict at a specific gain.
  CHECK(run_cli("gain-bound --complete 6 --K 3.5 --json", log) == 0);
  {
    const auto j = nlohmann::json::parse(slurp(log));
    CHECK(j["stable"] == true);
    CHECK(j["spectral_radius"].get<double>() ==
          doctest::Approx(6.0 / 3.5 - 1.0).epsilon(1e-10));
  }
  CHECK(run_cli("gain-bound --complete 6 --K 3.5", log) == 0);
  {
    const std::string text = slurp(log);
    CHECK(text.find("stable:") != std::string::npos);
    CHECK(text.find("yes") != std::string::npos);
    CHECK(text.find("spectral radius:") != std::string::npos);
  }

  // Failure surfaces.
  CHECK(run_cli("gain-bound --complete 1", log) == 2);  // no such graph
  CHECK(run_cli("gain-bound", log) == 2);
  const fs::path disconnected = dir / "disconnected.json";
  spit(disconnected, R"({"N": 2, "edges": []})");
  CHECK(run_cli("gain-bound --graph " + disconnected.string(), log) == 4);
}

TEST_CASE("command line: region") {
  const fs::path dir = temp_dir("cli_region");
  const fs::path log = dir / "log.txt";
  const fs::path csv = dir / "boundary.csv";

  CHECK(run_cli("region 7 --out " + csv.string(), log) == 0);
  const std::string printed = slurp(log);
  CHECK(printed.find("max g:       3.5") != std::string::npos);
  CHECK(printed.find("gN") != std::string::npos);
  CHECK(slurp(csv).rfind("locus,sigma,omega,g\n", 0) == 0);

  CHECK(run_cli("region 12", log) == 0);
  CHECK(slurp(log).find("g23") != std::string::npos);

  CHECK(run_cli("region 2", log) == 4);   // below the minimum agent count
  CHECK(run_cli("region", log) == 2);     // missing positional
}

TEST_CASE("command line: settling") {
  const fs::path dir = temp_dir("cli_settling");
  const fs::path log = dir / "log.txt";

  CHECK(run_cli("settling 40 40 0.001", log) == 0);
  CHECK(slurp(log).find("settling steps: 1 (deadbeat)") != std::string::npos);

  CHECK(run_cli("settling 3 2 0.1 --verify", log) == 0);
  const std::string printed = slurp(log);
  CHECK(printed.find("settling steps: 4") != std::string::npos);
  CHECK(printed.find("simulated:      settled at step 4") != std::string::npos);

  CHECK(run_cli("settling 3 0.5 0.1", log) == 4);   // non-contractive
  CHECK(run_cli("settling 3 2 1.5", log) == 4);     // eps outside (0, 1)
  CHECK(run_cli("settling 3 2", log) == 2);         // missing positional
}
