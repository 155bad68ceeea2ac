#include "liesync/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "liesync/errors.hpp"

namespace {

using nlohmann::json;
using liesync::Complex;
using liesync::ConfigError;
using liesync::DomainError;
using liesync::Mat;
using liesync::RealMat;

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("failed writing file: " + path);
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Flat row-major list of [re, im] pairs.
json complex_matrix_json(const Mat& x) {
  json entries = json::array();
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c)
      entries.push_back(json::array({x(r, c).real(), x(r, c).imag()}));
  return entries;
}

Mat complex_matrix_from_json(const json& j, int n, const char* what) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw ConfigError(std::string(what) + ": expected " + std::to_string(n * n) +
                      " row-major [re, im] entries");
  Mat x(n, n);
  std::size_t k = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c, ++k) {
      const json& e = j[k];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ConfigError(std::string(what) + ": entries must be [re, im] pairs");
      x(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  return x;
}

json complex_vector_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back(json::array({v(i).real(), v(i).imag()}));
  return out;
}

json descriptor_to_json(const liesync::lie::Descriptor& d) {
  using liesync::lie::GroupDescriptor;
  json j;
  switch (d->kind()) {
    case GroupDescriptor::Kind::SO2: j["name"] = "SO2"; return j;
    case GroupDescriptor::Kind::SO3: j["name"] = "SO3"; return j;
    case GroupDescriptor::Kind::SU2: j["name"] = "SU2"; return j;
    case GroupDescriptor::Kind::SE2: j["name"] = "SE2"; return j;
    case GroupDescriptor::Kind::RealLine: j["name"] = "RealLine"; return j;
    case GroupDescriptor::Kind::Product: {
      const auto& fs = d->factors();
      std::size_t circles = 0;
      while (circles < fs.size() && fs[circles]->kind() == GroupDescriptor::Kind::SO2)
        ++circles;
      std::size_t lines = 0;
      while (circles + lines < fs.size() &&
             fs[circles + lines]->kind() == GroupDescriptor::Kind::RealLine)
        ++lines;
      if (circles + lines == fs.size()) {
        if (lines == 0) {
          j["name"] = "TorusProduct";
          j["circles"] = circles;
          return j;
        }
        j["name"] = "CylinderProduct";
        j["circles"] = circles;
        j["lines"] = lines;
        return j;
      }
      j["name"] = "DirectProduct";
      json factors = json::array();
      for (const auto& f : fs) factors.push_back(descriptor_to_json(f));
      j["factors"] = std::move(factors);
      return j;
    }
    case GroupDescriptor::Kind::Custom: break;
  }
  j["name"] = "Custom";
  j["label"] = d->name();
  j["matrix_dim"] = d->matrix_dim();
  json basis = json::array();
  for (const auto& h : d->basis()) basis.push_back(complex_matrix_json(h));
  j["basis"] = std::move(basis);
  j["kernel_periods"] = d->kernel_periods();
  j["log_radius"] = d->log_radius();
  return j;
}

// Group construction reports programmatic misuse as DomainError; when the
// request comes from a config document the same defect is a config error.
template <typename F>
liesync::lie::Descriptor build_descriptor(F&& factory) {
  try {
    return factory();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

liesync::lie::Descriptor descriptor_from_json(const json& j) {
  using liesync::lie::GroupDescriptor;
  if (j.is_string()) return descriptor_from_json(json{{"name", j.get<std::string>()}});
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string())
    throw ConfigError("group: expected a name string or an object with a \"name\" field");
  const std::string name = j["name"].get<std::string>();
  if (name == "SO2") return GroupDescriptor::so2();
  if (name == "SO3") return GroupDescriptor::so3();
  if (name == "SU2") return GroupDescriptor::su2();
  if (name == "SE2") return GroupDescriptor::se2();
  if (name == "RealLine") return GroupDescriptor::real_line();
  if (name == "TorusProduct") {
    if (!j.contains("circles")) throw ConfigError("TorusProduct: missing \"circles\"");
    return build_descriptor(
        [&] { return GroupDescriptor::torus_product(j["circles"].get<int>()); });
  }
  if (name == "CylinderProduct") {
    if (!j.contains("circles") || !j.contains("lines"))
      throw ConfigError("CylinderProduct: missing \"circles\" or \"lines\"");
    return build_descriptor([&] {
      return GroupDescriptor::cylinder_product(j["circles"].get<int>(),
                                               j["lines"].get<int>());
    });
  }
  if (name == "DirectProduct") {
    if (!j.contains("factors") || !j["factors"].is_array() || j["factors"].empty())
      throw ConfigError("DirectProduct: missing non-empty \"factors\" array");
    std::vector<liesync::lie::Descriptor> fs;
    for (const auto& f : j["factors"]) fs.push_back(descriptor_from_json(f));
    return build_descriptor(
        [&] { return GroupDescriptor::direct_product(std::move(fs)); });
  }
  if (name == "Custom") {
    for (const char* key : {"label", "matrix_dim", "basis", "kernel_periods"})
      if (!j.contains(key)) throw ConfigError(std::string("Custom group: missing \"") + key + "\"");
    const int n = j["matrix_dim"].get<int>();
    if (n <= 0) throw ConfigError("Custom group: matrix_dim must be positive");
    std::vector<Mat> basis;
    for (const auto& h : j["basis"]) basis.push_back(complex_matrix_from_json(h, n, "basis"));
    std::vector<double> periods = j["kernel_periods"].get<std::vector<double>>();
    const double radius = j.value("log_radius", 0.0);
    return build_descriptor([&] {
      return GroupDescriptor::custom(j["label"].get<std::string>(), std::move(basis),
                                     std::move(periods), radius);
    });
  }
  throw ConfigError("unknown group name: " + name);
}

}  // namespace

namespace liesync::lie {

std::string descriptor_to_text(const Descriptor& d) { return descriptor_to_json(d).dump(2); }

Descriptor descriptor_from_text(const std::string& text) {
  return descriptor_from_json(parse_json(text, "group descriptor"));
}

}  // namespace liesync::lie

namespace liesync::io {

namespace {

graph::CommGraph graph_from_json(const json& j, int agents) {
  if (!j.is_object()) throw ConfigError("graph: expected an object");
  if (j.contains("laplacian")) {
    const json& rows = j["laplacian"];
    if (!rows.is_array() || rows.empty()) throw ConfigError("graph.laplacian: expected a matrix");
    const int n = static_cast<int>(rows.size());
    RealMat l(n, n);
    for (int r = 0; r < n; ++r) {
      const json& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        throw ConfigError("graph.laplacian: matrix must be square");
      for (int c = 0; c < n; ++c) l(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return graph::CommGraph::from_laplacian(l);
  }
  const int n = j.contains("N") ? j["N"].get<int>() : agents;
  if (n <= 0) throw ConfigError("graph: agent count is required (\"N\")");
  if (j.value("complete", false)) return graph::CommGraph::complete(n);
  if (j.contains("edges")) {
    std::vector<graph::Edge> edges;
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() < 2 || e.size() > 3)
        throw ConfigError("graph.edges: entries must be [i, j] or [i, j, weight] (1-based)");
      graph::Edge edge;
      edge.from = e[0].get<int>() - 1;
      edge.to = e[1].get<int>() - 1;
      edge.weight = e.size() == 3 ? e[2].get<double>() : 1.0;
      edges.push_back(edge);
    }
    return graph::CommGraph(n, std::move(edges));
  }
  throw ConfigError("graph: expected \"complete\", \"edges\", or \"laplacian\"");
}

json graph_to_json(const graph::CommGraph& g) {
  json j;
  j["N"] = g.size();
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back(json::array({e.from + 1, e.to + 1, e.weight}));
  j["edges"] = std::move(edges);
  return j;
}

sim::Mode mode_from_string(const std::string& s) {
  if (s == "proposed") return sim::Mode::Proposed;
  if (s == "kuramoto_baseline" || s == "kuramoto") return sim::Mode::KuramotoBaseline;
  throw ConfigError("mode: expected \"proposed\" or \"kuramoto_baseline\", got \"" + s + "\"");
}

const char* mode_to_string(sim::Mode m) {
  return m == sim::Mode::Proposed ? "proposed" : "kuramoto_baseline";
}

sim::Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
  if (j.contains("preset") && !j.contains("group")) {
    sim::Scenario sc = make_preset(j["preset"].get<std::string>());
    static const std::set<std::string> overridable = {
        "preset", "T", "K", "steps", "intersample", "abort_outside_log_neighbourhood"};
    for (const auto& item : j.items())
      if (!overridable.count(item.key()))
        throw ConfigError("preset scenario: cannot override \"" + item.key() + "\"");
    if (j.contains("T")) sc.cfg.T = j["T"].get<double>();
    if (j.contains("K")) sc.cfg.K = j["K"].get<double>();
    if (j.contains("steps")) sc.steps = j["steps"].get<int>();
    if (j.contains("intersample")) sc.intersample_points = j["intersample"].get<int>();
    if (j.contains("abort_outside_log_neighbourhood"))
      sc.abort_outside_log_neighbourhood = j["abort_outside_log_neighbourhood"].get<bool>();
    return sc;
  }
  static const std::set<std::string> known = {
      "preset", "group",  "N",     "graph",
      "T",      "K",      "steps", "intersample",
      "mode",   "initial", "abort_outside_log_neighbourhood"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw ConfigError("scenario: unknown field \"" + item.key() + "\"");
  for (const char* key : {"group", "N", "graph", "T", "K", "steps", "initial"})
    if (!j.contains(key)) throw ConfigError(std::string("scenario: missing field \"") + key + "\"");

  sim::Scenario sc;
  sc.preset = j.value("preset", std::string());
  sc.descriptor = descriptor_from_json(j["group"]);
  sc.agents = j["N"].get<int>();
  sc.graph = graph_from_json(j["graph"], sc.agents);
  sc.cfg.T = j["T"].get<double>();
  sc.cfg.K = j["K"].get<double>();
  sc.steps = j["steps"].get<int>();
  sc.intersample_points = j.value("intersample", 0);
  sc.mode = mode_from_string(j.value("mode", std::string("proposed")));
  sc.abort_outside_log_neighbourhood = j.value("abort_outside_log_neighbourhood", false);

  const json& init = j["initial"];
  const int given = (init.is_object() ? static_cast<int>(init.contains("coordinates")) +
                                            static_cast<int>(init.contains("matrices")) +
                                            static_cast<int>(init.contains("preset"))
                                      : 0);
  if (given != 1)
    throw ConfigError(
        "initial: expected exactly one of \"coordinates\", \"matrices\", or \"preset\"");
  if (init.contains("preset")) {
    const sim::Scenario donor = make_preset(init["preset"].get<std::string>());
    sc.initial_coordinates = donor.initial_coordinates;
    sc.initial_matrices = donor.initial_matrices;
  } else if (init.contains("coordinates")) {
    const int m = sc.descriptor->algebra_dim();
    for (const auto& row : init["coordinates"]) {
      if (!row.is_array() || static_cast<int>(row.size()) != m)
        throw ConfigError("initial.coordinates: each agent needs " + std::to_string(m) +
                          " coordinates");
      Eigen::VectorXd t(m);
      for (int c = 0; c < m; ++c) t(c) = row[static_cast<std::size_t>(c)].get<double>();
      sc.initial_coordinates.push_back(std::move(t));
    }
  } else {
    const int n = sc.descriptor->matrix_dim();
    for (const auto& entry : init["matrices"])
      sc.initial_matrices.push_back(complex_matrix_from_json(entry, n, "initial.matrices"));
  }
  return sc;
}

json scenario_to_json(const sim::Scenario& sc) {
  json j;
  if (!sc.preset.empty()) j["preset"] = sc.preset;
  j["group"] = descriptor_to_json(sc.descriptor);
  j["N"] = sc.agents;
  j["graph"] = graph_to_json(sc.graph);
  j["T"] = sc.cfg.T;
  j["K"] = sc.cfg.K;
  j["steps"] = sc.steps;
  j["intersample"] = sc.intersample_points;
  j["mode"] = mode_to_string(sc.mode);
  j["abort_outside_log_neighbourhood"] = sc.abort_outside_log_neighbourhood;
  json init;
  if (!sc.initial_coordinates.empty()) {
    json coords = json::array();
    for (const auto& t : sc.initial_coordinates) {
      json row = json::array();
      for (Eigen::Index c = 0; c < t.size(); ++c) row.push_back(t(c));
      coords.push_back(std::move(row));
    }
    init["coordinates"] = std::move(coords);
  } else {
    json mats = json::array();
    for (const auto& x : sc.initial_matrices) mats.push_back(complex_matrix_json(x));
    init["matrices"] = std::move(mats);
  }
  j["initial"] = std::move(init);
  return j;
}

Eigen::VectorXd single(double v) {
  Eigen::VectorXd t(1);
  t(0) = v;
  return t;
}

}  // namespace

sim::Scenario parse_scenario_text(const std::string& json_text) {
  return scenario_from_json(parse_json(json_text, "scenario"));
}

sim::Scenario load_scenario_file(const std::string& path) {
  return parse_scenario_text(read_file(path));
}

std::string scenario_to_text(const sim::Scenario& sc) { return scenario_to_json(sc).dump(2); }

std::vector<std::string> preset_names() {
  return {"fig2_kuramoto_t01", "fig3_kuramoto_t08", "fig4_kuramoto_proposed", "fig5_su2",
          "deadbeat_so2_n40"};
}

RealMat demo_triangular_laplacian() {
  RealMat l = RealMat::Zero(6, 6);
  const double diag[6] = {0.5, 0.8, 0.9, 0.8, 0.5, 0.0};
  for (int i = 0; i < 6; ++i) {
    l(i, i) = diag[i];
    if (i == 5) continue;
    const double w = diag[i] / static_cast<double>(5 - i);
    for (int jx = i + 1; jx < 6; ++jx) l(i, jx) = -w;
  }
  return l;
}

sim::Scenario make_preset(const std::string& name) {
  sim::Scenario sc;
  sc.preset = name;
  if (name == "fig2_kuramoto_t01" || name == "fig3_kuramoto_t08" ||
      name == "fig4_kuramoto_proposed") {
    sc.descriptor = lie::GroupDescriptor::so2();
    sc.agents = 3;
    sc.graph = graph::CommGraph::complete(3);
    sc.initial_coordinates = {single(-0.8), single(0.2), single(0.5)};
    if (name == "fig2_kuramoto_t01") {
      sc.cfg.T = 0.1;
      sc.cfg.K = 1.0;
      sc.steps = 200;
      sc.mode = sim::Mode::KuramotoBaseline;
    } else if (name == "fig3_kuramoto_t08") {
      sc.cfg.T = 0.8;
      sc.cfg.K = 1.0;
      sc.steps = 200;
      sc.mode = sim::Mode::KuramotoBaseline;
    } else {
      sc.cfg.T = 0.8;
      sc.cfg.K = 2.0;
      sc.steps = 60;
      sc.mode = sim::Mode::Proposed;
    }
    return sc;
  }
  if (name == "fig5_su2") {
    sc.descriptor = lie::GroupDescriptor::su2();
    sc.agents = 6;
    sc.graph = graph::CommGraph::from_laplacian(demo_triangular_laplacian());
    sc.cfg.T = 1.0;
    sc.cfg.K = 3.5;
    sc.steps = 100;
    // Initial states are single exponentials of Pauli combinations,
    // exp(a s1 + b s2 + c s3), not composed one-parameter flows.
    for (int i = 0; i < 6; ++i) {
      Eigen::VectorXd t(3);
      t << -0.32 + 0.12 * i, -0.06 + 0.06 * i, -0.42 + 0.12 * i;
      const lie::AlgebraElement a =
          lie::algebra_from_coordinates({sc.descriptor, std::move(t)});
      sc.initial_matrices.push_back(matfun::exp_matrix(a.matrix));
    }
    return sc;
  }
  if (name == "deadbeat_so2_n40") {
    sc.descriptor = lie::GroupDescriptor::so2();
    sc.agents = 40;
    sc.graph = graph::CommGraph::complete(40);
    sc.cfg.T = 1.0;
    sc.cfg.K = 40.0;
    sc.steps = 3;
    const double pi = std::acos(-1.0);
    for (int i = 0; i < 40; ++i)
      sc.initial_coordinates.push_back(single(-pi / 41.0 + i * 2.0 * pi / 1599.0));
    return sc;
  }
  throw ConfigError("unknown preset: " + name);
}

graph::CommGraph parse_graph_text(const std::string& json_text) {
  return graph_from_json(parse_json(json_text, "graph"), 0);
}

graph::CommGraph load_graph_file(const std::string& path) {
  return parse_graph_text(read_file(path));
}

std::string trajectory_csv(const sim::Scenario& sc, const sim::Trajectory& tr) {
  std::string out = "step,time,pair,err_norm,omega_max,membership_residual\n";
  auto row = [&out](int step, double time, int pair_j, double err, double omega_max,
                    double membership) {
    out += std::to_string(step);
    out += ',';
    out += fmt17(time);
    out += ",1-";
    out += std::to_string(pair_j);
    out += ',';
    out += fmt17(err);
    out += ',';
    out += fmt17(omega_max);
    out += ',';
    out += fmt17(membership);
    out += '\n';
  };
  const double nan = std::nan("");
  (void)sc;
  for (const auto& rec : tr.records) {
    for (std::size_t j = 0; j < rec.err_norms.size(); ++j)
      row(rec.step, rec.time, static_cast<int>(j) + 2, rec.err_norms[j], rec.omega_max,
          rec.membership_residual);
    for (const auto& is : rec.intersample)
      for (std::size_t j = 0; j < is.err_norms.size(); ++j)
        row(rec.step, is.time, static_cast<int>(j) + 2, is.err_norms[j], rec.omega_max, nan);
  }
  return out;
}

std::string region_csv(const std::vector<region::RegionPoint>& points) {
  std::string out = "locus,sigma,omega,g\n";
  for (const auto& p : points) {
    out += std::to_string(p.locus);
    out += ',';
    out += fmt17(p.sigma);
    out += ',';
    out += fmt17(p.omega);
    out += ',';
    out += fmt17(p.g);
    out += '\n';
  }
  return out;
}

std::string spectral_report_json(const lincoord::SpectralReport& rep) {
  json j;
  j["gain"] = rep.gain;
  j["stable"] = rep.stable;
  j["spectral_radius"] = rep.spectral_radius;
  j["exact_gain_bound"] = rep.exact_bound;
  j["kmin_closed_form"] = rep.kmin;
  j["laplacian_eigenvalues"] = complex_vector_json(rep.laplacian_eigenvalues);
  j["mapped_eigenvalues"] = complex_vector_json(rep.mapped_eigenvalues);
  j["full_eigenvalues"] = complex_vector_json(rep.full_eigenvalues);
  j["restricted_eigenvalues"] = complex_vector_json(rep.restricted_eigenvalues);
  return j.dump(2);
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

RunManifest write_run(const sim::Scenario& sc, const sim::Trajectory& tr,
                      const std::string& outdir, const std::string& source,
                      double wall_seconds) {
  namespace fs = std::filesystem;
  const std::string csv = trajectory_csv(sc, tr);
  const std::string scenario_text = scenario_to_text(sc);

  auto hex64 = [](std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
  };
  auto file_entry = [&hex64](const char* file_name, const std::string& content) {
    json e;
    e["name"] = file_name;
    e["bytes"] = content.size();
    e["fnv1a64"] = hex64(fnv1a64(content));
    return e;
  };

  json manifest;
  manifest["source"] = source;
  if (!sc.preset.empty()) manifest["preset"] = sc.preset;
  manifest["agents"] = sc.agents;
  manifest["steps_requested"] = sc.steps;
  manifest["steps_recorded"] = tr.records.empty() ? 0 : tr.records.back().step;
  manifest["mode"] = mode_to_string(sc.mode);
  manifest["warnings"] = tr.warnings;
  manifest["left_log_neighbourhood"] = tr.left_log_neighbourhood;
  if (tr.left_log_neighbourhood) manifest["first_step_outside"] = tr.first_step_outside;
  manifest["wall_time_seconds"] = wall_seconds;
  manifest["files"] = json::array(
      {file_entry("trajectory.csv", csv), file_entry("scenario.json", scenario_text)});
  const std::string manifest_text = manifest.dump(2);

  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec && !fs::is_directory(outdir))
    throw ConfigError("cannot create output directory: " + outdir);
  const fs::path base(outdir);
  write_file((base / "trajectory.csv").string(), csv);
  write_file((base / "scenario.json").string(), scenario_text);
  write_file((base / "manifest.json").string(), manifest_text);
  return RunManifest{manifest_text, {"trajectory.csv", "scenario.json", "manifest.json"}};
}

}  // namespace liesync::io
