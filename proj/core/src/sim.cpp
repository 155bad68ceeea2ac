#include "liesync/sim.hpp"

#include <cmath>
#include <sstream>

#include "liesync/errors.hpp"

namespace liesync::sim {

namespace {

constexpr double kMembershipAbort = 1e-6;
constexpr double kInitialMembershipTol = 1e-9;
constexpr double kZeroLogFloor = 1e-14;

std::vector<lie::GroupElement> materialize_states(const Scenario& sc) {
  const int n = sc.agents;
  std::vector<lie::GroupElement> states;
  states.reserve(static_cast<std::size_t>(n));
  if (!sc.initial_coordinates.empty()) {
    if (sc.initial_coordinates.size() != static_cast<std::size_t>(n)) {
      throw ConfigError("scenario: one coordinate vector per agent required");
    }
    for (const Eigen::VectorXd& t : sc.initial_coordinates) {
      states.push_back(lie::composed_flow({sc.descriptor, t}));
    }
  } else {
    if (sc.initial_matrices.size() != static_cast<std::size_t>(n)) {
      throw ConfigError("scenario: one initial matrix per agent required");
    }
    for (const Mat& m : sc.initial_matrices) {
      lie::GroupElement x{sc.descriptor, m};
      if (lie::check_membership(x) > kInitialMembershipTol) {
        throw ConfigError("scenario: initial matrix is not on the group");
      }
      states.push_back(std::move(x));
    }
  }
  return states;
}

double max_membership(const std::vector<lie::GroupElement>& states) {
  double r = 0.0;
  for (const auto& x : states) r = std::max(r, lie::check_membership(x));
  return r;
}

/// ||Log E|| or +infinity when the principal branch is undefined.
double log_norm(const Mat& e) {
  try {
    return matfun::operator_norm(matfun::principal_log(e));
  } catch (const EigenvalueOnNegativeRealAxis&) {
    return std::numeric_limits<double>::infinity();
  }
}

RealMat coupling_matrix(const graph::CommGraph& g) {
  RealMat a = RealMat::Zero(g.size(), g.size());
  for (const graph::Edge& e : g.edges()) a(e.from, e.to) = e.weight;
  return a;
}

Trajectory run_kuramoto(const Scenario& sc) {
  if (sc.descriptor->kind() != lie::GroupDescriptor::Kind::SO2) {
    throw ConfigError("kuramoto baseline: planar rotation group required");
  }
  if (sc.initial_coordinates.empty()) {
    throw ConfigError("kuramoto baseline: initial phases (coordinates) required");
  }
  const int n = sc.agents;
  Eigen::VectorXd theta(n);
  for (int i = 0; i < n; ++i) {
    if (sc.initial_coordinates[static_cast<std::size_t>(i)].size() != 1) {
      throw ConfigError("kuramoto baseline: one phase per agent required");
    }
    theta(i) = sc.initial_coordinates[static_cast<std::size_t>(i)](0);
  }
  const RealMat coupling = coupling_matrix(sc.graph);

  Trajectory tr;
  for (int k = 0; k <= sc.steps; ++k) {
    StepRecord rec;
    rec.step = k;
    rec.time = k * sc.cfg.T;
    rec.states.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd t(1);
      t << theta(i);
      rec.states.push_back(lie::composed_flow({sc.descriptor, t}));
    }
    for (int j = 1; j < n; ++j) {
      lie::GroupElement e = control::relative_error(rec.states[0],
                                                    rec.states[static_cast<std::size_t>(j)]);
      rec.err_norms.push_back(matfun::operator_norm(
          e.matrix - Mat::Identity(e.matrix.rows(), e.matrix.cols())));
      rec.errors.push_back(std::move(e));
    }
    // The baseline's input magnitude: coupling drive per agent.
    double umax = 0.0;
    for (int i = 0; i < n; ++i) {
      double u = 0.0;
      for (int j = 0; j < n; ++j) u += coupling(i, j) * std::sin(theta(i) - theta(j));
      umax = std::max(umax, std::abs(u));
    }
    rec.omega_max = umax;
    rec.membership_residual = max_membership(rec.states);
    tr.phase_history.push_back(theta);
    tr.records.push_back(std::move(rec));
    if (k < sc.steps) theta = kuramoto_step(theta, coupling, sc.cfg.T);
  }
  return tr;
}

}  // namespace

Trajectory run(const Scenario& sc) {
  if (sc.agents < 2) throw ConfigError("scenario: at least two agents required");
  if (sc.graph.size() != sc.agents) {
    throw ConfigError("scenario: graph size does not match the agent count");
  }
  if (sc.steps < 1) throw ConfigError("scenario: at least one step required");
  if (sc.intersample_points < 0) {
    throw ConfigError("scenario: intersample count must be nonnegative");
  }
  control::validate(sc.cfg);

  if (sc.mode == Mode::KuramotoBaseline) return run_kuramoto(sc);

  Trajectory tr;
  {
    // Gain sanity against the graph-specific threshold (warning only).
    const graph::LaplacianReport rep = graph::laplacian(sc.graph);
    if (rep.connected) {
      const double bound = graph::exact_gain_bound(rep);
      if (sc.cfg.K <= bound) {
        std::ostringstream os;
        os << "gain K = " << sc.cfg.K << " is at or below the spectral threshold " << bound
           << "; the linearized loop is not contractive";
        tr.warnings.push_back(os.str());
      }
    } else {
      tr.warnings.push_back("communication graph is not connected");
    }
  }

  std::vector<lie::GroupElement> states = materialize_states(sc);
  const int n = sc.agents;
  const double radius = sc.descriptor->log_radius();

  for (int k = 0; k <= sc.steps; ++k) {
    StepRecord rec;
    rec.step = k;
    rec.time = k * sc.cfg.T;
    rec.states = states;

    rec.membership_residual = max_membership(states);
    if (rec.membership_residual > kMembershipAbort) {
      std::ostringstream os;
      os << "state left the group manifold at step " << k << " (residual "
         << rec.membership_residual << ")";
      throw LeftGroup(k, rec.membership_residual, os.str());
    }

    bool outside = false;
    for (int j = 1; j < n; ++j) {
      lie::GroupElement e =
          control::relative_error(states[0], states[static_cast<std::size_t>(j)]);
      rec.err_norms.push_back(matfun::operator_norm(
          e.matrix - Mat::Identity(e.matrix.rows(), e.matrix.cols())));
      if (log_norm(e.matrix) >= radius) outside = true;
      rec.errors.push_back(std::move(e));
    }
    if (outside && !tr.left_log_neighbourhood) {
      tr.left_log_neighbourhood = true;
      tr.first_step_outside = k;
    }

    // Inputs from the step-k snapshot (recorded even on the final step).
    std::vector<lie::AlgebraElement> inputs;
    inputs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      try {
        inputs.push_back(control::controller(i, states, sc.graph, sc.cfg));
      } catch (const ControllerUndefined& ex) {
        throw ControllerUndefined(ex.agent, k, ex.what());
      }
    }
    for (const auto& omega : inputs) {
      rec.omega_max = std::max(rec.omega_max, matfun::operator_norm(omega.matrix));
    }

    const bool stepping = k < sc.steps && !(outside && sc.abort_outside_log_neighbourhood);
    if (stepping && sc.intersample_points > 0) {
      for (int q = 1; q <= sc.intersample_points; ++q) {
        const double delta = sc.cfg.T * q / (sc.intersample_points + 1);
        IntersampleRecord ir;
        ir.time = rec.time + delta;
        for (int j = 1; j < n; ++j) {
          const lie::GroupElement e = control::intersample_error(
              rec.errors[static_cast<std::size_t>(j - 1)], inputs[0],
              inputs[static_cast<std::size_t>(j)], delta, sc.cfg);
          ir.err_norms.push_back(matfun::operator_norm(
              e.matrix - Mat::Identity(e.matrix.rows(), e.matrix.cols())));
        }
        rec.intersample.push_back(std::move(ir));
      }
    }

    const bool truncate = outside && sc.abort_outside_log_neighbourhood;
    tr.records.push_back(std::move(rec));
    if (truncate) break;

    if (k < sc.steps) {
      std::vector<lie::GroupElement> next;
      next.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const Mat flow = matfun::exp_matrix(sc.cfg.T * inputs[static_cast<std::size_t>(i)].matrix);
        next.push_back({states[static_cast<std::size_t>(i)].descriptor,
                        states[static_cast<std::size_t>(i)].matrix * flow});
      }
      states = std::move(next);
    }
  }
  return tr;
}

Eigen::VectorXd kuramoto_step(const Eigen::VectorXd& theta, const RealMat& coupling,
                              double sample_period) {
  if (coupling.rows() != theta.size() || coupling.cols() != theta.size()) {
    throw DomainError("kuramoto_step: coupling matrix dimension mismatch");
  }
  Eigen::VectorXd next = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    double drive = 0.0;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      drive += coupling(i, j) * std::sin(theta(i) - theta(j));
    }
    next(i) -= sample_period * drive;
  }
  return next;
}

std::optional<int> measure_settling(const Scenario& sc, const Trajectory& tr, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw DomainError("measure_settling: eps must lie in (0, 1)");
  }
  if (!sc.descriptor->commutative()) {
    throw NotApplicable("measure_settling: commutative descriptor required");
  }
  const int n = sc.agents;
  for (int i = 0; i < n; ++i) {
    const auto& nbrs = sc.graph.neighbours(i);
    if (static_cast<int>(nbrs.size()) != n - 1) {
      throw NotApplicable("measure_settling: complete unweighted graph required");
    }
    for (const auto& [j, w] : nbrs) {
      if (w != 1.0) {
        throw NotApplicable("measure_settling: complete unweighted graph required");
      }
    }
  }
  if (tr.records.empty()) return std::nullopt;

  const std::size_t pairs = tr.records.front().errors.size();
  std::vector<double> threshold(pairs);
  for (std::size_t j = 0; j < pairs; ++j) {
    const double init = log_norm(tr.records.front().errors[j].matrix);
    threshold[j] = std::max(eps * init, kZeroLogFloor);
  }
  int settled_from = -1;
  for (std::size_t k = 0; k < tr.records.size(); ++k) {
    bool ok = true;
    for (std::size_t j = 0; j < pairs && ok; ++j) {
      ok = log_norm(tr.records[k].errors[j].matrix) <= threshold[j];
    }
    if (ok && settled_from < 0) {
      settled_from = static_cast<int>(k);
    } else if (!ok) {
      settled_from = -1;
    }
  }
  if (settled_from < 0) return std::nullopt;
  return settled_from;
}

double phase_spread(const Eigen::VectorXd& theta) {
  if (theta.size() == 0) return 0.0;
  return theta.maxCoeff() - theta.minCoeff();
}

}  // namespace liesync::sim
