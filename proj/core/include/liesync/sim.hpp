#pragma once

// Scenario-driven simulation of the sampled synchronization loop, plus the
// naive sampled Kuramoto baseline and settling measurement.

#include <optional>
#include <string>
#include <vector>

#include "liesync/control.hpp"

namespace liesync::sim {

enum class Mode { Proposed, KuramotoBaseline };

struct Scenario {
  lie::Descriptor descriptor;
  int agents = 0;
  graph::CommGraph graph{1, {}};
  control::ControlConfig cfg;
  /// Exactly one of the two initial-state encodings is used (coordinates for
  /// Kuramoto scenarios).
  std::vector<Eigen::VectorXd> initial_coordinates;
  std::vector<Mat> initial_matrices;
  int steps = 0;
  int intersample_points = 0;  // per interval, evenly spaced
  Mode mode = Mode::Proposed;
  /// Stop stepping (and mark the trajectory) once any reference error leaves
  /// the log-chart radius.  Off by default: the local theory is sufficient,
  /// not necessary, and reference runs start outside the chart.
  bool abort_outside_log_neighbourhood = false;
  std::string preset;  // non-empty when constructed from a named preset
};

struct IntersampleRecord {
  double time = 0.0;                 // kT + delta
  std::vector<double> err_norms;     // ||E_1j(kT + delta) - I||, j = 2..N
};

struct StepRecord {
  int step = 0;
  double time = 0.0;
  std::vector<lie::GroupElement> states;
  std::vector<lie::GroupElement> errors;  // E_1j, j = 2..N
  std::vector<double> err_norms;          // ||E_1j - I||
  double omega_max = 0.0;                 // max_i ||Omega_i|| (input at this step)
  double membership_residual = 0.0;       // max_i check_membership(X_i)
  std::vector<IntersampleRecord> intersample;
};

struct Trajectory {
  std::vector<StepRecord> records;      // steps 0..steps (may stop early, see below)
  std::vector<std::string> warnings;    // e.g. gain below the spectral bound
  bool left_log_neighbourhood = false;  // some ||Log E_1j|| reached the chart radius
  int first_step_outside = -1;
  std::vector<Eigen::VectorXd> phase_history;  // Kuramoto mode only
};

/// Runs a scenario deterministically (same scenario, bitwise-identical
/// trajectory).  Aborts with LeftGroup when a state's membership residual
/// exceeds 1e-6; rethrows ControllerUndefined with the failing step filled
/// in.  Honors abort_outside_log_neighbourhood by truncating the run.
Trajectory run(const Scenario& sc);

/// Naive sampled Kuramoto update
///   theta_i^+ = theta_i - T sum_j a_ij sin(theta_i - theta_j).
Eigen::VectorXd kuramoto_step(const Eigen::VectorXd& theta, const RealMat& coupling,
                              double sample_period);

/// Smallest k such that ||Log E_1j[k']|| <= eps ||Log E_1j[0]|| for every
/// pair and every k' >= k (absolute floor 1e-14 for pairs starting at
/// identity).  Requires a complete unweighted graph on a commutative
/// descriptor; throws NotApplicable otherwise.  Empty when never settled
/// within the horizon.
std::optional<int> measure_settling(const Scenario& sc, const Trajectory& tr, double eps);

/// Max over pairs of |theta_i - theta_j| for a phase vector.
double phase_spread(const Eigen::VectorXd& theta);

}  // namespace liesync::sim
