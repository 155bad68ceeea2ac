#pragma once

// Exponential-coordinate linear error model of the sampled loop: the stacked
// state matrix, its spectral stability verdict, and closed-form settling
// analysis for the complete unweighted graph.

#include "liesync/graph.hpp"

namespace liesync::lincoord {

/// Stacked relative coordinates t = (p_11, p_12, ..., p_1N); the leading
/// block is identically zero.
struct StackedCoordinates {
  int agents = 0;  // N
  int dim = 0;     // m
  Eigen::VectorXd values;  // length N*m
};

StackedCoordinates make_stacked(int agents, int dim, Eigen::VectorXd values);

/// State matrix (I_N + (1 l_1^T - L)/K) (x) I_m of the linear error model.
RealMat state_matrix(const graph::LaplacianReport& rep, double k, int m);

struct SpectralReport {
  Eigen::VectorXcd laplacian_eigenvalues;
  Eigen::VectorXcd mapped_eigenvalues;      // 1 - v/K over the Laplacian spectrum
  Eigen::VectorXcd full_eigenvalues;        // of the N x N coefficient matrix
  Eigen::VectorXcd restricted_eigenvalues;  // invariant-subspace restriction
  double spectral_radius = 0.0;             // on the restriction
  bool stable = false;                      // strict: radius < 1
  double gain = 0.0;                        // K used
  double exact_bound = 0.0;                 // graph-specific threshold
  double kmin = 0.0;                        // worst-case closed form for this N
};

/// Spectral stability verdict for gain K on the given graph.  The
/// restriction to the invariant subspace {p_11 = 0} is computed by deleting
/// the leading row/column of the coefficient matrix after verifying its
/// identity row; its eigenvalues equal {1 - v/K : v an eigenvalue of L}
/// minus one zero.  Throws Disconnected / ZeroGain.
SpectralReport stability_verdict(const graph::LaplacianReport& rep, double k);

/// One step of the linear model: t+ = A t (A from state_matrix).
StackedCoordinates linear_step(const StackedCoordinates& t, const RealMat& a);

struct SettlingTime {
  int steps = 0;
  bool deadbeat = false;  // gain equal to the agent count: one-step sync
};

/// Closed-form epsilon-settling time on the complete unweighted graph:
/// ceil(log eps / log(|K - N|/K)); 1 at the deadbeat gain K = N.
/// Throws Unstable when |K - N|/K >= 1, ZeroGain for K = 0, DomainError for
/// N < 2 or eps outside (0, 1).
SettlingTime settling_time(int n, double k, double eps);

/// Un-ceiled settling exponent log(eps)/log(|K - N|/K); requires K != N.
double settling_time_real(int n, double k, double eps);

/// Closed-form derivative of the un-ceiled settling time with respect to K:
///   log(eps) N (N - K) / (K |K - N|^2 log^2(|K - N|/K)).
/// Positive for K > N, negative for K < N.
double settling_time_derivative(int n, double k, double eps);

}  // namespace liesync::lincoord
