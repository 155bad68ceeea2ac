#pragma once

// Sampled distributed synchronization law on a matrix Lie group: the
// matrix-logarithm controller, the exact closed-loop and error-level steps,
// the intersample error flow, and equilibrium residuals.

#include <vector>

#include "liesync/graph.hpp"
#include "liesync/liegroup.hpp"

namespace liesync::control {

struct ControlConfig {
  double T = 1.0;  // sampling period, > 0
  double K = 1.0;  // root gain, != 0
};

/// Throws DomainError (T <= 0) or ZeroGain (K = 0).
void validate(const ControlConfig& cfg);

/// Left-invariant relative error E_ij = X_i^{-1} X_j.
lie::GroupElement relative_error(const lie::GroupElement& xi, const lie::GroupElement& xj);

/// Weighted neighbour-error product prod_{j in N_i} E_ij^{w_ij}, factors in
/// ascending neighbour order; identity for an isolated agent.  Weighted
/// powers use the principal logarithm (weight-1 factors are used verbatim).
lie::GroupElement neighbour_error_product(int agent,
                                          const std::vector<lie::GroupElement>& states,
                                          const graph::CommGraph& g);

/// Distributed control input
///   Omega_i = (1/T) Log( (prod_{j in N_i} E_ij^{w_ij})^{1/K} ).
/// Reads only the states of agent i and its neighbours.  Throws
/// ControllerUndefined when the product has an eigenvalue on the closed
/// negative real axis; ZeroGain for K = 0.
lie::AlgebraElement controller(int agent, const std::vector<lie::GroupElement>& states,
                               const graph::CommGraph& g, const ControlConfig& cfg);

/// One synchronous step of the exact sampled closed loop: all inputs are
/// computed from the same state snapshot, then
///   X_i^+ = X_i (prod_{j in N_i} E_ij^{w_ij})^{1/K}.
std::vector<lie::GroupElement> closed_loop_step(const std::vector<lie::GroupElement>& states,
                                                const graph::CommGraph& g,
                                                const ControlConfig& cfg);

/// Full N x N matrix of relative errors (E_ii = identity).
using ErrorMatrix = std::vector<std::vector<lie::GroupElement>>;

ErrorMatrix relative_errors(const std::vector<lie::GroupElement>& states);

/// Error-level dynamics
///   E_ij^+ = (prod_p E_ip^{w_ip})^{-1/K} E_ij (prod_q E_jq^{w_jq})^{1/K},
/// consistent with relative errors of closed_loop_step outputs.
ErrorMatrix error_step(const ErrorMatrix& e, const graph::CommGraph& g,
                       const ControlConfig& cfg);

/// Intersample error flow E_ij(kT + delta) = exp(delta Omega_i)^{-1} E_ij
/// exp(delta Omega_j), 0 < delta < T.
lie::GroupElement intersample_error(const lie::GroupElement& e_ij,
                                    const lie::AlgebraElement& omega_i,
                                    const lie::AlgebraElement& omega_j, double delta,
                                    const ControlConfig& cfg);

/// max_i ||Omega_i||; zero exactly at closed-loop equilibria.
double equilibrium_residual(const std::vector<lie::GroupElement>& states,
                            const graph::CommGraph& g, const ControlConfig& cfg);

/// Distance of (L (x) I_m) t from the kernel lattice of the coordinate map
/// (per-coordinate nearest multiple of the kernel period; absolute value for
/// non-compact coordinates).  Diagnostic companion of equilibrium_residual
/// for commutative descriptors; agent coordinates are absolute.
/// Throws NotApplicable for non-commutative descriptors.
double equilibrium_lattice_residual(const lie::Descriptor& d,
                                    const std::vector<Eigen::VectorXd>& agent_coordinates,
                                    const graph::CommGraph& g);

}  // namespace liesync::control
