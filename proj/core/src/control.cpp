#include "liesync/control.hpp"

#include <cmath>

#include "liesync/errors.hpp"

namespace liesync::control {

namespace {

/// E^w with the principal branch; weight-1 factors pass through untouched.
Mat weighted_power(const Mat& e, double w, int agent) {
  if (w == 1.0) return e;
  try {
    return matfun::real_power(e, w);
  } catch (const EigenvalueOnNegativeRealAxis& ex) {
    throw ControllerUndefined(agent, -1, ex.what());
  }
}

Mat log_or_controller_undefined(const Mat& x, int agent) {
  try {
    return matfun::principal_log(x);
  } catch (const EigenvalueOnNegativeRealAxis& ex) {
    throw ControllerUndefined(agent, -1, ex.what());
  }
}

}  // namespace

void validate(const ControlConfig& cfg) {
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) {
    throw DomainError("control config: sampling period T must be positive");
  }
  if (cfg.K == 0.0 || !std::isfinite(cfg.K)) {
    throw ZeroGain("control config: gain K must be nonzero");
  }
}

lie::GroupElement relative_error(const lie::GroupElement& xi, const lie::GroupElement& xj) {
  if (xi.descriptor != xj.descriptor) {
    throw DomainError("relative_error: descriptor mismatch");
  }
  return lie::group_mul(lie::group_inverse(xi), xj);
}

lie::GroupElement neighbour_error_product(int agent,
                                          const std::vector<lie::GroupElement>& states,
                                          const graph::CommGraph& g) {
  if (agent < 0 || agent >= g.size() || states.size() != static_cast<std::size_t>(g.size())) {
    throw DomainError("neighbour_error_product: agent index / state count mismatch");
  }
  const lie::GroupElement& xi = states[static_cast<std::size_t>(agent)];
  Mat prod = Mat::Identity(xi.descriptor->matrix_dim(), xi.descriptor->matrix_dim());
  for (const auto& [j, w] : g.neighbours(agent)) {
    const lie::GroupElement e = relative_error(xi, states[static_cast<std::size_t>(j)]);
    prod = prod * weighted_power(e.matrix, w, agent);
  }
  return {xi.descriptor, std::move(prod)};
}

lie::AlgebraElement controller(int agent, const std::vector<lie::GroupElement>& states,
                               const graph::CommGraph& g, const ControlConfig& cfg) {
  validate(cfg);
  const lie::GroupElement prod = neighbour_error_product(agent, states, g);
  const Mat logp = log_or_controller_undefined(prod.matrix, agent);
  return {prod.descriptor, logp / (cfg.T * cfg.K)};
}

std::vector<lie::GroupElement> closed_loop_step(const std::vector<lie::GroupElement>& states,
                                                const graph::CommGraph& g,
                                                const ControlConfig& cfg) {
  validate(cfg);
  // Synchronous update: every input is computed from the same snapshot.
  std::vector<lie::AlgebraElement> inputs;
  inputs.reserve(states.size());
  for (int i = 0; i < g.size(); ++i) {
    inputs.push_back(controller(i, states, g, cfg));
  }
  std::vector<lie::GroupElement> next;
  next.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const Mat flow = matfun::exp_matrix(cfg.T * inputs[i].matrix);
    next.push_back({states[i].descriptor, states[i].matrix * flow});
  }
  return next;
}

ErrorMatrix relative_errors(const std::vector<lie::GroupElement>& states) {
  const std::size_t n = states.size();
  ErrorMatrix e(n, std::vector<lie::GroupElement>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const lie::GroupElement inv = lie::group_inverse(states[i]);
    for (std::size_t j = 0; j < n; ++j) {
      e[i][j] = {states[i].descriptor, inv.matrix * states[j].matrix};
    }
  }
  return e;
}

ErrorMatrix error_step(const ErrorMatrix& e, const graph::CommGraph& g,
                       const ControlConfig& cfg) {
  validate(cfg);
  const int n = g.size();
  if (e.size() != static_cast<std::size_t>(n)) {
    throw DomainError("error_step: error matrix size mismatch");
  }
  // Per-agent neighbour products and their +-1/K powers, from the snapshot.
  std::vector<Mat> pow_pos(static_cast<std::size_t>(n));
  std::vector<Mat> pow_neg(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& row = e[static_cast<std::size_t>(i)];
    if (row.size() != static_cast<std::size_t>(n)) {
      throw DomainError("error_step: error matrix size mismatch");
    }
    const int dim = row[0].descriptor->matrix_dim();
    Mat prod = Mat::Identity(dim, dim);
    for (const auto& [j, w] : g.neighbours(i)) {
      prod = prod * weighted_power(row[static_cast<std::size_t>(j)].matrix, w, i);
    }
    const Mat logp = log_or_controller_undefined(prod, i);
    pow_pos[static_cast<std::size_t>(i)] = matfun::exp_matrix(logp / cfg.K);
    pow_neg[static_cast<std::size_t>(i)] = matfun::exp_matrix(-logp / cfg.K);
  }
  ErrorMatrix next(static_cast<std::size_t>(n),
                   std::vector<lie::GroupElement>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto& eij = e[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = {
          eij.descriptor, pow_neg[static_cast<std::size_t>(i)] * eij.matrix *
                              pow_pos[static_cast<std::size_t>(j)]};
    }
  }
  return next;
}

lie::GroupElement intersample_error(const lie::GroupElement& e_ij,
                                    const lie::AlgebraElement& omega_i,
                                    const lie::AlgebraElement& omega_j, double delta,
                                    const ControlConfig& cfg) {
  validate(cfg);
  if (!(delta > 0.0) || !(delta < cfg.T)) {
    throw DomainError("intersample_error: delta must lie strictly inside (0, T)");
  }
  const Mat left = matfun::exp_matrix(-delta * omega_i.matrix);
  const Mat right = matfun::exp_matrix(delta * omega_j.matrix);
  return {e_ij.descriptor, left * e_ij.matrix * right};
}

double equilibrium_residual(const std::vector<lie::GroupElement>& states,
                            const graph::CommGraph& g, const ControlConfig& cfg) {
  double residual = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const lie::AlgebraElement omega = controller(i, states, g, cfg);
    residual = std::max(residual, matfun::operator_norm(omega.matrix));
  }
  return residual;
}

double equilibrium_lattice_residual(const lie::Descriptor& d,
                                    const std::vector<Eigen::VectorXd>& agent_coordinates,
                                    const graph::CommGraph& g) {
  if (!d->commutative()) {
    throw NotApplicable(
        "equilibrium_lattice_residual: lattice congruence applies to commutative "
        "descriptors only");
  }
  const int n = g.size();
  const int m = d->algebra_dim();
  if (agent_coordinates.size() != static_cast<std::size_t>(n)) {
    throw DomainError("equilibrium_lattice_residual: one coordinate vector per agent required");
  }
  const RealMat l = graph::laplacian(g).l;
  double residual = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < m; ++c) {
      double y = 0.0;
      for (int j = 0; j < n; ++j) {
        if (agent_coordinates[static_cast<std::size_t>(j)].size() != m) {
          throw DomainError("equilibrium_lattice_residual: coordinate dimension mismatch");
        }
        y += l(i, j) * agent_coordinates[static_cast<std::size_t>(j)](c);
      }
      const double period = d->kernel_periods()[static_cast<std::size_t>(c)];
      if (period > 0.0) {
        const double k = std::round(y / period);
        residual = std::max(residual, std::abs(y - k * period));
      } else {
        residual = std::max(residual, std::abs(y));
      }
    }
  }
  return residual;
}

}  // namespace liesync::control
