#include "liesync/lincoord.hpp"

#include <cmath>

#include "liesync/errors.hpp"

namespace liesync::lincoord {

namespace {

void validate_settling_args(int n, double k, double eps) {
  if (n < 2) throw DomainError("settling_time: N >= 2 required");
  if (k == 0.0 || !std::isfinite(k)) throw ZeroGain("settling_time: gain K must be nonzero");
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw DomainError("settling_time: eps must lie in (0, 1)");
  }
}

double contraction_ratio(int n, double k) {
  return std::abs(k - static_cast<double>(n)) / std::abs(k);
}

/// N x N coefficient matrix I + (1 l_1^T - L)/K of the linear model.
RealMat coefficient_matrix(const RealMat& l, double k) {
  const Eigen::Index n = l.rows();
  const RealMat ones_l1 = RealMat::Ones(n, 1) * l.row(0);
  return RealMat::Identity(n, n) + (ones_l1 - l) / k;
}

}  // namespace

StackedCoordinates make_stacked(int agents, int dim, Eigen::VectorXd values) {
  if (agents < 1 || dim < 1 || values.size() != static_cast<Eigen::Index>(agents) * dim) {
    throw DomainError("make_stacked: dimension mismatch");
  }
  for (int c = 0; c < dim; ++c) {
    if (values(c) != 0.0) {
      throw DomainError("make_stacked: reference block p_11 must be zero");
    }
  }
  return {agents, dim, std::move(values)};
}

RealMat state_matrix(const graph::LaplacianReport& rep, double k, int m) {
  if (k == 0.0 || !std::isfinite(k)) throw ZeroGain("state_matrix: gain K must be nonzero");
  if (m < 1) throw DomainError("state_matrix: coordinate dimension m >= 1 required");
  const RealMat coeff = coefficient_matrix(rep.l, k);
  const Eigen::Index n = coeff.rows();
  RealMat a = RealMat::Zero(n * m, n * m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a.block(i * m, j * m, m, m) = coeff(i, j) * RealMat::Identity(m, m);
    }
  }
  return a;
}

SpectralReport stability_verdict(const graph::LaplacianReport& rep, double k) {
  if (k == 0.0 || !std::isfinite(k)) {
    throw ZeroGain("stability_verdict: gain K must be nonzero");
  }
  if (!rep.connected) {
    throw Disconnected("stability_verdict: graph is not connected");
  }
  const Eigen::Index n = rep.l.rows();
  if (n < 2) throw DomainError("stability_verdict: at least two agents required");

  const RealMat coeff = coefficient_matrix(rep.l, k);
  // Row 1 of 1 l_1^T - L vanishes identically, so the first row of the
  // coefficient matrix is the identity row and {p_11 = 0} is invariant.
  if ((coeff.row(0) - RealMat::Identity(n, n).row(0)).cwiseAbs().maxCoeff() > 1e-12) {
    throw NumericalFailure("stability_verdict: leading identity row violated");
  }

  SpectralReport report;
  report.gain = k;
  report.laplacian_eigenvalues = rep.spectrum.values;
  report.mapped_eigenvalues =
      Eigen::VectorXcd::Ones(n) - rep.spectrum.values / Complex(k, 0.0);
  report.full_eigenvalues = matfun::spectrum(coeff.cast<Complex>()).values;
  const RealMat restricted = coeff.bottomRightCorner(n - 1, n - 1);
  report.restricted_eigenvalues = matfun::spectrum(restricted.cast<Complex>()).values;
  report.spectral_radius = report.restricted_eigenvalues.cwiseAbs().maxCoeff();
  report.stable = report.spectral_radius < 1.0;
  report.exact_bound = graph::exact_gain_bound(rep);
  report.kmin = graph::kmin_closed_form(static_cast<int>(n));
  return report;
}

StackedCoordinates linear_step(const StackedCoordinates& t, const RealMat& a) {
  if (a.rows() != t.values.size() || a.cols() != t.values.size()) {
    throw DomainError("linear_step: state matrix dimension mismatch");
  }
  StackedCoordinates next = t;
  next.values = a * t.values;
  return next;
}

SettlingTime settling_time(int n, double k, double eps) {
  validate_settling_args(n, k, eps);
  if (k == static_cast<double>(n)) {
    return {1, true};  // deadbeat gain: sync after a single step
  }
  const double ratio = contraction_ratio(n, k);
  if (ratio >= 1.0) {
    throw Unstable("settling_time: |K - N|/K >= 1, the loop does not contract");
  }
  const double raw = std::log(eps) / std::log(ratio);
  // Guard exact-boundary cases against one-ulp overshoot before the ceiling.
  return {static_cast<int>(std::ceil(raw - 1e-12)), false};
}

double settling_time_real(int n, double k, double eps) {
  validate_settling_args(n, k, eps);
  if (k == static_cast<double>(n)) {
    throw DomainError("settling_time_real: undefined at the deadbeat gain K = N");
  }
  const double ratio = contraction_ratio(n, k);
  if (ratio >= 1.0) {
    throw Unstable("settling_time_real: |K - N|/K >= 1, the loop does not contract");
  }
  return std::log(eps) / std::log(ratio);
}

double settling_time_derivative(int n, double k, double eps) {
  validate_settling_args(n, k, eps);
  if (k == static_cast<double>(n)) {
    throw DomainError("settling_time_derivative: undefined at the deadbeat gain K = N");
  }
  const double ratio = contraction_ratio(n, k);
  if (ratio >= 1.0) {
    throw Unstable("settling_time_derivative: |K - N|/K >= 1");
  }
  const double nd = n;
  const double lr = std::log(ratio);
  return std::log(eps) * nd * (nd - k) / (k * (k - nd) * (k - nd) * lr * lr);
}

}  // namespace liesync::lincoord
