#include "liesync/matfun.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "liesync/errors.hpp"

namespace liesync::matfun {

namespace {

constexpr double kNegAxisImagTol = 1e-10;
constexpr double kSingularTol = 1e-12;
constexpr double kSqrtTol = 1e-14;
constexpr int kSqrtMaxIter = 60;
constexpr double kSeriesTermTol = 1e-16;
constexpr double kSeriesRadius = 0.25;

void require_square_finite(const Mat& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DomainError(std::string(who) + ": matrix must be square and non-empty");
  }
  if (!a.allFinite()) {
    throw DomainError(std::string(who) + ": matrix has non-finite entries");
  }
}

}  // namespace

double operator_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

bool effectively_real(const Mat& a, double tol) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const Complex v = a(i, j);
      if (std::abs(v.imag()) > tol * std::max(1.0, std::abs(v))) return false;
    }
  }
  return true;
}

Mat truncate_to_real(const Mat& a, double tol) {
  if (!effectively_real(a, tol)) return a;
  return a.real().cast<Complex>();
}

Spectrum spectrum(const Mat& x) {
  require_square_finite(x, "spectrum");
  Eigen::ComplexEigenSolver<Mat> solver(x, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("spectrum: eigenvalue iteration did not converge");
  }
  Spectrum s;
  s.values = solver.eigenvalues();
  s.tolerance = std::numeric_limits<double>::epsilon() * std::max(1.0, operator_norm(x));
  return s;
}

bool has_eigenvalue_on_negative_real_axis(const Spectrum& s) {
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    const Complex v = s.values(i);
    const double mag = std::abs(v);
    if (mag <= kSingularTol) return true;
    if (v.real() <= 0.0 && std::abs(v.imag()) <= kNegAxisImagTol * std::max(1.0, mag)) {
      return true;
    }
  }
  return false;
}

Mat exp_matrix(const Mat& a) {
  require_square_finite(a, "exp_matrix");
  const Eigen::Index n = a.rows();
  const double norm = operator_norm(a);
  int squarings = 0;
  if (norm > kSeriesRadius) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kSeriesRadius)));
  }
  const Mat b = a / std::pow(2.0, squarings);

  Mat sum = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  for (int k = 1; k <= 60; ++k) {
    term = (term * b) / static_cast<double>(k);
    sum += term;
    if (term.norm() <= 1e-17 * sum.norm()) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return truncate_to_real(sum);
}

Mat matrix_sqrt(const Mat& x) {
  require_square_finite(x, "matrix_sqrt");
  if (has_eigenvalue_on_negative_real_axis(spectrum(x))) {
    throw EigenvalueOnNegativeRealAxis(
        "matrix_sqrt: eigenvalue on the closed negative real axis");
  }
  const Eigen::Index n = x.rows();
  const Mat identity = Mat::Identity(n, n);
  Mat y = x;
  Mat z = identity;
  double change = std::numeric_limits<double>::max();
  for (int it = 0; it < kSqrtMaxIter; ++it) {
    // Determinant scaling accelerates convergence for spectra far from 1.
    double mu = 1.0;
    if (change > 1e-2) {
      const double d = std::abs(y.determinant() * z.determinant());
      if (std::isfinite(d) && d > 0.0) {
        mu = std::pow(d, -1.0 / (2.0 * static_cast<double>(n)));
        mu = std::clamp(mu, 1e-8, 1e8);
      }
    }
    const Mat ys = mu * y;
    const Mat zs = mu * z;
    const Mat y_next = 0.5 * (ys + zs.inverse());
    const Mat z_next = 0.5 * (zs + ys.inverse());
    change = (y_next - ys).norm() / std::max(1.0, y_next.norm());
    y = y_next;
    z = z_next;
    if (change <= kSqrtTol) {
      return y;
    }
  }
  throw NumericalFailure("matrix_sqrt: coupled iteration did not converge");
}

Mat principal_log(const Mat& x) {
  require_square_finite(x, "principal_log");
  if (has_eigenvalue_on_negative_real_axis(spectrum(x))) {
    throw EigenvalueOnNegativeRealAxis(
        "principal_log: eigenvalue on the closed negative real axis");
  }
  const Eigen::Index n = x.rows();
  const Mat identity = Mat::Identity(n, n);

  // Inverse scaling and squaring: take square roots until the alternating
  // series in (X - I) converges comfortably.
  Mat y = x;
  int halvings = 0;
  while (operator_norm(y - identity) >= kSeriesRadius) {
    y = matrix_sqrt(y);
    if (++halvings > 64) {
      throw NumericalFailure("principal_log: square-root staging did not reduce the argument");
    }
  }

  const Mat z = y - identity;
  Mat power = z;
  Mat sum = Mat::Zero(n, n);
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const Mat term = (sign / static_cast<double>(k)) * power;
    sum += term;
    if (term.norm() < kSeriesTermTol) break;
    power = power * z;
    sign = -sign;
  }
  sum *= std::pow(2.0, halvings);
  return truncate_to_real(sum);
}

Mat real_power(const Mat& x, double alpha) {
  if (alpha == 1.0) return x;
  const Eigen::Index n = x.rows();
  if (alpha == 0.0) {
    require_square_finite(x, "real_power");
    return Mat::Identity(n, n);
  }
  return exp_matrix(alpha * principal_log(x));
}

Mat kth_root(const Mat& x, double k) {
  if (k == 0.0) {
    throw ZeroGain("kth_root: K must be nonzero");
  }
  return real_power(x, 1.0 / k);
}

double log_of_power_check(const Mat& x, double alpha) {
  const Mat lx = principal_log(x);
  const Mat lp = principal_log(real_power(x, alpha));
  return operator_norm(lp - alpha * lx);
}

}  // namespace liesync::matfun
