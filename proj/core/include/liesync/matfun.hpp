#pragma once

// Dense matrix functions used by the synchronization stack: exponential,
// principal logarithm, real matrix powers and K-th roots.  All routines are
// deterministic and validate their spectra before branching functions are
// applied.

#include <Eigen/Dense>
#include <complex>

namespace liesync {

using Mat = Eigen::MatrixXcd;
using RealMat = Eigen::MatrixXd;
using Complex = std::complex<double>;

}  // namespace liesync

namespace liesync::matfun {

/// Eigenvalues of a square matrix plus the scale used for degeneracy
/// decisions by downstream consumers.
struct Spectrum {
  Eigen::VectorXcd values;
  double tolerance = 0.0;
};

/// Largest singular value (induced Euclidean norm).
double operator_norm(const Mat& a);

/// True when every entry's imaginary part is below `tol * max(1, |entry|)`.
bool effectively_real(const Mat& a, double tol = 1e-12);

/// Drop imaginary parts when the input is effectively real.
Mat truncate_to_real(const Mat& a, double tol = 1e-12);

/// Full eigenvalue set via a dense complex eigensolver.
/// Throws NumericalFailure if the QR iteration does not converge.
Spectrum spectrum(const Mat& x);

/// Detects eigenvalues on the closed negative real axis:
/// Re(v) <= 0 and |Im(v)| <= 1e-10 * max(1, |v|), or |v| <= 1e-12 (singular).
bool has_eigenvalue_on_negative_real_axis(const Spectrum& s);

/// Matrix exponential (scaling and squaring with a truncated Taylor core).
Mat exp_matrix(const Mat& a);

/// Principal square root via a coupled (Denman-Beavers style) iteration with
/// determinant scaling.  Requires no eigenvalues on the closed negative real
/// axis; tolerance 1e-14, at most 60 iterations.
Mat matrix_sqrt(const Mat& x);

/// Principal logarithm: unique logarithm with spectrum in the open strip
/// -pi < Im(z) < pi.  Inverse scaling and squaring: repeated principal
/// square roots until ||X - I|| < 0.25, then the alternating series in
/// (X - I), then multiplication by 2^s.  Real input yields a real result.
/// Throws EigenvalueOnNegativeRealAxis when the principal branch is
/// undefined.
Mat principal_log(const Mat& x);

/// Real matrix power X^alpha = exp(alpha * Log X).
Mat real_power(const Mat& x, double alpha);

/// Principal K-th root X^(1/K) = exp(Log(X)/K).  Throws ZeroGain for K = 0.
Mat kth_root(const Mat& x, double k);

/// Residual || Log(X^alpha) - alpha * Log(X) || for |alpha| <= 1.
/// Zero (to rounding) whenever the principal branch applies.
double log_of_power_check(const Mat& x, double alpha);

}  // namespace liesync::matfun
