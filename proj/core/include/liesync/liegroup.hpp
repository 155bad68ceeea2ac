#pragma once

// Matrix Lie group descriptors and the handful of group-level operations the
// synchronization stack needs: composed one-parameter flows, exponential
// coordinates, membership residuals and the BCH linearization defect.

#include <memory>
#include <string>
#include <vector>

#include "liesync/matfun.hpp"

namespace liesync::lie {

class GroupDescriptor;
using Descriptor = std::shared_ptr<const GroupDescriptor>;

/// Immutable description of a matrix Lie group: realization dimension n,
/// algebra dimension m, an ordered algebra basis, commutativity, and the
/// kernel period of each one-parameter factor (0 for non-compact factors).
class GroupDescriptor {
public:
  enum class Kind { SO2, SO3, SU2, SE2, RealLine, Product, Custom };

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int matrix_dim() const { return matrix_dim_; }
  int algebra_dim() const { return algebra_dim_; }
  const std::vector<Mat>& basis() const { return basis_; }
  bool commutative() const { return commutative_; }
  const std::vector<double>& kernel_periods() const { return kernel_periods_; }
  /// Radius of the exponential-coordinate chart (log 2 unless overridden).
  double log_radius() const { return log_radius_; }
  /// Non-empty only for product descriptors; factors appear block-diagonally
  /// in the order given.
  const std::vector<Descriptor>& factors() const { return factors_; }

  static Descriptor so2();
  static Descriptor so3();
  static Descriptor su2();
  static Descriptor se2();
  /// The real line realized as unipotent 2x2 matrices [[1, t], [0, 1]].
  static Descriptor real_line();
  /// k-torus: block-diagonal product of k planar rotation factors.
  static Descriptor torus_product(int k);
  /// Generalized cylinder: k torus factors times `lines` real-line factors.
  static Descriptor cylinder_product(int circles, int lines);
  static Descriptor direct_product(std::vector<Descriptor> factors);
  static Descriptor custom(std::string name, std::vector<Mat> basis,
                           std::vector<double> kernel_periods,
                           double log_radius = 0.0);

private:
  friend struct DescriptorBuilder;
  GroupDescriptor() = default;

  Kind kind_ = Kind::Custom;
  std::string name_;
  int matrix_dim_ = 0;
  int algebra_dim_ = 0;
  std::vector<Mat> basis_;
  bool commutative_ = false;
  std::vector<double> kernel_periods_;
  double log_radius_ = 0.0;
  std::vector<Descriptor> factors_;
};

struct GroupElement {
  Descriptor descriptor;
  Mat matrix;
};

struct AlgebraElement {
  Descriptor descriptor;
  Mat matrix;
};

struct CoordinateVector {
  Descriptor descriptor;
  Eigen::VectorXd values;
};

GroupElement identity_element(const Descriptor& d);

/// Group product (matrix product, same descriptor).
GroupElement group_mul(const GroupElement& a, const GroupElement& b);

/// Group inverse; throws DomainError on a singular (corrupted) matrix.
GroupElement group_inverse(const GroupElement& a);

/// Sum of basis elements weighted by coordinates: sum_i t_i H_i.
AlgebraElement algebra_from_coordinates(const CoordinateVector& t);

/// Composed flow phi(t) = exp(t_1 H_1) * ... * exp(t_m H_m), factors applied
/// in ascending basis-index order.
GroupElement composed_flow(const CoordinateVector& t);

/// Least-squares coordinates t of Log(X) on the algebra basis (real
/// unknowns, stacked real/imaginary parts).  Throws OutsideLogNeighbourhood
/// when the principal log is undefined, ||Log X|| >= log_radius, or Log X is
/// not in the basis span (residual above 1e-9).
CoordinateVector exponential_coordinates(const GroupElement& x);

/// Residual of the group's defining relations (0 for exact members).
/// Infinity for custom groups whose matrix has no principal logarithm.
double check_membership(const GroupElement& x);

/// || Log(exp(A) exp(B)) - (A + B) ||: the defect of the commuting-case
/// product rule; second order in the argument size on non-commutative groups.
double bch_defect(const AlgebraElement& a, const AlgebraElement& b);

/// Distance of `a` to the span of the descriptor's basis (least squares).
double algebra_projection_residual(const Descriptor& d, const Mat& a);

/// Least-squares coordinates of an algebra matrix on the basis.
Eigen::VectorXd algebra_coordinates(const Descriptor& d, const Mat& a);

/// Structured-text (JSON) serialization of descriptors; inverse of each
/// other.  Custom bases are encoded as row-major [re, im] pairs.
std::string descriptor_to_text(const Descriptor& d);
Descriptor descriptor_from_text(const std::string& text);

}  // namespace liesync::lie
