#include "liesync/liegroup.hpp"

#include <Eigen/LU>
#include <cmath>
#include <numbers>
#include <utility>

#include "liesync/errors.hpp"

namespace liesync::lie {

namespace {

constexpr double kBasisIndependenceTol = 1e-8;
constexpr double kCommutatorTol = 1e-12;
constexpr double kSpanResidualTol = 1e-9;

const double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

Mat rot_generator() {
  Mat j(2, 2);
  j << 0, -1, 1, 0;
  return j;
}

/// Real least-squares system: columns are stacked [Re vec(H_i); Im vec(H_i)].
Eigen::MatrixXd stacked_basis_matrix(const std::vector<Mat>& basis) {
  const Eigen::Index n2 = basis.empty() ? 0 : basis[0].size();
  Eigen::MatrixXd a(2 * n2, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Mat& h = basis[i];
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      for (Eigen::Index q = 0; q < h.rows(); ++q) {
        a(r, static_cast<Eigen::Index>(i)) = h(q, c).real();
        a(n2 + r, static_cast<Eigen::Index>(i)) = h(q, c).imag();
        ++r;
      }
    }
  }
  return a;
}

Eigen::VectorXd stacked_vector(const Mat& m) {
  const Eigen::Index n2 = m.size();
  Eigen::VectorXd b(2 * n2);
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index q = 0; q < m.rows(); ++q) {
      b(r) = m(q, c).real();
      b(n2 + r) = m(q, c).imag();
      ++r;
    }
  }
  return b;
}

double imag_residual(const Mat& x) {
  double r = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      r = std::max(r, std::abs(x(i, j).imag()));
    }
  }
  return r;
}

double rotation_block_residual(const Mat& x) {
  const Eigen::Index n = x.rows();
  const Mat gram = x.transpose() * x - Mat::Identity(n, n);
  const double det_dev = std::abs(x.determinant() - Complex(1.0, 0.0));
  return std::max({imag_residual(x), matfun::operator_norm(gram), det_dev});
}

double unitary_residual(const Mat& x) {
  const Eigen::Index n = x.rows();
  const Mat gram = x.adjoint() * x - Mat::Identity(n, n);
  const double det_dev = std::abs(x.determinant() - Complex(1.0, 0.0));
  return std::max(matfun::operator_norm(gram), det_dev);
}

double real_line_residual(const Mat& x) {
  return std::max({imag_residual(x), std::abs(x(0, 0) - Complex(1, 0)),
                   std::abs(x(1, 1) - Complex(1, 0)), std::abs(x(1, 0))});
}

double se2_residual(const Mat& x) {
  const Mat r = x.block(0, 0, 2, 2);
  double bottom = std::max({std::abs(x(2, 0)), std::abs(x(2, 1)),
                            std::abs(x(2, 2) - Complex(1, 0))});
  return std::max(rotation_block_residual(r), bottom);
}

}  // namespace

struct DescriptorBuilder {
  static Descriptor make(GroupDescriptor::Kind kind, std::string name, int n,
                         std::vector<Mat> basis, bool commutative,
                         std::vector<double> periods, double log_radius,
                         std::vector<Descriptor> factors = {}) {
    if (basis.empty()) {
      throw DomainError("descriptor: empty algebra basis");
    }
    for (const Mat& h : basis) {
      if (h.rows() != n || h.cols() != n) {
        throw DomainError("descriptor: basis dimension mismatch");
      }
    }
    if (periods.size() != basis.size()) {
      throw DomainError("descriptor: one kernel period per basis element required");
    }
    {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked_basis_matrix(basis));
      if (svd.singularValues().minCoeff() <= kBasisIndependenceTol) {
        throw DomainError("descriptor: basis matrices are not linearly independent");
      }
    }
    auto d = std::shared_ptr<GroupDescriptor>(new GroupDescriptor());
    d->kind_ = kind;
    d->name_ = std::move(name);
    d->matrix_dim_ = n;
    d->algebra_dim_ = static_cast<int>(basis.size());
    d->basis_ = std::move(basis);
    d->commutative_ = commutative;
    d->kernel_periods_ = std::move(periods);
    d->log_radius_ = log_radius > 0.0 ? log_radius : std::log(2.0);
    d->factors_ = std::move(factors);
    return d;
  }

  static bool pairwise_commuting(const std::vector<Mat>& basis) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (std::size_t j = i + 1; j < basis.size(); ++j) {
        const Mat c = basis[i] * basis[j] - basis[j] * basis[i];
        if (matfun::operator_norm(c) > kCommutatorTol) return false;
      }
    }
    return true;
  }
};

Descriptor GroupDescriptor::so2() {
  static const Descriptor d = DescriptorBuilder::make(
      Kind::SO2, "SO2", 2, {rot_generator().cast<Complex>()}, true, {2 * kPi}, 0.0);
  return d;
}

Descriptor GroupDescriptor::so3() {
  static const Descriptor d = [] {
    Mat l1 = Mat::Zero(3, 3), l2 = Mat::Zero(3, 3), l3 = Mat::Zero(3, 3);
    l1(1, 2) = -1; l1(2, 1) = 1;
    l2(0, 2) = 1;  l2(2, 0) = -1;
    l3(0, 1) = -1; l3(1, 0) = 1;
    return DescriptorBuilder::make(Kind::SO3, "SO3", 3, {l1, l2, l3}, false,
                                   {2 * kPi, 2 * kPi, 2 * kPi}, 0.0);
  }();
  return d;
}

Descriptor GroupDescriptor::su2() {
  static const Descriptor d = [] {
    Mat s1 = Mat::Zero(2, 2), s2 = Mat::Zero(2, 2), s3 = Mat::Zero(2, 2);
    s1(0, 1) = kI; s1(1, 0) = kI;
    s2(0, 1) = -1; s2(1, 0) = 1;
    s3(0, 0) = kI; s3(1, 1) = -kI;
    return DescriptorBuilder::make(Kind::SU2, "SU2", 2, {s1, s2, s3}, false,
                                   {2 * kPi, 2 * kPi, 2 * kPi}, 0.0);
  }();
  return d;
}

Descriptor GroupDescriptor::se2() {
  static const Descriptor d = [] {
    Mat g1 = Mat::Zero(3, 3), g2 = Mat::Zero(3, 3), g3 = Mat::Zero(3, 3);
    g1(0, 1) = -1; g1(1, 0) = 1;   // rotation
    g2(0, 2) = 1;                  // x translation
    g3(1, 2) = 1;                  // y translation
    return DescriptorBuilder::make(Kind::SE2, "SE2", 3, {g1, g2, g3}, false,
                                   {2 * kPi, 0.0, 0.0}, 0.0);
  }();
  return d;
}

Descriptor GroupDescriptor::real_line() {
  static const Descriptor d = [] {
    Mat h = Mat::Zero(2, 2);
    h(0, 1) = 1;
    return DescriptorBuilder::make(Kind::RealLine, "RealLine", 2, {h}, true, {0.0}, 0.0);
  }();
  return d;
}

namespace {

Descriptor product_descriptor(std::vector<Descriptor> factors, std::string name) {
  if (factors.empty()) {
    throw DomainError("direct_product: at least one factor required");
  }
  int n = 0, m = 0;
  bool commutative = true;
  for (const Descriptor& f : factors) {
    n += f->matrix_dim();
    m += f->algebra_dim();
    commutative = commutative && f->commutative();
  }
  std::vector<Mat> basis;
  basis.reserve(m);
  std::vector<double> periods;
  periods.reserve(m);
  int offset = 0;
  for (const Descriptor& f : factors) {
    for (int b = 0; b < f->algebra_dim(); ++b) {
      Mat h = Mat::Zero(n, n);
      h.block(offset, offset, f->matrix_dim(), f->matrix_dim()) = f->basis()[b];
      basis.push_back(std::move(h));
      periods.push_back(f->kernel_periods()[b]);
    }
    offset += f->matrix_dim();
  }
  return DescriptorBuilder::make(GroupDescriptor::Kind::Product, std::move(name), n,
                                 std::move(basis), commutative, std::move(periods), 0.0,
                                 std::move(factors));
}

}  // namespace

Descriptor GroupDescriptor::direct_product(std::vector<Descriptor> factors) {
  std::string name = "DirectProduct(";
  for (std::size_t i = 0; i < factors.size(); ++i) {
    name += (i ? "," : "") + factors[i]->name();
  }
  name += ")";
  return product_descriptor(std::move(factors), std::move(name));
}

Descriptor GroupDescriptor::torus_product(int k) {
  if (k < 1) throw DomainError("torus_product: k >= 1 required");
  std::vector<Descriptor> f(static_cast<std::size_t>(k), so2());
  return product_descriptor(std::move(f), "TorusProduct(" + std::to_string(k) + ")");
}

Descriptor GroupDescriptor::cylinder_product(int circles, int lines) {
  if (circles < 0 || lines < 0 || circles + lines < 1) {
    throw DomainError("cylinder_product: nonnegative factor counts summing to >= 1 required");
  }
  std::vector<Descriptor> f;
  for (int i = 0; i < circles; ++i) f.push_back(so2());
  for (int i = 0; i < lines; ++i) f.push_back(real_line());
  return product_descriptor(std::move(f), "CylinderProduct(" + std::to_string(circles) + "," +
                                              std::to_string(lines) + ")");
}

Descriptor GroupDescriptor::custom(std::string name, std::vector<Mat> basis,
                                   std::vector<double> kernel_periods,
                                   double log_radius) {
  if (basis.empty()) throw DomainError("custom descriptor: empty basis");
  const int n = static_cast<int>(basis[0].rows());
  const bool commutative = DescriptorBuilder::pairwise_commuting(basis);
  return DescriptorBuilder::make(Kind::Custom, std::move(name), n, std::move(basis),
                                 commutative, std::move(kernel_periods), log_radius);
}

GroupElement identity_element(const Descriptor& d) {
  return {d, Mat::Identity(d->matrix_dim(), d->matrix_dim())};
}

GroupElement group_mul(const GroupElement& a, const GroupElement& b) {
  if (a.descriptor != b.descriptor) {
    throw DomainError("group_mul: descriptor mismatch");
  }
  return {a.descriptor, a.matrix * b.matrix};
}

GroupElement group_inverse(const GroupElement& a) {
  Eigen::FullPivLU<Mat> lu(a.matrix);
  if (!lu.isInvertible()) {
    throw DomainError("group_inverse: singular matrix (corrupted state)");
  }
  return {a.descriptor, lu.inverse()};
}

AlgebraElement algebra_from_coordinates(const CoordinateVector& t) {
  const Descriptor& d = t.descriptor;
  if (t.values.size() != d->algebra_dim()) {
    throw DomainError("algebra_from_coordinates: coordinate dimension mismatch");
  }
  Mat a = Mat::Zero(d->matrix_dim(), d->matrix_dim());
  for (int i = 0; i < d->algebra_dim(); ++i) {
    a += Complex(t.values(i), 0.0) * d->basis()[i];
  }
  return {d, std::move(a)};
}

GroupElement composed_flow(const CoordinateVector& t) {
  const Descriptor& d = t.descriptor;
  if (t.values.size() != d->algebra_dim()) {
    throw DomainError("composed_flow: coordinate dimension mismatch");
  }
  if (!t.values.allFinite()) {
    throw DomainError("composed_flow: non-finite coordinates");
  }
  Mat x = Mat::Identity(d->matrix_dim(), d->matrix_dim());
  for (int i = 0; i < d->algebra_dim(); ++i) {
    x = x * matfun::exp_matrix(Complex(t.values(i), 0.0) * d->basis()[i]);
  }
  return {d, std::move(x)};
}

CoordinateVector exponential_coordinates(const GroupElement& x) {
  const Descriptor& d = x.descriptor;
  Mat logx;
  try {
    logx = matfun::principal_log(x.matrix);
  } catch (const EigenvalueOnNegativeRealAxis&) {
    throw OutsideLogNeighbourhood(
        "exponential_coordinates: principal logarithm undefined for this element");
  }
  if (matfun::operator_norm(logx) >= d->log_radius()) {
    throw OutsideLogNeighbourhood(
        "exponential_coordinates: element outside the log-chart radius");
  }
  const Eigen::MatrixXd a = stacked_basis_matrix(d->basis());
  const Eigen::VectorXd b = stacked_vector(logx);
  const Eigen::VectorXd t = a.colPivHouseholderQr().solve(b);
  const double residual = (a * t - b).norm();
  if (residual > kSpanResidualTol * std::max(1.0, b.norm())) {
    throw OutsideLogNeighbourhood(
        "exponential_coordinates: logarithm not in the algebra span");
  }
  return {d, t};
}

double check_membership(const GroupElement& x) {
  const Descriptor& d = x.descriptor;
  const Mat& m = x.matrix;
  if (m.rows() != d->matrix_dim() || m.cols() != d->matrix_dim()) {
    throw DomainError("check_membership: matrix dimension mismatch");
  }
  switch (d->kind()) {
    case GroupDescriptor::Kind::SO2:
    case GroupDescriptor::Kind::SO3:
      return rotation_block_residual(m);
    case GroupDescriptor::Kind::SU2:
      return unitary_residual(m);
    case GroupDescriptor::Kind::SE2:
      return se2_residual(m);
    case GroupDescriptor::Kind::RealLine:
      return real_line_residual(m);
    case GroupDescriptor::Kind::Product: {
      double r = 0.0;
      int offset = 0;
      for (const Descriptor& f : d->factors()) {
        const int fn = f->matrix_dim();
        GroupElement sub{f, m.block(offset, offset, fn, fn)};
        r = std::max(r, check_membership(sub));
        // Everything outside the diagonal blocks must vanish.
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          for (Eigen::Index q = offset; q < offset + fn; ++q) {
            if (c < offset || c >= offset + fn) {
              r = std::max(r, std::abs(m(q, c)));
            }
          }
        }
        offset += fn;
      }
      return r;
    }
    case GroupDescriptor::Kind::Custom: {
      try {
        const Mat logx = matfun::principal_log(m);
        return algebra_projection_residual(d, logx);
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    }
  }
  throw DomainError("check_membership: unknown descriptor kind");
}

double bch_defect(const AlgebraElement& a, const AlgebraElement& b) {
  if (a.descriptor != b.descriptor) {
    throw DomainError("bch_defect: descriptor mismatch");
  }
  const Mat prod = matfun::exp_matrix(a.matrix) * matfun::exp_matrix(b.matrix);
  const Mat log_prod = matfun::principal_log(prod);
  return matfun::operator_norm(log_prod - (a.matrix + b.matrix));
}

double algebra_projection_residual(const Descriptor& d, const Mat& a) {
  const Eigen::MatrixXd basis = stacked_basis_matrix(d->basis());
  const Eigen::VectorXd b = stacked_vector(a);
  const Eigen::VectorXd t = basis.colPivHouseholderQr().solve(b);
  return (basis * t - b).norm();
}

Eigen::VectorXd algebra_coordinates(const Descriptor& d, const Mat& a) {
  const Eigen::MatrixXd basis = stacked_basis_matrix(d->basis());
  const Eigen::VectorXd b = stacked_vector(a);
  return basis.colPivHouseholderQr().solve(b);
}

}  // namespace liesync::lie
