#pragma once

#include <cstddef>
#include <span>
#include <utility>

#include <Eigen/Dense>

namespace conebellman {

/// Membership tolerance for both cones.
inline constexpr double kConeTolerance = 1e-10;
/// Relative asymmetry accepted before a matrix is symmetrized.
inline constexpr double kSymmetryTolerance = 1e-12;

enum class ConeKind { kOrthant, kPsd };

/// Identifies the proper cone that orders a problem's value object. Both
/// supported cones are self-dual, so the same tag describes the dual cone.
class ConeTag {
 public:
  static ConeTag orthant(Eigen::Index dim);
  static ConeTag psd(Eigen::Index dim);

  [[nodiscard]] ConeKind kind() const { return kind_; }
  [[nodiscard]] Eigen::Index dim() const { return dim_; }

  bool operator==(const ConeTag&) const = default;

 private:
  ConeTag(ConeKind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {}

  ConeKind kind_;
  Eigen::Index dim_;
};

/// An element of the ambient space of a cone: a dim-vector (stored dim x 1)
/// for the orthant, a symmetric dim x dim matrix for the semidefinite cone.
/// The element need not lie in the cone; use in_cone() to check.
class ValueObject {
 public:
  static ValueObject orthant(Eigen::VectorXd values);
  /// Rejects matrices asymmetric beyond kSymmetryTolerance, then symmetrizes.
  static ValueObject psd(Eigen::MatrixXd values);
  static ValueObject zero(ConeTag cone);
  /// Wraps raw storage shaped for `cone`.
  static ValueObject from_data(ConeTag cone, Eigen::MatrixXd data);

  [[nodiscard]] const ConeTag& cone() const { return cone_; }
  [[nodiscard]] const Eigen::MatrixXd& data() const { return data_; }
  /// Orthant elements only.
  [[nodiscard]] Eigen::VectorXd vector() const;

  [[nodiscard]] bool in_cone(double tol = kConeTolerance) const;
  /// Strict interior: all entries positive / positive definite.
  [[nodiscard]] bool in_interior() const;
  [[nodiscard]] double sup_norm() const;

 private:
  ValueObject(ConeTag cone, Eigen::MatrixXd data)
      : cone_(cone), data_(std::move(data)) {}

  ConeTag cone_;
  Eigen::MatrixXd data_;
};

/// Cone linear absolute norm ‖x‖_w = ⟨w, x⟩ of a cone element x under an
/// interior weight w. Dot product on the orthant, Frobenius product on the
/// semidefinite cone.
double cone_norm(const ValueObject& weight, const ValueObject& x);

enum class Ordering { kLeq, kGeq, kEqual, kUnordered };

/// Classifies a against b in the cone order (a ⪯ b iff b - a in the cone).
Ordering partial_order(const ValueObject& a, const ValueObject& b);

/// Returns the lowest-index minimal element: the first candidate that no
/// other candidate lies strictly below.
std::pair<std::size_t, ValueObject> min_of_ordered_set(
    std::span<const ValueObject> candidates);

}  // namespace conebellman
