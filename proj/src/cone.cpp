#include "conebellman/cone.hpp"

#include <string>

#include "conebellman/errors.hpp"
#include "conebellman/linalg.hpp"

namespace conebellman {

namespace {

void require_same_cone(const ValueObject& a, const ValueObject& b) {
  if (!(a.cone() == b.cone())) {
    throw Error(ErrorCode::kConeMismatch, "operands live in different cones");
  }
}

bool difference_in_cone(const ValueObject& hi, const ValueObject& lo) {
  const Eigen::MatrixXd diff = hi.data() - lo.data();
  if (hi.cone().kind() == ConeKind::kOrthant) {
    return diff.minCoeff() >= -kConeTolerance;
  }
  return min_eigenvalue(symmetrize(diff)) >= -kConeTolerance;
}

}  // namespace

ConeTag ConeTag::orthant(Eigen::Index dim) {
  if (dim < 1) {
    throw Error(ErrorCode::kShapeMismatch, "cone dimension must be >= 1");
  }
  return {ConeKind::kOrthant, dim};
}

ConeTag ConeTag::psd(Eigen::Index dim) {
  if (dim < 1) {
    throw Error(ErrorCode::kShapeMismatch, "cone dimension must be >= 1");
  }
  return {ConeKind::kPsd, dim};
}

ValueObject ValueObject::orthant(Eigen::VectorXd values) {
  const auto cone = ConeTag::orthant(values.size());
  return {cone, Eigen::MatrixXd(std::move(values))};
}

ValueObject ValueObject::psd(Eigen::MatrixXd values) {
  if (values.rows() != values.cols()) {
    throw Error(ErrorCode::kNonSquare, "semidefinite element must be square");
  }
  const auto cone = ConeTag::psd(values.rows());
  return from_data(cone, std::move(values));
}

ValueObject ValueObject::zero(ConeTag cone) {
  const Eigen::Index cols = cone.kind() == ConeKind::kOrthant ? 1 : cone.dim();
  return {cone, Eigen::MatrixXd::Zero(cone.dim(), cols)};
}

ValueObject ValueObject::from_data(ConeTag cone, Eigen::MatrixXd data) {
  const Eigen::Index cols = cone.kind() == ConeKind::kOrthant ? 1 : cone.dim();
  if (data.rows() != cone.dim() || data.cols() != cols) {
    throw Error(ErrorCode::kShapeMismatch,
                "data is " + std::to_string(data.rows()) + "x" +
                    std::to_string(data.cols()) + ", cone expects " +
                    std::to_string(cone.dim()) + "x" + std::to_string(cols));
  }
  if (cone.kind() == ConeKind::kPsd) {
    if (!is_symmetric(data, kSymmetryTolerance)) {
      throw Error(ErrorCode::kNotInCone, "semidefinite element is not symmetric");
    }
    data = symmetrize(data);
  }
  return {cone, std::move(data)};
}

Eigen::VectorXd ValueObject::vector() const {
  if (cone_.kind() != ConeKind::kOrthant) {
    throw Error(ErrorCode::kConeMismatch, "vector() on a matrix element");
  }
  return data_.col(0);
}

bool ValueObject::in_cone(double tol) const {
  if (cone_.kind() == ConeKind::kOrthant) return data_.minCoeff() >= -tol;
  return min_eigenvalue(data_) >= -tol;
}

bool ValueObject::in_interior() const {
  if (cone_.kind() == ConeKind::kOrthant) return data_.minCoeff() > 0.0;
  return min_eigenvalue(data_) > 0.0;
}

double ValueObject::sup_norm() const { return conebellman::sup_norm(data_); }

double cone_norm(const ValueObject& weight, const ValueObject& x) {
  require_same_cone(weight, x);
  if (!weight.in_interior()) {
    throw Error(ErrorCode::kNotInteriorWeight,
                "weight must lie in the interior of the dual cone");
  }
  if (!x.in_cone()) {
    throw Error(ErrorCode::kNotInCone, "argument is outside the cone");
  }
  return weight.data().cwiseProduct(x.data()).sum();
}

Ordering partial_order(const ValueObject& a, const ValueObject& b) {
  require_same_cone(a, b);
  const bool a_below = difference_in_cone(b, a);
  const bool b_below = difference_in_cone(a, b);
  if (a_below && b_below) return Ordering::kEqual;
  if (a_below) return Ordering::kLeq;
  if (b_below) return Ordering::kGeq;
  return Ordering::kUnordered;
}

std::pair<std::size_t, ValueObject> min_of_ordered_set(
    std::span<const ValueObject> candidates) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kEmptySet, "no candidates to minimize over");
  }
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    require_same_cone(candidates[0], candidates[i]);
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < candidates.size() && !dominated; ++j) {
      dominated = j != i &&
                  partial_order(candidates[j], candidates[i]) == Ordering::kLeq;
    }
    if (!dominated) return {i, candidates[i]};
  }
  // A finite set always has a minimal element; reaching here means the
  // tolerance made the strict order cyclic, so fall back to the first.
  return {0, candidates[0]};
}

}  // namespace conebellman
