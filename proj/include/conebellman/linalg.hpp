#pragma once

#include <Eigen/Dense>

namespace conebellman {

/// Largest absolute entry; zero for an empty matrix.
double sup_norm(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Max absolute row sum.
double inf_norm(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// True when max|M - Mᵀ| <= tol * max(1, max|M|).
bool is_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& m, double tol);

Eigen::MatrixXd symmetrize(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Smallest eigenvalue of a symmetric matrix (only the lower triangle is read).
double min_eigenvalue(const Eigen::Ref<const Eigen::MatrixXd>& symmetric);

/// Spectral radius estimate.
///
/// Runs normalized power iteration from a fixed pseudo-random start for up to
/// 500 iterations and accepts the growth ratio once three consecutive estimates
/// agree to a relative 1e-10. Matrices whose dominant eigenvalues do not let
/// the ratio settle (complex pairs of distinct moduli, imprimitive patterns)
/// fall back to a dense eigenvalue computation.
double spectral_radius(const Eigen::Ref<const Eigen::MatrixXd>& m);

}  // namespace conebellman
