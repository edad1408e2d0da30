#include "conebellman/linalg.hpp"

#include <cmath>
#include <random>

#include "conebellman/errors.hpp"

namespace conebellman {

namespace {

constexpr int kPowerIterations = 500;
constexpr double kPowerRelativeTol = 1e-10;
constexpr std::uint64_t kPowerSeed = 0x5eedc0de;

}  // namespace

double sup_norm(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

double inf_norm(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

bool is_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, sup_norm(m));
  return sup_norm(m - m.transpose()) <= tol * scale;
}

Eigen::MatrixXd symmetrize(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  return 0.5 * (m + m.transpose());
}

double min_eigenvalue(const Eigen::Ref<const Eigen::MatrixXd>& symmetric) {
  if (symmetric.rows() != symmetric.cols()) {
    throw Error(ErrorCode::kNonSquare, "min_eigenvalue needs a square matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double spectral_radius(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kNonSquare,
                "spectral_radius of a " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + " matrix");
  }
  const Eigen::Index n = m.rows();
  if (n == 0) return 0.0;
  if (!m.allFinite()) return std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(kPowerSeed);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = unit(rng);
  x.normalize();

  double previous = -1.0;
  int settled = 0;
  for (int k = 0; k < kPowerIterations; ++k) {
    Eigen::VectorXd y = m * x;
    const double growth = y.norm();
    if (growth == 0.0) return 0.0;
    const bool close = previous >= 0.0 &&
                       std::abs(growth - previous) <= kPowerRelativeTol * growth;
    settled = close ? settled + 1 : 0;
    // Two agreeing steps in a row, so a single coincidence is not accepted.
    if (settled >= 2) return growth;
    previous = growth;
    x = y / growth;
  }

  Eigen::EigenSolver<Eigen::MatrixXd> dense(m, false);
  return dense.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace conebellman
