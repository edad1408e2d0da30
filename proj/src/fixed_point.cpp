#include "conebellman/fixed_point.hpp"

#include <cmath>
#include <sstream>

namespace conebellman {

void SolveConfig::validate() const {
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw Error(ErrorCode::kInvalidConfig, "tol must be positive");
  }
  if (max_iter < 1) {
    throw Error(ErrorCode::kInvalidConfig, "max_iter must be >= 1");
  }
  if (!(divergence_cap > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "divergence_cap must be positive");
  }
}

std::vector<double> ConvergenceTrace::residuals() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.residual);
  return out;
}

void ConvergenceTrace::append(double residual, std::int64_t elapsed_ns) {
  records.push_back({records.size(), residual, elapsed_ns});
}

namespace detail {

void throw_diverged(std::size_t iteration, double magnitude, double cap,
                    const std::string& reason) {
  std::ostringstream msg;
  msg.precision(17);
  msg << reason << " at sweep " << iteration << " (max |entry| = " << magnitude
      << ", cap = " << cap << "); no finite cost";
  throw Error(ErrorCode::kDiverged, msg.str());
}

void throw_max_iter(std::size_t max_iter, double residual) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "no convergence after " << max_iter
      << " sweeps (last residual = " << residual << ")";
  throw Error(ErrorCode::kMaxIterExceeded, msg.str());
}

}  // namespace detail
}  // namespace conebellman
