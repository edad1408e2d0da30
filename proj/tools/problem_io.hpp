#pragma once

// Problem files and solution export.
//
// Matrices are row-major arrays of arrays. For "ldp" problems the matrix
// "Pbar" keeps the column-stochastic convention: Pbar[j][i] is the
// probability of moving FROM state i TO state j, so every column sums to 1.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

#include <Eigen/Dense>
#include <json.hpp>

#include "conebellman/fixed_point.hpp"
#include "conebellman/ldp.hpp"
#include "conebellman/lqr.hpp"
#include "conebellman/ssp.hpp"
#include "conebellman/ssp_graph.hpp"

namespace conebellman::io {

using Problem = std::variant<SspProblem, SspGraph, LqrProblem, LdpProblem>;

/// Schema violations raise Error(kInvalidProblem) naming the offending field.
Problem parse_problem(const nlohmann::json& doc);
/// Also reports JSON syntax errors with their line and column.
Problem load_problem(const std::filesystem::path& path);

std::string problem_type(const Problem& problem);

nlohmann::json to_json(const Problem& problem);
nlohmann::json matrix_json(const Eigen::MatrixXd& m);
nlohmann::json vector_json(const Eigen::VectorXd& v);

/// Pretty-prints with every floating-point number at 17 significant digits,
/// so the text is a deterministic function of the values.
std::string dump(const nlohmann::json& doc);

/// `iter,residual,elapsed_ns` CSV.
void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace);

}  // namespace conebellman::io
