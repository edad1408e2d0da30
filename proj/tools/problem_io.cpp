#include "problem_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "conebellman/errors.hpp"

namespace conebellman::io {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kInvalidProblem, "field '" + field + "': " + what);
}

const json& member(const json& doc, const std::string& key, const std::string& context = "") {
  const std::string field = context.empty() ? key : context + "." + key;
  if (!doc.is_object() || !doc.contains(key)) schema_error(field, "missing");
  return doc.at(key);
}

double number(const json& value, const std::string& field) {
  if (!value.is_number()) schema_error(field, "expected a number");
  return value.get<double>();
}

std::size_t index(const json& value, const std::string& field) {
  if (!value.is_number_integer() || value.get<long long>() < 0) {
    schema_error(field, "expected a nonnegative integer");
  }
  return value.get<std::size_t>();
}

Eigen::VectorXd parse_vector(const json& value, const std::string& field) {
  if (!value.is_array()) schema_error(field, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = number(value[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

Eigen::MatrixXd parse_matrix(const json& value, const std::string& field) {
  if (!value.is_array()) schema_error(field, "expected an array of rows");
  const std::size_t rows = value.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!value[i].is_array()) {
      schema_error(field + "[" + std::to_string(i) + "]", "expected a row array");
    }
    if (i == 0) cols = value[i].size();
    if (value[i].size() != cols) {
      schema_error(field + "[" + std::to_string(i) + "]",
                   "row has " + std::to_string(value[i].size()) + " entries, expected " +
                       std::to_string(cols));
    }
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          number(value[i][j],
                 field + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }
  return m;
}

std::vector<std::size_t> parse_indices(const json& value, const std::string& field) {
  std::vector<std::size_t> out;
  if (value.is_number()) {
    out.push_back(index(value, field));
    return out;
  }
  if (!value.is_array()) schema_error(field, "expected an index or an array of indices");
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(index(value[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

SspProblem parse_ssp(const json& doc) {
  SspProblem p;
  p.A = parse_matrix(member(doc, "A"), "A");
  p.B = parse_matrix(member(doc, "B"), "B");
  p.s = parse_vector(member(doc, "s"), "s");
  p.r = parse_vector(member(doc, "r"), "r");
  p.E = parse_matrix(member(doc, "E"), "E");
  for (const auto size : parse_indices(member(doc, "blocks"), "blocks")) {
    p.block_sizes.push_back(static_cast<Eigen::Index>(size));
  }
  // An n x 0 input matrix is written as n empty rows.
  if (p.B.rows() == 0 && p.A.rows() > 0) p.B.resize(p.A.rows(), 0);
  p.validate();
  return p;
}

SspGraph parse_ssp_graph(const json& doc) {
  SspGraph g;
  g.nodes = index(member(doc, "nodes"), "nodes");
  g.goals = parse_indices(member(doc, "goal"), "goal");
  g.s = parse_vector(member(doc, "s"), "s");
  const json& edges = member(doc, "edges");
  if (!edges.is_array()) schema_error("edges", "expected an array");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string ctx = "edges[" + std::to_string(k) + "]";
    const json& e = edges[k];
    SspEdge edge;
    edge.from = index(member(e, "from", ctx), ctx + ".from");
    edge.to = parse_indices(member(e, "to", ctx), ctx + ".to");
    edge.cost = number(member(e, "cost", ctx), ctx + ".cost");
    if (e.contains("prob")) {
      const Eigen::VectorXd prob = parse_vector(e.at("prob"), ctx + ".prob");
      edge.prob.assign(prob.data(), prob.data() + prob.size());
    } else if (edge.to.size() == 1) {
      edge.prob = {1.0};
    } else {
      schema_error(ctx + ".prob", "required when an edge has several successors");
    }
    g.edges.push_back(std::move(edge));
  }
  g.validate();
  return g;
}

LqrProblem parse_lqr(const json& doc) {
  LqrProblem p;
  p.A = parse_matrix(member(doc, "A"), "A");
  p.B = parse_matrix(member(doc, "B"), "B");
  p.Q = parse_matrix(member(doc, "Q"), "Q");
  p.R = parse_matrix(member(doc, "R"), "R");
  if (p.B.rows() == 0 && p.A.rows() > 0) p.B.resize(p.A.rows(), 0);
  p.validate();
  return p;
}

LdpProblem parse_ldp(const json& doc) {
  LdpProblem p;
  p.passive = parse_matrix(member(doc, "Pbar"), "Pbar");
  p.cost = parse_vector(member(doc, "s"), "s");
  for (const auto g : parse_indices(member(doc, "goals"), "goals")) {
    p.goals.push_back(static_cast<Eigen::Index>(g));
  }
  // Structural errors (no goal, leaking goal, unreachable goal) keep their
  // own codes; they are all invalid input to the caller.
  p.validate();
  return p;
}

void write_value(std::ostream& out, const json& value, int depth);

void write_indent(std::ostream& out, int depth) {
  for (int i = 0; i < depth; ++i) out << "  ";
}

bool scalar(const json& value) { return !value.is_array() && !value.is_object(); }

void write_value(std::ostream& out, const json& value, int depth) {
  if (value.is_number_float()) {
    const double x = value.get<double>();
    if (!std::isfinite(x)) {
      out << "null";
      return;
    }
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", x);
    out << buffer;
    return;
  }
  if (value.is_array()) {
    const bool flat = std::all_of(value.begin(), value.end(), scalar);
    if (flat) {
      out << '[';
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i > 0) out << ", ";
        write_value(out, value[i], depth + 1);
      }
      out << ']';
      return;
    }
    out << "[\n";
    for (std::size_t i = 0; i < value.size(); ++i) {
      write_indent(out, depth + 1);
      write_value(out, value[i], depth + 1);
      out << (i + 1 < value.size() ? ",\n" : "\n");
    }
    write_indent(out, depth);
    out << ']';
    return;
  }
  if (value.is_object()) {
    if (value.empty()) {
      out << "{}";
      return;
    }
    out << "{\n";
    std::size_t i = 0;
    for (auto it = value.begin(); it != value.end(); ++it, ++i) {
      write_indent(out, depth + 1);
      out << json(it.key()).dump() << ": ";
      write_value(out, it.value(), depth + 1);
      out << (i + 1 < value.size() ? ",\n" : "\n");
    }
    write_indent(out, depth);
    out << '}';
    return;
  }
  out << value.dump();
}

}  // namespace

Problem parse_problem(const json& doc) {
  const json& type = member(doc, "type");
  if (!type.is_string()) schema_error("type", "expected a string");
  const auto name = type.get<std::string>();
  if (name == "ssp") return parse_ssp(doc);
  if (name == "ssp-graph") return parse_ssp_graph(doc);
  if (name == "lqr") return parse_lqr(doc);
  if (name == "ldp") return parse_ldp(doc);
  schema_error("type", "unknown problem type \"" + name + "\"");
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidProblem, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidProblem, path.string() + ": " + e.what());
  }
  return parse_problem(doc);
}

std::string problem_type(const Problem& problem) {
  switch (problem.index()) {
    case 0: return "ssp";
    case 1: return "ssp-graph";
    case 2: return "lqr";
    default: return "ldp";
  }
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const Problem& problem) {
  json doc;
  doc["type"] = problem_type(problem);
  if (const auto* p = std::get_if<SspProblem>(&problem)) {
    doc["A"] = matrix_json(p->A);
    doc["B"] = matrix_json(p->B);
    doc["s"] = vector_json(p->s);
    doc["r"] = vector_json(p->r);
    doc["E"] = matrix_json(p->E);
    doc["blocks"] = p->block_sizes;
  } else if (const auto* g = std::get_if<SspGraph>(&problem)) {
    doc["nodes"] = g->nodes;
    doc["goal"] = g->goals;
    doc["s"] = vector_json(g->s);
    doc["edges"] = json::array();
    for (const auto& e : g->edges) {
      doc["edges"].push_back({{"from", e.from}, {"to", e.to}, {"prob", e.prob}, {"cost", e.cost}});
    }
  } else if (const auto* q = std::get_if<LqrProblem>(&problem)) {
    doc["A"] = matrix_json(q->A);
    doc["B"] = matrix_json(q->B);
    doc["Q"] = matrix_json(q->Q);
    doc["R"] = matrix_json(q->R);
  } else {
    const auto& l = std::get<LdpProblem>(problem);
    doc["Pbar"] = matrix_json(l.passive);
    doc["s"] = vector_json(l.cost);
    doc["goals"] = l.goals;
  }
  return doc;
}

std::string dump(const json& doc) {
  std::ostringstream out;
  write_value(out, doc, 0);
  out << '\n';
  return out.str();
}

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace) {
  out << "iter,residual,elapsed_ns\n";
  char buffer[40];
  for (const auto& r : trace.records) {
    std::snprintf(buffer, sizeof buffer, "%.17g", r.residual);
    out << r.iteration << ',' << buffer << ',' << r.elapsed_ns << '\n';
  }
}

}  // namespace conebellman::io
