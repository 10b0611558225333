#pragma once

// JSON and CSV formats. Complex numbers are always [re, im] pairs; matrices
// are {"rows": m, "cols": n, "data": [[re, im], ...]} in row-major order.

#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "daelab/consistency.hpp"
#include "daelab/index.hpp"
#include "daelab/node.hpp"
#include "daelab/ph.hpp"
#include "daelab/simulate.hpp"
#include "daelab/subspace.hpp"

namespace daelab::io {

using json = nlohmann::ordered_json;

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::ParseError, "complex numbers must be [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) data.push_back(complex_to_json(m(i, j)));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw Error(ErrorCode::ParseError, "matrix objects need rows, cols and data");
  if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer() || !j["data"].is_array())
    throw Error(ErrorCode::ParseError, "matrix rows/cols must be integers and data an array");
  const auto rows = j["rows"].get<Index>();
  const auto cols = j["cols"].get<Index>();
  if (rows < 0 || cols < 0) throw Error(ErrorCode::ParseError, "negative matrix dimension");
  const json& data = j["data"];
  if (static_cast<Index>(data.size()) != rows * cols)
    throw Error(ErrorCode::DimensionMismatch, "matrix data has " + std::to_string(data.size()) +
                                                  " entries, expected " + std::to_string(rows * cols));
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(data[static_cast<std::size_t>(i * cols + k)]);
  return m;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

/// Accepts a list of [re, im] pairs (or plain reals) or a one-column matrix object.
inline Vector vector_from_json(const json& j) {
  if (j.is_object()) {
    const Matrix m = matrix_from_json(j);
    if (m.cols() != 1) throw Error(ErrorCode::DimensionMismatch, "vector matrices must have one column");
    return m.col(0);
  }
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "vectors must be arrays of [re, im] pairs");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from_json(j[i]);
  return v;
}

inline json pencil_to_json(const Pencil& p) {
  json out = {{"E", matrix_to_json(p.E())}, {"A", matrix_to_json(p.A())}};
  if (!p.state_weight().is_identity()) out["state_weight"] = matrix_to_json(p.state_weight().matrix());
  if (!p.codomain_weight().is_identity()) out["codomain_weight"] = matrix_to_json(p.codomain_weight().matrix());
  return out;
}

inline Pencil pencil_from_json(const json& j) {
  if (!j.is_object() || !j.contains("E") || !j.contains("A"))
    throw Error(ErrorCode::ParseError, "pencil objects need E and A");
  std::optional<Matrix> xw, zw;
  if (j.contains("state_weight") && !j["state_weight"].is_null()) xw = matrix_from_json(j["state_weight"]);
  if (j.contains("codomain_weight") && !j["codomain_weight"].is_null()) zw = matrix_from_json(j["codomain_weight"]);
  return Pencil(matrix_from_json(j["E"]), matrix_from_json(j["A"]), std::move(xw), std::move(zw));
}

inline json subspace_to_json(const Subspace& s) {
  return {{"ambient", s.ambient()}, {"basis", matrix_to_json(s.basis())}};
}

inline Subspace subspace_from_json(const json& j) {
  if (!j.is_object() || !j.contains("ambient") || !j.contains("basis"))
    throw Error(ErrorCode::ParseError, "subspace objects need ambient and basis");
  return Subspace(matrix_from_json(j["basis"]), j["ambient"].get<Index>());
}

inline json chain_to_json(const WongChain& c) {
  json spaces = json::array();
  for (const auto& s : c.spaces) spaces.push_back(subspace_to_json(s));
  json dims = json::array();
  for (Index d : c.dims()) dims.push_back(d);
  return {{"dims", std::move(dims)},
          {"stabilized_at", c.stabilized_at},
          {"converged", c.converged},
          {"nestedness_defect", c.nestedness_defect()},
          {"limit", subspace_to_json(c.limit())},
          {"spaces", std::move(spaces)}};
}

inline json node_to_json(const SystemNode& n) {
  return {{"E", matrix_to_json(n.E())}, {"A", matrix_to_json(n.A())}, {"B", matrix_to_json(n.B())},
          {"C", matrix_to_json(n.C())}, {"D", matrix_to_json(n.D())}};
}

inline SystemNode node_from_json(const json& j) {
  for (const char* k : {"E", "A", "B", "C", "D"})
    if (!j.is_object() || !j.contains(k)) throw Error(ErrorCode::ParseError, std::string("node is missing ") + k);
  return {matrix_from_json(j["E"]), matrix_from_json(j["A"]), matrix_from_json(j["B"]), matrix_from_json(j["C"]),
          matrix_from_json(j["D"])};
}

inline json phform_to_json(const PHForm& f) {
  return {{"E", matrix_to_json(f.E)}, {"J", matrix_to_json(f.J)}, {"R", matrix_to_json(f.R)},
          {"Q", matrix_to_json(f.Q)}, {"B", matrix_to_json(f.B)}, {"P", matrix_to_json(f.P)},
          {"S", matrix_to_json(f.S)}, {"N", matrix_to_json(f.N)}};
}

inline PHForm phform_from_json(const json& j) {
  for (const char* k : {"E", "J", "R", "Q", "B", "P", "S", "N"})
    if (!j.is_object() || !j.contains(k)) throw Error(ErrorCode::ParseError, std::string("pH form is missing ") + k);
  return {matrix_from_json(j["E"]), matrix_from_json(j["J"]), matrix_from_json(j["R"]), matrix_from_json(j["Q"]),
          matrix_from_json(j["B"]), matrix_from_json(j["P"]), matrix_from_json(j["S"]), matrix_from_json(j["N"])};
}

inline json validation_to_json(const ValidationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"violation", c.violation}, {"tolerance", c.tolerance}, {"passed", c.passed}});
  return {{"passed", r.passed}, {"checks", std::move(checks)}};
}

inline json sample_to_json(const ResolventSample& s) {
  return {{"lambda", complex_to_json(s.lambda)}, {"norm", s.norm}, {"condition", s.condition}};
}

inline json index_report_to_json(const IndexReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples) samples.push_back(sample_to_json(s));
  return {{"algebraic_index", r.algebraic_index ? json(*r.algebraic_index) : json(nullptr)},
          {"fitted_exponent", r.fitted_exponent},
          {"fitted_index", r.fitted_index},
          {"omega", r.omega},
          {"growth_constant", r.growth_constant},
          {"node_growth_constant", r.node_growth_constant},
          {"ray", std::string(to_string(r.ray))},
          {"window", json::array({r.r_min, r.r_max})},
          {"samples", std::move(samples)}};
}

inline IndexReport index_report_from_json(const json& j) {
  IndexReport r;
  try {
    if (!j.at("algebraic_index").is_null()) r.algebraic_index = j.at("algebraic_index").get<Index>();
    r.fitted_exponent = j.at("fitted_exponent").get<double>();
    r.fitted_index = j.at("fitted_index").get<Index>();
    r.omega = j.at("omega").get<double>();
    r.growth_constant = j.at("growth_constant").get<double>();
    r.node_growth_constant = j.at("node_growth_constant").get<double>();
    const auto ray = j.at("ray").get<std::string>();
    if (ray != "real_ray" && ray != "vertical_line") throw Error(ErrorCode::ParseError, "unknown ray " + ray);
    r.ray = ray == "real_ray" ? Ray::real_ray : Ray::vertical_line;
    r.r_min = j.at("window").at(0).get<double>();
    r.r_max = j.at("window").at(1).get<double>();
    for (const auto& s : j.at("samples"))
      r.samples.push_back({complex_from_json(s.at("lambda")), s.at("norm").get<double>(), s.at("condition").get<double>()});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed index report: ") + e.what());
  }
  return r;
}

inline json certificate_to_json(const ChainCertificate& c) {
  json chain = json::array();
  for (const auto& x : c.chain) chain.push_back(vector_to_json(x));
  return {{"feasible", c.feasible},
          {"first_failing_level", c.first_failing_level ? json(*c.first_failing_level) : json(nullptr)},
          {"residuals", c.residuals},
          {"scales", c.scales},
          {"chain", std::move(chain)}};
}

inline InputJet jet_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "jet must be an array of vectors");
  InputJet jet;
  for (const auto& v : j) jet.values.push_back(vector_from_json(v));
  return jet;
}

/// {"polynomial": [vec, ...], "harmonics": [{"omega": w, "sin": vec, "cos": vec}, ...]}
inline InputSignal input_from_json(const json& j, Index dim) {
  InputSignal s(dim);
  if (j.contains("polynomial")) {
    std::vector<Vector> coeffs;
    for (const auto& c : j["polynomial"]) coeffs.push_back(vector_from_json(c));
    if (!coeffs.empty()) s = InputSignal::polynomial(std::move(coeffs));
  }
  detail::require_shape(s.dim() == dim, "input dimension does not match the node");
  if (j.contains("harmonics"))
    for (const auto& h : j["harmonics"])
      s.add_harmonic(h.at("omega").get<double>(), vector_from_json(h.at("sin")), vector_from_json(h.at("cos")));
  return s;
}

inline json solution_certificate_to_json(const SolutionCertificate& c) {
  return {{"classical_residual", c.classical_residual},
          {"mild_residual", c.mild_residual},
          {"weak_residual", c.weak_residual}};
}

// CSV writers. Numbers use max_digits10 so files re-read bit-exactly.

namespace detail {
inline std::ostream& precise(std::ostream& os) { return os << std::setprecision(std::numeric_limits<double>::max_digits10); }

inline void complex_columns(std::ostream& os, const std::string& prefix, Index count) {
  for (Index i = 0; i < count; ++i) os << ',' << prefix << i << "_re," << prefix << i << "_im";
}

inline void complex_values(std::ostream& os, const Vector& v) {
  for (Index i = 0; i < v.size(); ++i) os << ',' << v(i).real() << ',' << v(i).imag();
}
}  // namespace detail

/// t, then Re/Im of each state, input and output entry.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  detail::precise(os);
  const Index nx = traj.states.empty() ? 0 : traj.states[0].size();
  const Index nu = traj.inputs.empty() ? 0 : traj.inputs[0].size();
  const Index ny = traj.outputs.empty() ? 0 : traj.outputs[0].size();
  os << 't';
  detail::complex_columns(os, "x", nx);
  detail::complex_columns(os, "u", nu);
  detail::complex_columns(os, "y", ny);
  os << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << traj.times[k];
    detail::complex_values(os, traj.states[k]);
    detail::complex_values(os, traj.inputs[k]);
    detail::complex_values(os, traj.outputs[k]);
    os << '\n';
  }
}

/// |λ|, norm: the log-log data behind an index fit.
inline void write_index_csv(std::ostream& os, const IndexReport& r) {
  detail::precise(os);
  os << "abs_lambda,norm\n";
  for (const auto& s : r.samples) os << std::abs(s.lambda) << ',' << s.norm << '\n';
}

/// Re λ, Im λ, then the entries of G row-major as Re/Im pairs.
inline void write_transfer_csv(std::ostream& os, const std::vector<TransferEval>& sweep) {
  detail::precise(os);
  os << "re_lambda,im_lambda";
  if (!sweep.empty())
    for (Index i = 0; i < sweep[0].G.rows(); ++i)
      for (Index j = 0; j < sweep[0].G.cols(); ++j) os << ",G" << i << j << "_re,G" << i << j << "_im";
  os << '\n';
  for (const auto& t : sweep) {
    os << t.lambda.real() << ',' << t.lambda.imag();
    for (Index i = 0; i < t.G.rows(); ++i)
      for (Index j = 0; j < t.G.cols(); ++j) os << ',' << t.G(i, j).real() << ',' << t.G(i, j).imag();
    os << '\n';
  }
}

/// t, H, supply (instantaneous power), cumulative supply.
inline void write_ledger_csv(std::ostream& os, const EnergyLedger& led) {
  detail::precise(os);
  os << "t,H,supply,cumulative\n";
  for (std::size_t k = 0; k < led.times.size(); ++k)
    os << led.times[k] << ',' << led.hamiltonian[k] << ',' << led.power[k] << ',' << led.cumulative_supply[k] << '\n';
}

/// Parses JSON text; syntax errors report line and column.
inline json parse_json(const std::string& text, const std::string& source = "<input>") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::ParseError,
                source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json load_json(const std::string& path) { return parse_json(read_file(path), path); }

/// FNV-1a 64-bit digest, hex encoded.
inline std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

}  // namespace daelab::io
