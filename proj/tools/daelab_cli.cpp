// daelab command line front end. Every command writes one JSON report
// (stdout or --out) and optionally a CSV (--csv).
// Exit status: 0 pass, 2 check failed, 1 error.

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>

#include "daelab/daelab.hpp"
#include "daelab/io.hpp"

using namespace daelab;
using io::json;

namespace {

struct Inputs {
  std::map<std::string, std::string> digests;

  json load(const std::string& path) {
    const std::string text = io::read_file(path);
    digests[path] = io::digest(text);
    return io::parse_json(text, path);
  }
};

struct Args {
  std::string pencil, node, form, input, out, csv, ray = "real", regime, scheme = "trapezoid";
  std::vector<double> window;
  std::vector<double> lambda;
  int count = 24;
  std::optional<double> omega;
  std::optional<Index> p;
  bool augmented = false, project = false;
  Index n = 64;
  double h = 1e-2, t_end = 1.0;
  std::uint64_t seed = 0x5eedULL;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json tolerances() {
  return {{"singular_condition", kSingularConditionThreshold},
          {"chain_rank", kChainRankTol},
          {"subspace_angle", kSubspaceAngleTol},
          {"chain_feasibility", kChainFeasibilityTol},
          {"ph_structure", kStructureTol},
          {"dissipation_slack", kDissipationSlack}};
}

void write_csv(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  fn(out);
}

std::pair<double, double> window_of(const Args& a, std::pair<double, double> fallback) {
  if (a.window.empty()) return fallback;
  if (a.window.size() != 2) throw Error(ErrorCode::InvalidConfig, "--window takes a,b");
  return {a.window[0], a.window[1]};
}

Pencil require_pencil(const Args& a, Inputs& in) {
  if (a.pencil.empty()) throw Error(ErrorCode::InvalidConfig, "--pencil is required");
  return io::pencil_from_json(in.load(a.pencil));
}

Vector x0_from(const json& j, Index n) {
  if (!j.contains("x0")) return Vector::Zero(n);
  Vector x0 = io::vector_from_json(j["x0"]);
  detail::require_shape(x0.size() == n, "x0 has " + std::to_string(x0.size()) + " entries, expected " + std::to_string(n));
  return x0;
}

// Each command fills `results` and returns whether its checks passed.

bool cmd_analyze(const Args& a, Inputs& in, json& results) {
  const Pencil p = require_pencil(a, in);
  const auto reg = is_regular(p, a.seed);
  if (!reg.regular) throw Error(ErrorCode::NotRegular, "det(lambda E - A) vanishes identically");
  json eig = json::array();
  for (Complex z : finite_eigenvalues(p)) eig.push_back(io::complex_to_json(z));
  const WongChain chain = wong_sequence(p);
  json dims = json::array();
  for (Index d : chain.dims()) dims.push_back(d);
  results = {{"size", p.rows()},
             {"regular", true},
             {"witness_lambda", io::complex_to_json(reg.witness)},
             {"witness_condition", reg.witness_condition},
             {"algebraic_index", algebraic_index(p)},
             {"finite_eigenvalues", std::move(eig)},
             {"default_omega", default_omega(p)},
             {"wong_dims", std::move(dims)}};
  return true;
}

bool cmd_index(const Args& a, Inputs& in, json& results) {
  const Pencil p = require_pencil(a, in);
  FitOptions o;
  if (a.ray == "real") {
    o.ray = Ray::real_ray;
  } else if (a.ray == "vertical") {
    o.ray = Ray::vertical_line;
  } else {
    throw Error(ErrorCode::InvalidConfig, "--ray must be real or vertical");
  }
  std::tie(o.r_min, o.r_max) = window_of(a, {o.r_min, o.r_max});
  o.count = a.count;
  o.omega = a.omega;
  const IndexReport r = fit_resolvent_index(p, o);
  results = io::index_report_to_json(r);
  write_csv(a.csv, [&](std::ostream& os) { io::write_index_csv(os, r); });
  return true;
}

bool cmd_wong(const Args& a, Inputs& in, json& results) {
  const Pencil p = require_pencil(a, in);
  const WongChain c = a.augmented ? augmented_wong_sequence(p.E(), p.A()) : wong_sequence(p);
  results = io::chain_to_json(c);
  results["augmented"] = a.augmented;
  return c.converged;
}

bool cmd_init(const Args& a, Inputs& in, json& results) {
  if (a.input.empty()) throw Error(ErrorCode::InvalidConfig, "--input is required");
  const json doc = in.load(a.input);
  const Pencil p = a.pencil.empty() ? io::pencil_from_json(doc.at("pencil")) : require_pencil(a, in);
  if (!doc.contains("jet")) throw Error(ErrorCode::ParseError, a.input + ": missing jet");
  const InputJet jet = io::jet_from_json(doc["jet"]);
  require_regular(p);
  const Index len = a.p ? *a.p : default_chain_length(p);
  Vector x0 = x0_from(doc, p.cols());
  if (a.project) {
    const Vector projected = project_consistent(p.E(), p.A(), x0, jet, len);
    results["projected_from"] = io::vector_to_json(x0);
    results["correction_norm"] = (projected - x0).norm();
    x0 = projected;
  }
  const ChainCertificate cert = solve_chain(p.E(), p.A(), x0, jet, len);
  results["chain_length"] = len;
  results["x0"] = io::vector_to_json(x0);
  results["certificate"] = io::certificate_to_json(cert);
  return cert.feasible;
}

bool cmd_simulate(const Args& a, Inputs& in, json& results) {
  if (a.node.empty() || a.input.empty()) throw Error(ErrorCode::InvalidConfig, "--node and --input are required");
  const SystemNode node = io::node_from_json(in.load(a.node));
  const json doc = in.load(a.input);
  const InputSignal u = io::input_from_json(doc.value("u", json::object()), node.input_dim());
  IntegrateOptions o;
  if (a.scheme == "trapezoid") {
    o.scheme = Scheme::trapezoid;
  } else if (a.scheme == "implicit_euler") {
    o.scheme = Scheme::implicit_euler;
  } else {
    throw Error(ErrorCode::InvalidConfig, "--scheme must be implicit_euler or trapezoid");
  }
  o.h = doc.value("h", a.h);
  o.t_end = doc.value("t_end", a.t_end);
  o.chain_length = a.p;
  o.consistency = a.project ? ConsistencyMode::project : ConsistencyMode::strict;
  const Trajectory t = integrate(node, x0_from(doc, node.state_dim()), u, o);
  const SolutionCertificate cert = certify(node, t);
  results = {{"scheme", std::string(to_string(t.scheme))},
             {"step", t.step},
             {"samples", t.size()},
             {"projected", t.projected_from.has_value()},
             {"x_final", io::vector_to_json(t.states.back())},
             {"y_final", io::vector_to_json(t.outputs.back())},
             {"residuals", io::solution_certificate_to_json(cert)}};
  write_csv(a.csv, [&](std::ostream& os) { io::write_trajectory_csv(os, t); });
  return true;
}

bool cmd_phcheck(const Args& a, Inputs& in, json& results) {
  if (a.form.empty()) throw Error(ErrorCode::InvalidConfig, "--form is required");
  const PHForm f = io::phform_from_json(in.load(a.form));
  const ValidationReport rep = validate_ph(f);
  results["validation"] = io::validation_to_json(rep);
  if (!rep.passed) return false;

  const PHIndexAudit audit = ph_index_audit(f);
  results["index_audit"] = {{"algebraic_index", audit.algebraic_index},
                            {"real_index", audit.real.fitted_index},
                            {"complex_index", audit.complex.fitted_index},
                            {"real_exponent", audit.real.fitted_exponent},
                            {"complex_exponent", audit.complex.fitted_exponent},
                            {"hypotheses_hold", audit.hypotheses_hold},
                            {"violation", audit.violation}};

  // Energy ledger along a trapezoid run from the (projected) x0.
  const SystemNode node = to_node(f);
  json doc = json::object();
  if (!a.input.empty()) doc = in.load(a.input);
  IntegrateOptions o;
  o.scheme = Scheme::trapezoid;
  o.h = doc.value("h", 1e-3);
  o.t_end = doc.value("t_end", a.t_end);
  o.consistency = ConsistencyMode::project;
  const Vector x0 = doc.contains("x0") ? x0_from(doc, f.state_dim()) : Vector::Ones(f.state_dim());
  const InputSignal u = io::input_from_json(doc.value("u", json::object()), f.port_dim());
  const EnergyLedger led = dissipation_check(f, integrate(node, x0, u, o));
  results["dissipation"] = {{"satisfied", led.satisfied},
                            {"worst_margin", led.worst_margin},
                            {"H_initial", led.hamiltonian.front()},
                            {"H_final", led.hamiltonian.back()},
                            {"supply", led.cumulative_supply.back()}};
  write_csv(a.csv, [&](std::ostream& os) { io::write_ledger_csv(os, led); });
  return !audit.violation && led.satisfied;
}

bool cmd_example(const Args& a, Inputs&, json& results) {
  if (a.regime.empty()) throw Error(ErrorCode::InvalidConfig, "--regime is required");
  const pde::PDEConfig cfg = pde::PDEConfig::preset(pde::regime_from_string(a.regime), a.n);
  const auto win = window_of(a, pde::default_window(cfg));
  const pde::RegimeExperiment e = pde::regime_index_experiment(cfg, win, a.count);
  results = {{"regime", a.regime},
             {"n", a.n},
             {"real", io::index_report_to_json(e.real)},
             {"vertical", io::index_report_to_json(e.vertical)}};
  // flattened for quick reading
  results["fitted_exponent"] = e.vertical.fitted_exponent;
  results["fitted_index"] = e.vertical.fitted_index;
  write_csv(a.csv, [&](std::ostream& os) { io::write_index_csv(os, e.vertical); });
  return true;
}

bool cmd_transfer(const Args& a, Inputs& in, json& results) {
  if (a.node.empty()) throw Error(ErrorCode::InvalidConfig, "--node is required");
  if (a.lambda.empty() || a.lambda.size() % 2 != 0)
    throw Error(ErrorCode::InvalidConfig, "--lambda takes re,im pairs");
  const SystemNode node = io::node_from_json(in.load(a.node));
  std::vector<TransferEval> sweep;
  json evals = json::array();
  for (std::size_t i = 0; i < a.lambda.size(); i += 2) {
    sweep.push_back(transfer(node, Complex(a.lambda[i], a.lambda[i + 1])));
    evals.push_back({{"lambda", io::complex_to_json(sweep.back().lambda)}, {"G", io::matrix_to_json(sweep.back().G)}});
  }
  results["evaluations"] = std::move(evals);
  write_csv(a.csv, [&](std::ostream& os) { io::write_transfer_csv(os, sweep); });
  return true;
}

void emit(const Args& a, const json& report) {
  const std::string text = report.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(a.out);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + a.out);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"daelab: pencils, Wong sequences, resolvent indices and DAE simulation"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Args a;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--out", a.out, "JSON report path (default stdout)");
    sub->add_option("--csv", a.csv, "CSV output path");
    sub->add_option("--seed", a.seed, "seed for randomized regularity sampling");
  };
  const auto window = [&](CLI::App* sub) {
    sub->add_option("--window", a.window, "frequency window a,b")->delimiter(',')->expected(2);
    sub->add_option("--count", a.count, "number of samples");
  };

  auto* analyze = app.add_subcommand("analyze", "regularity, index, finite spectrum");
  analyze->add_option("--pencil", a.pencil)->required();
  common(analyze);

  auto* index = app.add_subcommand("index", "resolvent index fit");
  index->add_option("--pencil", a.pencil)->required();
  index->add_option("--ray", a.ray, "real or vertical");
  index->add_option("--omega", a.omega);
  window(index);
  common(index);

  auto* wong = app.add_subcommand("wong", "Wong sequence");
  wong->add_option("--pencil", a.pencil)->required();
  wong->add_flag("--augmented", a.augmented, "augmented sequence of ([E 0], [A I])");
  common(wong);

  auto* init = app.add_subcommand("init", "consistency certificate for x0");
  init->add_option("--pencil", a.pencil);
  init->add_option("--input", a.input, "JSON with x0, jet and optionally pencil")->required();
  init->add_option("--p", a.p, "chain length");
  init->add_flag("--project", a.project, "replace x0 by its consistent projection");
  common(init);

  auto* simulate = app.add_subcommand("simulate", "integrate a system node");
  simulate->add_option("--node", a.node)->required();
  simulate->add_option("--input", a.input, "JSON with x0, u, h, t_end")->required();
  simulate->add_option("--scheme", a.scheme, "implicit_euler or trapezoid");
  simulate->add_option("--step", a.h, "time step");
  simulate->add_option("--t-end", a.t_end);
  simulate->add_option("--p", a.p, "chain length");
  simulate->add_flag("--project", a.project, "project an inconsistent x0");
  common(simulate);

  auto* phcheck = app.add_subcommand("phcheck", "pH structure, index audit and energy ledger");
  phcheck->add_option("--form", a.form)->required();
  phcheck->add_option("--input", a.input, "JSON with x0, u, h, t_end");
  phcheck->add_option("--t-end", a.t_end);
  common(phcheck);

  auto* example = app.add_subcommand("example", "index regimes of the discretized PDE");
  example->add_option("--regime", a.regime, "wave, diffusion, elliptic or index2")->required();
  example->add_option("--n", a.n, "grid cells");
  window(example);
  common(example);

  auto* tf = app.add_subcommand("transfer", "evaluate G(lambda)");
  tf->add_option("--node", a.node)->required();
  tf->add_option("--lambda", a.lambda, "re,im (repeatable)")->delimiter(',')->allow_extra_args(false);
  common(tf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const std::map<CLI::App*, std::function<bool(const Args&, Inputs&, json&)>> commands = {
      {analyze, cmd_analyze}, {index, cmd_index},   {wong, cmd_wong},       {init, cmd_init},
      {simulate, cmd_simulate}, {phcheck, cmd_phcheck}, {example, cmd_example}, {tf, cmd_transfer}};
  CLI::App* sub = app.get_subcommands().front();

  json report;
  report["tool"] = "daelab";
  report["version"] = kVersion;
  report["command"] = sub->get_name();
  report["seed"] = a.seed;
  report["tolerances"] = tolerances();
  report["timestamp"] = utc_timestamp();
  Inputs in;
  int status = 0;
  try {
    json results = json::object();
    const bool passed = commands.at(sub)(a, in, results);
    report["inputs"] = in.digests;
    report["status"] = passed ? "pass" : "fail";
    report["results"] = std::move(results);
    status = passed ? 0 : 2;
  } catch (const Error& e) {
    report["inputs"] = in.digests;
    report["status"] = "error";
    report["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    std::cerr << "error: " << e.what() << "\n";
    status = 1;
  } catch (const json::exception& e) {
    report["inputs"] = in.digests;
    report["status"] = "error";
    report["error"] = {{"code", "PARSE_ERROR"}, {"message", e.what()}};
    std::cerr << "error: PARSE_ERROR: " << e.what() << "\n";
    status = 1;
  } catch (const std::exception& e) {
    report["inputs"] = in.digests;
    report["status"] = "error";
    report["error"] = {{"code", "INTERNAL"}, {"message", e.what()}};
    std::cerr << "error: " << e.what() << "\n";
    status = 1;
  }
  try {
    emit(a, report);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return status;
}
