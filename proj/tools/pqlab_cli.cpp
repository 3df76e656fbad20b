// pqlab command-line front end: eigen, solve, limit-r, sweep-p, infharm.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pqlab/asymptotics.hpp"
#include "pqlab/eigenvalue.hpp"
#include "pqlab/error.hpp"
#include "pqlab/infinity.hpp"
#include "pqlab/parallel.hpp"
#include "pqlab/report_io.hpp"
#include "pqlab/run_config.hpp"
#include "pqlab/solver.hpp"
#include "pqlab/svg.hpp"

namespace fs = std::filesystem;
using namespace pqlab;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNoConverge = 2, kGate = 3 };

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonConvergence:
    case ErrorCode::ProjectionInfeasible:
      return kNoConverge;
    case ErrorCode::GateRefused:
      return kGate;
    default:
      return kConfig;
  }
}

// Keys that do not influence results and stay out of the config hash.
const std::set<std::string> kUnhashed{"out", "config", "formats", "workers"};

struct Output {
  fs::path dir;
  std::set<std::string> formats;
  std::string hash;

  bool wants(const std::string& f) const { return formats.count(f) != 0; }
  std::string path(const std::string& name) const { return (dir / name).string(); }

  void json(const std::string& name, const Json& body) const {
    if (wants("json")) write_json(path(name), body, hash);
  }
  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::vector<std::vector<std::string>>& rows) const {
    if (wants("csv")) write_csv(path(name), header, rows, hash);
  }
  void trace(const std::string& name, const std::vector<TraceRow>& t) const {
    if (wants("csv")) write_trace_csv(path(name), t, hash);
  }
  void svg(const std::string& name, const ScalarField& u, const std::string& title) const {
    if (wants("svg")) write_contour_svg(path(name), u, title);
  }
  void field(const std::string& name, const ScalarField& u) const { write_field(u, path(name)); }
};

std::string hash_of(const std::string& command, const RunConfig& cfg) {
  RunConfig h;
  h.set("command", command);
  for (const auto& [k, v] : cfg.entries())
    if (!kUnhashed.count(k)) h.set(k, v);
  return h.hash_hex();
}

std::set<std::string> parse_formats(const std::string& text) {
  std::set<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item != "json" && item != "csv" && item != "svg")
      throw Error(ErrorCode::InvalidArgument, "unknown format '" + item + "' (json, csv, svg)");
    out.insert(item);
  }
  return out;
}

// Creates the output directory and checks it accepts files. Called only after
// every parameter block has validated.
Output open_output(const std::string& command, const RunConfig& cfg) {
  Output out;
  out.dir = cfg.get_string("out", "out");
  out.formats = parse_formats(cfg.get_string("formats", "json,csv,svg"));
  out.hash = hash_of(command, cfg);
  std::error_code ec;
  fs::create_directories(out.dir, ec);
  const fs::path probe = out.dir / ".pqlab-write-probe";
  {
    std::ofstream f(probe);
    if (!f) throw Error(ErrorCode::Io, "output directory not writable: " + out.dir.string());
  }
  fs::remove(probe, ec);
  return out;
}

// Accepts a plain number or a fraction such as 1/64.
double spacing_from(const RunConfig& cfg) {
  const std::string text = cfg.get_string("h", "1/64");
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_double("h", text);
  const double den = parse_double("h", text.substr(slash + 1));
  if (!(den > 0)) throw Error(ErrorCode::InvalidArgument, "bad spacing h: '" + text + "'");
  return parse_double("h", text.substr(0, slash)) / den;
}

DomainPtr domain_from(const RunConfig& cfg) {
  const Shape shape = parse_shape(cfg.get_string("domain", "disk:1"));
  return build_domain(shape, spacing_from(cfg));
}

SolverConfig solver_from(const RunConfig& cfg) {
  SolverConfig s;
  s.max_iters = static_cast<int>(cfg.get_int("max-iters", s.max_iters));
  s.tol_grad = cfg.get_double("tol-grad", s.tol_grad);
  s.tol_energy = cfg.get_double("tol-energy", s.tol_energy);
  s.restarts = static_cast<int>(cfg.get_int("restarts", s.restarts));
  s.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long>(s.seed)));
  s.workers = static_cast<int>(cfg.get_int("workers", s.workers));
  s.validate();
  return s;
}

Json domain_summary(const Domain& d) {
  Json j;
  j["shape"] = shape_to_string(d.shape());
  j["h"] = d.h();
  j["nx"] = d.nx();
  j["ny"] = d.ny();
  j["area"] = d.area();
  j["hash"] = d.hash_hex();
  return j;
}

bool truthy(const RunConfig& cfg, const std::string& key) {
  const std::string v = cfg.get_string(key, "false");
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::InvalidArgument, "bad boolean for " + key + ": " + v);
}

std::string fmt_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

// ---------------------------------------------------------------- eigen

int run_eigen(const RunConfig& cfg) {
  const DomainPtr dom = domain_from(cfg);
  const SolverConfig scfg = solver_from(cfg);
  const std::vector<double> ms = cfg.get_list("m", {2.0});
  for (double m : ms)
    if (!(m >= 2)) throw Error(ErrorCode::InvalidArgument, "m must be >= 2");
  const bool sweep = truthy(cfg, "r-sweep");
  if (sweep && cfg.has("r")) throw Error(ErrorCode::InvalidArgument, "--r and --r-sweep are exclusive");
  if (!sweep && ms.size() != 1) throw Error(ErrorCode::InvalidArgument, "several m values need --r-sweep");
  const double r = cfg.get_double("r", 2.0);
  if (!sweep && !(r >= 2 && std::isfinite(r))) throw Error(ErrorCode::InvalidArgument, "r must be finite and >= 2");
  const double r_top = cfg.get_double("r-top", 0.0);
  const Output out = open_output("eigen", cfg);
  const Domain& d = *dom;

  if (!sweep) {
    const EigenResult res = rayleigh_min(ms[0], r, dom, scfg);
    Json body;
    body["command"] = "eigen";
    body["domain"] = domain_summary(d);
    body["solver"] = to_json(scfg);
    body["result"] = to_json(res);
    out.json("eigen.json", body);
    out.json("domain.json", to_json(d));
    out.trace("eigen_trace.csv", res.trace);
    out.field("eigenfield.bin", res.eigenfield);
    out.svg("eigenfield.svg", res.eigenfield, "eigenfield m=" + fmt_p(ms[0]) + " r=" + fmt_p(r));
    std::cout << "lambda_" << fmt_p(r) << "(" << fmt_p(ms[0]) << ") = " << format_number(res.lambda_value) << "\n";
    return kOk;
  }

  // Per r: mu_r = lambda_r |Omega|^(m/r) is the quotient against the mean-r norm,
  // nonincreasing in r. Per m: (lambda_inf-estimate / |Omega|)^(1/m).
  std::vector<std::vector<std::string>> rows, mrows;
  Json ests = Json::array();
  double prev_root = -INFINITY;
  bool m_monotone = true;
  std::vector<LambdaInfEstimate> all(ms.size());
  parallel_for(ms.size(), scfg.workers, [&](std::size_t i) { all[i] = lambda_inf_estimate(ms[i], dom, scfg, r_top); });
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const double m = ms[i];
    const LambdaInfEstimate& est = all[i];
    double prev_mu = INFINITY;
    for (std::size_t k = 0; k < est.r_values.size(); ++k) {
      const double rk = est.r_values[k], lam = est.trend[k];
      const double mu = lam * std::pow(d.area(), m / rk);
      const bool mono = mu <= prev_mu * (1 + 1e-9);
      prev_mu = mu;
      rows.push_back({format_number(m), format_number(rk), format_number(lam), format_number(mu),
                      format_number(std::pow(lam / d.area(), 1.0 / m)), mono ? "1" : "0"});
    }
    const double root = std::pow(est.estimate / d.area(), 1.0 / m);
    const bool mono = root >= prev_root;
    m_monotone = m_monotone && mono;
    prev_root = root;
    mrows.push_back({format_number(m), format_number(est.estimate), format_number(root), mono ? "1" : "0"});
    Json e = to_json(est);
    e["normalized_root"] = root;
    ests.push_back(std::move(e));
    std::cout << "m=" << fmt_p(m) << " lambda_inf-estimate=" << format_number(est.estimate)
              << " (|Omega|^-1 estimate)^(1/m)=" << format_number(root) << "\n";
  }
  out.csv("eigen_trend.csv", {"m", "r", "lambda", "mean_normalized", "root", "monotone"}, rows);
  out.csv("eigen_m_trend.csv", {"m", "estimate", "root", "monotone"}, mrows);
  Json body;
  body["command"] = "eigen";
  body["domain"] = domain_summary(d);
  body["solver"] = to_json(scfg);
  body["lambda_inf_cap"] = lambda_inf_cap(d);
  body["estimates"] = std::move(ests);
  body["m_monotone"] = m_monotone;
  out.json("eigen_sweep.json", body);
  return kOk;
}

// ---------------------------------------------------------------- solve

double resolve_lambda(const RunConfig& cfg, const std::function<double()>& threshold) {
  if (cfg.has("lambda") && cfg.has("lambda-mult"))
    throw Error(ErrorCode::InvalidArgument, "--lambda and --lambda-mult are exclusive");
  if (cfg.has("lambda")) return cfg.get_double("lambda", 1.0);
  const double k = cfg.get_double("lambda-mult", 2.0);
  if (!(k > 0)) throw Error(ErrorCode::InvalidArgument, "lambda-mult must be positive");
  return k * threshold();
}

void report_gate(const Output& out, const std::string& name, const ProblemParams& params, const GateDecision& g) {
  Json body;
  body["params"] = to_json(params);
  body["gate"] = to_json(g);
  body["flags"] = {{"gate_refused", true}};
  out.json(name, body);
  std::cerr << "gate refused: " << g.reason << "\n";
}

int run_solve(const RunConfig& cfg) {
  const DomainPtr dom = domain_from(cfg);
  const SolverConfig scfg = solver_from(cfg);
  ProblemParams params;
  params.p = cfg.get_double("p", 4.0);
  params.q = cfg.get_double("q", 3.0);
  params.r = cfg.get_double("r", params.p);
  params.q_weight = cfg.get_double("q-weight", 1.0);
  if (params.sup()) throw Error(ErrorCode::InvalidArgument, "solve needs finite r; use limit-r for the sup norm");
  params.lambda = 1.0;
  params.validate();
  if (!(params.r >= 2)) throw Error(ErrorCode::InvalidArgument, "solve needs r >= 2");
  if (cfg.has("lambda") && cfg.has("lambda-mult"))
    throw Error(ErrorCode::InvalidArgument, "--lambda and --lambda-mult are exclusive");
  if (cfg.has("lambda")) params.lambda = cfg.get_double("lambda", 1.0);
  params.validate();
  const Output out = open_output("solve", cfg);

  params.lambda =
      resolve_lambda(cfg, [&] { return rayleigh_min_cached(params.p, params.r, dom, scfg).lambda_value; });
  params.validate();
  const GateDecision gate = existence_gate(params, dom, scfg);
  if (!gate.proceed) {
    report_gate(out, "solve.json", params, gate);
    return kGate;
  }
  const SolveReport rep = solve_least_energy(params, dom, scfg);
  Json body;
  body["command"] = "solve";
  body["domain"] = domain_summary(*dom);
  body["solver"] = to_json(scfg);
  body["gate"] = to_json(gate);
  body["report"] = to_json(rep);
  out.json("solve.json", body);
  out.trace("solve_trace.csv", rep.trace);
  out.field("field.bin", rep.field);
  out.svg("solve.svg", rep.field, "solve p=" + fmt_p(params.p) + " q=" + fmt_p(params.q) + " r=" + fmt_p(params.r));
  std::cout << "energy=" << format_number(rep.energy.total) << " nehari_residual=" << format_number(rep.nehari_residual)
            << " weak_residual=" << format_number(rep.weak_residual) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- limit-r

int run_limit_r(const RunConfig& cfg) {
  const DomainPtr dom = domain_from(cfg);
  const SolverConfig scfg = solver_from(cfg);
  ProblemParams params;
  params.p = cfg.get_double("p", 4.0);
  params.q = cfg.get_double("q", 3.0);
  params.q_weight = cfg.get_double("q-weight", 1.0);
  params.r = kSupNorm;
  params.lambda = cfg.has("lambda") && !cfg.has("lambda-mult") ? cfg.get_double("lambda", 1.0) : 1.0;
  params.validate();
  const std::vector<double> schedule = cfg.get_list("r-schedule", default_r_schedule());
  for (double r : schedule)
    if (!(r >= 2 && std::isfinite(r))) throw Error(ErrorCode::InvalidArgument, "r-schedule entries must be finite and >= 2");
  const Output out = open_output("limit-r", cfg);

  params.lambda = resolve_lambda(cfg, [&] { return existence_gate(params, dom, scfg).threshold; });
  params.validate();
  const GateDecision gate = existence_gate(params, dom, scfg);
  if (!gate.proceed) {
    report_gate(out, "limit_r.json", params, gate);
    return kGate;
  }
  const ContinuationReport rep = continue_in_r(params, dom, scfg, schedule);
  Json body;
  body["command"] = "limit-r";
  body["domain"] = domain_summary(*dom);
  body["solver"] = to_json(scfg);
  body["continuation"] = to_json(rep);
  out.json("limit_r.json", body);
  std::vector<std::vector<std::string>> rows;
  for (const ContinuationStep& s : rep.steps)
    rows.push_back({format_number(s.r), s.skipped ? "1" : "0", format_number(s.lambda_r_p), format_number(s.energy),
                    format_number(s.grad_q), format_number(s.load_norm), format_number(s.sup),
                    format_number(s.nehari_residual), std::to_string(s.iterations)});
  out.csv("limit_r_steps.csv",
          {"r", "skipped", "lambda_r_p", "energy", "grad_q", "u_r", "u_sup", "nehari_residual", "iterations"}, rows);
  out.field("field.bin", rep.report.field);
  out.svg("limit_r.svg", rep.report.field, "sup-norm limit p=" + fmt_p(params.p) + " q=" + fmt_p(params.q));
  std::cout << "cauchy_gap=" << format_number(rep.cauchy_gap) << " lr_sup_gap=" << format_number(rep.lr_sup_gap)
            << " nehari_sup_raw=" << format_number(rep.nehari_sup_raw) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- sweep-p

SweepSpec sweep_from(const RunConfig& cfg) {
  SweepSpec s;
  s.Q = cfg.get_double("Q", s.Q);
  if (cfg.has("Lambda") && truthy(cfg, "Lambda-inf"))
    throw Error(ErrorCode::InvalidArgument, "--Lambda and --Lambda-inf are exclusive");
  s.rule = truthy(cfg, "Lambda-inf") ? LambdaRule::Renorm : LambdaRule::Power;
  s.Lambda = cfg.get_double("Lambda", s.Lambda);
  s.c = cfg.get_double("c", s.c);
  s.p_list = cfg.get_list("p-list", s.p_list);
  s.r_top = cfg.get_double("r-top", s.r_top);
  s.envelope_slack = cfg.get_double("envelope-slack", s.envelope_slack);
  return s;
}

int run_sweep_p(const RunConfig& cfg) {
  const DomainPtr dom = domain_from(cfg);
  const SolverConfig scfg = solver_from(cfg);
  const SweepSpec spec = sweep_from(cfg);
  spec.validate(*dom);
  const bool with_reference = truthy(cfg, "reference");
  const Output out = open_output("sweep-p", cfg);

  const ConvergenceReport rep = run_sweep(spec, dom, scfg);
  Json body;
  body["command"] = "sweep-p";
  body["domain"] = domain_summary(*dom);
  body["solver"] = to_json(scfg);
  body["sweep"] = to_json(rep);
  if (with_reference) {
    SweepSpec rs = spec;
    rs.rule = LambdaRule::Renorm;
    const ConvergenceReport ref = run_sweep(rs, dom, scfg);
    body["consistency"] = to_json(check_mutual_consistency(rep, ScalarField::rho(dom), &ref));
    body["reference"] = to_json(ref);
  }
  out.json("sweep.json", body);
  if (out.wants("csv")) write_sweep_csv(out.path("sweep.csv"), rep, out.hash);
  for (const SweepPoint& pt : rep.points) {
    if (pt.skipped) continue;
    out.field("field_p" + fmt_p(pt.p) + ".bin", pt.field);
    out.svg("sweep_p" + fmt_p(pt.p) + ".svg", pt.field, "p=" + fmt_p(pt.p) + " q=" + fmt_p(pt.q));
  }
  for (const SweepPoint& pt : rep.points) {
    if (pt.skipped) {
      std::cout << "p=" << fmt_p(pt.p) << " skipped: " << pt.skip_reason << "\n";
      continue;
    }
    std::cout << "p=" << fmt_p(pt.p) << " u_sup=" << format_number(pt.u_sup) << " grad_sup=" << format_number(pt.grad_sup)
              << "\n";
  }
  if (rep.extrapolated.available)
    std::cout << "extrapolated u_sup=" << format_number(rep.extrapolated.u_sup)
              << " grad_sup=" << format_number(rep.extrapolated.grad_sup) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- infharm

NodeId resolve_puncture(const Domain& d, const std::string& text) {
  if (text == "auto") return rho_maximizers(d).primary;
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::InvalidArgument, "puncture must be auto or x,y");
  const Point x{parse_double("puncture", text.substr(0, comma)), parse_double("puncture", text.substr(comma + 1))};
  return d.nearest_node(x);
}

int run_infharm(const RunConfig& cfg) {
  const DomainPtr dom = domain_from(cfg);
  InfHarmonicProblem prob;
  prob.domain = dom;
  prob.peak = cfg.get_double("peak", 1.0);
  prob.puncture = resolve_puncture(*dom, cfg.get_string("puncture", "auto"));
  prob.validate();
  InfHarmConfig icfg;
  icfg.tol = cfg.get_double("tol", icfg.tol);
  icfg.max_iters = cfg.get_int("max-iters", icfg.max_iters);
  const Output out = open_output("infharm", cfg);

  const InfHarmResult res = infharm_solve(prob, icfg);
  const auto near = nodes_within(*dom, prob.puncture, 2.0 * dom->h());
  const double defect = infharm_defect(res.field, near);
  const ScalarField cone = cone_field(dom, prob.puncture, prob.peak);
  double cone_gap = 0.0;
  for (std::size_t n = 0; n < dom->node_count(); ++n)
    cone_gap = std::max(cone_gap, std::fabs(res.field[static_cast<NodeId>(n)] - cone[static_cast<NodeId>(n)]));
  cone_gap /= prob.peak;

  Json body;
  body["command"] = "infharm";
  body["domain"] = domain_summary(*dom);
  body["peak"] = prob.peak;
  body["puncture"] = prob.puncture;
  body["puncture_point"] = {dom->point(prob.puncture).x, dom->point(prob.puncture).y};
  body["iterations"] = res.iterations;
  body["max_change"] = res.max_change;
  body["defect"] = defect;
  body["cone_gap"] = cone_gap;
  out.json("infharm.json", body);
  out.field("infharm.bin", res.field);
  out.svg("infharm.svg", res.field, "infinity-harmonic, peak=" + fmt_p(prob.peak));
  std::cout << "iterations=" << res.iterations << " defect=" << format_number(defect)
            << " cone_gap=" << format_number(cone_gap) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- wiring

struct Sub {
  explicit Sub(CLI::App* a) : app(a) {}
  CLI::App* app;
  std::map<std::string, CLI::Option*> opts;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
};

void add_opt(Sub& s, const std::string& key, const std::string& help) {
  s.opts[key] = s.app->add_option("--" + key, s.values[key], help);
}

void add_flag(Sub& s, const std::string& key, const std::string& help) {
  s.opts[key] = s.app->add_flag("--" + key, s.flags[key], help);
}

void add_common(Sub& s) {
  s.app->set_help_flag("--help", "print this help");
  add_opt(s, "domain", "shape: disk:R | disk:cx,cy,R | square:S | rect:x0,y0,x1,y1 | lshape:x0,y0,x1,y1,nx,ny | polygon:x,y;...");
  add_opt(s, "h", "lattice spacing (default 1/64)");
  add_opt(s, "out", "output directory (default out)");
  add_opt(s, "formats", "subset of json,csv,svg (default all)");
  add_opt(s, "config", "flat key = value file; flags override it");
  add_opt(s, "seed", "restart seed");
  add_opt(s, "workers", "threads for restarts and sweep points (default: all cores)");
  add_opt(s, "max-iters", "iteration cap");
  add_opt(s, "tol-grad", "stationarity tolerance");
  add_opt(s, "tol-energy", "energy stall tolerance");
  add_opt(s, "restarts", "number of starts in solve");
}

RunConfig merged(const Sub& s) {
  RunConfig cfg;
  const auto c = s.opts.find("config");
  if (c != s.opts.end() && c->second->count()) cfg = RunConfig::load(s.values.at("config"));
  for (const auto& [key, opt] : s.opts) {
    if (!opt->count()) continue;
    if (s.flags.count(key)) cfg.set(key, s.flags.at(key) ? "true" : "false");
    else cfg.set(key, s.values.at(key));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pqlab: (p,q)-Laplacian least-energy solutions and their limits"};
  app.require_subcommand(1);

  Sub eigen{app.add_subcommand("eigen", "Rayleigh-quotient eigenvalue lambda_r(m)")};
  add_common(eigen);
  add_opt(eigen, "m", "gradient exponent (comma list allowed with --r-sweep)");
  add_opt(eigen, "r", "load exponent");
  add_flag(eigen, "r-sweep", "sweep r = 8, 16, ... and estimate lambda_inf(m)");
  add_opt(eigen, "r-top", "top of the r sweep (default max(128, 32 m))");

  Sub solve{app.add_subcommand("solve", "least-energy solution for finite r")};
  add_common(solve);
  add_opt(solve, "p", "leading exponent (default 4)");
  add_opt(solve, "q", "second exponent, q != p (default 3)");
  add_opt(solve, "r", "load exponent, >= 2 (default p)");
  add_opt(solve, "lambda", "raw lambda");
  add_opt(solve, "lambda-mult", "lambda = k * lambda_r(p) (default 2)");
  add_opt(solve, "q-weight", "weight of the q-gradient term (default 1)");

  Sub limit{app.add_subcommand("limit-r", "r -> infinity continuation to the sup-norm problem")};
  add_common(limit);
  add_opt(limit, "p", "leading exponent (default 4)");
  add_opt(limit, "q", "second exponent, q != p (default 3)");
  add_opt(limit, "lambda", "raw lambda");
  add_opt(limit, "lambda-mult", "lambda = k * lambda_inf(p) estimate (default 2)");
  add_opt(limit, "q-weight", "weight of the q-gradient term (default 1)");
  add_opt(limit, "r-schedule", "comma list or a..b doubling range (default 2..128)");

  Sub sweep{app.add_subcommand("sweep-p", "p -> infinity sweep with q = Q p")};
  add_common(sweep);
  add_opt(sweep, "Q", "ratio q/p");
  add_opt(sweep, "Lambda", "lambda_p = Lambda^p");
  add_flag(sweep, "Lambda-inf", "lambda_p = c |Omega| Lambda_inf^p");
  add_opt(sweep, "c", "renorm constant (default 2)");
  add_opt(sweep, "p-list", "comma list of p");
  add_opt(sweep, "r-top", "top of the inner r continuation");
  add_opt(sweep, "envelope-slack", "slack in u <= k rho + slack");
  add_flag(sweep, "reference", "also run the Lambda = Lambda_inf sweep and compare");

  Sub inf{app.add_subcommand("infharm", "infinity-harmonic function on the punctured domain")};
  add_common(inf);
  add_opt(inf, "peak", "value at the puncture");
  add_opt(inf, "puncture", "auto or x,y");
  add_opt(inf, "tol", "stop when the max change is below tol * peak");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (eigen.app->parsed()) return run_eigen(merged(eigen));
    if (solve.app->parsed()) return run_solve(merged(solve));
    if (limit.app->parsed()) return run_limit_r(merged(limit));
    if (sweep.app->parsed()) return run_sweep_p(merged(sweep));
    if (inf.app->parsed()) return run_infharm(merged(inf));
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kConfig;
}
