#include "pqlab/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "pqlab/error.hpp"

namespace pqlab {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

// Finite doubles go through as numbers; non-finite ones become strings so the
// output stays valid JSON and the value is not lost.
Json num(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

Json rle(std::span<const std::uint8_t> mask) {
  Json runs = Json::array();
  std::size_t k = 0;
  while (k < mask.size()) {
    std::size_t j = k;
    while (j < mask.size() && mask[j] == mask[k]) ++j;
    runs.push_back(Json::array({static_cast<int>(mask[k]), j - k}));
    k = j;
  }
  return runs;
}

Json point(Point p) { return Json::array({num(p.x), num(p.y)}); }

}  // namespace

Json to_json(const Domain& d) {
  Json j;
  j["shape"] = shape_to_string(d.shape());
  j["h"] = num(d.h());
  j["nx"] = d.nx();
  j["ny"] = d.ny();
  j["origin"] = point(d.origin());
  j["area"] = num(d.area());
  j["interior_count"] = d.interior_nodes().size();
  j["rho_max"] = num(d.rho_max());
  j["lambda_inf_cap"] = num(lambda_inf_cap(d));
  j["hash"] = d.hash_hex();
  j["interior_mask_rle"] = rle(d.interior_mask());
  j["boundary_mask_rle"] = rle(d.boundary_mask());
  Json rho = Json::array();
  for (double v : d.rho()) rho.push_back(num(v));
  j["rho"] = std::move(rho);
  return j;
}

Json to_json(const ProblemParams& p) {
  Json j;
  j["p"] = num(p.p);
  j["q"] = num(p.q);
  j["r"] = p.sup() ? Json("sup") : num(p.r);
  j["lambda"] = num(p.lambda);
  j["q_weight"] = num(p.q_weight);
  j["regime"] = to_string(p.regime());
  return j;
}

Json to_json(const SolverConfig& c) {
  Json j;
  j["max_iters"] = c.max_iters;
  j["tol_energy"] = num(c.tol_energy);
  j["tol_grad"] = num(c.tol_grad);
  j["tol_grad_stall"] = num(c.tol_grad_stall);
  j["stall_window"] = c.stall_window;
  j["armijo_c1"] = num(c.armijo_c1);
  j["armijo_shrink"] = num(c.armijo_shrink);
  j["lbfgs_memory"] = c.lbfgs_memory;
  j["precond_refresh"] = c.precond_refresh;
  j["restarts"] = c.restarts;
  j["seed"] = c.seed;
  return j;
}

Json to_json(const EnergyBreakdown& e) {
  Json j;
  j["term_p"] = num(e.term_p);
  j["term_q"] = num(e.term_q);
  j["term_load"] = num(e.term_load);
  j["total"] = num(e.total);
  j["log_term_p"] = num(e.log_term_p);
  j["log_term_q"] = num(e.log_term_q);
  j["log_term_load"] = num(e.log_term_load);
  return j;
}

Json to_json(const MaxSet& m, const Domain& d) {
  Json j;
  j["max_value"] = num(m.max_value);
  j["primary"] = m.primary;
  j["primary_point"] = m.primary >= 0 ? point(d.point(m.primary)) : Json();
  j["nodes"] = m.nodes;
  j["diameter"] = num(m.diameter);
  j["unique"] = m.unique;
  return j;
}

Json to_json(const GateDecision& g) {
  Json j;
  j["proceed"] = g.proceed;
  j["threshold"] = num(g.threshold);
  j["margin"] = num(g.margin);
  j["reason"] = g.reason;
  return j;
}

Json to_json(const SolveReport& r) {
  Json j;
  j["params"] = to_json(r.params);
  j["energy"] = to_json(r.energy);
  Json n;
  n["grad_p"] = num(r.norms.grad_p);
  n["grad_q"] = num(r.norms.grad_q);
  n[r.params.sup() ? "u_sup" : "u_r"] = num(r.norms.load);
  n["grad_sup"] = num(r.norms.grad_sup);
  n["sup"] = num(r.norms.sup);
  j["norms"] = std::move(n);
  j["maxset"] = r.field.size() ? to_json(r.maxset, r.field.domain()) : Json();
  j["nehari_residual"] = num(r.nehari_residual);
  j["weak_residual"] = num(r.weak_residual);
  j["iterations"] = r.iterations;
  j["stationarity"] = num(r.stationarity);
  j["converged"] = r.converged;
  j["stop_reason"] = r.stop_reason;
  j["scale_log"] = num(r.scale_log);
  j["flags"] = {{"multi_maximizer", r.multi_maximizer}, {"gate_refused", r.gate_refused}};
  j["gate_threshold"] = num(r.gate_threshold);
  Json re = Json::array();
  for (double e : r.restart_energies) re.push_back(num(e));
  j["restart_energies"] = std::move(re);
  j["restart_spread"] = num(r.restart_spread);
  return j;
}

Json to_json(const EigenResult& r) {
  Json j;
  j["m"] = num(r.m);
  j["r"] = num(r.r);
  j["lambda"] = num(r.lambda_value);
  j["iterations"] = r.iterations;
  j["residual"] = num(r.residual);
  j["converged"] = r.converged;
  j["stop_reason"] = r.stop_reason;
  if (r.eigenfield.size()) {
    j["eigenfield_lr_norm"] = num(lp_norm(r.eigenfield, r.r));
    j["eigenfield_sup"] = num(sup_norm(r.eigenfield).max_value);
  }
  return j;
}

Json to_json(const LambdaInfEstimate& e) {
  Json j;
  j["m"] = num(e.m);
  j["estimate"] = num(e.estimate);
  j["root"] = num(e.root);
  Json rs = Json::array(), tr = Json::array();
  for (double r : e.r_values) rs.push_back(num(r));
  for (double t : e.trend) tr.push_back(num(t));
  j["r_values"] = std::move(rs);
  j["trend"] = std::move(tr);
  j["proxy_gap"] = num(e.proxy_gap);
  return j;
}

Json to_json(const ContinuationReport& r) {
  Json j;
  j["gate"] = to_json(r.gate);
  Json steps = Json::array();
  for (const ContinuationStep& s : r.steps) {
    Json x;
    x["r"] = num(s.r);
    x["skipped"] = s.skipped;
    x["lambda_r_p"] = num(s.lambda_r_p);
    x["energy"] = num(s.energy);
    x["grad_q"] = num(s.grad_q);
    x["u_r"] = num(s.load_norm);
    x["u_sup"] = num(s.sup);
    x["nehari_residual"] = num(s.nehari_residual);
    x["iterations"] = s.iterations;
    steps.push_back(std::move(x));
  }
  j["steps"] = std::move(steps);
  j["last_r"] = num(r.last_r);
  j["prev_r"] = num(r.prev_r);
  j["cauchy_gap"] = num(r.cauchy_gap);
  j["cauchy_gap_projected"] = num(r.cauchy_gap_projected);
  j["lr_sup_gap"] = num(r.lr_sup_gap);
  j["nehari_sup_raw"] = num(r.nehari_sup_raw);
  j["report"] = to_json(r.report);
  return j;
}

Json to_json(const SweepSpec& s) {
  Json j;
  j["Q"] = num(s.Q);
  j["Lambda"] = num(s.Lambda);
  j["rule"] = to_string(s.rule);
  j["c"] = num(s.c);
  Json pl = Json::array();
  for (double p : s.p_list) pl.push_back(num(p));
  j["p_list"] = std::move(pl);
  j["r_top"] = num(s.r_top);
  j["envelope_slack"] = num(s.envelope_slack);
  j["extrapolation"] = "richardson, first order in 1/p, last two p";
  return j;
}

Json to_json(const PredictedLimits& p) {
  Json j;
  j["grad_sup"] = num(p.grad_sup);
  j["u_sup"] = num(p.u_sup);
  j["u_sup_lower"] = num(p.u_sup_lower);
  j["envelope_coeff"] = num(p.envelope_coeff);
  j["kind"] = to_string(p.kind);
  return j;
}

Json to_json(const ConvergenceReport& r) {
  Json j;
  j["spec"] = to_json(r.spec);
  j["Lambda_inf"] = num(r.Lambda_inf);
  j["Lambda"] = num(r.Lambda);
  j["predicted"] = to_json(r.predicted);
  Json pts = Json::array();
  for (const SweepPoint& pt : r.points) {
    Json x;
    x["p"] = num(pt.p);
    x["q"] = num(pt.q);
    x["lambda_p"] = num(pt.lambda_p);
    x["lambda_root"] = num(pt.lambda_root);
    x["skipped"] = pt.skipped;
    x["skip_reason"] = pt.skip_reason;
    if (!pt.skipped) {
      x["gate_threshold"] = num(pt.gate_threshold);
      x["gate_margin"] = num(pt.gate_margin);
      x["u_sup"] = num(pt.u_sup);
      x["grad_sup"] = num(pt.grad_sup);
      x["grad_sup_off_tip"] = num(pt.grad_sup_off_tip);
      x["max_node"] = pt.max_node;
      x["max_point"] = point(pt.max_point);
      x["multi_maximizer"] = pt.multi_maximizer;
      x["drift"] = num(pt.drift);
      x["envelope_max"] = num(pt.envelope_max);
      x["envelope_gap_at_max"] = num(pt.envelope_gap_at_max);
      x["interior_min"] = num(pt.interior_min);
      x["weak_residual"] = num(pt.weak_residual);
      x["nehari_residual"] = num(pt.nehari_residual);
      x["nehari_sup_raw"] = num(pt.nehari_sup_raw);
      x["cauchy_gap_projected"] = num(pt.cauchy_gap_projected);
      x["last_r"] = num(pt.last_r);
      x["energy"] = num(pt.energy);
      x["iterations"] = pt.iterations;
    }
    pts.push_back(std::move(x));
  }
  j["points"] = std::move(pts);
  Json ex;
  ex["available"] = r.extrapolated.available;
  ex["p1"] = num(r.extrapolated.p1);
  ex["p2"] = num(r.extrapolated.p2);
  ex["u_sup"] = num(r.extrapolated.u_sup);
  ex["grad_sup"] = num(r.extrapolated.grad_sup);
  ex["grad_sup_off_tip"] = num(r.extrapolated.grad_sup_off_tip);
  j["extrapolated"] = std::move(ex);
  j["rel_err_u_sup"] = num(r.rel_err_u_sup);
  j["rel_err_grad_sup"] = num(r.rel_err_grad_sup);
  j["bounds_hold"] = r.bounds_hold;
  return j;
}

Json to_json(const ConsistencyDiagnostics& c) {
  Json j;
  j["rho_at_limit"] = num(c.rho_at_limit);
  j["rho_max"] = num(c.rho_max);
  j["maximizer_on_incenter"] = c.maximizer_on_incenter;
  j["unique_incenter"] = c.unique_incenter;
  j["envelope_only"] = c.envelope_only;
  j["compared"] = c.compared;
  j["scale_coeff"] = num(c.scale_coeff);
  j["discrepancy"] = num(c.discrepancy);
  j["discrepancy_extrapolated"] = num(c.discrepancy_extrapolated);
  return j;
}

void write_json(const std::string& path, const Json& body, const std::string& config_hash) {
  Json j;
  j["artifact_version"] = kArtifactVersion;
  j["config_hash"] = config_hash;
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << j.dump(2) << "\n";
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows, const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << "# artifact_version=" << kArtifactVersion << " config_hash=" << config_hash << "\n";
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
    out << "\n";
  }
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace, const std::string& config_hash) {
  std::vector<std::vector<std::string>> rows;
  for (const TraceRow& t : trace)
    rows.push_back({std::to_string(t.iter), format_number(t.energy), format_number(t.nehari_residual),
                    format_number(t.step), format_number(t.stationarity)});
  write_csv(path, {"iter", "energy", "nehari_residual", "step", "stationarity"}, rows, config_hash);
}

void write_sweep_csv(const std::string& path, const ConvergenceReport& r, const std::string& config_hash) {
  std::vector<std::vector<std::string>> rows;
  for (const SweepPoint& pt : r.points) {
    if (pt.skipped) {
      rows.push_back({format_number(pt.p), format_number(pt.q), format_number(pt.lambda_root), "", "", "", "", "",
                      "", "", "", "", "1"});
      continue;
    }
    rows.push_back({format_number(pt.p), format_number(pt.q), format_number(pt.lambda_root), format_number(pt.u_sup),
                    format_number(pt.grad_sup), format_number(pt.grad_sup_off_tip), std::to_string(pt.max_node),
                    format_number(pt.max_point.x), format_number(pt.max_point.y), format_number(pt.envelope_max),
                    format_number(pt.weak_residual), format_number(pt.nehari_residual), "0"});
  }
  write_csv(path,
            {"p", "q", "lambda_root", "u_sup", "grad_sup", "grad_sup_off_tip", "max_node", "max_x", "max_y",
             "envelope_max", "weak_residual", "nehari_residual", "skipped"},
            rows, config_hash);
}

}  // namespace pqlab
