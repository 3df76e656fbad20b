#include "pqlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "pqlab/error.hpp"
#include "pqlab/parallel.hpp"

namespace pqlab {

const char* to_string(LambdaRule rule) { return rule == LambdaRule::Power ? "power" : "renorm"; }

const char* to_string(LimitKind kind) { return kind == LimitKind::Equality ? "equality" : "bounds-only"; }

void SweepSpec::validate(const Domain& domain) const {
  if (!(Q > 0) || !std::isfinite(Q)) throw Error(ErrorCode::InvalidArgument, "Q must be positive");
  if (Q == 1.0) throw Error(ErrorCode::InvalidArgument, "Q = 1 is excluded");
  if (p_list.empty()) throw Error(ErrorCode::InvalidArgument, "empty p list");
  for (std::size_t k = 0; k < p_list.size(); ++k) {
    if (!(p_list[k] > 2.0) || !(Q * p_list[k] > 2.0))
      throw Error(ErrorCode::InvalidArgument, "every p and Q p must exceed 2");
    if (k > 0 && !(p_list[k] > p_list[k - 1])) throw Error(ErrorCode::InvalidArgument, "p list must increase");
  }
  if (rule == LambdaRule::Renorm && !(c > 1.0)) throw Error(ErrorCode::InvalidArgument, "renorm constant must exceed 1");
  if (rule == LambdaRule::Power && !(Lambda >= lambda_inf_cap(domain) - 1e-9))
    throw Error(ErrorCode::InvalidArgument, "Lambda must be >= Lambda_inf");
  if (!(r_top >= 2.0)) throw Error(ErrorCode::InvalidArgument, "r_top must be >= 2");
  if (!(envelope_slack >= 0.0)) throw Error(ErrorCode::InvalidArgument, "envelope slack must be nonnegative");
}

double SweepSpec::effective_Lambda(const Domain& domain) const {
  return rule == LambdaRule::Renorm ? lambda_inf_cap(domain) : Lambda;
}

double SweepSpec::lambda_p(double p, const Domain& domain) const {
  if (rule == LambdaRule::Power) return std::exp(p * std::log(Lambda));
  return std::exp(std::log(c * domain.area()) + p * std::log(lambda_inf_cap(domain)));
}

PredictedLimits predicted_limits(double Q, double Lambda, double Lambda_inf) {
  if (!(Q > 0) || Q == 1.0) throw Error(ErrorCode::InvalidArgument, "Q must be positive and different from 1");
  if (!(Lambda_inf > 0)) throw Error(ErrorCode::InvalidArgument, "Lambda_inf must be positive");
  if (!(Lambda >= Lambda_inf - 1e-9)) throw Error(ErrorCode::InvalidArgument, "Lambda must be >= Lambda_inf");
  PredictedLimits out;
  const bool at_cap = std::fabs(Lambda - Lambda_inf) <= 1e-9 * Lambda_inf;
  const double k = at_cap ? 1.0 : std::pow(Lambda_inf / Lambda, 1.0 / (1.0 - Q));
  out.grad_sup = k;
  out.envelope_coeff = k;
  if (at_cap || Q < 1.0) {
    out.kind = LimitKind::Equality;
    out.u_sup = k / Lambda_inf;
    out.u_sup_lower = out.u_sup;
  } else {
    out.kind = LimitKind::BoundsOnly;
    out.u_sup_lower = 1.0 / Lambda_inf;
    out.u_sup = out.u_sup_lower;
  }
  return out;
}

double richardson(double p1, double f1, double p2, double f2) {
  if (p1 == p2) throw Error(ErrorCode::InvalidArgument, "Richardson needs distinct p");
  return (p2 * f2 - p1 * f1) / (p2 - p1);
}

ScalarField richardson_field(double p1, const ScalarField& f1, double p2, const ScalarField& f2) {
  if (p1 == p2) throw Error(ErrorCode::InvalidArgument, "Richardson needs distinct p");
  return f2.combined(p2 / (p2 - p1), f1, -p1 / (p2 - p1));
}

namespace {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

double grad_sup_outside(const ScalarField& u, NodeId center, double radius) {
  const Domain& d = u.domain();
  const Point c = d.point(center);
  const CellGradients cg = gradients(u);
  const auto cells = d.cells();
  auto far = [&](NodeId n) { return distance(d.point(n), c) > radius + 1e-12 * d.h(); };
  double best = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const Cell& cell = cells[k];
    const bool sw = far(cell.sw), se = far(cell.se), nw = far(cell.nw), ne = far(cell.ne);
    const Vec2 a = cg.grad[2 * k], b = cg.grad[2 * k + 1];
    if (sw && se && ne) best = std::max(best, std::hypot(a.x, a.y));
    if (sw && ne && nw) best = std::max(best, std::hypot(b.x, b.y));
  }
  return best;
}

ConvergenceReport run_sweep(const SweepSpec& spec, const DomainPtr& domain, const SolverConfig& cfg) {
  const Domain& d = *domain;
  spec.validate(d);
  ConvergenceReport rep;
  rep.spec = spec;
  rep.Lambda_inf = lambda_inf_cap(d);
  rep.Lambda = spec.effective_Lambda(d);
  rep.predicted = predicted_limits(spec.Q, rep.Lambda, rep.Lambda_inf);
  const RhoMaximizers rm = rho_maximizers(d);
  const Point incenter = d.point(rm.primary);
  const auto schedule = r_schedule_to(spec.r_top);

  rep.points.resize(spec.p_list.size());
  parallel_for(spec.p_list.size(), cfg.workers, [&](std::size_t idx) {
    const double p = spec.p_list[idx];
    SweepPoint& pt = rep.points[idx];
    pt.p = p;
    pt.q = spec.Q * p;
    pt.lambda_p = spec.lambda_p(p, d);
    pt.lambda_root = std::exp(std::log(pt.lambda_p) / p);
    ProblemParams params{p, pt.q, kSupNorm, pt.lambda_p};
    ContinuationReport cont;
    try {
      cont = continue_in_r(params, domain, cfg, schedule);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::GateRefused && e.code() != ErrorCode::NonConvergence &&
          e.code() != ErrorCode::ProjectionInfeasible)
        throw;
      pt.skipped = true;
      pt.skip_reason = std::string(to_string(e.code())) + ": " + e.what();
      return;
    }
    const SolveReport& s = cont.report;
    pt.gate_threshold = cont.gate.threshold;
    pt.gate_margin = cont.gate.margin;
    pt.u_sup = s.norms.sup;
    pt.grad_sup = s.norms.grad_sup;
    pt.max_node = s.maxset.primary;
    pt.max_point = d.point(pt.max_node);
    pt.grad_sup_off_tip = grad_sup_outside(s.field, pt.max_node, 2.0 * d.h());
    pt.multi_maximizer = s.multi_maximizer;
    pt.drift = INFINITY;
    for (NodeId n : rm.nodes) pt.drift = std::min(pt.drift, distance(pt.max_point, d.point(n)));
    const double k = rep.predicted.envelope_coeff;
    const auto rho = d.rho();
    const auto u = s.field.values();
    pt.envelope_max = -INFINITY;
    pt.interior_min = INFINITY;
    for (std::size_t n = 0; n < u.size(); ++n) {
      if (!d.is_interior(static_cast<NodeId>(n)) && !d.is_boundary(static_cast<NodeId>(n))) continue;
      pt.envelope_max = std::max(pt.envelope_max, u[n] - k * rho[n]);
      if (d.is_interior(static_cast<NodeId>(n)) && distance(d.point(static_cast<NodeId>(n)), incenter) <= 0.5 * rm.max_rho)
        pt.interior_min = std::min(pt.interior_min, u[n]);
    }
    pt.envelope_gap_at_max = k * rho[pt.max_node] - u[pt.max_node];
    pt.weak_residual = s.weak_residual;
    pt.nehari_residual = s.nehari_residual;
    pt.nehari_sup_raw = cont.nehari_sup_raw;
    pt.cauchy_gap_projected = cont.cauchy_gap_projected;
    pt.last_r = cont.last_r;
    pt.energy = s.energy.total;
    pt.iterations = s.iterations;
    pt.field = s.field;
  });

  std::vector<const SweepPoint*> ok;
  for (const SweepPoint& pt : rep.points)
    if (!pt.skipped) ok.push_back(&pt);
  if (ok.empty()) throw Error(ErrorCode::NonConvergence, "every p of the sweep failed or was refused");
  if (ok.size() >= 2) {
    const SweepPoint& a = *ok[ok.size() - 2];
    const SweepPoint& b = *ok.back();
    rep.extrapolated.available = true;
    rep.extrapolated.p1 = a.p;
    rep.extrapolated.p2 = b.p;
    rep.extrapolated.u_sup = richardson(a.p, a.u_sup, b.p, b.u_sup);
    rep.extrapolated.grad_sup = richardson(a.p, a.grad_sup, b.p, b.grad_sup);
    rep.extrapolated.grad_sup_off_tip = richardson(a.p, a.grad_sup_off_tip, b.p, b.grad_sup_off_tip);
  }
  if (rep.predicted.kind == LimitKind::Equality && rep.extrapolated.available) {
    rep.rel_err_u_sup = std::fabs(rep.extrapolated.u_sup - rep.predicted.u_sup) / rep.predicted.u_sup;
    rep.rel_err_grad_sup = std::fabs(rep.extrapolated.grad_sup - rep.predicted.grad_sup) / rep.predicted.grad_sup;
  }
  const SweepPoint& last = *ok.back();
  rep.bounds_hold = last.u_sup >= rep.predicted.u_sup_lower && last.grad_sup <= rep.predicted.grad_sup;
  return rep;
}

ConsistencyDiagnostics check_mutual_consistency(const ConvergenceReport& report, const ScalarField& rho,
                                                const ConvergenceReport* reference) {
  const Domain& d = rho.domain();
  ConsistencyDiagnostics out;
  std::vector<const SweepPoint*> ok;
  for (const SweepPoint& pt : report.points)
    if (!pt.skipped) ok.push_back(&pt);
  if (ok.empty()) throw Error(ErrorCode::InvalidArgument, "report has no solved points");
  const SweepPoint& last = *ok.back();
  out.rho_max = d.rho_max();
  out.rho_at_limit = rho[last.max_node];
  out.maximizer_on_incenter = out.rho_at_limit >= out.rho_max - 2.0 * d.h() - 1e-12;
  out.unique_incenter = rho_maximizers(d).unique;
  out.envelope_only = !out.unique_incenter || !(report.spec.Q < 1.0);
  if (out.envelope_only) return out;
  if (!reference) throw Error(ErrorCode::InvalidArgument, "missing reference run");

  out.scale_coeff = std::pow(report.Lambda_inf / report.Lambda, 1.0 / (1.0 - report.spec.Q));
  // Largest p solved in both runs, and the one before it.
  std::vector<std::pair<const SweepPoint*, const SweepPoint*>> common;
  for (const SweepPoint* a : ok)
    for (const SweepPoint& b : reference->points)
      if (!b.skipped && b.p == a->p) common.emplace_back(a, &b);
  if (common.empty()) throw Error(ErrorCode::InvalidArgument, "reference run shares no p with the report");

  auto discrepancy = [&](const ScalarField& u, const ScalarField& ref) {
    const auto a = u.values();
    const auto b = ref.values();
    double peak = 0.0, diff = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
      peak = std::max(peak, std::fabs(a[n]));
      diff = std::max(diff, std::fabs(a[n] - out.scale_coeff * b[n]));
    }
    return diff / peak;
  };
  const auto& [u_last, r_last] = common.back();
  out.discrepancy = discrepancy(u_last->field, r_last->field);
  out.discrepancy_extrapolated = out.discrepancy;
  if (common.size() >= 2) {
    const auto& [u_prev, r_prev] = common[common.size() - 2];
    const ScalarField ue = richardson_field(u_prev->p, u_prev->field, u_last->p, u_last->field);
    const ScalarField re = richardson_field(r_prev->p, r_prev->field, r_last->p, r_last->field);
    out.discrepancy_extrapolated = discrepancy(ue, re);
  }
  out.compared = true;
  return out;
}

}  // namespace pqlab
