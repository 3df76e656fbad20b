#include "pqlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pqlab/error.hpp"
#include "pqlab/parallel.hpp"

namespace pqlab {

namespace {

constexpr double kGateSlack = 1e-3;

// psi(v) = s log|I(t(v) v)|, s = +1 for q < p and -1 for p < q. Both are
// minimized where the fiber energy is least; psi is 0-homogeneous in v.
class FiberObjective final : public HomogeneousObjective {
 public:
  FiberObjective(const Domain& d, const ProblemParams& params)
      : d_(d), pr_(params), kappa_(std::fabs(1.0 / params.q - 1.0 / params.p)),
        sign_(params.regime() == Regime::Q_LT_P ? 1.0 : -1.0) {}

  Evaluation evaluate(std::span<const double> x, std::span<double> grad) override {
    Evaluation ev;
    const LogMeasures m = log_measures(d_, x, pr_);
    if (!(m.log_c > m.log_a) || m.log_b == -INFINITY) {
      ev.value = INFINITY;
      return ev;
    }
    const double p = pr_.p, q = pr_.q;
    const double ldiff = log_diff_exp(m.log_c, m.log_a);
    const double lt = (m.log_b - ldiff) / (p - q);
    const double log_phi = std::log(kappa_) + q * lt + m.log_b;
    ev.value = sign_ * log_phi;
    ev.energy = sign_ * std::exp(log_phi);
    ev.nehari_residual = std::fabs(std::exp(m.log_a - m.log_c) + std::exp(m.log_b - m.log_c - (p - q) * lt) - 1.0);

    std::fill(grad.begin(), grad.end(), 0.0);
    const double gmax = detail::max_grad(d_, x);
    const double lg = std::log(gmax);
    // grad psi = [(G_p - lambda G_L) / (c - a) + G_q / b] / kappa
    detail::accumulate_grad_power_gradient(d_, x, p, gmax, std::exp((p - 1.0) * lg - ldiff) / kappa_, grad);
    detail::accumulate_grad_power_gradient(d_, x, q, gmax, pr_.q_weight * std::exp((q - 1.0) * lg - m.log_b) / kappa_,
                                           grad);
    detail::accumulate_lr_log_gradient(d_, x, pr_.r, -std::exp(m.log_c - ldiff) / kappa_, grad);
    return ev;
  }

  std::vector<PowerTerm> preconditioner_terms(std::span<const double> x) override {
    const LogMeasures m = log_measures(d_, x, pr_);
    const double ldiff = log_diff_exp(m.log_c, m.log_a);
    const double lg = std::log(detail::max_grad(d_, x));
    return {{std::exp((pr_.p - 2.0) * lg - ldiff) / kappa_, pr_.p},
            {pr_.q_weight * std::exp((pr_.q - 2.0) * lg - m.log_b) / kappa_, pr_.q}};
  }

  double stationarity(std::span<const double> x, std::span<const double> grad) override {
    const LogMeasures m = log_measures(d_, x, pr_);
    const double p = pr_.p, q = pr_.q;
    const double ldiff = log_diff_exp(m.log_c, m.log_a);
    const double lt = (m.log_b - ldiff) / (p - q);
    const double log_phi = std::log(kappa_) + q * lt + m.log_b;
    const double lgu = lt + std::log(detail::max_grad(d_, x));
    const double log_den = std::log(d_.h()) + log_sum_exp((p - 1.0) * lgu, (q - 1.0) * lgu);
    double gm = 0.0;
    for (double v : grad) gm = std::max(gm, std::fabs(v));
    // grad I(t v) = |I| grad psi / t
    return gm * std::exp(log_phi - lt - log_den);
  }

 private:
  const Domain& d_;
  ProblemParams pr_;
  double kappa_;
  double sign_;
};

ScalarField random_bumps(const DomainPtr& domain, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Domain& d = *domain;
  const auto interior = d.interior_nodes();
  std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
  std::uniform_real_distribution<double> amp(0.5, 1.5);
  const double sigma = 0.25 * std::sqrt(d.area());
  std::vector<Point> centers;
  std::vector<double> amps;
  for (int k = 0; k < 3; ++k) {
    centers.push_back(d.point(interior[pick(rng)]));
    amps.push_back(amp(rng));
  }
  std::vector<double> v(d.node_count(), 0.0);
  for (NodeId n : interior) {
    const Point x = d.point(n);
    double s = 0.0;
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const double dx = x.x - centers[k].x, dy = x.y - centers[k].y;
      s += amps[k] * std::exp(-(dx * dx + dy * dy) / (sigma * sigma));
    }
    v[n] = d.rho()[n] * s;
  }
  return ScalarField(domain, std::move(v), true);
}

double relative_grad_gap(const ScalarField& a, const ScalarField& b, double q) {
  const ScalarField diff = a.combined(1.0, b, -1.0);
  if (diff.is_zero()) return 0.0;
  return std::exp(grad_norm_p(diff, q).log_value - grad_norm_p(a, q).log_value);
}

}  // namespace

GateDecision existence_gate(const ProblemParams& params, const DomainPtr& domain, const SolverConfig& cfg) {
  params.validate();
  GateDecision g;
  if (params.sup()) {
    g.threshold = lambda_inf_estimate(params.p, domain, cfg).estimate;
  } else {
    if (params.r < 2.0) throw Error(ErrorCode::InvalidArgument, "gradient solvers need r >= 2");
    g.threshold = rayleigh_min_cached(params.p, params.r, domain, cfg).lambda_value;
  }
  g.margin = params.lambda / g.threshold;
  g.proceed = params.lambda > (1.0 + kGateSlack) * g.threshold;
  if (!g.proceed) {
    std::ostringstream os;
    os.precision(17);
    os << (params.sup() ? "lambda below lambda_inf(p)" : "lambda below lambda_r(p)") << ": lambda=" << params.lambda
       << " threshold=" << g.threshold;
    g.reason = os.str();
  }
  return g;
}

NehariProjection nehari_project(const ScalarField& v, const ProblemParams& params) {
  params.validate();
  if (v.is_zero()) throw Error(ErrorCode::ZeroField, "cannot project the zero field");
  const LogMeasures m = log_measures(v, params);
  if (!(m.log_c > m.log_a) || m.log_b == -INFINITY)
    throw Error(ErrorCode::ProjectionInfeasible, "lambda ||v||^p does not exceed ||grad v||_p^p");
  NehariProjection out;
  out.log_t = (m.log_b - log_diff_exp(m.log_c, m.log_a)) / (params.p - params.q);
  out.t = std::exp(out.log_t);
  out.field = v.scaled(out.t);
  return out;
}

SolveReport evaluate_solution(const ScalarField& u, const ProblemParams& params) {
  SolveReport rep;
  rep.params = params;
  rep.field = u;
  rep.energy = energy(u, params);
  rep.norms.grad_p = grad_norm_p(u, params.p).value;
  rep.norms.grad_q = grad_norm_p(u, params.q).value;
  rep.maxset = sup_norm(u);
  rep.norms.sup = rep.maxset.max_value;
  rep.norms.load = params.sup() ? rep.norms.sup : lp_norm(u, params.r);
  rep.norms.grad_sup = grad_sup(u);
  rep.multi_maximizer = !rep.maxset.unique;
  rep.nehari_residual = nehari_residual(u, params);
  const auto tests = params.sup() ? standard_test_set(u, rep.maxset.primary, 2.0 * u.domain().h())
                                  : standard_test_set(u);
  rep.weak_residual = weak_residual(u, params, tests).max_residual;
  return rep;
}

SolveReport solve_least_energy(const ProblemParams& params, const DomainPtr& domain, const SolverConfig& cfg,
                               const std::optional<ScalarField>& init) {
  params.validate();
  cfg.validate();
  if (params.sup() || params.r < 2.0)
    throw Error(ErrorCode::InvalidArgument, "least-energy solver needs finite r >= 2");
  const GateDecision gate = existence_gate(params, domain, cfg);
  if (!gate.proceed) throw Error(ErrorCode::GateRefused, gate.reason);

  std::vector<ScalarField> starts;
  if (init) {
    if (init->domain().hash() != domain->hash()) throw Error(ErrorCode::InvalidArgument, "initial field on another domain");
    starts.push_back(*init);
  } else {
    starts.push_back(rayleigh_min_cached(params.p, params.r, domain, cfg).eigenfield);
    if (cfg.restarts > 1) starts.push_back(ScalarField::rho(domain));
    for (int k = 2; k < cfg.restarts; ++k) starts.push_back(random_bumps(domain, cfg.seed + static_cast<std::uint64_t>(k)));
  }

  std::vector<std::optional<DescentResult>> runs(starts.size());
  std::vector<std::string> errors(starts.size());
  parallel_for(starts.size(), cfg.workers, [&](std::size_t k) {
    FiberObjective obj(*domain, params);
    const ScalarField& s = starts[k];
    try {
      runs[k] = minimize_homogeneous(obj, *domain, std::vector<double>(s.values().begin(), s.values().end()), cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ProjectionInfeasible) throw;
      errors[k] = e.what();
    }
  });

  std::optional<DescentResult> best;
  std::vector<double> energies;
  std::string last_error;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (!runs[k]) {
      last_error = errors[k];
      continue;
    }
    DescentResult& dr = *runs[k];
    energies.push_back(dr.eval.energy);
    const bool better = !best || (dr.converged && !best->converged) ||
                        (dr.converged == best->converged && dr.eval.value < best->eval.value);
    if (better) best = std::move(dr);
  }
  if (!best) throw Error(ErrorCode::ProjectionInfeasible, "no start lies in the projectable cone: " + last_error);
  if (!best->converged)
    throw Error(ErrorCode::NonConvergence, "least-energy descent stopped (" + best->stop_reason +
                                               "), stationarity " + std::to_string(best->stationarity));

  const ScalarField v = ScalarField(domain, std::move(best->x), true).abs();
  const NehariProjection proj = nehari_project(v, params);
  SolveReport rep = evaluate_solution(proj.field, params);
  rep.iterations = best->iterations;
  rep.stationarity = best->stationarity;
  rep.converged = best->converged;
  rep.stop_reason = best->stop_reason;
  rep.scale_log = proj.log_t;
  rep.gate_threshold = gate.threshold;
  rep.restart_energies = energies;
  if (!energies.empty()) {
    const auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());
    rep.restart_spread = *hi - *lo;
  }
  rep.trace = std::move(best->trace);
  return rep;
}

std::vector<double> r_schedule_to(double r_top) {
  if (!(r_top >= 2.0)) throw Error(ErrorCode::InvalidArgument, "r schedule top must be >= 2");
  std::vector<double> rs;
  for (double r = 2.0; r <= r_top * (1 + 1e-12); r *= 2.0) rs.push_back(r);
  return rs;
}

std::vector<double> default_r_schedule() { return r_schedule_to(128.0); }

ContinuationReport continue_in_r(const ProblemParams& params, const DomainPtr& domain, const SolverConfig& cfg,
                                 const std::vector<double>& r_schedule) {
  if (!params.sup()) throw Error(ErrorCode::InvalidArgument, "continuation targets the sup-norm problem");
  params.validate();
  if (r_schedule.empty()) throw Error(ErrorCode::InvalidArgument, "empty r schedule");
  for (std::size_t k = 0; k < r_schedule.size(); ++k)
    if (!(r_schedule[k] >= 2.0) || !std::isfinite(r_schedule[k]) || (k > 0 && r_schedule[k] <= r_schedule[k - 1]))
      throw Error(ErrorCode::InvalidArgument, "r schedule must be increasing, finite and >= 2");

  ContinuationReport out;
  out.gate = existence_gate(params, domain, cfg);
  if (!out.gate.proceed) throw Error(ErrorCode::GateRefused, out.gate.reason);

  std::optional<ScalarField> prev, last;
  int iterations = 0;
  for (double r : r_schedule) {
    ContinuationStep step;
    step.r = r;
    ProblemParams pr = params;
    pr.r = r;
    step.lambda_r_p = rayleigh_min_cached(params.p, r, domain, cfg).lambda_value;
    if (!(params.lambda > (1.0 + kGateSlack) * step.lambda_r_p)) {
      step.skipped = true;
      out.steps.push_back(step);
      continue;
    }
    const SolveReport rep = solve_least_energy(pr, domain, cfg, last);
    step.energy = rep.energy.total;
    step.grad_q = rep.norms.grad_q;
    step.load_norm = rep.norms.load;
    step.sup = rep.norms.sup;
    step.nehari_residual = rep.nehari_residual;
    step.iterations = rep.iterations;
    iterations += rep.iterations;
    out.steps.push_back(step);
    prev = std::move(last);
    last = rep.field;
    out.prev_r = out.last_r;
    out.last_r = r;
  }
  if (!last) throw Error(ErrorCode::GateRefused, "lambda <= lambda_r(p) at every r of the schedule");

  out.last_finite = *last;
  out.nehari_sup_raw = nehari_residual(*last, params);
  const double sup = sup_norm(*last).max_value;
  out.lr_sup_gap = 1.0 - lp_norm(*last, out.last_r) / sup;

  const NehariProjection proj = nehari_project(*last, params);
  if (prev) {
    out.cauchy_gap = relative_grad_gap(*last, *prev, params.q);
    const NehariProjection pp = nehari_project(*prev, params);
    out.cauchy_gap_projected = relative_grad_gap(proj.field, pp.field, params.q);
  }
  out.report = evaluate_solution(proj.field, params);
  out.report.iterations = iterations;
  out.report.converged = true;
  out.report.stop_reason = "continuation";
  out.report.scale_log = proj.log_t;
  out.report.gate_threshold = out.gate.threshold;
  return out;
}

}  // namespace pqlab
