#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pqlab/descent.hpp"
#include "pqlab/eigenvalue.hpp"
#include "pqlab/functionals.hpp"

namespace pqlab {

struct GateDecision {
  bool proceed = false;
  /// lambda_r(p), or the lambda_inf(p) estimate in sup mode.
  double threshold = 0.0;
  /// lambda / threshold.
  double margin = 0.0;
  std::string reason;
};

/// Refuses when lambda <= (1 + 1e-3) * threshold.
GateDecision existence_gate(const ProblemParams& params, const DomainPtr& domain, const SolverConfig& cfg);

struct NehariProjection {
  double t = 0.0;
  double log_t = 0.0;
  ScalarField field;
};

/// Fiber critical point t = (b / (c - a))^(1/(p-q)) and t v. For q < p it is
/// the Nehari projection; for p < q the same t minimizes I along the ray.
/// Throws Error(ProjectionInfeasible) when c <= a.
NehariProjection nehari_project(const ScalarField& v, const ProblemParams& params);

struct SolveNorms {
  double grad_p = 0.0;
  double grad_q = 0.0;
  /// ||u||_r, or ||u||_inf in sup mode.
  double load = 0.0;
  double grad_sup = 0.0;
  double sup = 0.0;
};

struct SolveReport {
  ProblemParams params;
  ScalarField field;
  EnergyBreakdown energy;
  SolveNorms norms;
  MaxSet maxset;
  double nehari_residual = 0.0;
  double weak_residual = 0.0;
  int iterations = 0;
  double stationarity = 0.0;
  bool converged = false;
  std::string stop_reason;
  /// log t of the final fiber scaling applied to the normalized iterate.
  double scale_log = 0.0;
  bool multi_maximizer = false;
  bool gate_refused = false;
  double gate_threshold = 0.0;
  std::vector<double> restart_energies;
  double restart_spread = 0.0;
  std::vector<TraceRow> trace;
};

/// Fills energies, norms, maximizer set and residuals for a given field.
/// In sup mode the weak-residual hats skip a 2h-neighborhood of the maximizer.
SolveReport evaluate_solution(const ScalarField& u, const ProblemParams& params);

/// Least-energy solution for finite r >= 2: minimizes I over the fibers
/// t -> I(t v) with L-BFGS. Without `init`, cfg.restarts starts are tried
/// (e_r, rho, random bumps) and the lowest energy is kept.
/// Throws GateRefused if lambda <= (1 + 1e-3) lambda_r(p), NonConvergence if
/// no start converges.
SolveReport solve_least_energy(const ProblemParams& params, const DomainPtr& domain, const SolverConfig& cfg,
                               const std::optional<ScalarField>& init = std::nullopt);

struct ContinuationStep {
  double r = 0.0;
  bool skipped = false;
  double lambda_r_p = 0.0;
  double energy = 0.0;
  double grad_q = 0.0;
  double load_norm = 0.0;
  double sup = 0.0;
  double nehari_residual = 0.0;
  int iterations = 0;
};

struct ContinuationReport {
  /// Sup-mode report of the fiber-projected last finite-r solution.
  SolveReport report;
  std::vector<ContinuationStep> steps;
  GateDecision gate;
  double last_r = 0.0;
  double prev_r = 0.0;
  /// ||grad (u_last - u_prev)||_q / ||grad u_last||_q.
  double cauchy_gap = 0.0;
  /// Same gap after projecting both fields onto the sup-mode Nehari set.
  double cauchy_gap_projected = 0.0;
  /// 1 - ||u_last||_r / ||u_last||_inf.
  double lr_sup_gap = 0.0;
  /// Sup-mode Nehari residual of the unprojected last finite-r solution.
  double nehari_sup_raw = 0.0;
  /// Sup-mode solution before the final fiber projection (last finite r).
  ScalarField last_finite;
};

/// Default continuation schedule 2, 4, ..., 128.
std::vector<double> default_r_schedule();
/// 2, 4, ... up to r_top.
std::vector<double> r_schedule_to(double r_top);

/// r-continuation toward the sup-norm problem. Steps with lambda <= lambda_r(p)
/// are skipped; the first feasible step uses restarts, later steps warm start.
/// Throws GateRefused if the sup-mode gate refuses or no r is feasible.
ContinuationReport continue_in_r(const ProblemParams& params, const DomainPtr& domain, const SolverConfig& cfg,
                                 const std::vector<double>& r_schedule = default_r_schedule());

}  // namespace pqlab
