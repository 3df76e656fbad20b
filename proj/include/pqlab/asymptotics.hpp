#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pqlab/solver.hpp"

namespace pqlab {

enum class LambdaRule { Power, Renorm };

const char* to_string(LambdaRule rule);

struct SweepSpec {
  /// Limit ratio q(p)/p; q = Q p exactly.
  double Q = 0.5;
  /// Lambda >= Lambda_inf. Ignored (set to Lambda_inf) under the renorm rule.
  double Lambda = 2.0;
  LambdaRule rule = LambdaRule::Power;
  /// Renorm constant c > 1 in lambda_p = c |Omega| Lambda_inf^p.
  double c = 2.0;
  std::vector<double> p_list{8, 12, 16, 24, 32};
  /// Top of the inner r-continuation 2, 4, ..., r_top.
  double r_top = 65536.0;
  /// Tolerance in u_p <= coeff rho + slack.
  double envelope_slack = 0.0125;

  /// Throws InvalidArgument on Q = 1, Q <= 0, p <= 2, Q p <= 2, unsorted
  /// p_list, c <= 1 or Lambda < Lambda_inf - 1e-9.
  void validate(const Domain& domain) const;
  /// lambda_p for the given rule.
  double lambda_p(double p, const Domain& domain) const;
  double effective_Lambda(const Domain& domain) const;
};

enum class LimitKind { Equality, BoundsOnly };

const char* to_string(LimitKind kind);

struct PredictedLimits {
  /// Equality value, or the upper bound for the bounds-only kind.
  double grad_sup = 0.0;
  /// Equality value (equals u_sup_lower for the bounds-only kind).
  double u_sup = 0.0;
  double u_sup_lower = 0.0;
  /// Coefficient k in u <= k rho.
  double envelope_coeff = 0.0;
  LimitKind kind = LimitKind::Equality;
};

/// Closed-form p -> infinity limits. Throws InvalidArgument for Q = 1 or Lambda < Lambda_inf.
PredictedLimits predicted_limits(double Q, double Lambda, double Lambda_inf);

struct SweepPoint {
  double p = 0.0;
  double q = 0.0;
  double lambda_p = 0.0;
  /// lambda_p^(1/p), computed in log form.
  double lambda_root = 0.0;
  bool skipped = false;
  std::string skip_reason;
  double gate_threshold = 0.0;
  double gate_margin = 0.0;
  double u_sup = 0.0;
  double grad_sup = 0.0;
  /// max |grad u| over triangles with every vertex farther than 2h from the maximizer.
  double grad_sup_off_tip = 0.0;
  NodeId max_node = -1;
  Point max_point;
  bool multi_maximizer = false;
  /// Distance from the maximizer to the nearest rho maximizer.
  double drift = 0.0;
  /// max over nodes of u - coeff rho.
  double envelope_max = 0.0;
  /// coeff rho(x_p) - u(x_p).
  double envelope_gap_at_max = 0.0;
  /// min of u over nodes within inradius/2 of the incenter.
  double interior_min = 0.0;
  double weak_residual = 0.0;
  double nehari_residual = 0.0;
  double nehari_sup_raw = 0.0;
  double cauchy_gap_projected = 0.0;
  double last_r = 0.0;
  double energy = 0.0;
  int iterations = 0;
  ScalarField field;
};

struct Extrapolated {
  bool available = false;
  double p1 = 0.0, p2 = 0.0;
  double u_sup = 0.0;
  double grad_sup = 0.0;
  double grad_sup_off_tip = 0.0;
};

struct ConvergenceReport {
  SweepSpec spec;
  double Lambda_inf = 0.0;
  double Lambda = 0.0;
  PredictedLimits predicted;
  std::vector<SweepPoint> points;
  Extrapolated extrapolated;
  /// Relative errors of the extrapolated values (equality kind only).
  double rel_err_u_sup = 0.0;
  double rel_err_grad_sup = 0.0;
  /// Bounds kind: u_sup >= u_sup_lower and grad_sup <= grad_sup at the largest p.
  bool bounds_hold = false;
};

/// f(inf) from two samples assuming f(p) = f_inf + C / p.
double richardson(double p1, double f1, double p2, double f2);

/// max |grad u| over triangles whose vertices all lie farther than `radius` from `center`.
double grad_sup_outside(const ScalarField& u, NodeId center, double radius);

/// Nodewise Richardson extrapolation of two fields.
ScalarField richardson_field(double p1, const ScalarField& f1, double p2, const ScalarField& f2);

/// Runs the sup-mode continuation at each p. Points whose gate refuses are
/// marked skipped. Throws NonConvergence when every p fails.
ConvergenceReport run_sweep(const SweepSpec& spec, const DomainPtr& domain, const SolverConfig& cfg);

struct ConsistencyDiagnostics {
  double rho_at_limit = 0.0;
  double rho_max = 0.0;
  /// rho(x_p) >= ||rho||_inf - 2h at the largest p.
  bool maximizer_on_incenter = false;
  bool unique_incenter = false;
  /// True when only the envelope check applies (ridge of maximizers or Q > 1).
  bool envelope_only = false;
  double scale_coeff = 0.0;
  /// max |u_p - coeff u_ref| / max u_p at the largest common p.
  double discrepancy = 0.0;
  /// Same with both sides Richardson-extrapolated nodewise over the last two common p.
  double discrepancy_extrapolated = 0.0;
  bool compared = false;
};

/// Checks the maximizer location and, on unique-incenter domains with Q < 1,
/// compares the report against coeff times the Lambda = Lambda_inf reference.
/// Throws InvalidArgument when the comparison applies but `reference` is null.
ConsistencyDiagnostics check_mutual_consistency(const ConvergenceReport& report, const ScalarField& rho,
                                                const ConvergenceReport* reference);

}  // namespace pqlab
