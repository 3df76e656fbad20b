#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pqlab/descent.hpp"
#include "pqlab/fields.hpp"
#include "pqlab/solver_config.hpp"

namespace pqlab {

struct EigenResult {
  double m = 2.0;
  double r = 2.0;
  /// lambda_r(m) = ||grad e||_m^m with ||e||_r = 1.
  double lambda_value = 0.0;
  ScalarField eigenfield;
  int iterations = 0;
  /// Scale-free stationarity of the Rayleigh quotient at exit.
  double residual = 0.0;
  bool converged = false;
  std::string stop_reason;
  std::vector<TraceRow> trace;
};

/// Minimizes ||grad u||_m^m / ||u||_r^m from rho (or `init`) and returns the
/// nonnegative normalized minimizer. Requires m >= 2 and finite r >= 2.
/// Throws Error(NonConvergence) if the descent stops short of the tolerances.
EigenResult rayleigh_min(double m, double r, const DomainPtr& domain, const SolverConfig& cfg,
                         const std::optional<ScalarField>& init = std::nullopt);

/// Memoized rayleigh_min keyed on (domain, m, r, tolerances). Warm starts
/// from the nearest cached r at the same m when one exists.
const EigenResult& rayleigh_min_cached(double m, double r, const DomainPtr& domain, const SolverConfig& cfg);

/// Drops all memoized eigen solves.
void clear_eigen_cache();

/// Default top of the r ladder used for lambda_inf(m): max(128, 32 m).
double default_ladder_top(double m);

/// r = 8, 16, ... up to r_top (inclusive, powers of two times 8).
std::vector<double> r_ladder(double r_top);

struct LambdaInfEstimate {
  double m = 0.0;
  /// lambda_r(m) at the top of the ladder.
  double estimate = 0.0;
  /// estimate^(1/m), comparable with Lambda_inf.
  double root = 0.0;
  std::vector<double> r_values;
  std::vector<double> trend;
  /// Relative gap between the last two ladder values.
  double proxy_gap = 0.0;
};

/// Finite-r proxy for lambda_inf(m) = min ||grad u||_m^m / ||u||_inf^m.
/// r_top <= 0 selects default_ladder_top(m).
LambdaInfEstimate lambda_inf_estimate(double m, const DomainPtr& domain, const SolverConfig& cfg, double r_top = 0.0);

}  // namespace pqlab
