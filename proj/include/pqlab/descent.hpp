#pragma once

#include <span>
#include <string>
#include <vector>

#include "pqlab/geometry.hpp"
#include "pqlab/solver_config.hpp"

namespace pqlab {

/// coeff * Hessian of (1/m) sum_T area |g_T|^m, evaluated on x / gmax(x).
struct PowerTerm {
  double coeff = 0.0;
  double m = 2.0;
};

struct Evaluation {
  /// Objective value; +inf marks an infeasible point.
  double value = 0.0;
  /// Physical energy reported in traces (Rayleigh quotient, I or J).
  double energy = 0.0;
  double nehari_residual = 0.0;
};

/// Objective on nodal vectors that is invariant under positive scaling.
/// The descent rescales iterates freely, so implementations must not depend
/// on the magnitude of x.
class HomogeneousObjective {
 public:
  virtual ~HomogeneousObjective() = default;
  /// Fills grad (node-indexed) when the value is finite.
  virtual Evaluation evaluate(std::span<const double> x, std::span<double> grad) = 0;
  virtual std::vector<PowerTerm> preconditioner_terms(std::span<const double> x) = 0;
  /// Scale-free stationarity measure compared against the tolerances.
  virtual double stationarity(std::span<const double> x, std::span<const double> grad) = 0;
};

struct TraceRow {
  int iter = 0;
  double energy = 0.0;
  double nehari_residual = 0.0;
  double step = 0.0;
  double stationarity = 0.0;
};

struct DescentResult {
  std::vector<double> x;
  Evaluation eval;
  double stationarity = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  /// log of the product of all normalization factors applied to the iterate.
  double log_scale = 0.0;
  int rescales = 0;
  std::vector<TraceRow> trace;
};

/// Preconditioned L-BFGS with Armijo backtracking. The initial inverse Hessian
/// is gamma * P^-1, P the assembled Hessian of the convex power terms.
/// Iterates are normalized to max |grad x| = 1 whenever it leaves [1/2, 2].
/// Throws Error(ProjectionInfeasible) if x0 is infeasible.
DescentResult minimize_homogeneous(HomogeneousObjective& objective, const Domain& domain, std::vector<double> x0,
                                   const SolverConfig& cfg);

}  // namespace pqlab
