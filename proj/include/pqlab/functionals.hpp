#pragma once

#include <limits>
#include <span>
#include <vector>

#include "pqlab/fields.hpp"

namespace pqlab {

/// Sentinel for the sup-norm load term (the Dirac-source problem).
inline constexpr double kSupNorm = std::numeric_limits<double>::infinity();

enum class Regime { P_LT_Q, Q_LT_P };

const char* to_string(Regime regime);

struct ProblemParams {
  double p = 4.0;
  double q = 3.0;
  double r = 4.0;  // kSupNorm selects the sup-norm load
  double lambda = 1.0;
  /// Multiplier on the q-term. 0 reduces the operator to the pure p-Laplacian
  /// (used to check eigenfunctions); solvers require 1.
  double q_weight = 1.0;

  bool sup() const { return r == kSupNorm; }
  Regime regime() const { return p < q ? Regime::P_LT_Q : Regime::Q_LT_P; }
  /// Throws InvalidArgument unless p, q > 2, p != q, r >= 1 and lambda > 0.
  void validate() const;
};

struct EnergyBreakdown {
  double term_p = 0.0;
  double term_q = 0.0;
  double term_load = 0.0;
  double total = 0.0;
  double log_term_p = -std::numeric_limits<double>::infinity();
  double log_term_q = -std::numeric_limits<double>::infinity();
  double log_term_load = -std::numeric_limits<double>::infinity();
};

/// Logarithms of the three homogeneous pieces of the energy:
/// a = ||grad u||_p^p, b = ||grad u||_q^q, c = lambda ||u||_r^p (or ||u||_inf^p).
struct LogMeasures {
  double log_a = -std::numeric_limits<double>::infinity();
  double log_b = -std::numeric_limits<double>::infinity();
  double log_c = -std::numeric_limits<double>::infinity();
  /// log ||u||_r (or log ||u||_inf).
  double log_load_norm = -std::numeric_limits<double>::infinity();
};

LogMeasures log_measures(const Domain& domain, std::span<const double> values, const ProblemParams& params);
LogMeasures log_measures(const ScalarField& u, const ProblemParams& params);

/// I_{lambda,r}(u) for finite r, J_lambda(u) in sup mode.
EnergyBreakdown energy(const ScalarField& u, const ProblemParams& params);

/// Nodal gradient of I_{lambda,r} (finite r >= 2); zero on non-interior nodes.
ScalarField grad_energy_I(const ScalarField& u, const ProblemParams& params);

/// |a + b - c| / c.
double nehari_residual(const ScalarField& u, const ProblemParams& params);
double nehari_residual(const LogMeasures& m, const ProblemParams& params);

struct WeakResidual {
  double max_residual = 0.0;
  std::vector<double> per_test;
  /// Sup mode only: the maximizer set has diameter > 2h.
  bool ambiguous_maximizer = false;
};

/// Max over tests v of |<A(u), v> - load(u, v)| / normalizer, where the
/// normalizer is lambda ||u||_inf^(p-1) ||v||_inf (sup mode) or
/// lambda ||u||_r^(p-1) ||v||_r (finite r).
WeakResidual weak_residual(const ScalarField& u, const ProblemParams& params, std::span<const ScalarField> tests);

/// Hats at 20 quasi-random interior nodes, then u itself, then rho.
/// Hats whose node lies within `exclusion_radius` of `exclude_center` are skipped.
std::vector<ScalarField> standard_test_set(const ScalarField& u, NodeId exclude_center = -1,
                                           double exclusion_radius = 0.0);

namespace detail {

/// out += coeff * |u_i|^(r-2) u_i w_i / (umax^(r-1) * sum_j w_j (|u_j|/umax)^r),
/// i.e. the gradient of log(sum w |u|^r) / r.
void accumulate_lr_log_gradient(const Domain& domain, std::span<const double> values, double r, double coeff,
                                std::span<double> out);

}  // namespace detail

}  // namespace pqlab
