#pragma once

#include <span>
#include <vector>

#include "pqlab/fields.hpp"

namespace pqlab {

/// Dirichlet problem for the infinity-Laplacian on the punctured domain:
/// u = 0 on the boundary nodes and u(puncture) = peak.
struct InfHarmonicProblem {
  DomainPtr domain;
  NodeId puncture = -1;
  double peak = 1.0;

  /// Throws InvalidArgument unless the puncture is interior with rho > 2h and peak > 0.
  void validate() const;
};

struct InfHarmConfig {
  long max_iters = 2000000;
  /// Stop when the max nodal change is <= tol * peak.
  double tol = 1e-10;
};

struct InfHarmResult {
  ScalarField field;
  long iterations = 0;
  double max_change = 0.0;
};

/// Slope-balanced midrange over the 8-neighborhood: the value m with
/// max_j (u_j - m)/d_j + min_j (u_j - m)/d_j = 0, d_j the neighbor distance.
/// Equals (max + min)/2 when all neighbors are equidistant.
double midrange(std::span<const double> values, std::span<const double> dist);

/// Jacobi fixed-point iteration u <- midrange(neighbors), started from the
/// cone through the puncture. Throws NonConvergence past max_iters.
InfHarmResult infharm_solve(const InfHarmonicProblem& problem, const InfHarmConfig& cfg = {});

/// coeff (1 - |x - center| / beta), beta the largest boundary distance from
/// center; clipped at 0 and zero off the interior.
ScalarField cone_field(const DomainPtr& domain, NodeId center, double coeff);

/// max over interior nodes not in `exclude` of |u - midrange(neighbors)| / ||u||_inf.
double infharm_defect(const ScalarField& u, std::span<const NodeId> exclude);

/// Interior nodes within `radius` of `center`.
std::vector<NodeId> nodes_within(const Domain& domain, NodeId center, double radius);

}  // namespace pqlab
