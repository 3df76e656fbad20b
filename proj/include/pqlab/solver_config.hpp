#pragma once

#include <cstdint>

namespace pqlab {

struct SolverConfig {
  int max_iters = 4000;
  /// Relative energy decrease below which an iteration counts as stalled.
  double tol_energy = 1e-9;
  /// Scale-free nodal stationarity target.
  double tol_grad = 1e-8;
  /// Stationarity accepted together with an energy stall.
  double tol_grad_stall = 1e-5;
  int stall_window = 10;
  double armijo_c1 = 1e-4;
  double armijo_shrink = 0.5;
  int max_backtracks = 40;
  int lbfgs_memory = 10;
  /// Preconditioner refactorization period (iterations).
  int precond_refresh = 8;
  /// Relative floor on the preconditioner weights.
  double precond_floor = 1e-8;
  int restarts = 3;
  std::uint64_t seed = 1;
  /// Threads for independent jobs (restarts, sweep points); 0 = hardware
  /// concurrency. Results do not depend on it.
  int workers = 0;

  /// Throws InvalidArgument on nonpositive tolerances or counts.
  void validate() const;
};

}  // namespace pqlab
