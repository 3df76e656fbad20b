#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pqlab/eigenvalue.hpp"
#include "pqlab/error.hpp"
#include "pqlab/solver.hpp"
#include "test_support.hpp"

using namespace pqlab;
using pqlab::testing_support::random_field;
using pqlab::testing_support::smooth_random_field;
using pqlab::testing_support::unit_disk;

namespace {

double lambda_r(double p, double r, const DomainPtr& d) {
  return rayleigh_min_cached(p, r, d, SolverConfig{}).lambda_value;
}

double a_of(const ScalarField& u, double p) { return std::pow(grad_norm_p(u, p).value, p); }

// Sets lambda so that c - a = b / t^(p-q) for the requested fiber point t.
ProblemParams params_for_t(const ScalarField& u, double p, double q, double r, double t) {
  ProblemParams P{p, q, r, 1.0, 1.0};
  const double a = a_of(u, p), b = a_of(u, q);
  const double load = std::pow(lp_norm(u, r), p);
  P.lambda = (a + b / std::pow(t, p - q)) / load;
  return P;
}

}  // namespace

TEST(Gate, RefusesBelowAndAtThreshold) {
  const DomainPtr d = unit_disk(1.0 / 32);
  const double lr = lambda_r(4, 4, d);
  ProblemParams P{4, 3, 4, 0.9 * lr, 1.0};
  GateDecision g = existence_gate(P, d, SolverConfig{});
  EXPECT_FALSE(g.proceed);
  EXPECT_NE(g.reason.find("lambda below lambda_r(p)"), std::string::npos);
  EXPECT_NEAR(g.threshold, lr, 1e-12 * lr);
  P.lambda = lr;
  EXPECT_FALSE(existence_gate(P, d, SolverConfig{}).proceed);
  P.lambda = 2 * lr;
  g = existence_gate(P, d, SolverConfig{});
  EXPECT_TRUE(g.proceed);
  EXPECT_NEAR(g.margin, 2.0, 1e-12);
}

TEST(Gate, SolveThrowsGateRefused) {
  const DomainPtr d = unit_disk(1.0 / 32);
  const ProblemParams P{4, 3, 4, 0.9 * lambda_r(4, 4, d), 1.0};
  try {
    solve_least_energy(P, d, SolverConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GateRefused);
  }
}

TEST(Nehari, ProjectionExamples) {
  std::mt19937_64 rng(41);
  const DomainPtr d = unit_disk(1.0 / 16);
  const ScalarField u = smooth_random_field(d, rng);
  // b = c - a with p - q = 1 gives t = 1; b = 8 (c - a) with p - q = 3 gives t = 2.
  EXPECT_NEAR(nehari_project(u, params_for_t(u, 4, 3, 4, 1.0)).t, 1.0, 1e-12);
  EXPECT_NEAR(nehari_project(u, params_for_t(u, 6, 3, 4, 2.0)).t, 2.0, 1e-12);
}

TEST(Nehari, InfeasibleProjectionThrows) {
  std::mt19937_64 rng(42);
  const DomainPtr d = unit_disk(1.0 / 16);
  const ScalarField u = smooth_random_field(d, rng);
  ProblemParams P{4, 3, 4, 1.0, 1.0};
  P.lambda = 0.5 * a_of(u, 4) / std::pow(lp_norm(u, 4), 4);
  try {
    nehari_project(u, P);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProjectionInfeasible);
  }
}

TEST(Nehari, PropertySuite) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const DomainPtr d = unit_disk(1.0 / 16);
  for (int k = 0; k < 200; ++k) {
    const double p = 2.0 + 14.0 * (1 - U(rng));
    double q = 2.0 + 14.0 * (1 - U(rng));
    if (std::fabs(p - q) < 0.05) q = p > 9 ? p - 1 : p + 1;
    const double r = 1.0 + 7.0 * U(rng);
    const ScalarField v = k % 2 ? smooth_random_field(d, rng) : random_field(d, rng);
    ProblemParams P{p, q, r, 1.0, 1.0};
    P.lambda = (1.2 + 4 * U(rng)) * a_of(v, p) / std::pow(lp_norm(v, r), p);

    const NehariProjection pr = nehari_project(v, P);
    EXPECT_LE(nehari_residual(pr.field, P), 1e-10) << k;
    // Idempotence.
    EXPECT_NEAR(nehari_project(pr.field, P).t, 1.0, 1e-12) << k;
    // t(s v) = t(v) / s.
    const double s = std::exp(12 * U(rng) - 6);
    EXPECT_NEAR(nehari_project(v.scaled(s), P).log_t, pr.log_t - std::log(s), 1e-11 * (1 + std::fabs(pr.log_t))) << k;
    // I = (1/q - 1/p) ||grad u||_q^q on the Nehari set.
    const EnergyBreakdown e = energy(pr.field, P);
    const double identity = (1 / q - 1 / p) * q * e.term_q;
    EXPECT_NEAR(e.total, identity, 1e-8 * std::fabs(identity)) << k << " p=" << p << " q=" << q;
  }
}

class SolveRegimes : public ::testing::TestWithParam<std::pair<double, double>> {};

TEST_P(SolveRegimes, LeastEnergyContract) {
  const auto [p, q] = GetParam();
  const DomainPtr d = unit_disk(1.0 / 32);
  const double r = 4;
  const ProblemParams P{p, q, r, 2 * lambda_r(p, r, d), 1.0};
  const SolveReport rep = solve_least_energy(P, d, SolverConfig{});
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(rep.nehari_residual, 1e-8);
  EXPECT_LE(rep.weak_residual, 1e-3);
  for (NodeId n : d->interior_nodes()) EXPECT_GE(rep.field[n], 0.0);
  // Nehari identity at the reported minimizer.
  EXPECT_NEAR(rep.energy.total, (1 / q - 1 / p) * q * rep.energy.term_q, 1e-8 * std::fabs(rep.energy.total));
  // Every projected iterate stays on the Nehari set and energies never increase.
  ASSERT_FALSE(rep.trace.empty());
  for (std::size_t k = 0; k < rep.trace.size(); ++k) {
    EXPECT_LE(rep.trace[k].nehari_residual, 1e-8);
    if (k > 0) {
      EXPECT_LE(rep.trace[k].energy, rep.trace[k - 1].energy) << k;
    }
  }
  // No start beats the reported one.
  for (double e : rep.restart_energies) EXPECT_GE(e, rep.energy.total - 1e-9 * std::fabs(rep.energy.total));
}

INSTANTIATE_TEST_SUITE_P(Regimes, SolveRegimes, ::testing::Values(std::make_pair(4.0, 3.0), std::make_pair(3.0, 4.0)));

TEST(Solve, QLessThanPLowerBounds) {
  const DomainPtr d = unit_disk(1.0 / 32);
  const double p = 4, q = 3, r = 4;
  const ProblemParams P{p, q, r, 2 * lambda_r(p, r, d), 1.0};
  const SolveReport rep = solve_least_energy(P, d, SolverConfig{});
  const double lq = lambda_r(q, r, d);
  // ||u||_r >= (lambda_r(q) / lambda)^(1/(p-q)).
  EXPECT_GE(rep.norms.load, std::pow(lq / P.lambda, 1 / (p - q)) * (1 - 1e-9));
  // I(u) >= (1/q - 1/p) lambda_r(q) (lambda_r(q) / lambda)^(q/(p-q)).
  EXPECT_GE(rep.energy.total, (1 / q - 1 / p) * lq * std::pow(lq / P.lambda, q / (p - q)) * (1 - 1e-9));
}

TEST(Solve, PLessThanQHasNegativeEnergyBelowEigenRay) {
  const DomainPtr d = unit_disk(1.0 / 32);
  const double p = 3, q = 4, r = 4;
  const ProblemParams P{p, q, r, 2 * lambda_r(p, r, d), 1.0};
  const SolveReport rep = solve_least_energy(P, d, SolverConfig{});
  EXPECT_LT(rep.energy.total, 0.0);
  const ScalarField e = rayleigh_min_cached(p, r, d, SolverConfig{}).eigenfield;
  // Small multiples of e_r already have negative energy.
  EXPECT_LT(energy(e.scaled(1e-3), P).total, 0.0);
  const double ray_min = energy(nehari_project(e, P).field, P).total;
  EXPECT_LE(rep.energy.total, ray_min * (1 - 1e-12));
}

TEST(Solve, DeterministicForFixedSeed) {
  const DomainPtr d = unit_disk(1.0 / 32);
  const ProblemParams P{4, 3, 4, 2 * lambda_r(4, 4, d), 1.0};
  const SolveReport a = solve_least_energy(P, d, SolverConfig{});
  const SolveReport b = solve_least_energy(P, d, SolverConfig{});
  ASSERT_EQ(a.field.size(), b.field.size());
  for (std::size_t k = 0; k < a.field.size(); ++k) ASSERT_EQ(a.field.values()[k], b.field.values()[k]);
  EXPECT_EQ(a.energy.total, b.energy.total);
}

TEST(Solve, IterationCapReportsNonConvergence) {
  const DomainPtr d = unit_disk(1.0 / 32);
  const ProblemParams P{4, 3, 4, 2 * lambda_r(4, 4, d), 1.0};
  SolverConfig cfg;
  cfg.max_iters = 2;
  try {
    solve_least_energy(P, d, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConvergence);
  }
}

TEST(Continuation, SupModeLimitAndAPrioriBound) {
  const DomainPtr d = unit_disk(1.0 / 32);
  const double p = 4, q = 3;
  ProblemParams P{p, q, kSupNorm, 1.0, 1.0};
  const double linf = existence_gate(P, d, SolverConfig{}).threshold;
  P.lambda = 2 * linf;
  const ContinuationReport rep = continue_in_r(P, d, SolverConfig{}, r_schedule_to(1024));
  EXPECT_TRUE(rep.gate.proceed);
  ASSERT_FALSE(rep.steps.empty());
  EXPECT_EQ(rep.last_r, 1024.0);
  // Steps at or below lambda_r(p) are skipped, the rest are solved.
  for (const ContinuationStep& s : rep.steps) EXPECT_EQ(s.skipped, P.lambda <= (1 + 1e-3) * s.lambda_r_p) << s.r;
  EXPECT_LE(rep.report.nehari_residual, 1e-10);
  // ||u||_r approaches ||u||_inf along the schedule.
  EXPECT_LT(rep.lr_sup_gap, 0.05);
  // ||grad u||_q <= |Omega|^(1/q) (lambda_inf / (lambda - lambda_inf))^(1/(p-q)), 10% slack.
  const double bound = std::pow(d->area(), 1 / q) * std::pow(linf / (P.lambda - linf), 1 / (p - q));
  EXPECT_LE(rep.report.norms.grad_q, 1.1 * bound);
  // Positive floor for the Nehari infimum: (1/q - 1/p) (lambda_inf(q)^(p/q) / lambda)^(q/(p-q)).
  const double linf_q = lambda_inf_estimate(q, d, SolverConfig{}).estimate;
  const double floor = (1 / q - 1 / p) * std::pow(std::pow(linf_q, p / q) / P.lambda, q / (p - q));
  EXPECT_GT(floor, 0.0);
  EXPECT_GE(rep.report.energy.total, 0.9 * floor);
}

TEST(Continuation, SupModeBoundForPLessThanQ) {
  const DomainPtr d = unit_disk(1.0 / 32);
  const double p = 3, q = 4;
  ProblemParams P{p, q, kSupNorm, 1.0, 1.0};
  const double linf = existence_gate(P, d, SolverConfig{}).threshold;
  P.lambda = 2 * linf;
  const ContinuationReport rep = continue_in_r(P, d, SolverConfig{}, r_schedule_to(1024));
  EXPECT_LT(rep.report.energy.total, 0.0);
  const double bound = std::pow(d->area(), 1 / q) * std::pow(P.lambda / linf, 1 / (q - p));
  EXPECT_LE(rep.report.norms.grad_q, 1.1 * bound);
}

TEST(Continuation, GateRefusesInSupMode) {
  const DomainPtr d = unit_disk(1.0 / 32);
  ProblemParams P{4, 3, kSupNorm, 1.0, 1.0};
  P.lambda = 0.9 * existence_gate(P, d, SolverConfig{}).threshold;
  try {
    continue_in_r(P, d, SolverConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GateRefused);
  }
}
