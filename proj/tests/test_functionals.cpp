#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pqlab/error.hpp"
#include "pqlab/functionals.hpp"
#include "test_support.hpp"

using namespace pqlab;
using pqlab::testing_support::random_field;
using pqlab::testing_support::smooth_random_field;
using pqlab::testing_support::unit_disk;

namespace {

struct Pieces {
  double a, b, c;
};

// a = ||grad u||_p^p, b = ||grad u||_q^q, c = lambda ||u||_r^p straight from the norms.
Pieces pieces(const ScalarField& u, const ProblemParams& P) {
  const double a = std::pow(grad_norm_p(u, P.p).value, P.p);
  const double b = std::pow(grad_norm_p(u, P.q).value, P.q);
  const double load = P.sup() ? sup_norm(u).max_value : lp_norm(u, P.r);
  return {a, b, P.lambda * std::pow(load, P.p)};
}

double dot(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.values()[k] * b.values()[k];
  return s;
}

}  // namespace

TEST(Functionals, ZeroFieldHasZeroEnergy) {
  const DomainPtr d = unit_disk(1.0 / 16);
  const EnergyBreakdown e = energy(ScalarField::zeros(d), ProblemParams{});
  EXPECT_EQ(e.term_p, 0.0);
  EXPECT_EQ(e.term_q, 0.0);
  EXPECT_EQ(e.term_load, 0.0);
  EXPECT_EQ(e.total, 0.0);
}

TEST(Functionals, EnergyMatchesDefinition) {
  std::mt19937_64 rng(21);
  const DomainPtr d = unit_disk(1.0 / 16);
  const ScalarField u = smooth_random_field(d, rng);
  ProblemParams P{4.5, 3.0, 3.0, 2.5, 1.0};
  const Pieces s = pieces(u, P);
  const EnergyBreakdown e = energy(u, P);
  EXPECT_NEAR(e.term_p, s.a / P.p, 1e-12 * s.a);
  EXPECT_NEAR(e.term_q, s.b / P.q, 1e-12 * s.b);
  EXPECT_NEAR(e.term_load, s.c / P.p, 1e-12 * s.c);
}

TEST(Functionals, NehariEnergyIdentityExample) {
  std::mt19937_64 rng(22);
  const DomainPtr d = unit_disk(1.0 / 16);
  ProblemParams P{5.0, 2.5, 4.0, 1.0, 1.0};
  ScalarField u = smooth_random_field(d, rng);
  const double b0 = std::pow(grad_norm_p(u, P.q).value, P.q);
  u = u.scaled(std::pow(10.0 / b0, 1.0 / P.q));
  const Pieces s = pieces(u, P);
  P.lambda = (s.a + s.b) / std::pow(lp_norm(u, P.r), P.p);
  EXPECT_LE(nehari_residual(u, P), 1e-10);
  EXPECT_NEAR(energy(u, P).total, 2.0, 1e-9);
}

TEST(Functionals, NehariResidualArithmetic) {
  const ProblemParams P;
  LogMeasures m;
  m.log_a = std::log(2.0);
  m.log_b = std::log(3.0);
  m.log_c = std::log(5.0);
  EXPECT_NEAR(nehari_residual(m, P), 0.0, 1e-15);
  m.log_c = std::log(10.0);
  EXPECT_NEAR(nehari_residual(m, P), 0.5, 1e-15);
  m.log_a = 0.0, m.log_b = 0.0, m.log_c = std::log(2.0);
  EXPECT_NEAR(nehari_residual(m, P), 0.0, 1e-15);
}

TEST(Functionals, FiberScalingIdentity) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const DomainPtr d = unit_disk(1.0 / 16);
  for (int k = 0; k < 20; ++k) {
    const ScalarField u = smooth_random_field(d, rng);
    ProblemParams P{2.2 + 6 * U(rng), 2.2 + 6 * U(rng), 2.0 + 4 * U(rng), 0.5 + 3 * U(rng), 1.0};
    if (std::fabs(P.p - P.q) < 0.1) P.q += 0.5;
    const double t = std::exp(4 * U(rng) - 2);
    const Pieces s = pieces(u, P), st = pieces(u.scaled(t), P);
    const double lhs = st.a + st.b - st.c;
    const double rhs = std::pow(t, P.q) * (s.b - std::pow(t, P.p - P.q) * (s.c - s.a));
    EXPECT_NEAR(lhs, rhs, 1e-11 * (st.a + st.b + st.c)) << k;
  }
}

TEST(Functionals, EnergyEvenness) {
  std::mt19937_64 rng(24);
  const DomainPtr d = unit_disk(1.0 / 16);
  const ProblemParams P{4.0, 3.0, 4.0, 3.0, 1.0};
  // Constant sign: identical terms.
  const ScalarField u = smooth_random_field(d, rng).scaled(-1.0);
  const EnergyBreakdown e = energy(u, P), ea = energy(u.abs(), P);
  EXPECT_EQ(e.term_p, ea.term_p);
  EXPECT_EQ(e.term_q, ea.term_q);
  EXPECT_EQ(e.term_load, ea.term_load);
  // Mixed sign: load term unchanged, gradient terms can only shrink.
  const ScalarField w = random_field(d, rng);
  const EnergyBreakdown f = energy(w, P), fa = energy(w.abs(), P);
  EXPECT_EQ(f.term_load, fa.term_load);
  EXPECT_LE(fa.term_p, f.term_p * (1 + 1e-14));
  EXPECT_LE(fa.term_q, f.term_q * (1 + 1e-14));
}

TEST(Functionals, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const DomainPtr d = unit_disk(1.0 / 8);
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    ProblemParams P;
    P.p = 2.2 + 3.8 * U(rng);
    do P.q = 2.2 + 3.8 * U(rng);
    while (std::fabs(P.q - P.p) < 0.05);
    P.r = inst % 2 ? 2.0 : 4.0;
    P.lambda = 0.5 + 4 * U(rng);
    const ScalarField u = smooth_random_field(d, rng).combined(1.0, random_field(d, rng), 0.2);
    const ScalarField v = random_field(d, rng);
    const double eps = 1e-6;
    const double fd = (energy(u.combined(1.0, v, eps), P).total - energy(u.combined(1.0, v, -eps), P).total) / (2 * eps);
    const double an = dot(grad_energy_I(u, P), v);
    const double rel = std::fabs(fd - an) / std::fabs(an);
    worst = std::max(worst, rel);
    EXPECT_LE(rel, 1e-5) << "instance " << inst << " p=" << P.p << " q=" << P.q << " r=" << P.r;
  }
  RecordProperty("worst_relative_error", std::to_string(worst));
}

TEST(Functionals, GradientVanishesOffInterior) {
  std::mt19937_64 rng(26);
  const DomainPtr d = unit_disk(1.0 / 16);
  const ScalarField g = grad_energy_I(smooth_random_field(d, rng), ProblemParams{});
  for (std::size_t k = 0; k < d->node_count(); ++k)
    if (!d->is_interior(static_cast<NodeId>(k))) {
      EXPECT_EQ(g.values()[k], 0.0);
    }
}

TEST(Functionals, GradientRejectsSupMode) {
  const DomainPtr d = unit_disk(1.0 / 16);
  ProblemParams P;
  P.r = kSupNorm;
  EXPECT_THROW(grad_energy_I(ScalarField::rho(d), P), Error);
}

TEST(Functionals, WeakResidualWithSelfEqualsNehariResidual) {
  std::mt19937_64 rng(27);
  const DomainPtr d = unit_disk(1.0 / 16);
  for (double r : {2.0, 4.0, kSupNorm}) {
    ProblemParams P{4.0, 3.0, r, 1.7, 1.0};
    ScalarField u = smooth_random_field(d, rng);
    if (r == kSupNorm) u.mutable_values()[d->nearest_node({0.1, 0.0})] *= 1.3;
    const std::vector<ScalarField> self{u};
    EXPECT_NEAR(weak_residual(u, P, self).per_test[0], nehari_residual(u, P), 1e-12) << r;
  }
}

TEST(Functionals, StandardTestSetLayout) {
  const DomainPtr d = unit_disk(1.0 / 32);
  const ScalarField rho = ScalarField::rho(d);
  const auto tests = standard_test_set(rho);
  ASSERT_EQ(tests.size(), 22u);
  for (std::size_t k = 0; k < 20; ++k) EXPECT_EQ(sup_norm(tests[k]).max_value, 1.0);
  const auto excluded = standard_test_set(rho, d->nearest_node({0, 0}), 0.25);
  ASSERT_EQ(excluded.size(), 22u);
  for (std::size_t k = 0; k < 20; ++k) {
    const Point x = d->point(sup_norm(excluded[k]).primary);
    EXPECT_GT(std::hypot(x.x, x.y), 0.25);
  }
}

TEST(Functionals, ParamsValidation) {
  EXPECT_THROW((ProblemParams{2.0, 3.0, 4.0, 1.0, 1.0}.validate()), Error);
  EXPECT_THROW((ProblemParams{4.0, 4.0, 4.0, 1.0, 1.0}.validate()), Error);
  EXPECT_THROW((ProblemParams{4.0, 3.0, 0.5, 1.0, 1.0}.validate()), Error);
  EXPECT_THROW((ProblemParams{4.0, 3.0, 4.0, 0.0, 1.0}.validate()), Error);
  EXPECT_NO_THROW((ProblemParams{4.0, 3.0, kSupNorm, 1.0, 1.0}.validate()));
  EXPECT_EQ((ProblemParams{3.0, 4.0}.regime()), Regime::P_LT_Q);
  EXPECT_EQ((ProblemParams{4.0, 3.0}.regime()), Regime::Q_LT_P);
}
