#include <cmath>

#include <gtest/gtest.h>

#include "pqlab/asymptotics.hpp"
#include "pqlab/error.hpp"
#include "test_support.hpp"

using namespace pqlab;
using pqlab::testing_support::unit_disk;

namespace {

// Continuum radial solution of the point-load problem on the unit disk with
// load at the center: 2 pi r (s^(p-1) + s^(q-1)) = F, u0 = int_0^1 s dr and
// lambda u0^(p-1) = F. Returns u0 = ||u||_inf.
double radial_peak(double p, double q, double log_lambda) {
  auto slope = [&](double y) {
    // s with s^(p-1) + s^(q-1) = y, bisection in log s.
    double lo = -60, hi = 60;
    for (int k = 0; k < 80; ++k) {
      const double mid = 0.5 * (lo + hi);
      const double s = std::exp(mid);
      (std::pow(s, p - 1) + std::pow(s, q - 1) > y ? hi : lo) = mid;
    }
    return std::exp(0.5 * (lo + hi));
  };
  auto peak_for_flux = [&](double F) {
    // r = x^4 removes the r^(-1/(p-1)) singularity at the load.
    const int n = 2000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) / n;
      const double r = std::pow(x, 4);
      sum += slope(F / (2 * M_PI * r)) * 4 * std::pow(x, 3);
    }
    return sum / n;
  };
  double lo = -40, hi = 200;
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double g = log_lambda + (p - 1) * std::log(peak_for_flux(std::exp(mid))) - mid;
    (g > 0 ? hi : lo) = mid;
  }
  return peak_for_flux(std::exp(0.5 * (lo + hi)));
}

}  // namespace

TEST(Asymptotics, PredictedLimitsEquality) {
  const PredictedLimits a = predicted_limits(0.5, 2.0, 1.0);
  EXPECT_EQ(a.kind, LimitKind::Equality);
  EXPECT_NEAR(a.grad_sup, 0.25, 1e-15);
  EXPECT_NEAR(a.u_sup, 0.25, 1e-15);
  EXPECT_NEAR(a.envelope_coeff, 0.25, 1e-15);
}

TEST(Asymptotics, PredictedLimitsBoundsOnly) {
  const PredictedLimits b = predicted_limits(2.0, 2.0, 1.0);
  EXPECT_EQ(b.kind, LimitKind::BoundsOnly);
  EXPECT_NEAR(b.grad_sup, 2.0, 1e-15);
  EXPECT_NEAR(b.u_sup_lower, 1.0, 1e-15);
}

TEST(Asymptotics, PredictedLimitsAtLambdaInf) {
  for (double Q : {0.25, 0.5, 2.0, 3.0}) {
    for (double Li : {1.0, 2.0}) {
      const PredictedLimits c = predicted_limits(Q, Li, Li);
      EXPECT_EQ(c.kind, LimitKind::Equality) << Q;
      EXPECT_NEAR(c.u_sup, 1 / Li, 1e-15);
      EXPECT_NEAR(c.grad_sup, 1.0, 1e-15);
      EXPECT_NEAR(c.envelope_coeff, 1.0, 1e-15);
    }
  }
}

TEST(Asymptotics, PredictedLimitsRejectBadInput) {
  EXPECT_THROW(predicted_limits(1.0, 2.0, 1.0), Error);
  EXPECT_THROW(predicted_limits(0.5, 0.5, 1.0), Error);
}

TEST(Asymptotics, LambdaRules) {
  const DomainPtr d = unit_disk(1.0 / 32);
  SweepSpec s;
  s.Lambda = 2.0;
  for (double p : {8.0, 64.0, 512.0, 1000.0}) {
    EXPECT_NEAR(std::log(s.lambda_p(p, *d)) / p, std::log(2.0), 1e-15) << p;
  }
  s.rule = LambdaRule::Renorm;
  s.c = 2.0;
  EXPECT_EQ(s.effective_Lambda(*d), lambda_inf_cap(*d));
  for (double p : {8.0, 32.0, 128.0}) {
    const double root = std::exp(std::log(s.lambda_p(p, *d)) / p);
    EXPECT_NEAR(root / lambda_inf_cap(*d), std::pow(2.0 * d->area(), 1 / p), 1e-13) << p;
  }
}

TEST(Asymptotics, SpecValidation) {
  const DomainPtr d = unit_disk(1.0 / 32);
  SweepSpec s;
  s.Q = 1.0;
  EXPECT_THROW(s.validate(*d), Error);
  s = SweepSpec{};
  s.Lambda = 0.5;
  EXPECT_THROW(s.validate(*d), Error);
  s = SweepSpec{};
  s.p_list = {16, 8};
  EXPECT_THROW(s.validate(*d), Error);
  s = SweepSpec{};
  s.Q = 0.2;
  s.p_list = {8};
  EXPECT_THROW(s.validate(*d), Error);
  s = SweepSpec{};
  s.rule = LambdaRule::Renorm;
  s.c = 1.0;
  EXPECT_THROW(s.validate(*d), Error);
}

TEST(Asymptotics, RichardsonIsExactForFirstOrderModel) {
  auto f = [](double p) { return 0.25 + 3.0 / p; };
  EXPECT_NEAR(richardson(16, f(16), 32, f(32)), 0.25, 1e-15);
  const DomainPtr d = unit_disk(1.0 / 16);
  const ScalarField rho = ScalarField::rho(d);
  const ScalarField a = rho.combined(0.25, rho, 3.0 / 16), b = rho.combined(0.25, rho, 3.0 / 32);
  const ScalarField ex = richardson_field(16, a, 32, b);
  for (NodeId n : d->interior_nodes()) EXPECT_NEAR(ex[n], 0.25 * rho[n], 1e-14);
}

TEST(Asymptotics, GradSupOutsideExcludesNeighborhood) {
  const DomainPtr d = unit_disk(1.0 / 16);
  const NodeId c = d->nearest_node({0, 0});
  const ScalarField rho = ScalarField::rho(d);
  EXPECT_LE(grad_sup_outside(rho, c, 0.0), grad_sup(rho) + 1e-15);
  EXPECT_LE(grad_sup_outside(rho, c, 0.5), grad_sup_outside(rho, c, 0.0) + 1e-15);
  EXPECT_EQ(grad_sup_outside(rho, c, 10.0), 0.0);
}

class SmallSweep : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    domain_ = unit_disk(1.0 / 32);
    SweepSpec s;
    s.p_list = {8, 16};
    report_ = new ConvergenceReport(run_sweep(s, domain_, SolverConfig{}));
  }
  static void TearDownTestSuite() {
    delete report_;
    report_ = nullptr;
  }
  static DomainPtr domain_;
  static ConvergenceReport* report_;
};

DomainPtr SmallSweep::domain_;
ConvergenceReport* SmallSweep::report_ = nullptr;

TEST_F(SmallSweep, PointsAgreeWithRadialContinuumOracle) {
  for (const SweepPoint& pt : report_->points) {
    ASSERT_FALSE(pt.skipped);
    const double oracle = radial_peak(pt.p, pt.q, pt.p * std::log(2.0));
    EXPECT_NEAR(pt.u_sup, oracle, 0.02 * oracle) << "p=" << pt.p;
  }
}

TEST_F(SmallSweep, GateMarginGrowsWithP) {
  ASSERT_EQ(report_->points.size(), 2u);
  EXPECT_GT(report_->points[1].gate_margin, report_->points[0].gate_margin);
  EXPECT_GT(report_->points[0].gate_margin, 1.0);
}

TEST_F(SmallSweep, MaximizerAtCenterAndInteriorPositive) {
  for (const SweepPoint& pt : report_->points) {
    EXPECT_LE(std::hypot(pt.max_point.x, pt.max_point.y), 2 * domain_->h());
    EXPECT_GT(pt.interior_min, 0.0);
    EXPECT_FALSE(pt.multi_maximizer);
    EXPECT_LE(pt.nehari_residual, 1e-10);
  }
}

TEST_F(SmallSweep, EnvelopeSlackShrinksWithP) {
  EXPECT_LT(report_->points[1].envelope_max, report_->points[0].envelope_max);
  // u_p <= 0.25 rho + slack with the slack measured at each p.
  for (const SweepPoint& pt : report_->points) {
    for (NodeId n : domain_->interior_nodes())
      EXPECT_LE(pt.field[n] - 0.25 * domain_->rho()[n], pt.envelope_max + 1e-15);
  }
}

TEST_F(SmallSweep, ExtrapolationUsesLastTwoPoints) {
  const Extrapolated& ex = report_->extrapolated;
  ASSERT_TRUE(ex.available);
  EXPECT_EQ(ex.p1, 8.0);
  EXPECT_EQ(ex.p2, 16.0);
  EXPECT_NEAR(ex.u_sup, richardson(8, report_->points[0].u_sup, 16, report_->points[1].u_sup), 1e-15);
  EXPECT_NEAR(report_->rel_err_u_sup, std::fabs(ex.u_sup - 0.25) / 0.25, 1e-14);
}

TEST(Consistency, RidgeDomainIsEnvelopeOnly) {
  const DomainPtr d = build_domain(parse_shape("rect:0,0,2,1"), 1.0 / 16);
  SweepSpec s;
  s.p_list = {8};
  s.r_top = 4096;
  const ConvergenceReport rep = run_sweep(s, d, SolverConfig{});
  const ConsistencyDiagnostics c = check_mutual_consistency(rep, ScalarField::rho(d), nullptr);
  EXPECT_FALSE(c.unique_incenter);
  EXPECT_TRUE(c.envelope_only);
  EXPECT_FALSE(c.compared);
}

TEST(Consistency, SquareMaximizerOnIncenter) {
  const DomainPtr d = build_domain(parse_shape("square:1"), 1.0 / 16);
  SweepSpec s;
  s.p_list = {8};
  s.r_top = 4096;
  const ConvergenceReport rep = run_sweep(s, d, SolverConfig{});
  SweepSpec rs = s;
  rs.rule = LambdaRule::Renorm;
  const ConvergenceReport ref = run_sweep(rs, d, SolverConfig{});
  const ConsistencyDiagnostics c = check_mutual_consistency(rep, ScalarField::rho(d), &ref);
  EXPECT_TRUE(c.unique_incenter);
  EXPECT_TRUE(c.maximizer_on_incenter);
  EXPECT_NEAR(c.rho_at_limit, d->rho_max(), 2 * d->h());
  EXPECT_TRUE(c.compared);
  EXPECT_THROW(check_mutual_consistency(rep, ScalarField::rho(d), nullptr), Error);
}
