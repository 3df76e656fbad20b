#include <cmath>

#include <gtest/gtest.h>

#include "pqlab/error.hpp"
#include "pqlab/geometry.hpp"
#include "test_support.hpp"

using namespace pqlab;

namespace {

double rho_at(const Domain& d, Point x) { return d.rho()[d.nearest_node(x)]; }

}  // namespace

TEST(Geometry, DiskCenterRhoIsRadius) {
  const DomainPtr d = build_domain(parse_shape("disk:1"), 1.0 / 32);
  EXPECT_NEAR(rho_at(*d, {0, 0}), 1.0, 1e-12);
}

TEST(Geometry, SquareCenterRhoIsHalfSide) {
  const DomainPtr d = build_domain(parse_shape("rect:0,0,1,1"), 1.0 / 32);
  EXPECT_NEAR(rho_at(*d, {0.5, 0.5}), 0.5, 1e-12);
}

TEST(Geometry, RectangleRidge) {
  const DomainPtr d = build_domain(parse_shape("rect:0,0,2,1"), 1.0 / 32);
  EXPECT_NEAR(d->rho_max(), 0.5, 1e-12);
  for (double x = 0.5; x <= 1.5 + 1e-12; x += 1.0 / 32) EXPECT_NEAR(rho_at(*d, {x, 0.5}), 0.5, 1e-12) << x;
  const RhoMaximizers rm = rho_maximizers(*d);
  EXPECT_FALSE(rm.unique);
  EXPECT_GE(rm.diameter, 1.0 - 1e-12);
}

TEST(Geometry, LambdaInfCap) {
  EXPECT_NEAR(lambda_inf_cap(*build_domain(parse_shape("disk:1"), 1.0 / 32)), 1.0, 1e-12);
  EXPECT_NEAR(lambda_inf_cap(*build_domain(parse_shape("square:1"), 1.0 / 32)), 2.0, 1e-12);
  EXPECT_NEAR(lambda_inf_cap(*build_domain(parse_shape("disk:2"), 1.0 / 32)), 0.5, 1e-12);
}

TEST(Geometry, LambdaInfCapScalesInversely) {
  for (const char* spec : {"disk:1", "square:1", "rect:0,0,2,1"}) {
    const Shape s = parse_shape(spec);
    for (double f : {0.5, 2.0, 4.0}) {
      const double a = lambda_inf_cap(*build_domain(s, 1.0 / 32));
      const double b = lambda_inf_cap(*build_domain(scale_shape(s, f), f / 32));
      EXPECT_NEAR(b, a / f, 1e-12 * a) << spec << " " << f;
    }
  }
}

TEST(Geometry, RhoMaximizersDisk) {
  const DomainPtr d = build_domain(parse_shape("disk:1"), 1.0 / 32);
  const RhoMaximizers rm = rho_maximizers(*d);
  ASSERT_FALSE(rm.nodes.empty());
  EXPECT_TRUE(rm.unique);
  EXPECT_EQ(rm.primary, d->nearest_node({0, 0}));
}

TEST(Geometry, RhoMaximizersSquare) {
  const DomainPtr d = build_domain(parse_shape("square:1"), 1.0 / 32);
  const RhoMaximizers rm = rho_maximizers(*d);
  EXPECT_TRUE(rm.unique);
  EXPECT_EQ(rm.primary, d->nearest_node({0.5, 0.5}));
}

TEST(Geometry, RhoMaximizersAreInterior) {
  for (const char* spec : {"disk:1", "square:1", "rect:0,0,2,1", "lshape:0,0,1,1,0.5,0.5", "polygon:0,0;1,0;0.3,0.8"}) {
    const DomainPtr d = build_domain(parse_shape(spec), 1.0 / 32);
    const RhoMaximizers rm = rho_maximizers(*d);
    ASSERT_FALSE(rm.nodes.empty()) << spec;
    for (NodeId n : rm.nodes) EXPECT_TRUE(d->is_interior(n)) << spec;
  }
}

TEST(Geometry, RhoIsLipschitzOnLattice) {
  for (const char* spec : {"disk:1", "square:1", "lshape:0,0,1,1,0.5,0.5", "polygon:0,0;1,0;0.3,0.8"}) {
    const DomainPtr d = build_domain(parse_shape(spec), 1.0 / 40);
    const auto rho = d->rho();
    for (int j = 0; j + 1 < d->ny(); ++j)
      for (int i = 0; i + 1 < d->nx(); ++i) {
        const NodeId a = d->node(i, j);
        EXPECT_LE(std::fabs(rho[a] - rho[d->node(i + 1, j)]), d->h() * (1 + 1e-12)) << spec;
        EXPECT_LE(std::fabs(rho[a] - rho[d->node(i, j + 1)]), d->h() * (1 + 1e-12)) << spec;
      }
  }
}

TEST(Geometry, MasksPartitionAndInteriorIsPositive) {
  const DomainPtr d = build_domain(parse_shape("disk:1"), 1.0 / 16);
  std::size_t interior = 0;
  for (std::size_t k = 0; k < d->node_count(); ++k) {
    const NodeId n = static_cast<NodeId>(k);
    EXPECT_FALSE(d->is_interior(n) && d->is_boundary(n));
    if (d->is_interior(n)) {
      ++interior;
      EXPECT_GT(d->rho()[n], 0.0);
      EXPECT_GE(d->unknown_index(n), 0);
    } else {
      EXPECT_EQ(d->rho()[n], 0.0);
      EXPECT_EQ(d->unknown_index(n), -1);
    }
  }
  EXPECT_EQ(interior, d->interior_nodes().size());
}

TEST(Geometry, QuadratureWeightsSumToCellArea) {
  const DomainPtr d = build_domain(parse_shape("square:1"), 1.0 / 16);
  double total = 0.0;
  for (double w : d->node_weights()) total += w;
  EXPECT_NEAR(total, d->cells().size() * d->h() * d->h(), 1e-12);
}

TEST(Geometry, ShapeParsingRoundTrip) {
  for (const char* spec : {"disk:1", "disk:0.5,0.25,2", "square:1", "rect:0,0,2,1", "lshape:0,0,1,1,0.5,0.5"}) {
    const Shape s = parse_shape(spec);
    EXPECT_EQ(shape_to_string(parse_shape(shape_to_string(s))), shape_to_string(s));
  }
}

TEST(Geometry, MalformedShapesThrow) {
  EXPECT_THROW(parse_shape("blob:1"), Error);
  EXPECT_THROW(parse_shape("disk:"), Error);
  EXPECT_THROW(parse_shape("disk:x"), Error);
  try {
    parse_shape("disk:-1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateShape);
  }
  try {
    parse_shape("rect:1,1,0,0");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateShape);
  }
  // Clockwise polygon.
  EXPECT_THROW(parse_shape("polygon:0,0;0,1;1,0"), Error);
}

TEST(Geometry, GridTooCoarse) {
  try {
    build_domain(parse_shape("disk:1"), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridTooCoarse);
  }
}

TEST(Geometry, HashIsStableAndDiscriminating) {
  const DomainPtr a = build_domain(parse_shape("disk:1"), 1.0 / 32);
  const DomainPtr b = build_domain(parse_shape("disk:1"), 1.0 / 32);
  const DomainPtr c = build_domain(parse_shape("disk:1"), 1.0 / 33);
  EXPECT_EQ(a->hash(), b->hash());
  EXPECT_NE(a->hash(), c->hash());
  EXPECT_EQ(a->hash_hex().size(), 16u);
}

TEST(Geometry, MaxBoundaryDistance) {
  EXPECT_NEAR(max_boundary_distance(parse_shape("square:1"), {0.5, 0.5}), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(max_boundary_distance(parse_shape("disk:1"), {0, 0}), 1.0, 1e-12);
  EXPECT_NEAR(max_boundary_distance(parse_shape("disk:1"), {0.5, 0}), 1.5, 1e-12);
}
