#include "pqlab/infinity.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pqlab/error.hpp"

namespace pqlab {

namespace {

constexpr std::array<int, 8> kDi{1, -1, 0, 0, 1, 1, -1, -1};
constexpr std::array<int, 8> kDj{0, 0, 1, -1, 1, -1, 1, -1};
constexpr std::array<double, 8> kDist{1, 1, 1, 1, M_SQRT2, M_SQRT2, M_SQRT2, M_SQRT2};

std::array<NodeId, 8> neighbors(const Domain& d, NodeId n) {
  std::array<NodeId, 8> out{};
  const int i = d.col(n), j = d.row(n);
  for (int k = 0; k < 8; ++k) out[k] = d.node(i + kDi[k], j + kDj[k]);
  return out;
}

}  // namespace

void InfHarmonicProblem::validate() const {
  if (!domain) throw Error(ErrorCode::InvalidArgument, "infharm problem needs a domain");
  if (puncture < 0 || static_cast<std::size_t>(puncture) >= domain->node_count() || !domain->is_interior(puncture))
    throw Error(ErrorCode::InvalidArgument, "puncture must be an interior node");
  if (!(domain->rho()[puncture] > 2.0 * domain->h()))
    throw Error(ErrorCode::InvalidArgument, "puncture must lie more than 2h from the boundary");
  if (!(peak > 0) || !std::isfinite(peak)) throw Error(ErrorCode::InvalidArgument, "peak must be positive");
}

namespace {

// Root of the balance function, Newton iterations started from `guess`.
double midrange_from(std::span<const double> values, std::span<const double> dist, double guess) {
  double lo = values[0], hi = values[0];
  for (double v : values) lo = std::min(lo, v), hi = std::max(hi, v);
  if (lo == hi) return lo;
  double u = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    std::size_t a = 0, b = 0;
    double sa = -INFINITY, sb = INFINITY;
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double s = (values[k] - u) / dist[k];
      if (s > sa) sa = s, a = k;
      if (s < sb) sb = s, b = k;
    }
    const double f = sa + sb;
    if (f == 0.0) return u;
    if (f > 0) lo = u;
    else hi = u;
    double un = (dist[b] * values[a] + dist[a] * values[b]) / (dist[a] + dist[b]);
    if (!(un >= lo && un <= hi)) un = 0.5 * (lo + hi);
    if (un == u || !(hi > lo)) return un;
    u = un;
  }
  return u;
}

}  // namespace

double midrange(std::span<const double> values, std::span<const double> dist) {
  return midrange_from(values, dist, NAN);
}

ScalarField cone_field(const DomainPtr& domain, NodeId center, double coeff) {
  const Domain& d = *domain;
  if (center < 0 || static_cast<std::size_t>(center) >= d.node_count() || !d.is_interior(center))
    throw Error(ErrorCode::InvalidArgument, "cone center must be an interior node");
  const Point c = d.point(center);
  const double beta = max_boundary_distance(d.shape(), c);
  return ScalarField::from_function(domain, [&](Point x) {
    return std::max(0.0, coeff * (1.0 - std::hypot(x.x - c.x, x.y - c.y) / beta));
  });
}

InfHarmResult infharm_solve(const InfHarmonicProblem& problem, const InfHarmConfig& cfg) {
  problem.validate();
  const Domain& d = *problem.domain;
  std::vector<NodeId> active;
  std::vector<std::array<NodeId, 8>> nbr;
  for (NodeId n : d.interior_nodes()) {
    if (n == problem.puncture) continue;
    active.push_back(n);
    nbr.push_back(neighbors(d, n));
  }
  ScalarField init = cone_field(problem.domain, problem.puncture, problem.peak);
  std::vector<double> u(init.values().begin(), init.values().end());
  u[problem.puncture] = problem.peak;
  std::vector<double> next(u);
  std::array<double, 8> vals{};
  const double tol = cfg.tol * problem.peak;

  InfHarmResult out;
  for (long it = 1; it <= cfg.max_iters; ++it) {
    double change = 0.0;
    for (std::size_t k = 0; k < active.size(); ++k) {
      for (int j = 0; j < 8; ++j) vals[j] = u[nbr[k][j]];
      const double m = midrange_from(vals, kDist, u[active[k]]);
      change = std::max(change, std::fabs(m - u[active[k]]));
      next[active[k]] = m;
    }
    u.swap(next);
    out.iterations = it;
    out.max_change = change;
    if (change <= tol) {
      out.field = ScalarField(problem.domain, std::move(u), true);
      return out;
    }
  }
  throw Error(ErrorCode::NonConvergence, "infinity-harmonic iteration hit its cap");
}

std::vector<NodeId> nodes_within(const Domain& domain, NodeId center, double radius) {
  const Point c = domain.point(center);
  std::vector<NodeId> out;
  for (NodeId n : domain.interior_nodes()) {
    const Point x = domain.point(n);
    if (std::hypot(x.x - c.x, x.y - c.y) <= radius + 1e-12 * domain.h()) out.push_back(n);
  }
  return out;
}

double infharm_defect(const ScalarField& u, std::span<const NodeId> exclude) {
  const Domain& d = u.domain();
  const double peak = sup_norm(u).max_value;
  if (peak == 0.0) return 0.0;
  std::vector<std::uint8_t> skip(d.node_count(), 0);
  for (NodeId n : exclude) skip[n] = 1;
  std::array<double, 8> vals{};
  double worst = 0.0;
  for (NodeId n : d.interior_nodes()) {
    if (skip[n]) continue;
    const auto nb = neighbors(d, n);
    for (int j = 0; j < 8; ++j) vals[j] = u[nb[j]];
    worst = std::max(worst, std::fabs(u[n] - midrange(vals, kDist)));
  }
  return worst / peak;
}

}  // namespace pqlab
