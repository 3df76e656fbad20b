#include "pqlab/eigenvalue.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "pqlab/error.hpp"
#include "pqlab/functionals.hpp"

namespace pqlab {

namespace {

// f(u) = log ||grad u||_m^m - (m/r) log sum w|u|^r, i.e. the log Rayleigh quotient.
class RayleighObjective final : public HomogeneousObjective {
 public:
  RayleighObjective(const Domain& d, double m, double r) : d_(d), m_(m), r_(r) {}

  Evaluation evaluate(std::span<const double> x, std::span<double> grad) override {
    const double la = detail::log_grad_power_sum(d_, x, m_);
    const double ls = detail::log_node_power_sum(d_, x, r_);
    Evaluation ev;
    if (la == -INFINITY || ls == -INFINITY) {
      ev.value = INFINITY;
      return ev;
    }
    ev.value = la - (m_ / r_) * ls;
    ev.energy = std::exp(ev.value);
    std::fill(grad.begin(), grad.end(), 0.0);
    const double gmax = detail::max_grad(d_, x);
    detail::accumulate_grad_power_gradient(d_, x, m_, gmax, m_ * std::exp((m_ - 1.0) * std::log(gmax) - la), grad);
    detail::accumulate_lr_log_gradient(d_, x, r_, -m_, grad);
    return ev;
  }

  std::vector<PowerTerm> preconditioner_terms(std::span<const double> x) override {
    const double la = detail::log_grad_power_sum(d_, x, m_);
    const double gmax = detail::max_grad(d_, x);
    return {{m_ * std::exp((m_ - 2.0) * std::log(gmax) - la), m_}};
  }

  double stationarity(std::span<const double> x, std::span<const double> grad) override {
    double gm = 0.0;
    for (double v : grad) gm = std::max(gm, std::fabs(v));
    return gm * detail::max_grad(d_, x) * d_.area() / (m_ * d_.h());
  }

 private:
  const Domain& d_;
  double m_, r_;
};

struct CacheKey {
  std::uint64_t domain;
  double m, r, tol_energy, tol_grad, tol_grad_stall;
  int max_iters;
  auto tie() const { return std::tie(domain, m, r, tol_energy, tol_grad, tol_grad_stall, max_iters); }
  bool operator<(const CacheKey& o) const { return tie() < o.tie(); }
};

std::mutex g_cache_mutex;
std::map<CacheKey, std::unique_ptr<EigenResult>> g_cache;

}  // namespace

EigenResult rayleigh_min(double m, double r, const DomainPtr& domain, const SolverConfig& cfg,
                         const std::optional<ScalarField>& init) {
  if (!(m >= 2.0) || !std::isfinite(m)) throw Error(ErrorCode::InvalidArgument, "eigen exponent m must be >= 2");
  if (!(r >= 2.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidArgument, "eigen exponent r must be finite and >= 2");
  const Domain& d = *domain;
  std::vector<double> x0;
  if (init) {
    if (init->domain().hash() != d.hash()) throw Error(ErrorCode::InvalidArgument, "initial field on another domain");
    x0.assign(init->values().begin(), init->values().end());
    for (double& v : x0) v = std::fabs(v);
  } else {
    x0.assign(d.rho().begin(), d.rho().end());
  }
  RayleighObjective obj(d, m, r);
  DescentResult dr = minimize_homogeneous(obj, d, std::move(x0), cfg);

  EigenResult out;
  out.m = m;
  out.r = r;
  out.iterations = dr.iterations;
  out.residual = dr.stationarity;
  out.converged = dr.converged;
  out.stop_reason = dr.stop_reason;
  out.trace = std::move(dr.trace);
  ScalarField e = ScalarField(domain, std::move(dr.x), true).abs();
  const LogValue n = lp_norm_log(e, r);
  e = e.scaled(std::exp(-n.log_value));
  out.lambda_value = std::exp(m * grad_norm_p(e, m).log_value);
  out.eigenfield = std::move(e);
  if (!out.converged)
    throw Error(ErrorCode::NonConvergence, "Rayleigh descent for m=" + std::to_string(m) + ", r=" + std::to_string(r) +
                                               " stopped (" + out.stop_reason + ")");
  return out;
}

const EigenResult& rayleigh_min_cached(double m, double r, const DomainPtr& domain, const SolverConfig& cfg) {
  const CacheKey key{domain->hash(), m, r, cfg.tol_energy, cfg.tol_grad, cfg.tol_grad_stall, cfg.max_iters};
  std::optional<ScalarField> init;
  {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = g_cache.find(key);
    if (it != g_cache.end()) return *it->second;
    // Warm start from the largest cached r below the requested one.
    for (auto& [k, v] : g_cache)
      if (k.domain == key.domain && k.m == m && k.r < r && k.tol_energy == key.tol_energy &&
          k.tol_grad == key.tol_grad && k.max_iters == key.max_iters)
        init = v->eigenfield;
  }
  auto res = std::make_unique<EigenResult>(rayleigh_min(m, r, domain, cfg, init));
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto [it, inserted] = g_cache.emplace(key, std::move(res));
  return *it->second;
}

void clear_eigen_cache() {
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  g_cache.clear();
}

double default_ladder_top(double m) { return std::max(128.0, 32.0 * m); }

std::vector<double> r_ladder(double r_top) {
  std::vector<double> rs;
  for (double r = 8.0; r <= r_top * (1 + 1e-12); r *= 2.0) rs.push_back(r);
  if (rs.empty()) throw Error(ErrorCode::InvalidArgument, "r ladder top must be >= 8");
  return rs;
}

LambdaInfEstimate lambda_inf_estimate(double m, const DomainPtr& domain, const SolverConfig& cfg, double r_top) {
  if (!(m > 2.0)) throw Error(ErrorCode::InvalidArgument, "lambda_inf estimate needs m > 2");
  LambdaInfEstimate out;
  out.m = m;
  out.r_values = r_ladder(r_top > 0 ? r_top : default_ladder_top(m));
  for (double r : out.r_values) out.trend.push_back(rayleigh_min_cached(m, r, domain, cfg).lambda_value);
  out.estimate = out.trend.back();
  out.root = std::pow(out.estimate, 1.0 / m);
  if (out.trend.size() >= 2) {
    const double prev = out.trend[out.trend.size() - 2];
    out.proxy_gap = std::fabs(prev - out.estimate) / out.estimate;
  }
  return out;
}

}  // namespace pqlab
