#include "pqlab/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "pqlab/error.hpp"

namespace pqlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double radical_inverse(unsigned k, unsigned base) {
  double f = 1.0, x = 0.0;
  while (k > 0) {
    f /= base;
    x += f * (k % base);
    k /= base;
  }
  return x;
}

double dot(std::span<const double> a, std::span<const double> b) {
  std::vector<double> t(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) t[i] = a[i] * b[i];
  return pairwise_sum(t);
}

}  // namespace

const char* to_string(Regime regime) { return regime == Regime::P_LT_Q ? "P_LT_Q" : "Q_LT_P"; }

void ProblemParams::validate() const {
  if (!(p > 2.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidArgument, "p must be finite and > 2");
  if (!(q > 2.0) || !std::isfinite(q)) throw Error(ErrorCode::InvalidArgument, "q must be finite and > 2");
  if (p == q) throw Error(ErrorCode::InvalidArgument, "p and q must differ");
  if (!(r >= 1.0)) throw Error(ErrorCode::InvalidArgument, "r must be >= 1 or sup");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  if (!(q_weight >= 0.0)) throw Error(ErrorCode::InvalidArgument, "q weight must be nonnegative");
}

LogMeasures log_measures(const Domain& domain, std::span<const double> values, const ProblemParams& params) {
  LogMeasures m;
  m.log_a = detail::log_grad_power_sum(domain, values, params.p);
  m.log_b = params.q_weight > 0 ? detail::log_grad_power_sum(domain, values, params.q) + std::log(params.q_weight)
                                : kNegInf;
  if (params.sup()) {
    double umax = 0.0;
    for (double v : values) umax = std::max(umax, std::fabs(v));
    m.log_load_norm = umax > 0 ? std::log(umax) : kNegInf;
  } else {
    m.log_load_norm = detail::log_node_power_sum(domain, values, params.r) / params.r;
  }
  m.log_c = std::log(params.lambda) + params.p * m.log_load_norm;
  return m;
}

LogMeasures log_measures(const ScalarField& u, const ProblemParams& params) {
  return log_measures(u.domain(), u.values(), params);
}

EnergyBreakdown energy(const ScalarField& u, const ProblemParams& params) {
  params.validate();
  const LogMeasures m = log_measures(u, params);
  EnergyBreakdown e;
  e.log_term_p = m.log_a - std::log(params.p);
  e.log_term_q = m.log_b - std::log(params.q);
  e.log_term_load = m.log_c - std::log(params.p);
  e.term_p = std::exp(e.log_term_p);
  e.term_q = std::exp(e.log_term_q);
  e.term_load = std::exp(e.log_term_load);
  e.total = e.term_p + e.term_q - e.term_load;
  return e;
}

namespace detail {

void accumulate_lr_log_gradient(const Domain& domain, std::span<const double> values, double r, double coeff,
                                std::span<double> out) {
  const auto w = domain.node_weights();
  double umax = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (w[k] > 0) umax = std::max(umax, std::fabs(values[k]));
  if (umax == 0.0) return;
  const double inv = 1.0 / umax;
  std::vector<double> ratio(values.size(), 0.0);
  std::vector<double> terms(values.size(), 0.0);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double a = std::fabs(values[k]) * inv;
    if (w[k] > 0 && a > 0) {
      ratio[k] = std::pow(a, r - 1.0);
      terms[k] = w[k] * ratio[k] * a;
    }
  }
  const double s = pairwise_sum(terms);
  const double f = coeff / (umax * s);
  for (std::size_t k = 0; k < values.size(); ++k)
    if (ratio[k] > 0) out[k] += f * w[k] * ratio[k] * (values[k] < 0 ? -1.0 : 1.0);
}

}  // namespace detail

ScalarField grad_energy_I(const ScalarField& u, const ProblemParams& params) {
  params.validate();
  if (params.sup()) throw Error(ErrorCode::InvalidArgument, "gradient of I needs finite r");
  if (params.r < 2.0) throw Error(ErrorCode::InvalidArgument, "gradient of I needs r >= 2");
  const Domain& d = u.domain();
  const auto vals = u.values();
  std::vector<double> out(u.size(), 0.0);
  const double gmax = detail::max_grad(d, vals);
  if (gmax > 0) {
    std::vector<double> gp(u.size(), 0.0), gq(u.size(), 0.0);
    detail::accumulate_grad_power_gradient(d, vals, params.p, gmax, 1.0, gp);
    detail::accumulate_grad_power_gradient(d, vals, params.q, gmax, 1.0, gq);
    const double sp = std::pow(gmax, params.p - 1.0);
    const double sq = params.q_weight * std::pow(gmax, params.q - 1.0);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = sp * gp[k] + sq * gq[k];
  }
  // lambda ||u||_r^(p-r) |u|^(r-2) u w = lambda ||u||_r^p * d/du [log sum w|u|^r / r].
  const double log_norm = detail::log_node_power_sum(d, vals, params.r) / params.r;
  if (log_norm > kNegInf) {
    const double c = params.lambda * std::exp(params.p * log_norm);
    detail::accumulate_lr_log_gradient(d, vals, params.r, -c, out);
  }
  return ScalarField(u.domain_ptr(), std::move(out), true);
}

double nehari_residual(const LogMeasures& m, const ProblemParams& /*params*/) {
  if (m.log_c == kNegInf) throw Error(ErrorCode::ZeroField, "Nehari residual of the zero field");
  return std::fabs(std::exp(m.log_a - m.log_c) + std::exp(m.log_b - m.log_c) - 1.0);
}

double nehari_residual(const ScalarField& u, const ProblemParams& params) {
  params.validate();
  return nehari_residual(log_measures(u, params), params);
}

WeakResidual weak_residual(const ScalarField& u, const ProblemParams& params, std::span<const ScalarField> tests) {
  params.validate();
  if (u.is_zero()) throw Error(ErrorCode::ZeroField, "weak residual of the zero field");
  const Domain& d = u.domain();
  const auto vals = u.values();
  const double gmax = detail::max_grad(d, vals);

  // Operator part scaled by gmax^(m-1), kept separately per exponent.
  std::vector<double> gp(u.size(), 0.0), gq(u.size(), 0.0);
  detail::accumulate_grad_power_gradient(d, vals, params.p, gmax, 1.0, gp);
  detail::accumulate_grad_power_gradient(d, vals, params.q, gmax, 1.0, gq);
  const double log_g = std::log(gmax);

  WeakResidual out;
  const double log_lambda = std::log(params.lambda);
  if (params.sup()) {
    const MaxSet ms = sup_norm(u);
    out.ambiguous_maximizer = !ms.unique;
    const NodeId k = ms.primary;
    const double log_umax = std::log(ms.max_value);
    const double sign_k = u[k] < 0 ? -1.0 : 1.0;
    for (const ScalarField& v : tests) {
      const double vnorm = sup_norm(v).max_value;
      if (vnorm == 0.0) {
        out.per_test.push_back(0.0);
        continue;
      }
      const double log_norm = log_lambda + (params.p - 1.0) * log_umax + std::log(vnorm);
      const double op = std::exp((params.p - 1.0) * log_g - log_norm) * dot(gp, v.values()) +
                        params.q_weight * std::exp((params.q - 1.0) * log_g - log_norm) * dot(gq, v.values());
      const double load = sign_k * v[k] / vnorm;
      out.per_test.push_back(std::fabs(op - load));
    }
  } else {
    std::vector<double> gl(u.size(), 0.0);
    detail::accumulate_lr_log_gradient(d, vals, params.r, 1.0, gl);
    const double log_unorm = detail::log_node_power_sum(d, vals, params.r) / params.r;
    for (const ScalarField& v : tests) {
      const LogValue vn = lp_norm_log(v, params.r);
      if (vn.value == 0.0) {
        out.per_test.push_back(0.0);
        continue;
      }
      const double log_norm = log_lambda + (params.p - 1.0) * log_unorm + vn.log_value;
      const double op = std::exp((params.p - 1.0) * log_g - log_norm) * dot(gp, v.values()) +
                        params.q_weight * std::exp((params.q - 1.0) * log_g - log_norm) * dot(gq, v.values());
      // lambda ||u||_r^p <gl, v> / (lambda ||u||_r^(p-1) ||v||_r)
      const double load = std::exp(log_unorm - vn.log_value) * dot(gl, v.values());
      out.per_test.push_back(std::fabs(op - load));
    }
  }
  for (double x : out.per_test) out.max_residual = std::max(out.max_residual, x);
  return out;
}

std::vector<ScalarField> standard_test_set(const ScalarField& u, NodeId exclude_center, double exclusion_radius) {
  const DomainPtr& dp = u.domain_ptr();
  const Domain& d = *dp;
  const Point c = exclude_center >= 0 ? d.point(exclude_center) : Point{};
  std::vector<ScalarField> tests;
  std::vector<NodeId> used;
  for (unsigned k = 1; tests.size() < 20 && k < 20000; ++k) {
    const Point x{d.origin().x + radical_inverse(k, 2) * (d.nx() - 1) * d.h(),
                  d.origin().y + radical_inverse(k, 3) * (d.ny() - 1) * d.h()};
    const NodeId n = d.nearest_node(x);
    if (!d.is_interior(n)) continue;
    if (std::find(used.begin(), used.end(), n) != used.end()) continue;
    if (exclude_center >= 0) {
      const Point y = d.point(n);
      if (std::hypot(y.x - c.x, y.y - c.y) <= exclusion_radius + 1e-12 * d.h()) continue;
    }
    used.push_back(n);
    tests.push_back(ScalarField::hat(dp, n));
  }
  tests.push_back(ScalarField(dp, std::vector<double>(u.values().begin(), u.values().end()), true));
  tests.push_back(ScalarField::rho(dp));
  return tests;
}

}  // namespace pqlab
