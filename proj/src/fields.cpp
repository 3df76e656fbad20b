#include "pqlab/fields.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "pqlab/error.hpp"

namespace pqlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double pairwise_sum_impl(const double* x, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_impl(x, half) + pairwise_sum_impl(x + half, n - half);
}

// Triangle gradients of one active cell.
inline void cell_gradients(const Cell& c, std::span<const double> v, double inv_h, Vec2& a, Vec2& b) {
  const double sw = v[c.sw], se = v[c.se], nw = v[c.nw], ne = v[c.ne];
  a = {(se - sw) * inv_h, (ne - se) * inv_h};
  b = {(ne - nw) * inv_h, (nw - sw) * inv_h};
}

inline double norm(Vec2 g) { return std::sqrt(g.x * g.x + g.y * g.y); }

}  // namespace

double pairwise_sum(std::span<const double> terms) { return pairwise_sum_impl(terms.data(), terms.size()); }

double log_diff_exp(double a, double b) {
  if (b == kNegInf) return a;
  return a + std::log1p(-std::exp(b - a));
}

double log_sum_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

ScalarField::ScalarField(DomainPtr domain, std::vector<double> values, bool dirichlet)
    : domain_(std::move(domain)), values_(std::move(values)), dirichlet_(dirichlet) {
  if (!domain_) throw Error(ErrorCode::InvalidArgument, "field needs a domain");
  if (values_.size() != domain_->node_count())
    throw Error(ErrorCode::InvalidArgument, "field size does not match the domain lattice");
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "field has non-finite values");
  if (dirichlet_)
    for (std::size_t k = 0; k < values_.size(); ++k)
      if (!domain_->is_interior(static_cast<NodeId>(k))) values_[k] = 0.0;
}

ScalarField ScalarField::zeros(DomainPtr domain, bool dirichlet) {
  const std::size_t n = domain->node_count();
  return ScalarField(std::move(domain), std::vector<double>(n, 0.0), dirichlet);
}

ScalarField ScalarField::from_function(DomainPtr domain, const std::function<double(Point)>& f,
                                       bool dirichlet) {
  std::vector<double> v(domain->node_count(), 0.0);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto n = static_cast<NodeId>(k);
    if (!dirichlet || domain->is_interior(n)) v[k] = f(domain->point(n));
  }
  return ScalarField(std::move(domain), std::move(v), dirichlet);
}

ScalarField ScalarField::rho(DomainPtr domain) {
  std::vector<double> v(domain->rho().begin(), domain->rho().end());
  return ScalarField(std::move(domain), std::move(v), true);
}

ScalarField ScalarField::hat(DomainPtr domain, NodeId node) {
  if (!domain->is_interior(node)) throw Error(ErrorCode::InvalidArgument, "hat node must be interior");
  std::vector<double> v(domain->node_count(), 0.0);
  v[node] = 1.0;
  return ScalarField(std::move(domain), std::move(v), true);
}

ScalarField ScalarField::scaled(double t) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= t;
  return ScalarField(domain_, std::move(v), dirichlet_);
}

ScalarField ScalarField::abs() const {
  std::vector<double> v(values_);
  for (double& x : v) x = std::fabs(x);
  return ScalarField(domain_, std::move(v), dirichlet_);
}

ScalarField ScalarField::combined(double a, const ScalarField& other, double b) const {
  if (other.domain_ != domain_ && other.domain_->hash() != domain_->hash())
    throw Error(ErrorCode::InvalidArgument, "fields live on different domains");
  std::vector<double> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = a * values_[k] + b * other.values_[k];
  return ScalarField(domain_, std::move(v), dirichlet_ && other.dirichlet_);
}

bool ScalarField::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return x == 0.0; });
}

CellGradients gradients(const ScalarField& u) {
  const Domain& d = u.domain();
  CellGradients out;
  out.triangle_area = d.triangle_area();
  out.grad.resize(2 * d.cells().size());
  const double inv_h = 1.0 / d.h();
  std::size_t k = 0;
  for (const Cell& c : d.cells()) {
    cell_gradients(c, u.values(), inv_h, out.grad[k], out.grad[k + 1]);
    k += 2;
  }
  return out;
}

namespace detail {

double max_grad(const Domain& domain, std::span<const double> values) {
  const double inv_h = 1.0 / domain.h();
  double gmax = 0.0;
  for (const Cell& c : domain.cells()) {
    Vec2 a, b;
    cell_gradients(c, values, inv_h, a, b);
    gmax = std::max({gmax, norm(a), norm(b)});
  }
  return gmax;
}

double log_grad_power_sum(const Domain& domain, std::span<const double> values, double m) {
  const double gmax = max_grad(domain, values);
  if (gmax == 0.0) return kNegInf;
  const double inv_h = 1.0 / domain.h();
  const double inv_g = 1.0 / gmax;
  std::vector<double> terms;
  terms.reserve(2 * domain.cells().size());
  for (const Cell& c : domain.cells()) {
    Vec2 a, b;
    cell_gradients(c, values, inv_h, a, b);
    const double na = norm(a) * inv_g;
    const double nb = norm(b) * inv_g;
    terms.push_back(na > 0 ? std::pow(na, m) : 0.0);
    terms.push_back(nb > 0 ? std::pow(nb, m) : 0.0);
  }
  return m * std::log(gmax) + std::log(domain.triangle_area()) + std::log(pairwise_sum(terms));
}

double log_node_power_sum(const Domain& domain, std::span<const double> values, double r) {
  const auto w = domain.node_weights();
  double umax = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (w[k] > 0) umax = std::max(umax, std::fabs(values[k]));
  if (umax == 0.0) return kNegInf;
  const double inv = 1.0 / umax;
  std::vector<double> terms(values.size(), 0.0);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double a = std::fabs(values[k]) * inv;
    if (w[k] > 0 && a > 0) terms[k] = w[k] * std::pow(a, r);
  }
  return r * std::log(umax) + std::log(pairwise_sum(terms));
}

void accumulate_grad_power_gradient(const Domain& domain, std::span<const double> values, double m,
                                    double gscale, double coeff, std::span<double> out) {
  const double inv_h = 1.0 / domain.h();
  const double inv_g = 1.0 / gscale;
  const double scale = coeff * domain.triangle_area() * inv_h;
  for (const Cell& c : domain.cells()) {
    Vec2 a, b;
    cell_gradients(c, values, inv_h, a, b);
    a.x *= inv_g, a.y *= inv_g, b.x *= inv_g, b.y *= inv_g;
    const double na = norm(a);
    const double nb = norm(b);
    const double wa = na > 0 ? scale * std::pow(na, m - 2.0) : 0.0;
    const double wb = nb > 0 ? scale * std::pow(nb, m - 2.0) : 0.0;
    // Triangle (sw, se, ne): gx = (se - sw)/h, gy = (ne - se)/h.
    out[c.sw] -= wa * a.x;
    out[c.se] += wa * (a.x - a.y);
    out[c.ne] += wa * a.y;
    // Triangle (sw, ne, nw): gx = (ne - nw)/h, gy = (nw - sw)/h.
    out[c.ne] += wb * b.x;
    out[c.nw] += wb * (b.y - b.x);
    out[c.sw] -= wb * b.y;
  }
}

}  // namespace detail

double grad_sup(const ScalarField& u) { return detail::max_grad(u.domain(), u.values()); }

LogValue grad_norm_p(const ScalarField& u, double m) {
  if (!(m >= 1)) throw Error(ErrorCode::InvalidArgument, "gradient norm exponent must be >= 1");
  const double ls = detail::log_grad_power_sum(u.domain(), u.values(), m);
  if (ls == kNegInf) return {};
  const double lv = ls / m;
  return {std::exp(lv), lv};
}

LogValue lp_norm_log(const ScalarField& u, double r) {
  if (!(r >= 1)) throw Error(ErrorCode::InvalidArgument, "norm exponent must be >= 1");
  const double ls = detail::log_node_power_sum(u.domain(), u.values(), r);
  if (ls == kNegInf) return {};
  const double lv = ls / r;
  return {std::exp(lv), lv};
}

double lp_norm(const ScalarField& u, double r) { return lp_norm_log(u, r).value; }

MaxSet sup_norm(const ScalarField& u) {
  MaxSet out;
  const auto v = u.values();
  for (double x : v) out.max_value = std::max(out.max_value, std::fabs(x));
  if (out.max_value == 0.0) return out;
  const double tol = 1e-12 * out.max_value;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (std::fabs(v[k]) >= out.max_value - tol) out.nodes.push_back(static_cast<NodeId>(k));
  out.primary = out.nodes.front();
  out.diameter = node_set_diameter(u.domain(), out.nodes);
  out.unique = out.diameter <= 2.0 * u.domain().h() + 1e-12;
  return out;
}

double sup_gateaux(const ScalarField& u, const ScalarField& v, double p) {
  const MaxSet ms = sup_norm(u);
  if (ms.nodes.empty()) throw Error(ErrorCode::ZeroField, "sup_gateaux needs a nonzero field");
  double best = -std::numeric_limits<double>::infinity();
  for (NodeId n : ms.nodes) {
    const double un = u[n];
    const double term = std::pow(std::fabs(un), p - 2.0) * un * v[n];
    best = std::max(best, term);
  }
  return p * best;
}

void write_field(const ScalarField& u, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  for (double x : u.values()) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
  nlohmann::ordered_json side;
  side["format"] = "f64le-row-major";
  side["domain_hash"] = u.domain().hash_hex();
  side["nx"] = u.domain().nx();
  side["ny"] = u.domain().ny();
  side["h"] = u.domain().h();
  side["dirichlet"] = u.dirichlet();
  std::ofstream js(path + ".json");
  if (!js) throw Error(ErrorCode::Io, "cannot write " + path + ".json");
  js << side.dump(2) << "\n";
}

ScalarField read_field(DomainPtr domain, const std::string& path) {
  std::ifstream js(path + ".json");
  if (!js) throw Error(ErrorCode::Io, "missing sidecar " + path + ".json");
  const auto side = nlohmann::json::parse(js);
  if (side.at("domain_hash").get<std::string>() != domain->hash_hex())
    throw Error(ErrorCode::InvalidArgument, "field was written for a different domain");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::vector<double> v(domain->node_count());
  for (double& x : v) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw Error(ErrorCode::Io, "truncated field " + path);
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    x = std::bit_cast<double>(bits);
  }
  return ScalarField(std::move(domain), std::move(v), side.at("dirichlet").get<bool>());
}

}  // namespace pqlab
