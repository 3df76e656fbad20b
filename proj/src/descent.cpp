#include "pqlab/descent.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "pqlab/error.hpp"
#include "pqlab/fields.hpp"

namespace pqlab {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

// Sparse SPD approximation of the objective Hessian, factored once per refresh.
class Preconditioner {
 public:
  explicit Preconditioner(const Domain& domain) : domain_(domain), n_(domain.interior_nodes().size()) {}

  void refresh(std::span<const double> x, const std::vector<PowerTerm>& terms, double floor) {
    const auto cells = domain_.cells();
    const double inv_h = 1.0 / domain_.h();
    const double gmax = detail::max_grad(domain_, x);
    const double inv_g = gmax > 0 ? 1.0 / gmax : 1.0;

    // Per-triangle symmetric 2x2 weight (wxx, wxy, wyy) and its scalar floor scale.
    std::vector<double> w(6 * cells.size(), 0.0);
    double wmax = 0.0;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const Cell& c = cells[k];
      const double ga[2] = {(x[c.se] - x[c.sw]) * inv_h * inv_g, (x[c.ne] - x[c.se]) * inv_h * inv_g};
      const double gb[2] = {(x[c.ne] - x[c.nw]) * inv_h * inv_g, (x[c.nw] - x[c.sw]) * inv_h * inv_g};
      const double* gs[2] = {ga, gb};
      for (int t = 0; t < 2; ++t) {
        const double gx = gs[t][0], gy = gs[t][1];
        const double n2 = gx * gx + gy * gy;
        double* wt = &w[6 * k + 3 * t];
        if (n2 <= 0) continue;
        for (const PowerTerm& term : terms) {
          const double s = term.coeff * std::pow(n2, 0.5 * (term.m - 2.0));
          const double a = (term.m - 2.0) / n2;
          wt[0] += s * (1.0 + a * gx * gx);
          wt[1] += s * a * gx * gy;
          wt[2] += s * (1.0 + a * gy * gy);
        }
        wmax = std::max(wmax, 0.5 * (wt[0] + wt[2]));
      }
    }
    if (wmax <= 0) wmax = 1.0;
    const double fl = floor * wmax;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(18 * cells.size());
    // Integer gradient rows (times 1/h) for the local node orders (sw,se,ne) and (sw,ne,nw).
    static constexpr int kBa[2][3] = {{-1, 1, 0}, {0, -1, 1}};
    static constexpr int kBb[2][3] = {{0, 1, -1}, {-1, 0, 1}};
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const Cell& c = cells[k];
      const NodeId na[3] = {c.sw, c.se, c.ne};
      const NodeId nb[3] = {c.sw, c.ne, c.nw};
      for (int t = 0; t < 2; ++t) {
        const NodeId* nodes = t == 0 ? na : nb;
        const auto& B = t == 0 ? kBa : kBb;
        const double* wt = &w[6 * k + 3 * t];
        const double W[2][2] = {{wt[0] + fl, wt[1]}, {wt[1], wt[2] + fl}};
        // area / h^2 = 1/2
        for (int i = 0; i < 3; ++i) {
          const int ui = domain_.unknown_index(nodes[i]);
          if (ui < 0) continue;
          for (int j = 0; j < 3; ++j) {
            const int uj = domain_.unknown_index(nodes[j]);
            if (uj < 0) continue;
            double v = 0.0;
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) v += B[a][i] * W[a][b] * B[b][j];
            trip.emplace_back(ui, uj, 0.5 * v);
          }
        }
      }
    }
    Eigen::SparseMatrix<double> K(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    K.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed_) {
      ldlt_.analyzePattern(K);
      analyzed_ = true;
    }
    ldlt_.factorize(K);
    if (ldlt_.info() != Eigen::Success) throw Error(ErrorCode::NonConvergence, "preconditioner factorization failed");
  }

  void apply(std::span<const double> g, std::span<double> out) const {
    const auto interior = domain_.interior_nodes();
    Eigen::VectorXd b(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) b[static_cast<Eigen::Index>(i)] = g[interior[i]];
    const Eigen::VectorXd z = ldlt_.solve(b);
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < n_; ++i) out[interior[i]] = z[static_cast<Eigen::Index>(i)];
  }

 private:
  const Domain& domain_;
  std::size_t n_;
  bool analyzed_ = false;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

struct Pair {
  std::vector<double> s, y;
  double rho;
};

void zero_exterior(const Domain& d, std::span<double> v) {
  for (std::size_t k = 0; k < v.size(); ++k)
    if (!d.is_interior(static_cast<NodeId>(k))) v[k] = 0.0;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
  if (!(tol_energy > 0) || !(tol_grad > 0) || !(tol_grad_stall > 0))
    throw Error(ErrorCode::InvalidArgument, "tolerances must be positive");
  if (stall_window < 1 || lbfgs_memory < 1 || precond_refresh < 1 || max_backtracks < 1 || restarts < 1)
    throw Error(ErrorCode::InvalidArgument, "solver counts must be positive");
  if (!(armijo_c1 > 0 && armijo_c1 < 1) || !(armijo_shrink > 0 && armijo_shrink < 1))
    throw Error(ErrorCode::InvalidArgument, "armijo parameters must lie in (0,1)");
  if (!(precond_floor > 0)) throw Error(ErrorCode::InvalidArgument, "preconditioner floor must be positive");
  if (workers < 0) throw Error(ErrorCode::InvalidArgument, "workers must be >= 0");
}

DescentResult minimize_homogeneous(HomogeneousObjective& objective, const Domain& domain, std::vector<double> x0,
                                   const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t n = x0.size();
  DescentResult res;
  std::vector<double> x = std::move(x0);
  zero_exterior(domain, x);

  auto normalize = [&](std::vector<double>& v) {
    const double gm = detail::max_grad(domain, v);
    if (gm <= 0) throw Error(ErrorCode::ZeroField, "descent started from a constant field");
    for (double& t : v) t /= gm;
    res.log_scale -= std::log(gm);
    return gm;
  };
  normalize(x);

  std::vector<double> g(n, 0.0), gn(n, 0.0), d(n, 0.0), xn(n, 0.0), z(n, 0.0);
  Evaluation ev = objective.evaluate(x, g);
  if (!std::isfinite(ev.value))
    throw Error(ErrorCode::ProjectionInfeasible, "initial field lies outside the projectable cone");
  zero_exterior(domain, g);

  Preconditioner pc(domain);
  pc.refresh(x, objective.preconditioner_terms(x), cfg.precond_floor);
  int since_refresh = 0;

  std::deque<Pair> mem;
  std::vector<double> history{ev.value};
  double stat = objective.stationarity(x, g);
  res.trace.push_back({0, ev.energy, ev.nehari_residual, 0.0, stat});

  auto direction = [&]() {
    // Two-loop recursion with H0 = gamma P^-1.
    std::vector<double> qv(g);
    std::vector<double> alpha(mem.size());
    for (std::size_t i = mem.size(); i-- > 0;) {
      alpha[i] = mem[i].rho * dot(mem[i].s, qv);
      for (std::size_t k = 0; k < n; ++k) qv[k] -= alpha[i] * mem[i].y[k];
    }
    pc.apply(qv, z);
    if (!mem.empty()) {
      const Pair& last = mem.back();
      std::vector<double> py(n);
      pc.apply(last.y, py);
      const double gamma = dot(last.s, last.y) / dot(last.y, py);
      for (double& t : z) t *= gamma;
    }
    for (std::size_t i = 0; i < mem.size(); ++i) {
      const double beta = mem[i].rho * dot(mem[i].y, z);
      for (std::size_t k = 0; k < n; ++k) z[k] += mem[i].s[k] * (alpha[i] - beta);
    }
    for (std::size_t k = 0; k < n; ++k) d[k] = -z[k];
  };

  int it = 0;
  bool retried = false;
  for (; it < cfg.max_iters; ++it) {
    if (stat <= cfg.tol_grad) {
      res.converged = true;
      res.stop_reason = "stationary";
      break;
    }
    const int hw = static_cast<int>(history.size());
    if (hw > cfg.stall_window && history[hw - 1 - cfg.stall_window] - history[hw - 1] < cfg.tol_energy &&
        stat <= cfg.tol_grad_stall) {
      res.converged = true;
      res.stop_reason = "energy-stall";
      break;
    }

    direction();
    double slope = dot(g, d);
    if (!(slope < 0)) {
      mem.clear();
      direction();
      slope = dot(g, d);
      if (!(slope < 0)) {
        res.stop_reason = "no-descent-direction";
        res.converged = stat <= cfg.tol_grad_stall;
        break;
      }
    }
    // Keep a single step from moving the iterate by more than its own size.
    double alpha = 1.0;
    const double dmax = max_abs(d), xmax = max_abs(x);
    if (dmax > xmax) alpha = xmax / dmax;

    bool accepted = false;
    Evaluation evn;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
      for (std::size_t k = 0; k < n; ++k) xn[k] = x[k] + alpha * d[k];
      evn = objective.evaluate(xn, gn);
      if (std::isfinite(evn.value) && evn.value <= ev.value + cfg.armijo_c1 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= cfg.armijo_shrink;
    }
    if (!accepted) {
      if (!mem.empty() || !retried) {
        mem.clear();
        pc.refresh(x, objective.preconditioner_terms(x), cfg.precond_floor);
        since_refresh = 0;
        retried = true;
        continue;
      }
      res.stop_reason = "line-search";
      res.converged = stat <= cfg.tol_grad_stall;
      break;
    }
    retried = false;
    zero_exterior(domain, gn);

    Pair pr{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      pr.s[k] = xn[k] - x[k];
      pr.y[k] = gn[k] - g[k];
    }
    const double sy = dot(pr.s, pr.y);
    x.swap(xn);
    g.swap(gn);
    ev = evn;
    if (sy > 1e-300 * std::max(1.0, dot(pr.y, pr.y))) {
      pr.rho = 1.0 / sy;
      mem.push_back(std::move(pr));
      if (static_cast<int>(mem.size()) > cfg.lbfgs_memory) mem.pop_front();
    }

    const double gm = detail::max_grad(domain, x);
    bool refresh = ++since_refresh >= cfg.precond_refresh;
    if (gm < 0.5 || gm > 2.0) {
      normalize(x);
      for (Pair& p : mem) {
        for (double& t : p.s) t /= gm;
        for (double& t : p.y) t *= gm;
      }
      for (double& t : g) t *= gm;
      ++res.rescales;
      refresh = true;
    }
    if (refresh) {
      pc.refresh(x, objective.preconditioner_terms(x), cfg.precond_floor);
      since_refresh = 0;
    }
    history.push_back(ev.value);
    stat = objective.stationarity(x, g);
    res.trace.push_back({it + 1, ev.energy, ev.nehari_residual, alpha, stat});
  }
  if (it >= cfg.max_iters) res.stop_reason = "max-iters";
  res.iterations = it;
  res.stationarity = stat;
  res.eval = ev;
  res.x = std::move(x);
  return res;
}

}  // namespace pqlab
