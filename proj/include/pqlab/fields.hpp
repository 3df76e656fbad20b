#pragma once

#include <array>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pqlab/geometry.hpp"

namespace pqlab {

/// Nodal values on a Domain lattice (row-major). With the dirichlet flag set,
/// every node outside the interior mask holds exactly 0.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(DomainPtr domain, std::vector<double> values, bool dirichlet = true);

  static ScalarField zeros(DomainPtr domain, bool dirichlet = true);
  /// Samples f at lattice nodes; with dirichlet, only interior nodes are sampled.
  static ScalarField from_function(DomainPtr domain, const std::function<double(Point)>& f,
                                   bool dirichlet = true);
  /// Distance-to-boundary field of the domain.
  static ScalarField rho(DomainPtr domain);
  /// Nodal hat function of an interior node.
  static ScalarField hat(DomainPtr domain, NodeId node);

  const Domain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  bool dirichlet() const { return dirichlet_; }
  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }
  double operator[](NodeId n) const { return values_[n]; }
  std::size_t size() const { return values_.size(); }

  ScalarField scaled(double t) const;
  ScalarField abs() const;
  /// a*this + b*other on the same domain.
  ScalarField combined(double a, const ScalarField& other, double b) const;
  bool is_zero() const;

 private:
  DomainPtr domain_;
  std::vector<double> values_;
  bool dirichlet_ = true;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Piecewise-constant gradients of the P1 interpolant, two triangles per active
/// cell: index 2k is (sw, se, ne) and 2k+1 is (sw, ne, nw) of domain.cells()[k].
struct CellGradients {
  std::vector<Vec2> grad;
  double triangle_area = 0.0;
};

CellGradients gradients(const ScalarField& u);

/// A nonnegative quantity together with its natural logarithm (-inf for zero).
struct LogValue {
  double value = 0.0;
  double log_value = -std::numeric_limits<double>::infinity();
};

/// ||grad u||_m, summed as gmax^m * sum (|g|/gmax)^m so large m cannot overflow.
LogValue grad_norm_p(const ScalarField& u, double m);
/// max over triangles of |grad u|.
double grad_sup(const ScalarField& u);

/// ||u||_r with lumped nodal quadrature.
double lp_norm(const ScalarField& u, double r);
LogValue lp_norm_log(const ScalarField& u, double r);

struct MaxSet {
  double max_value = 0.0;
  std::vector<NodeId> nodes;
  NodeId primary = -1;
  double diameter = 0.0;
  /// Set diameter <= 2h.
  bool unique = true;
};

/// ||u||_inf and the nodes attaining it within 1e-12 relative.
MaxSet sup_norm(const ScalarField& u);

/// Right Gateaux derivative of ||.||_inf^p at u in direction v:
/// p * max over the maximizer set of |u|^(p-2) u v.
double sup_gateaux(const ScalarField& u, const ScalarField& v, double p);

/// Summation in a fixed pairwise tree order (bit-reproducible).
double pairwise_sum(std::span<const double> terms);

/// log(exp(a) - exp(b)) for a > b.
double log_diff_exp(double a, double b);
/// log(exp(a) + exp(b)).
double log_sum_exp(double a, double b);

/// Binary field format: raw little-endian float64, row-major, plus a JSON sidecar
/// at path + ".json" holding the domain hash, lattice size and dirichlet flag.
void write_field(const ScalarField& u, const std::string& path);
ScalarField read_field(DomainPtr domain, const std::string& path);

namespace detail {

/// log sum_T area |g_T|^m over all triangles (zero field gives -inf).
double log_grad_power_sum(const Domain& domain, std::span<const double> values, double m);
/// log sum_i w_i |u_i|^r.
double log_node_power_sum(const Domain& domain, std::span<const double> values, double r);

/// Adds coeff * d/du [ sum_T area |g_T|^m / m ] into out, where the sum is
/// evaluated as if |g| were divided by `gscale` (contribution multiplied by
/// gscale^(m-1) is left to the caller). Returns nothing; out is indexed by node.
void accumulate_grad_power_gradient(const Domain& domain, std::span<const double> values, double m,
                                    double gscale, double coeff, std::span<double> out);

/// max over triangles of |g|.
double max_grad(const Domain& domain, std::span<const double> values);

}  // namespace detail

}  // namespace pqlab
