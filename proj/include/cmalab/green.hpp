#pragma once

#include <cstddef>
#include <vector>

#include "cmalab/grid.hpp"
#include "cmalab/hermitian.hpp"
#include "cmalab/kernels.hpp"

namespace cmalab {

/// Riemannian metric sampled on a torus grid. From a Kahler form the real
/// metric on R^{2n} is g(X, X) = sum H_jk zeta_j conj(zeta_k) with
/// zeta_j = X^{2j} + i X^{2j+1}, so H = I gives g = I and the volume density
/// sqrt(det g) equals det H.
class MetricField {
 public:
  explicit MetricField(const HermitianField& omega);
  /// Packed symmetric real metric, pair_count(m) entries per node.
  MetricField(const TorusGrid& grid, std::vector<double> packed_metric);
  static MetricField flat(const TorusGrid& grid);
  /// omega = e^u I.
  static MetricField conformal(const ScalarField& u);

  const TorusGrid& grid() const { return grid_; }
  /// sqrt(det g) at node i.
  double density(std::size_t i) const { return density_[i]; }
  std::span<const double> densities() const { return density_; }
  double volume() const { return volume_; }
  /// Packed inverse real metric g^{ab} at node i.
  std::span<const double> inverse_metric(std::size_t i) const;
  /// Packed real metric g_ab at node i.
  std::span<const double> metric(std::size_t i) const;
  /// Packed det(omega) g^{ab}, the divergence-form coefficients.
  std::span<const double> stiffness() const { return stiffness_; }
  MetricField scaled(double c) const;

 private:
  TorusGrid grid_;
  std::vector<double> density_;
  std::vector<double> metric_, inverse_, stiffness_;
  double volume_ = 0.0;
};

/// Solves Laplacian u = f with weighted mean zero by preconditioned CG. f must
/// have weighted mean zero to `compat_tol` (relative), else Compatibility.
struct PoissonSolution {
  std::vector<double> u;
  int iterations = 0;
};
PoissonSolution solve_poisson(const MetricField& metric, std::span<const double> f, double tol = 1e-13,
                              double compat_tol = 1e-8);

/// Discrete Laplacian -(1/w) sum (D+_a)^T (w g^{ab} D+_b v); symmetric in the
/// w-weighted inner product, kernel = constants.
std::vector<double> metric_laplacian(const MetricField& metric, std::span<const double> v, Exec exec = Exec::Parallel);

struct GreenSlice {
  std::size_t source = 0;
  std::vector<double> values;
  double weighted_mean = 0.0;   // sum G w h^m, zero by construction
  double residual = 0.0;        // max |Laplacian G + delta_x - 1/V|
  int iterations = 0;
};

/// Solves Laplacian G(x, .) = -delta_x + 1/V with weighted mean zero.
GreenSlice green_slice(const MetricField& metric, std::size_t source, double tol = 1e-13);

/// Default exponents n/(n-1) - 0.05 and 2n/(2n-1) - 0.05; for n = 1 the
/// first is unbounded and `n1_exponent` is used instead.
double default_green_q(int n, double n1_exponent = 4.0);
double default_green_s(int n);

struct GreenNorms {
  double lq = 0.0;        // (sum |G|^q w h^m)^{1/q}
  double grad_ls = 0.0;   // (sum |grad G|^s w h^m)^{1/s}
};

GreenNorms green_norms(const MetricField& metric, const GreenSlice& slice, double q, double s);
/// Node-wise |grad u|_g with forward differences.
std::vector<double> gradient_norm(const MetricField& metric, std::span<const double> u);

struct GreenInfimum {
  double value = 0.0;
  std::size_t node = 0;
};

GreenInfimum green_lower_bound(const GreenSlice& slice);

struct SupBound {
  double sup = 0.0;
  double l1 = 0.0;
  double a = 0.0;
  double ratio = 0.0;  // sup v / (a + ||v||_1)
};

/// Checks the premise Laplacian v >= -a on {v > 0} and mean zero, then
/// reports the measured ratio.
SupBound sup_bound_experiment(const MetricField& metric, std::span<const double> v, double a, double tol = 1e-8);

/// Dijkstra distances on the grid graph joining each node to its 3^m - 1
/// cube neighbours; edge length uses the metric averaged over the endpoints.
std::vector<double> graph_distances(const MetricField& metric, std::size_t source);

struct DiameterReport {
  double true_diameter = 0.0;
  std::size_t x0 = 0, y0 = 0;
  double grad_x0 = 0.0;  // sum |grad G(x0, .)| w h^m
  double grad_y0 = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// All-pairs shortest paths pick the diameter pair, then the Green bound.
DiameterReport diameter_bound(const MetricField& metric, double tol = 1e-9);

}  // namespace cmalab
