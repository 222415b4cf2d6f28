#include "cmalab/green.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "cmalab/linalg.hpp"
#include "cmalab/spectral.hpp"

namespace cmalab {

namespace {

std::vector<double> real_metric(const HermitianField& omega) {
  const int n = omega.dim();
  const int m = 2 * n;
  const std::size_t P = static_cast<std::size_t>(pair_count(m));
  std::vector<double> out(omega.nodes() * P);
  for (std::size_t i = 0; i < omega.nodes(); ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        const cplx h = 0.5 * (omega.at(i, j, k) + std::conj(omega.at(i, k, j)));
        out[i * P + pair_index(m, 2 * j, 2 * k)] = h.real();
        out[i * P + pair_index(m, 2 * j + 1, 2 * k + 1)] = h.real();
        out[i * P + pair_index(m, 2 * j, 2 * k + 1)] = h.imag();
        if (j != k) out[i * P + pair_index(m, 2 * j + 1, 2 * k)] = -h.imag();
      }
    }
  }
  return out;
}

}  // namespace

MetricField::MetricField(const HermitianField& omega) : MetricField(omega.grid(), real_metric(omega)) {}

MetricField::MetricField(const TorusGrid& grid, std::vector<double> packed_metric)
    : grid_(grid), metric_(std::move(packed_metric)) {
  const int m = grid_.real_dim();
  const std::size_t P = static_cast<std::size_t>(pair_count(m));
  const std::size_t N = grid_.size();
  require(metric_.size() == N * P, ErrorKind::Argument, "packed metric has the wrong size");
  density_.resize(N);
  inverse_.resize(N * P);
  stiffness_.resize(N * P);
  const double cell = grid_.cell_volume();
  for (std::size_t i = 0; i < N; ++i) {
    Eigen::MatrixXd g(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) g(a, b) = metric_[i * P + pair_index(m, a, b)];
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) {
      std::ostringstream os;
      os << "metric is not positive definite at node " << i;
      throw Error(ErrorKind::Argument, os.str());
    }
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m, m));
    double det = 1.0;
    for (int a = 0; a < m; ++a) det *= llt.matrixL()(a, a);
    density_[i] = det;
    for (int a = 0; a < m; ++a) {
      for (int b = a; b < m; ++b) {
        const std::size_t p = i * P + pair_index(m, a, b);
        inverse_[p] = inv(a, b);
        stiffness_[p] = det * inv(a, b);
      }
    }
    volume_ += det * cell;
  }
}

MetricField MetricField::flat(const TorusGrid& grid) { return conformal(ScalarField::constant(grid, 0.0)); }

MetricField MetricField::conformal(const ScalarField& u) {
  const TorusGrid& grid = u.torus();
  const int n = grid.complex_dim();
  std::vector<cplx> e(grid.size() * n * n, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (int j = 0; j < n; ++j) e[(i * n + j) * n + j] = std::exp(u[i]);
  return MetricField(HermitianField(grid, std::move(e)));
}

std::span<const double> MetricField::inverse_metric(std::size_t i) const {
  const std::size_t P = static_cast<std::size_t>(pair_count(grid_.real_dim()));
  return {inverse_.data() + i * P, P};
}

std::span<const double> MetricField::metric(std::size_t i) const {
  const std::size_t P = static_cast<std::size_t>(pair_count(grid().real_dim()));
  return {metric_.data() + i * P, P};
}

MetricField MetricField::scaled(double c) const {
  require(c > 0.0, ErrorKind::Argument, "metric scale must be positive");
  std::vector<double> g(metric_);
  for (double& v : g) v *= c;
  return MetricField(grid_, std::move(g));
}

std::vector<double> metric_laplacian(const MetricField& metric, std::span<const double> v, Exec exec) {
  std::vector<double> out(v.size());
  divergence_form_apply(metric.grid(), metric.stiffness(), v, exec, out);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = -out[i] / metric.density(i);
  return out;
}

namespace {

// FFT inverse of the constant-coefficient stiffness with averaged coefficients.
class FlatPreconditioner {
 public:
  explicit FlatPreconditioner(const MetricField& metric) : spectral_(metric.grid()) {
    const TorusGrid& grid = metric.grid();
    const int m = grid.real_dim();
    const std::size_t P = static_cast<std::size_t>(pair_count(m));
    std::vector<double> cbar(P, 0.0);
    const auto st = metric.stiffness();
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t p = 0; p < P; ++p) cbar[p] += st[i * P + p];
    for (double& c : cbar) c /= static_cast<double>(grid.size());
    const double h = grid.spacing();
    const double tp = 2.0 * std::numbers::pi / grid.nodes_per_axis();
    symbol_.resize(spectral_.spectral_size());
    for (std::size_t s = 0; s < symbol_.size(); ++s) {
      std::vector<cplx> z(m);
      for (int a = 0; a < m; ++a) z[a] = (std::polar(1.0, tp * spectral_.kappa(s, a)) - 1.0) / h;
      cplx acc = 0.0;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) acc += std::conj(z[a]) * cbar[pair_index(m, a, b)] * z[b];
      symbol_[s] = acc.real();
    }
  }

  void apply(std::span<const double> in, std::span<double> out) const {
    std::vector<cplx> spec;
    spectral_.forward(in, spec);
    for (std::size_t s = 0; s < spec.size(); ++s) spec[s] = s == 0 ? cplx(0.0) : spec[s] / symbol_[s];
    spectral_.inverse(spec, out);
  }

 private:
  Spectral spectral_;
  std::vector<double> symbol_;
};

}  // namespace

PoissonSolution solve_poisson(const MetricField& metric, std::span<const double> f, double tol,
                              double compat_tol) {
  const TorusGrid& grid = metric.grid();
  const std::size_t N = grid.size();
  require(f.size() == N, ErrorKind::Argument, "right side does not match the metric grid");
  // K u = -w f with K the stiffness (K = -w Laplacian)
  std::vector<double> rhs(N);
  double total = 0.0, scale = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    rhs[i] = -metric.density(i) * f[i];
    total += rhs[i];
    scale += std::abs(rhs[i]);
    mass += metric.density(i);
  }
  // roundoff-level right sides count as compatible
  if (std::abs(total) > compat_tol * scale + 64.0 * std::numeric_limits<double>::epsilon() * mass) {
    std::ostringstream os;
    os << "right side has weighted mean " << total / static_cast<double>(N) << ", relative "
       << total / std::max(scale, 1e-300);
    throw Error(ErrorKind::Compatibility, os.str());
  }
  for (std::size_t i = 0; i < N; ++i) rhs[i] -= metric.density(i) * total / (metric.volume() / grid.cell_volume());

  FlatPreconditioner pre(metric);
  LinearMap apply = [&](std::span<const double> in, std::span<double> out) {
    divergence_form_apply(grid, metric.stiffness(), in, Exec::Parallel, out);
  };
  LinearMap precondition = [&](std::span<const double> in, std::span<double> out) { pre.apply(in, out); };
  PoissonSolution sol;
  sol.u.assign(N, 0.0);
  const auto res = pcg(apply, precondition, rhs, sol.u, tol);
  if (!res.converged) {
    std::ostringstream os;
    os << "weighted Poisson solve did not converge: relative residual " << res.relative_residual;
    throw Error(ErrorKind::Solver, os.str());
  }
  sol.iterations = res.iterations;
  const double cell = grid.cell_volume();
  double wmean = 0.0;
  for (std::size_t i = 0; i < N; ++i) wmean += sol.u[i] * metric.density(i) * cell;
  for (double& v : sol.u) v -= wmean / metric.volume();
  return sol;
}

GreenSlice green_slice(const MetricField& metric, std::size_t source, double tol) {
  const TorusGrid& grid = metric.grid();
  const std::size_t N = grid.size();
  require(source < N, ErrorKind::Argument, "Green source node out of range");
  const double cell = grid.cell_volume();
  const double V = metric.volume();
  // Laplacian G = -delta_x + 1/V, delta_x = 1 / (w h^m) at the source
  std::vector<double> f(N, 1.0 / V);
  f[source] -= 1.0 / (metric.density(source) * cell);
  auto sol = solve_poisson(metric, f, tol);
  GreenSlice slice;
  slice.source = source;
  slice.values = std::move(sol.u);
  slice.iterations = sol.iterations;
  for (std::size_t i = 0; i < N; ++i) slice.weighted_mean += slice.values[i] * metric.density(i) * cell;
  const auto lap = metric_laplacian(metric, slice.values);
  for (std::size_t i = 0; i < N; ++i) slice.residual = std::max(slice.residual, std::abs(lap[i] - f[i]));
  return slice;
}

double default_green_q(int n, double n1_exponent) {
  require(n >= 1, ErrorKind::Argument, "dimension must be positive");
  if (n == 1) return n1_exponent;
  return n / (n - 1.0) - 0.05;
}

double default_green_s(int n) {
  require(n >= 1, ErrorKind::Argument, "dimension must be positive");
  return 2.0 * n / (2.0 * n - 1.0) - 0.05;
}

std::vector<double> gradient_norm(const MetricField& metric, std::span<const double> u) {
  const TorusGrid& grid = metric.grid();
  const int m = grid.real_dim();
  const double inv_h = 1.0 / grid.spacing();
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double d[kMaxRealDim];
    for (int a = 0; a < m; ++a) d[a] = (u[grid.shifted(i, a, 1)] - u[i]) * inv_h;
    const auto ginv = metric.inverse_metric(i);
    double acc = 0.0;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) acc += ginv[pair_index(m, a, b)] * d[a] * d[b];
    out[i] = std::sqrt(std::max(acc, 0.0));
  }
  return out;
}

GreenNorms green_norms(const MetricField& metric, const GreenSlice& slice, double q, double s) {
  require(q >= 1.0 && s >= 1.0, ErrorKind::Argument, "norm exponents must be >= 1");
  const double cell = metric.grid().cell_volume();
  const auto grad = gradient_norm(metric, slice.values);
  GreenNorms r;
  for (std::size_t i = 0; i < slice.values.size(); ++i) {
    const double w = metric.density(i) * cell;
    r.lq += std::pow(std::abs(slice.values[i]), q) * w;
    r.grad_ls += std::pow(grad[i], s) * w;
  }
  r.lq = std::pow(r.lq, 1.0 / q);
  r.grad_ls = std::pow(r.grad_ls, 1.0 / s);
  return r;
}

GreenInfimum green_lower_bound(const GreenSlice& slice) {
  const auto it = std::min_element(slice.values.begin(), slice.values.end());
  return {*it, static_cast<std::size_t>(it - slice.values.begin())};
}

SupBound sup_bound_experiment(const MetricField& metric, std::span<const double> v, double a, double tol) {
  const std::size_t N = metric.grid().size();
  require(v.size() == N, ErrorKind::Argument, "function does not match the metric grid");
  require(a >= 0.0, ErrorKind::Argument, "a must be nonnegative");
  const double cell = metric.grid().cell_volume();
  double wmean = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    wmean += v[i] * metric.density(i) * cell;
    l1 += std::abs(v[i]) * metric.density(i) * cell;
  }
  const double scale = std::max(1.0, l1);
  require(std::abs(wmean) <= tol * scale, ErrorKind::PremiseViolation, "function is not mean zero against omega^n");
  const auto lap = metric_laplacian(metric, v);
  double lap_scale = 1.0;
  for (double x : lap) lap_scale = std::max(lap_scale, std::abs(x));
  for (std::size_t i = 0; i < N; ++i) {
    if (v[i] > 0.0 && lap[i] < -a - tol * lap_scale) {
      std::ostringstream os;
      os << "Laplacian " << lap[i] << " < -a at node " << i << " of the positive set";
      throw Error(ErrorKind::PremiseViolation, os.str());
    }
  }
  SupBound r;
  r.sup = *std::max_element(v.begin(), v.end());
  r.l1 = l1;
  r.a = a;
  r.ratio = r.sup / (a + l1);
  return r;
}

namespace {

// All offsets in {-1, 0, 1}^m except zero, with precomputed targets and
// lengths. In the plane this is the 8-neighbour stencil.
struct GridGraph {
  std::size_t degree = 0;
  std::vector<std::size_t> target;
  std::vector<double> length;
};

GridGraph build_graph(const MetricField& metric) {
  const TorusGrid& grid = metric.grid();
  const int m = grid.real_dim();
  const double h = grid.spacing();
  std::vector<std::vector<int>> steps;
  int total = 1;
  for (int a = 0; a < m; ++a) total *= 3;
  for (int code = 0; code < total; ++code) {
    std::vector<int> d(m);
    int c = code;
    bool zero = true;
    for (int a = 0; a < m; ++a) {
      d[a] = c % 3 - 1;
      c /= 3;
      zero = zero && d[a] == 0;
    }
    if (!zero) steps.push_back(std::move(d));
  }
  GridGraph graph;
  graph.degree = steps.size();
  const std::size_t N = grid.size();
  graph.target.resize(N * graph.degree);
  graph.length.resize(N * graph.degree);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const auto& d = steps[k];
      std::size_t j = i;
      for (int a = 0; a < m; ++a)
        if (d[a] != 0) j = grid.shifted(j, a, d[a]);
      const auto gi = metric.metric(i);
      const auto gj = metric.metric(j);
      double acc = 0.0;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          const int p = pair_index(m, a, b);
          acc += 0.5 * (gi[p] + gj[p]) * d[a] * d[b];
        }
      graph.target[i * graph.degree + k] = j;
      graph.length[i * graph.degree + k] = h * std::sqrt(acc);
    }
  }
  return graph;
}

std::vector<double> dijkstra(const GridGraph& graph, std::size_t source) {
  const std::size_t N = graph.target.size() / graph.degree;
  std::vector<double> dist(N, INFINITY);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [d, i] = heap.top();
    heap.pop();
    if (d > dist[i]) continue;
    for (std::size_t k = i * graph.degree; k < (i + 1) * graph.degree; ++k) {
      const std::size_t j = graph.target[k];
      const double nd = d + graph.length[k];
      if (nd < dist[j]) {
        dist[j] = nd;
        heap.push({nd, j});
      }
    }
  }
  return dist;
}

}  // namespace

std::vector<double> graph_distances(const MetricField& metric, std::size_t source) {
  require(source < metric.grid().size(), ErrorKind::Argument, "source node out of range");
  return dijkstra(build_graph(metric), source);
}

DiameterReport diameter_bound(const MetricField& metric, double tol) {
  const std::size_t N = metric.grid().size();
  require(N <= 16384, ErrorKind::Argument, "all-pairs shortest paths limited to 16384 nodes");
  DiameterReport r;
  const GridGraph graph = build_graph(metric);
  for (std::size_t x = 0; x < N; ++x) {
    const auto d = dijkstra(graph, x);
    const auto it = std::max_element(d.begin(), d.end());
    if (*it > r.true_diameter) {
      r.true_diameter = *it;
      r.x0 = x;
      r.y0 = static_cast<std::size_t>(it - d.begin());
    }
  }
  const double cell = metric.grid().cell_volume();
  auto grad_integral = [&](std::size_t src) {
    const auto slice = green_slice(metric, src);
    const auto g = gradient_norm(metric, slice.values);
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) acc += g[i] * metric.density(i) * cell;
    return acc;
  };
  r.grad_x0 = grad_integral(r.x0);
  r.grad_y0 = grad_integral(r.y0);
  r.bound = r.grad_x0 + r.grad_y0;
  r.pass = r.bound >= r.true_diameter - tol;
  return r;
}

}  // namespace cmalab
