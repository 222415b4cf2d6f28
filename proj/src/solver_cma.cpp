#include "cmalab/solver_cma.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cmalab/linalg.hpp"
#include "cmalab/spectral.hpp"

namespace cmalab {

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct Evaluation {
  NodeLinearization lin;
  std::vector<double> residual;
  double residual_max = INFINITY;
};

class NewtonSolver {
 public:
  NewtonSolver(const TorusGrid& grid, const OperatorSpec& spec, const SolverOptions& options)
      : grid_(grid), spec_(spec), options_(options), spectral_(grid) {}

  Evaluation evaluate(std::span<const double> phi, double c, std::span<const double> k, bool want_coeff) const {
    Evaluation ev;
    const auto hess = spectral_.hessian(phi);
    linearize_nodes(spec_, hess, want_coeff, options_.exec, ev.lin);
    if (ev.lin.outside > 0) return ev;
    ev.residual.resize(phi.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      ev.residual[i] = ev.lin.value[i] - c * k[i];
      worst = std::max(worst, std::abs(ev.residual[i]));
    }
    ev.residual_max = worst;
    return ev;
  }

  // Solves the bordered system [L, -k; mean, 0] (dphi, dc) = (-R, 0).
  int newton_direction(const Evaluation& ev, std::span<const double> k, std::vector<double>& dphi,
                       double& dc) const {
    const std::size_t N = grid_.size();
    const int P = pair_count(grid_.real_dim());
    std::vector<double> mean_coeff(P, 0.0);
    for (std::size_t i = 0; i < N; ++i)
      for (int p = 0; p < P; ++p) mean_coeff[p] += ev.lin.coeff[i * P + p];
    for (double& v : mean_coeff) v /= static_cast<double>(N);
    const double kbar = mean_of(k);

    LinearMap apply = [&](std::span<const double> in, std::span<double> out) {
      const auto hess = spectral_.hessian(in.first(N));
      contract_nodes(ev.lin.coeff, hess, options_.exec, out.first(N));
      for (std::size_t i = 0; i < N; ++i) out[i] -= k[i] * in[N];
      out[N] = mean_of(in.first(N));
    };
    LinearMap precondition = [&](std::span<const double> in, std::span<double> out) {
      const double c = -mean_of(in.first(N)) / kbar;
      std::vector<double> r(in.begin(), in.begin() + N);
      for (std::size_t i = 0; i < N; ++i) r[i] += k[i] * c;
      auto u = spectral_.solve_constant_coefficient(r, mean_coeff);
      for (std::size_t i = 0; i < N; ++i) out[i] = u[i] + in[N];
      out[N] = c;
    };
    std::vector<double> rhs(N + 1, 0.0), x(N + 1, 0.0);
    for (std::size_t i = 0; i < N; ++i) rhs[i] = -ev.residual[i];
    const auto res = gmres(apply, precondition, rhs, x, options_.linear_tol);
    dphi.assign(x.begin(), x.begin() + N);
    dc = x[N];
    return res.iterations;
  }

  const TorusGrid& grid_;
  const OperatorSpec& spec_;
  const SolverOptions& options_;
  Spectral spectral_;
};

std::string describe(const SolveReport& r) {
  std::ostringstream os;
  os << "iterations=" << r.iterations << " residual=" << r.final_residual
     << " continuation_steps=" << r.continuation_steps;
  return os.str();
}

}  // namespace

DensitySpec normalize_density(const ScalarField& raw, int n) {
  require(n >= 1, ErrorKind::Argument, "complex dimension must be positive");
  const auto v = raw.values();
  // log-mean-exp with the max factored out for stability
  const double top = *std::max_element(v.begin(), v.end());
  double acc = 0.0;
  for (double x : v) acc += std::exp(n * (x - top));
  const double shift = top + std::log(acc / static_cast<double>(v.size())) / n;
  ScalarField normalized = raw.map([shift](double x) { return x - shift; });
  return {raw, std::move(normalized), std::exp(shift)};
}

CmaSolution solve_cma(const TorusGrid& grid, const OperatorSpec& spec, const ScalarField& k,
                      const SolverOptions& options) {
  require(k.torus() == grid, ErrorKind::DomainMismatch, "density lives on a different grid");
  require(spec.dim() == grid.complex_dim(), ErrorKind::Argument, "operator and grid dimensions differ");
  require(k.min() > 0.0, ErrorKind::Argument, "density must be positive");
  require(!options.continuation.empty() && options.continuation.back() == 1.0, ErrorKind::Argument,
          "continuation schedule must end at 1");

  const std::size_t N = grid.size();
  const int n = grid.complex_dim();
  NewtonSolver solver(grid, spec, options);
  SolveReport report;

  std::vector<double> phi(N, 0.0);
  // at t = 0 the density is 1 and (phi, c) = (0, f(1,..,1)) is exact
  const std::vector<double> ones(n, 1.0);
  double c = *spec.value(ones);

  std::vector<double> kt(N);
  auto set_stage = [&](double t) {
    for (std::size_t i = 0; i < N; ++i) kt[i] = (1.0 - t) + t * k[i];
  };

  std::vector<double> schedule = options.continuation;
  double t_done = 0.0;
  std::vector<double> phi_done = phi;
  double c_done = c;
  int refinements = 0;
  Evaluation ev;
  std::size_t stage = 0;

  while (stage < schedule.size()) {
    const double t = schedule[stage];
    set_stage(t);
    bool ok = false;
    ev = solver.evaluate(phi, c, kt, true);
    for (int it = 0; it <= options.max_newton; ++it) {
      if (ev.lin.outside > 0) break;
      if (ev.residual_max <= options.tol) {
        ok = true;
        break;
      }
      if (it == options.max_newton) break;
      std::vector<double> dphi;
      double dc = 0.0;
      report.linear_iterations += solver.newton_direction(ev, kt, dphi, dc);
      ++report.iterations;
      double alpha = 1.0;
      bool accepted = false;
      std::vector<double> trial(N);
      for (int h = 0; h <= options.max_halvings; ++h) {
        for (std::size_t i = 0; i < N; ++i) trial[i] = phi[i] + alpha * dphi[i];
        auto trial_ev = solver.evaluate(trial, c + alpha * dc, kt, true);
        if (trial_ev.lin.outside == 0 && trial_ev.residual_max < ev.residual_max) {
          phi = trial;
          c += alpha * dc;
          ev = std::move(trial_ev);
          accepted = true;
          break;
        }
        alpha *= 0.5;
        ++report.step_halvings;
      }
      if (!accepted) break;
    }
    if (ok) {
      ++report.continuation_steps;
      t_done = t;
      phi_done = phi;
      c_done = c;
      ++stage;
      continue;
    }
    // refine: insert a midpoint stage and restart from the last converged state
    if (++refinements > options.max_refinements) {
      report.final_residual = ev.residual_max;
      if (ev.lin.outside > 0)
        throw SolveError(ErrorKind::ConeViolation, "Newton iterates persistently leave the cone: " + describe(report),
                         report);
      throw SolveError(ErrorKind::NonConvergence, "continuation stalled: " + describe(report), report);
    }
    schedule.insert(schedule.begin() + static_cast<std::ptrdiff_t>(stage), 0.5 * (t_done + t));
    phi = phi_done;
    c = c_done;
  }

  report.final_residual = ev.residual_max;
  report.positivity_margin = *std::min_element(ev.lin.margin.begin(), ev.lin.margin.end());
  report.rescale = c;
  report.rescaled = std::abs(c - 1.0) > 1e-12;

  const double top = *std::max_element(phi.begin(), phi.end());
  for (double& v : phi) v -= top;
  ScalarField keff = k.map([c](double v) { return c * v; });
  return {ScalarField(grid, std::move(phi)), std::move(keff), report};
}

AuxiliarySolution solve_auxiliary(const TorusGrid& grid, const ScalarField& w, const ScalarField& k,
                                  const SolverOptions& options) {
  require(w.torus() == grid && k.torus() == grid, ErrorKind::DomainMismatch, "auxiliary data on a different grid");
  require(w.min() > 0.0, ErrorKind::Argument, "auxiliary weight must be positive");
  const int n = grid.complex_dim();
  double A = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) A += w[i] * std::pow(k[i], n);
  A /= static_cast<double>(grid.size());
  std::vector<double> kaux(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) kaux[i] = std::pow(w[i] / A, 1.0 / n) * k[i];
  auto sol = solve_cma(grid, OperatorSpec::monge_ampere(n), ScalarField(grid, std::move(kaux)), options);
  return {std::move(sol.phi), A, sol.report};
}

std::vector<double> monge_ampere_density(const ScalarField& phi) {
  const TorusGrid& grid = phi.torus();
  const int n = grid.complex_dim();
  Spectral spectral(grid);
  const auto hess = spectral.hessian(phi.values());
  std::vector<double> out(grid.size());
  std::vector<cplx> h(n * n);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    relative_endomorphism_at(hess, n, i, h);
    Eigen::MatrixXcd H(n, n);
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) H(j, l) = h[j * n + l];
    out[i] = H.determinant().real();
  }
  return out;
}

}  // namespace cmalab
