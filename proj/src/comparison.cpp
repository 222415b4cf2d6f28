#include "cmalab/comparison.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cmalab/degiorgi.hpp"
#include "cmalab/kernels.hpp"
#include "cmalab/spectral.hpp"

namespace cmalab {

std::string to_string(ComparisonVariant v) {
  switch (v) {
    case ComparisonVariant::Kahler: return "kahler";
    case ComparisonVariant::KahlerEnergy: return "kahler_energy";
    case ComparisonVariant::Symplectic: return "symplectic";
  }
  return "unknown";
}

ComparisonConstants choose_constants(ComparisonVariant variant, double a, int n, double gamma, double A,
                                     std::optional<SymplecticExtras> extras) {
  require(n >= 1, ErrorKind::Argument, "dimension must be positive");
  require(A > 0.0, ErrorKind::Argument, "normalizing constant A must be positive");
  ComparisonConstants c;
  c.variant = variant;
  c.n = n;
  c.A = A;
  if (variant == ComparisonVariant::Symplectic) {
    require(extras.has_value(), ErrorKind::Argument, "symplectic constants need C_J and C_2");
    require(extras->C_J >= 0.0 && extras->C_2 > 0.0, ErrorKind::Argument, "C_J must be >= 0 and C_2 > 0");
    const double m = 2.0 * n;
    c.a = 1.0;
    c.gamma = gamma;
    c.C_J = extras->C_J;
    c.C_2 = extras->C_2;
    c.b = m / (m + 1.0);
    c.Lambda = c.b * std::pow(10.0 * c.C_J * c.C_2, m + 1.0) * A;
    c.epsilon = std::pow((m + 1.0) / m, c.b) * std::pow(A, 1.0 / (m + 1.0));
    return c;
  }
  require(a > 0.0, ErrorKind::Argument, "power a must be positive");
  require(gamma > 0.0, ErrorKind::Argument, "structural constant gamma must be positive");
  c.a = a;
  c.gamma = gamma;
  c.b = n / (n + a);
  c.epsilon = std::pow(n * c.b * std::pow(gamma, 1.0 / n), -n / (n + a)) * std::pow(A, 1.0 / (n + a));
  c.Lambda = std::pow(c.epsilon * c.b, 1.0 / (1.0 - c.b));
  return c;
}

std::vector<double> build_phi(std::span<const double> phi, std::span<const double> psi, double s,
                              const ComparisonConstants& c, std::span<const double> q,
                              std::span<const double> q_tilde) {
  require(phi.size() == psi.size(), ErrorKind::Argument, "phi and psi differ in size");
  require(q.empty() || q.size() == phi.size(), ErrorKind::Argument, "q has the wrong size");
  require(q_tilde.empty() || q_tilde.size() == phi.size(), ErrorKind::Argument, "q~ has the wrong size");
  std::vector<double> out(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double qi = q.empty() ? 0.0 : q[i];
    const double qt = q_tilde.empty() ? 0.0 : q_tilde[i];
    const double base = -psi[i] + qi + c.Lambda;
    if (!(base >= 0.0)) {
      std::ostringstream os;
      os << "negative base " << base << " of the fractional power at node " << i;
      throw Error(ErrorKind::Argument, os.str());
    }
    out[i] = -c.epsilon * std::pow(base, c.b) - phi[i] + qt - s;
  }
  return out;
}

PhiReport verify_nonpositive(std::span<const double> Phi, std::span<const double> phi,
                             std::span<const double> psi, double tol) {
  require(!Phi.empty(), ErrorKind::Argument, "empty comparison field");
  PhiReport r;
  r.tol = tol;
  const auto it = std::max_element(Phi.begin(), Phi.end());
  r.max_value = *it;
  r.argmax = static_cast<std::size_t>(it - Phi.begin());
  double scale = 1.0;
  for (double v : phi) scale = std::max(scale, std::abs(v));
  for (double v : psi) scale = std::max(scale, std::abs(v));
  r.slack_scale = scale;
  r.pass = r.max_value <= tol * scale;
  return r;
}

void attach_diagnostics(PhiReport& report, const ScalarField& phi, const ScalarField& psi) {
  const TorusGrid& grid = phi.torus();
  const int n = grid.complex_dim();
  Spectral spectral(grid);
  const auto hess = spectral.hessian(phi.values());
  std::vector<cplx> h(n * n);
  relative_endomorphism_at(hess, n, report.argmax, h);
  Eigen::MatrixXcd H(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) H(j, l) = h[j * n + l];
  const Eigen::VectorXd lambda = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H).eigenvalues();
  for (int j = 0; j < n; ++j) report.diagnostics["lambda_" + std::to_string(j)] = lambda[j];
  double g2 = 0.0;
  for (int a = 0; a < grid.real_dim(); ++a) {
    const double d = spectral.first_derivative(psi.values(), a)[report.argmax];
    g2 += d * d;
  }
  report.diagnostics["grad_psi"] = std::sqrt(g2);
  report.diagnostics["phi"] = phi[report.argmax];
  report.diagnostics["psi"] = psi[report.argmax];
}

LinftyReport linfty_from_profile(const SublevelProfile& profile, double B0, double delta0, double phi_min,
                                 double tol) {
  const auto cert = verify_growth(profile.s, profile.phi, GrowthVariant::Decreasing, B0, delta0);
  if (!cert.pass) {
    std::ostringstream os;
    os << "growth premise fails: minimal constant " << cert.minimal_constant << " exceeds " << B0;
    throw Error(ErrorKind::PremiseViolation, os.str());
  }
  LinftyReport r;
  r.B0 = B0;
  r.delta0 = delta0;
  r.S0 = vanishing_bound(B0, delta0, profile.phi.front());
  r.observed = std::abs(phi_min);
  r.pass = phi_min >= -r.S0 - tol;
  return r;
}

IntegrabilityReport exponential_integrability(std::span<const ScalarField> family, std::span<const double> alpha) {
  IntegrabilityReport r;
  r.alpha.assign(alpha.begin(), alpha.end());
  r.sup_integral.assign(alpha.size(), 0.0);
  for (const auto& psi : family)
    require(psi.max() <= 1e-12, ErrorKind::Precondition, "family members must be max-normalized to <= 0");
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    for (const auto& psi : family) {
      double acc = 0.0;
      for (double v : psi.values()) acc += std::exp(-alpha[j] * v);
      r.sup_integral[j] = std::max(r.sup_integral[j], acc / static_cast<double>(psi.size()));
    }
    if (std::isfinite(r.sup_integral[j])) r.alpha_proxy = std::max(r.alpha_proxy, alpha[j]);
  }
  return r;
}

ComparisonInstance run_comparison(const OperatorSpec& spec, const CmaSolution& solution, double s, int ell,
                                  double a, ComparisonVariant variant, double tol, const SolverOptions& options) {
  require(variant != ComparisonVariant::Symplectic, ErrorKind::Argument,
          "the symplectic variant runs through the real Monge-Ampere pipeline");
  require(s >= 0.0, ErrorKind::Argument, "level s must be nonnegative");
  const ScalarField& phi = solution.phi;
  const TorusGrid& grid = phi.torus();
  ScalarField w = phi.map([&](double v) { return std::pow(tau(ell, -v - s), a); });
  auto aux = solve_auxiliary(grid, w, solution.k_effective, options);

  ComparisonInstance out{.s = s,
                         .ell = ell,
                         .constants = choose_constants(variant, a, grid.complex_dim(), spec.gamma(), aux.A),
                         .psi = std::move(aux.psi),
                         .aux_report = aux.report,
                         .phi_report = {},
                         .halved_report = {},
                         .rearranged_defect = 0.0};

  const auto Phi = build_phi(phi.values(), out.psi.values(), s, out.constants);
  out.phi_report = verify_nonpositive(Phi, phi.values(), out.psi.values(), tol);
  attach_diagnostics(out.phi_report, phi, out.psi);

  ComparisonConstants halved = out.constants;
  halved.epsilon *= 0.5;
  const auto Phi_half = build_phi(phi.values(), out.psi.values(), s, halved);
  out.halved_report = verify_nonpositive(Phi_half, phi.values(), out.psi.values(), tol);

  out.rearranged_defect = -std::numeric_limits<double>::infinity();
  const auto& c = out.constants;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double bound = c.epsilon * std::pow(-out.psi[i] + c.Lambda, c.b);
    out.rearranged_defect = std::max(out.rearranged_defect, (-phi[i] - s) - bound);
  }
  return out;
}

}  // namespace cmalab
