#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmalab/functionals.hpp"
#include "cmalab/grid.hpp"
#include "cmalab/operator_spec.hpp"
#include "cmalab/solver_cma.hpp"

namespace cmalab {

enum class ComparisonVariant { Kahler, KahlerEnergy, Symplectic };

std::string to_string(ComparisonVariant v);

/// Constants entering Phi = -eps (-psi + q + Lambda)^b - phi + q~ - s.
struct ComparisonConstants {
  ComparisonVariant variant = ComparisonVariant::Kahler;
  double a = 1.0;
  int n = 1;
  double gamma = 1.0;
  double A = 1.0;
  double b = 0.5;
  double epsilon = 0.0;
  double Lambda = 0.0;
  double C_J = 0.0;  // symplectic variant only
  double C_2 = 0.0;
};

struct SymplecticExtras {
  double C_J = 0.0;
  double C_2 = 0.0;
};

/// Kahler variants: b = n/(n+a), eps = (n b gamma^{1/n})^{-n/(n+a)} A^{1/(n+a)},
/// Lambda^{1-b} = eps b. Symplectic variant (real dimension 2n):
/// b = 2n/(2n+1), Lambda = b (10 C_J C_2)^{2n+1} A, eps = (1/b)^b A^{1/(2n+1)}.
ComparisonConstants choose_constants(ComparisonVariant variant, double a, int n, double gamma, double A,
                                     std::optional<SymplecticExtras> extras = std::nullopt);

/// Node-wise Phi. Empty q / q_tilde spans mean zero. Throws Argument on a
/// negative base -psi + q + Lambda, naming the node.
std::vector<double> build_phi(std::span<const double> phi, std::span<const double> psi, double s,
                              const ComparisonConstants& c, std::span<const double> q = {},
                              std::span<const double> q_tilde = {});

struct PhiReport {
  double max_value = 0.0;
  std::size_t argmax = 0;
  double slack_scale = 1.0;  // max(|phi|, |psi|, 1)
  double tol = 1e-6;
  bool pass = false;
  std::map<std::string, double> diagnostics;
};

/// pass iff max Phi <= tol * slack_scale.
PhiReport verify_nonpositive(std::span<const double> Phi, std::span<const double> phi,
                             std::span<const double> psi, double tol = 1e-6);

/// Adds eigenvalues of I + Hc phi and |grad psi| at the argmax node.
void attach_diagnostics(PhiReport& report, const ScalarField& phi, const ScalarField& psi);

struct LinftyReport {
  double S0 = 0.0;
  double B0 = 0.0;
  double delta0 = 0.0;
  double observed = 0.0;  // sup |phi|
  bool pass = false;
};

/// S0 = 2 B0 phi(0)^delta0 / (1 - 2^-delta0) after checking the growth
/// premise on the profile; pass iff min phi >= -S0 - tol.
LinftyReport linfty_from_profile(const SublevelProfile& profile, double B0, double delta0, double phi_min,
                                 double tol = 1e-12);

struct IntegrabilityReport {
  std::vector<double> alpha;
  std::vector<double> sup_integral;  // max over the family of mean e^{-alpha psi}
  double alpha_proxy = 0.0;          // largest alpha with a finite value
};

IntegrabilityReport exponential_integrability(std::span<const ScalarField> family, std::span<const double> alpha);

/// One realization of the comparison argument on a solved instance: the
/// auxiliary Monge-Ampere problem with weight tau_ell(-phi - s)^a, the
/// constants, Phi and its verification, and the halved-eps control.
struct ComparisonInstance {
  double s = 0.0;
  int ell = 1;
  ComparisonConstants constants;
  ScalarField psi;
  SolveReport aux_report;
  PhiReport phi_report;
  PhiReport halved_report;      // same fields, eps / 2
  double rearranged_defect = 0.0;  // max of (-phi - s) - eps(-psi + Lambda)^b
};

ComparisonInstance run_comparison(const OperatorSpec& spec, const CmaSolution& solution, double s, int ell,
                                  double a = 1.0, ComparisonVariant variant = ComparisonVariant::Kahler,
                                  double tol = 1e-6, const SolverOptions& options = {});

}  // namespace cmalab
