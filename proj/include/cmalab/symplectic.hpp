#pragma once

#include <map>
#include <string>
#include <vector>

#include "cmalab/comparison.hpp"
#include "cmalab/degiorgi.hpp"
#include "cmalab/grid.hpp"
#include "cmalab/solver_rma.hpp"

namespace cmalab {

/// Almost complex data on a torus grid of real dimension m. Every tensor is
/// stored as a row-major m x m matrix per node:
///   J      action matrix, (JY)^r = J(r, c) Y^c, so J_c^r = J(r, c);
///   Omega  Omega(Y, Z) = Y^T Omega Z;
///   g      symmetrized metric (Omega J + (Omega J)^T) / 2;
///   g_tilde the candidate almost Kahler metric.
/// The associated 2-form of g_tilde is omega~ = g_tilde J.
struct AlmostComplexData {
  TorusGrid grid;
  std::vector<double> J;
  std::vector<double> Omega;
  std::vector<double> g;
  std::vector<double> g_tilde;

  int real_dim() const { return grid.real_dim(); }
  double at(const std::vector<double>& field, std::size_t node, int r, int c) const {
    const int m = real_dim();
    return field[(node * m + r) * m + c];
  }
};

/// Fills g from Omega and J; sizes are checked.
AlmostComplexData make_almost_complex(const TorusGrid& grid, std::vector<double> J, std::vector<double> Omega,
                                      std::vector<double> g_tilde);

struct ValidationReport {
  double j_square = 0.0;        // max |J^2 + I|
  double taming = 0.0;          // min eigenvalue of the symmetrized Omega J
  double omega_closed = 0.0;    // max |d Omega|
  double compatibility = 0.0;   // max |J^T g~ J - g~|
  double antisymmetry = 0.0;    // max |omega~ + omega~^T|
  double tilde_closed = 0.0;    // max |d omega~|
  double tol = 1e-9;
  bool pass = false;
  std::vector<std::string> failures;
};

/// Every residual is computed and reported; failing data does not throw.
/// Exterior derivatives use spectral first derivatives.
ValidationReport validate(const AlmostComplexData& data, double tol = 1e-9);

/// Per-node vector g~^{ik} Gamma~^q_ik from J-derivatives only:
///   -1/2 g~^{ql} J_k^j d_l J_j^k - g~^{ik} J_j^q d_i J_k^j
/// with second order central differences. Throws Precondition unless the
/// validation passed. Layout: node-major, m entries per node.
std::vector<double> christoffel_contraction(const AlmostComplexData& data, const ValidationReport& validation);

struct CJReport {
  double C_J = 0.0;
  double trace_term = 0.0;   // sup |J_k^j d_l J_j^k|_g
  double tensor_term = 0.0;  // sup |J_j^q d_i J_k^j|_g
  double chart_min = 0.0;    // eigenvalue range of g in identity coordinates
  double chart_max = 0.0;
};

/// C_J as the sup over the grid of the sum of the two J-derivative norms,
/// so that |g~^{ik} Gamma~^q_ik psi_q| <= C_J |grad psi|_g tr_g~ g holds by
/// construction. Throws Chart unless 1/2 <= g <= 2 in identity coordinates.
CJReport measure_CJ(const AlmostComplexData& data);

struct LinearPhi {
  ScalarField phi;
  double residual = 0.0;  // max |Laplacian_g~ phi - rhs|
  double compatibility = 0.0;
  int iterations = 0;
};

/// Laplacian_g~ phi = m - tr_g~ g with max phi = 0 (divergence form, as in
/// the Green module). Throws Compatibility when the right side is not mean
/// zero against dV_g~ to 1e-8.
LinearPhi solve_linear_phi(const AlmostComplexData& data);

/// T^2 family J = [[0, -e^f], [e^-f, 0]], f = eps_J sin(2 pi y), standard
/// Omega, so g = diag(e^-f, e^f); g~ = e^v g with v shifted so that the
/// discrete mean of e^v is one. F = v solves det g~ = e^{2F} det g.
struct ManufacturedFamily {
  AlmostComplexData data;
  ScalarField F;
};
ManufacturedFamily surface_family(const TorusGrid& grid, double eps_J, const ScalarField& v);

/// Standard J and Omega on T^{2n} with g~ the real form of the Kahler
/// metric I + i dd^c potential (Hermitian matrix of complex second
/// derivatives). F = log(det g~ / det g) / 2.
ManufacturedFamily kahler_family(const TorusGrid& grid, const ScalarField& potential);

struct MainnewOptions {
  double r0 = 0.2;
  int radial_degree = 31;
  int angular_count = 32;
  std::vector<double> s_fractions{1.0, 0.5, 0.25};  // comparison runs at s = fraction * s0
  double ell_factor = 4.0;                          // ell = ceil(ell_factor / s)
  int profile_samples = 64;
  double tol = 1e-6;
  RmaOptions rma;
};

struct MainnewComparison {
  double s = 0.0;
  int ell = 1;
  double A = 0.0;               // A_{s,ell}
  ComparisonConstants constants;
  AbpReport abp;
  GradientReport gradient;
  PhiReport phi_report;
  PhiReport halved_report;
  double chain_ratio = 0.0;     // max over nodes of -u_s / (C3 A^{1/(2n+1)})
  double interior_ratio = 0.0;  // max over Omega_s of -u_s / (eps (-psi + Lambda)^b); halving eps fails iff > 1/2
  int rma_iterations = 0;
  double rma_residual = 0.0;
};

struct MainnewReport {
  int n = 1;
  std::size_t x0 = 0;
  double phi_min = 0.0;
  double r0 = 0.0;
  double eta = 0.0;
  double s0 = 0.0;
  double K = 0.0;
  CJReport cj;
  ValidationReport validation;
  double phi_residual = 0.0;
  double containment_defect = 0.0;  // max over |x| >= r0 of -(u_{s0})
  double C2 = 0.0, C_ng = 0.0, C1 = 0.0, Lambda_bar = 0.0, C3 = 0.0, C4 = 0.0;
  std::vector<MainnewComparison> comparisons;
  std::vector<double> profile_s, profile_phi, profile_A;
  GrowthCertificate growth;
  double additional_ratio = 0.0;  // max A_s / (C4 phi(s)^{1+1/2n})
  double c0 = 0.0;
  double phi_s0 = 0.0;
  double A_s0 = 0.0;
  double C5 = 0.0, C6 = 0.0, C7 = 0.0, C8 = 0.0;
  double sup_abs_phi = 0.0;
  double l1_phi = 0.0;  // ||phi||_{L^1(e^{2F} dV_g)}
  double final_bound = 0.0;
  std::map<std::string, bool> stages;
  bool pass = false;
};

/// The staged pipeline for the estimate sup|phi| <= C8 (1 + ||phi||_L1).
/// Stage failures throw with the stage name prefixed to the message.
MainnewReport run_mainnew(const AlmostComplexData& data, const ScalarField& F, const MainnewOptions& options = {});

}  // namespace cmalab
