#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cmalab/ball_mesh.hpp"
#include "cmalab/grid.hpp"

namespace cmalab {

struct ConvexSolution {
  ScalarField psi;
  double convexity_margin = 0.0;   // min eigenvalue of D^2 psi over interior nodes
  double boundary_residual = 0.0;  // max |psi| on boundary nodes
  double residual = 0.0;           // max |det D^2 psi - rho| over interior nodes
  double mass = 0.0;               // quadrature of det D^2 psi over the ball
  double rho_mass = 0.0;           // quadrature of rho
  int iterations = 0;
  int damped_steps = 0;            // backtracking halvings spent keeping iterates convex
  int continuation_steps = 0;
};

struct RmaOptions {
  double tol = 1e-11;
  int max_newton = 60;
  int max_halvings = 30;
  int max_refinements = 10;
};

/// Dirichlet problem det D^2 psi = rho, psi = 0 on the boundary of the ball.
/// m = 1 is the linear two-point problem with the 3-point stencil; m = 2 is
/// polar Chebyshev-Fourier collocation with damped Newton and continuation
/// from the mean density.
ConvexSolution solve_rma(const ScalarField& rho, const RmaOptions& options = {});

/// Node-wise det D^2 psi (all nodes; boundary values by the same operators).
std::vector<double> hessian_determinant(const BallMesh& mesh, std::span<const double> psi);
/// Node-wise smallest eigenvalue of D^2 psi.
std::vector<double> hessian_min_eigenvalue(const BallMesh& mesh, std::span<const double> psi);
/// Node-wise Euclidean |grad psi|.
std::vector<double> gradient_norm(const BallMesh& mesh, std::span<const double> psi);

struct AbpReport {
  double observed = 0.0;        // -inf psi
  double mass = 0.0;            // total Monge-Ampere mass
  double bound_printed = 0.0;   // (4 r0 / beta) mass^{1/m}
  double bound_standard = 0.0;  // (4 r0 / beta^{1/m}) mass^{1/m}
  bool satisfies_printed = false;
  bool satisfies_standard = false;
  bool pass = false;            // against the larger of the two
};

/// beta is the volume of the unit ball in R^m.
AbpReport abp_check(const ConvexSolution& sol);

struct GradientReport {
  double observed = 0.0;  // sup over nodes with |x| <= r0 of |grad psi|
  double bound = 0.0;     // 4 / beta
  bool pass = false;
};

GradientReport interior_gradient_check(const ConvexSolution& sol);

}  // namespace cmalab
