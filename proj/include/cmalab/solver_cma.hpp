#pragma once

#include <vector>

#include "cmalab/grid.hpp"
#include "cmalab/kernels.hpp"
#include "cmalab/operator_spec.hpp"

namespace cmalab {

struct SolveReport {
  int iterations = 0;               // Newton steps over all continuation stages
  double final_residual = 0.0;      // max |f(lambda) - c k|
  double positivity_margin = 0.0;   // min cone margin over nodes
  int continuation_steps = 0;       // stages actually solved
  int linear_iterations = 0;        // total Krylov iterations
  double rescale = 1.0;             // c in f = c k (solvability constant)
  bool rescaled = false;            // |c - 1| > 1e-12
  int step_halvings = 0;
};

/// Carries the partial report of a failed solve.
class SolveError : public Error {
 public:
  SolveError(ErrorKind kind, const std::string& what, SolveReport report)
      : Error(kind, what), report_(report) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

struct SolverOptions {
  double tol = 1e-10;
  double linear_tol = 1e-12;
  std::vector<double> continuation{0.25, 0.5, 0.75, 1.0};
  int max_newton = 40;
  int max_halvings = 20;
  int max_refinements = 8;
  Exec exec = Exec::Parallel;
};

/// k = c_omega exp(F_omega) with mean exp(n F_omega) = 1 over the torus.
struct DensitySpec {
  ScalarField raw;
  ScalarField normalized;
  double c_omega = 1.0;
};

DensitySpec normalize_density(const ScalarField& raw, int n);

struct CmaSolution {
  ScalarField phi;          // max node value 0
  ScalarField k_effective;  // c k, the density the solution actually satisfies
  SolveReport report;
};

/// Damped Newton with density continuation for f(lambda[I + Hc phi]) = c k.
/// The constant c is the unique solvability rescale and is reported.
CmaSolution solve_cma(const TorusGrid& grid, const OperatorSpec& spec, const ScalarField& k,
                      const SolverOptions& options = {});

struct AuxiliarySolution {
  ScalarField psi;
  double A = 1.0;
  SolveReport report;
};

/// Monge-Ampere solve of (I + Hc psi)^n = (w / A) k^n with A = mean(w k^n).
AuxiliarySolution solve_auxiliary(const TorusGrid& grid, const ScalarField& w, const ScalarField& k,
                                  const SolverOptions& options = {});

/// Node-wise det(I + Hc phi) computed spectrally.
std::vector<double> monge_ampere_density(const ScalarField& phi);

}  // namespace cmalab
