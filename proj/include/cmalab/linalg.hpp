#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cmalab {

using LinearMap = std::function<void(std::span<const double> in, std::span<double> out)>;

struct KrylovResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Restarted GMRES with right preconditioning. `x` holds the initial guess
/// on entry and the solution on exit.
KrylovResult gmres(const LinearMap& apply, const LinearMap& precondition, std::span<const double> rhs,
                   std::span<double> x, double tol, int restart = 60, int max_iterations = 600);

/// Preconditioned conjugate gradients for a symmetric positive
/// semidefinite operator; rhs must lie in its range.
KrylovResult pcg(const LinearMap& apply, const LinearMap& precondition, std::span<const double> rhs,
                 std::span<double> x, double tol, int max_iterations = 5000);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs(std::span<const double> a);

}  // namespace cmalab
