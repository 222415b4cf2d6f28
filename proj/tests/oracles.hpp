#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance binary. None of these go through the library's solvers.

#include <functional>
#include <vector>

#include "cmalab/symplectic.hpp"

namespace oracle {

/// Mean-zero u on the N x N unit torus with Laplacian u = rhs - mean(rhs),
/// exact Fourier symbol -|2 pi k|^2.
std::vector<double> spectral_poisson(const std::vector<double>& rhs, int N);

/// Same with the 5-point symbol -4 (sin^2(pi p/N) + sin^2(pi q/N)) N^2.
std::vector<double> five_point_poisson(const std::vector<double>& rhs, int N);

struct KahlerTriple {
  long double b, eps, Lambda;
};

/// b = n/(n+a), eps and Lambda through the log form in extended precision.
KahlerTriple kahler_constants(long double a, long double n, long double gamma, long double A);

/// Radial real Monge-Ampere on the disk of radius R: psi' psi'' / r = rho,
/// psi(R) = 0, by nested Gauss quadrature.
double radial_rma(const std::function<double(double)>& rho, double r, double R);

/// g~^{ik} Gamma~^q_ik from central differences of the metric entries,
/// node-major with m entries per node.
std::vector<double> christoffel_contraction(const cmalab::AlmostComplexData& d);

}  // namespace oracle
