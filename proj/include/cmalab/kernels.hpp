#pragma once

#include <complex>
#include <span>
#include <vector>

#include "cmalab/grid.hpp"
#include "cmalab/operator_spec.hpp"

namespace cmalab {

/// Execution policy for node-parallel kernels. Serial is the reference
/// implementation; Parallel distributes nodes over OpenMP threads and must
/// produce bit-identical output.
enum class Exec { Serial, Parallel };

/// Per-node evaluation of f(lambda[I + complex Hessian]) and of the real
/// coefficients of its linearization, sum_{a<=b} coeff_ab d_a d_b.
struct NodeLinearization {
  std::vector<double> value;   // NaN at nodes outside the cone
  std::vector<double> margin;  // cone margin of lambda
  std::vector<double> coeff;   // pair_count(m) per node, only when requested
  std::size_t outside = 0;     // nodes outside the cone
};

/// `real_hessian` holds the second derivatives packed by pair_index, each of
/// length `nodes`.
void linearize_nodes(const OperatorSpec& spec, const std::vector<std::vector<double>>& real_hessian,
                     bool want_coeff, Exec exec, NodeLinearization& out);

/// Ascending eigenvalues of Hermitian n x n blocks (row-major per node).
void eigenvalues_nodes(std::span<const std::complex<double>> entries, int n, Exec exec,
                       std::span<double> out);

/// out[i] = sum_p coeff[i * P + p] * second[p][i].
void contract_nodes(std::span<const double> coeff, const std::vector<std::vector<double>>& second,
                    Exec exec, std::span<double> out);

/// Converts a Hermitian linearization matrix M (acting as tr(M H_c v)) into
/// real coefficients on second derivatives, packed by pair_index.
void hermitian_to_real_coefficients(std::span<const std::complex<double>> M, int n, std::span<double> coeff);

/// Writes I + complex Hessian at `node` into `h` (n x n, row-major).
void relative_endomorphism_at(const std::vector<std::vector<double>>& real_hessian, int n,
                              std::size_t node, std::span<std::complex<double>> h);

/// Divergence-form stiffness: out = sum_{a,b} (D+_a)^T (C_ab D+_b v) with
/// periodic forward differences D+. `coeff` holds pair_count(m) symmetric
/// entries per node packed by pair_index. The result is symmetric positive
/// semidefinite in the plain inner product.
void divergence_form_apply(const TorusGrid& grid, std::span<const double> coeff, std::span<const double> v,
                           Exec exec, std::span<double> out);

}  // namespace cmalab
