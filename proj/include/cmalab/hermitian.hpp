#pragma once

#include <complex>
#include <span>
#include <vector>

#include "cmalab/grid.hpp"
#include "cmalab/spectral.hpp"

namespace cmalab {

/// Per-node n x n complex matrices, row-major within a node.
class HermitianField {
 public:
  HermitianField(TorusGrid grid, std::vector<cplx> entries);

  const TorusGrid& grid() const { return grid_; }
  int dim() const { return grid_.complex_dim(); }
  std::size_t nodes() const { return grid_.size(); }
  cplx at(std::size_t node, int j, int k) const { return entries_[(node * dim() + j) * dim() + k]; }
  std::span<const cplx> node(std::size_t i) const {
    return {entries_.data() + i * dim() * dim(), static_cast<std::size_t>(dim() * dim())};
  }
  std::span<const cplx> entries() const { return entries_; }

  /// Adds the identity (flat background) at every node.
  HermitianField plus_identity() const;
  /// max |H_jk - conj(H_kj)| over all nodes.
  double hermitian_defect() const;

 private:
  TorusGrid grid_;
  std::vector<cplx> entries_;
};

/// Per-node eigenvalues, ascending, stored node-major.
struct EigenvalueField {
  int dim = 0;
  std::vector<double> values;

  std::size_t nodes() const { return dim ? values.size() / dim : 0; }
  std::span<const double> node(std::size_t i) const {
    return {values.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

/// Assembles d^2 f / dz_j d zbar_k from the real Hessian packed by pair_index.
HermitianField complex_hessian_from_real(const TorusGrid& grid, const std::vector<std::vector<double>>& real_hessian);

HermitianField complex_hessian(const ScalarField& f, const TorusGrid& grid);
HermitianField complex_hessian(const ScalarField& f, const Spectral& spectral);

/// Throws SymmetryViolation when the field is not Hermitian to `tol`
/// relative to its largest entry.
EigenvalueField relative_eigenvalues(const HermitianField& h, double tol = 1e-10);

}  // namespace cmalab
