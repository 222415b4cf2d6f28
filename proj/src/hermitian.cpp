#include "cmalab/hermitian.hpp"

#include <algorithm>
#include <cmath>

#include "cmalab/kernels.hpp"

namespace cmalab {

HermitianField::HermitianField(TorusGrid grid, std::vector<cplx> entries)
    : grid_(grid), entries_(std::move(entries)) {
  require(entries_.size() == grid_.size() * dim() * dim(), ErrorKind::Argument,
          "Hermitian field size does not match grid");
}

HermitianField HermitianField::plus_identity() const {
  auto e = entries_;
  const int n = dim();
  for (std::size_t i = 0; i < nodes(); ++i)
    for (int j = 0; j < n; ++j) e[(i * n + j) * n + j] += 1.0;
  return {grid_, std::move(e)};
}

double HermitianField::hermitian_defect() const {
  const int n = dim();
  double worst = 0.0;
  for (std::size_t i = 0; i < nodes(); ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) worst = std::max(worst, std::abs(at(i, j, k) - std::conj(at(i, k, j))));
  return worst;
}

HermitianField complex_hessian_from_real(const TorusGrid& grid, const std::vector<std::vector<double>>& hess) {
  const int n = grid.complex_dim();
  std::vector<cplx> e(grid.size() * n * n);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::span<cplx> block{e.data() + i * n * n, static_cast<std::size_t>(n * n)};
    relative_endomorphism_at(hess, n, i, block);
    for (int j = 0; j < n; ++j) block[j * n + j] -= 1.0;
  }
  return {grid, std::move(e)};
}

HermitianField complex_hessian(const ScalarField& f, const Spectral& spectral) {
  const TorusGrid& grid = f.torus();
  require(grid == spectral.grid(), ErrorKind::DomainMismatch, "field grid differs from spectral grid");
  return complex_hessian_from_real(grid, spectral.hessian(f.values()));
}

HermitianField complex_hessian(const ScalarField& f, const TorusGrid& grid) {
  require(f.torus() == grid, ErrorKind::DomainMismatch, "field grid differs from requested grid");
  Spectral spectral(grid);
  return complex_hessian(f, spectral);
}

EigenvalueField relative_eigenvalues(const HermitianField& h, double tol) {
  double scale = 1.0;
  for (const auto& z : h.entries()) scale = std::max(scale, std::abs(z));
  const double defect = h.hermitian_defect();
  if (defect > tol * scale)
    throw Error(ErrorKind::SymmetryViolation,
                "matrix field is not Hermitian (defect " + std::to_string(defect) + ")");
  EigenvalueField out;
  out.dim = h.dim();
  out.values.resize(h.nodes() * h.dim());
  eigenvalues_nodes(h.entries(), h.dim(), Exec::Parallel, out.values);
  return out;
}

}  // namespace cmalab
