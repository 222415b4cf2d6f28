#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "cmalab/grid.hpp"

namespace cmalab {

using cplx = std::complex<double>;

/// Number of unordered axis pairs (a <= b) for real dimension m.
inline int pair_count(int m) { return m * (m + 1) / 2; }
/// Canonical position of the pair (a, b), a <= b, in a packed list.
int pair_index(int m, int a, int b);

/// FFT-backed differentiation on a periodic torus grid.
///
/// Symbol conventions: first derivative i*2*pi*kappa with the Nyquist mode
/// mapped to zero; pure second derivative -(2*pi*kappa)^2 including Nyquist;
/// mixed second derivative is the product of first-derivative symbols. All
/// operators are exact on band-limited data below the Nyquist mode.
///
/// Instances own FFTW buffers and are not safe to share between threads.
class Spectral {
 public:
  explicit Spectral(const TorusGrid& grid);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;
  Spectral(Spectral&&) noexcept;
  Spectral& operator=(Spectral&&) noexcept;

  const TorusGrid& grid() const;
  std::size_t spectral_size() const;

  void forward(std::span<const double> in, std::vector<cplx>& out) const;
  /// Normalized inverse transform of a half-spectrum.
  void inverse(std::span<const cplx> in, std::span<double> out) const;

  /// Signed integer wavenumber of spectral index `s` along `axis`.
  int kappa(std::size_t s, int axis) const;
  bool is_nyquist(std::size_t s, int axis) const;
  cplx first_symbol(std::size_t s, int axis) const;
  double second_symbol(std::size_t s, int a, int b) const;

  std::vector<double> first_derivative(std::span<const double> v, int axis) const;
  std::vector<double> second_derivative(std::span<const double> v, int a, int b) const;
  /// All second derivatives, packed by pair_index.
  std::vector<std::vector<double>> hessian(std::span<const double> v) const;
  /// Flat Laplacian sum_a d^2/dx_a^2.
  std::vector<double> laplacian(std::span<const double> v) const;

  /// Solves sum_{a<=b} coeff[pair] d_a d_b u = rhs - mean(rhs) for the
  /// mean-zero u. The quadratic form of `coeff` must be definite.
  std::vector<double> solve_constant_coefficient(std::span<const double> rhs,
                                                 std::span<const double> coeff) const;

  /// Trigonometric interpolation of nodal values at arbitrary points.
  std::vector<double> interpolate(std::span<const double> v, std::span<const Point> points) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cmalab
