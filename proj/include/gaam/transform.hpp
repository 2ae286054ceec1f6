#pragma once

#include <map>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "gaam/field.hpp"

namespace gaam {
namespace detail {

// Per-thread FFT plan cache keyed by line length; plans are reused across
// calls so spectral operators stay pure and thread-safe.
template <typename Scalar>
Eigen::FFT<Scalar>& fft_plan(int n) {
  thread_local std::map<int, Eigen::FFT<Scalar>> plans;
  return plans[n];
}

// In-place complex DFT along every axis of a flattened dim-cube (x fastest).
// `inverse` applies the unnormalized e^{+i} transform (scaling handled by the
// callers).
template <typename Scalar>
void fft_all_axes(ComplexArray<Scalar>& data, int n, int dim, bool inverse) {
  using C = std::complex<Scalar>;
  auto& fft = fft_plan<Scalar>(n);
  std::vector<C> line(n), out(n);
  const std::int64_t total = data.size();
  std::int64_t stride = 1;
  for (int ax = 0; ax < dim; ++ax) {
    const std::int64_t block = stride * n;
    for (std::int64_t base = 0; base < total; base += block) {
      for (std::int64_t off = 0; off < stride; ++off) {
        C* p = data.data() + base + off;
        for (int i = 0; i < n; ++i) line[i] = p[std::int64_t(i) * stride];
        if (inverse)
          fft.inv(out.data(), line.data(), n);
        else
          fft.fwd(out.data(), line.data(), n);
        for (int i = 0; i < n; ++i) p[std::int64_t(i) * stride] = out[i];
      }
    }
    stride *= n;
  }
  if (inverse) data *= C(std::pow(Scalar(n), Scalar(dim)), 0);
}

}  // namespace detail

// Physical-space samples of one spectral component on the collocation grid.
template <typename Scalar>
RealArray<Scalar> to_physical(const SpectralGrid<Scalar>& g,
                              const Eigen::Ref<const ComplexArray<Scalar>>& coef) {
  using C = std::complex<Scalar>;
  ComplexArray<Scalar> full = ComplexArray<Scalar>::Zero(g.n_points());
  for (Eigen::Index m = 0; m < g.n_modes(); ++m) {
    const C c = coef(m);
    full(g.flat_plus(m)) = c;
    if (!g.self_conjugate(m)) full(g.flat_minus(m)) = std::conj(c);
  }
  detail::fft_all_axes(full, g.modes_per_axis(), g.dim(), /*inverse=*/true);
  return full.real();
}

// Retained-mode coefficients of physical samples; modes outside the dealias
// mask are discarded, which makes quadratic products exact on retained modes.
template <typename Scalar>
ComplexArray<Scalar> from_physical(const SpectralGrid<Scalar>& g,
                                   const RealArray<Scalar>& phys) {
  ComplexArray<Scalar> full = phys.template cast<std::complex<Scalar>>();
  detail::fft_all_axes(full, g.modes_per_axis(), g.dim(), /*inverse=*/false);
  const Scalar scale = Scalar(1) / Scalar(g.n_points());
  ComplexArray<Scalar> coef(g.n_modes());
  for (Eigen::Index m = 0; m < g.n_modes(); ++m)
    coef(m) = full(g.flat_plus(m)) * scale;
  coef(0).imag(Scalar(0));
  return coef;
}

// All components at once, as an n_points x dim array.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> to_physical_all(
    const VectorField<Scalar>& u) {
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> phys(u.grid->n_points(),
                                                            u.dim());
  for (int j = 0; j < u.dim(); ++j)
    phys.col(j) = to_physical<Scalar>(*u.grid, u.coef.col(j));
  return phys;
}

}  // namespace gaam
