#pragma once

#include "gaam/field.hpp"

namespace gaam {

enum class FilterDirection { forward, inverse };
enum class ApplyMode { apply, invert };

// Multiplier arrays over the retained modes.  All operators below are
// diagonal in Fourier space and therefore commute pairwise.

template <typename Scalar>
RealArray<Scalar> fractional_laplacian_symbol(const SpectralGrid<Scalar>& g,
                                              Scalar order) {
  RealArray<Scalar> w(g.n_modes());
  for (Eigen::Index m = 0; m < g.n_modes(); ++m) {
    const Scalar k2 = g.k_sq()(m);
    w(m) = (k2 == Scalar(0)) ? Scalar(0) : std::pow(k2, order / 2);
  }
  return w;
}

// (-Lap)^{order/2}: coefficient at mode k is multiplied by |k|^order; the
// zero mode is annihilated.
template <typename Scalar>
VectorField<Scalar> fractional_laplacian(const VectorField<Scalar>& u, Scalar order) {
  if (order < 0) throw Error("fractional_laplacian: order must be >= 0");
  return apply_multiplier(u, fractional_laplacian_symbol(*u.grid, order));
}

template <typename Scalar>
RealArray<Scalar> bessel_symbol(const SpectralGrid<Scalar>& g, Scalar beta,
                                Scalar delta, FilterDirection dir) {
  const Scalar e = (dir == FilterDirection::forward) ? beta / 2 : -beta / 2;
  return (Scalar(1) + delta * delta * g.k_sq()).pow(e);
}

// Bessel filter (I - delta^2 Lap)^{+-beta/2}; forward and inverse symbols are
// exact reciprocals.
template <typename Scalar>
VectorField<Scalar> bessel_filter(const VectorField<Scalar>& u, Scalar beta,
                                  Scalar delta, FilterDirection dir) {
  if (beta < 0) throw Error("bessel_filter: beta must be >= 0");
  if (!(delta > 0)) throw Error("bessel_filter: delta must be > 0");
  return apply_multiplier(u, bessel_symbol(*u.grid, beta, delta, dir));
}

// Leray projection onto divergence-free fields,
// u_hat(k) <- u_hat(k) - k (k . u_hat(k)) / |k|^2; the k = 0 mode is kept.
template <typename Scalar>
VectorField<Scalar> leray_project(const VectorField<Scalar>& u) {
  const auto& g = *u.grid;
  VectorField<Scalar> out(u.grid);
  out.coef = u.coef;
  for (Eigen::Index m = 1; m < u.n_modes(); ++m) {
    const Scalar k2 = g.k_sq()(m);
    std::complex<Scalar> dot(0, 0);
    for (int j = 0; j < u.dim(); ++j) dot += g.k_component(m, j) * out.coef(m, j);
    dot /= k2;
    for (int j = 0; j < u.dim(); ++j) out.coef(m, j) -= g.k_component(m, j) * dot;
  }
  out.divergence_free = true;
  return out;
}

template <typename Scalar>
RealArray<Scalar> damped_diffusion_symbol(const SpectralGrid<Scalar>& g,
                                          const ModelParams<Scalar>& p,
                                          ApplyMode mode) {
  RealArray<Scalar> w(g.n_modes());
  for (Eigen::Index m = 0; m < g.n_modes(); ++m) {
    const Scalar k2 = g.k_sq()(m);
    const Scalar lam =
        p.gamma + (k2 == Scalar(0) ? Scalar(0) : p.nu * std::pow(k2, p.alpha / 2));
    w(m) = (mode == ApplyMode::apply) ? lam : Scalar(1) / lam;
  }
  return w;
}

// J^alpha_gamma = gamma I + nu (-Lap)^{alpha/2}, or its inverse; the damping
// keeps the operator invertible at the zero mode.
template <typename Scalar>
VectorField<Scalar> damped_diffusion_apply(const VectorField<Scalar>& u,
                                           const ModelParams<Scalar>& p,
                                           ApplyMode mode) {
  return apply_multiplier(u, damped_diffusion_symbol(*u.grid, p, mode));
}

template <typename Scalar>
RealArray<Scalar> heat_symbol(const SpectralGrid<Scalar>& g,
                              const ModelParams<Scalar>& p, Scalar t) {
  return (-t * damped_diffusion_symbol(g, p, ApplyMode::apply)).exp();
}

// Semigroup e^{-t J^alpha_gamma} with symbol e^{-t(gamma + nu |k|^alpha)}.
template <typename Scalar>
VectorField<Scalar> heat_semigroup(const VectorField<Scalar>& u,
                                   const ModelParams<Scalar>& p, Scalar t) {
  if (t < 0) throw Error("heat_semigroup: t must be >= 0");
  return apply_multiplier(u, heat_symbol(*u.grid, p, t));
}

template <typename Scalar>
RealArray<Scalar> mollifier_symbol(const SpectralGrid<Scalar>& g, Scalar epsilon) {
  return (-(epsilon * epsilon / 2) * g.k_sq()).exp();
}

// Gaussian spectral mollifier e^{-eps^2 |k|^2 / 2}; epsilon = 0 is the
// identity.
template <typename Scalar>
VectorField<Scalar> mollify(const VectorField<Scalar>& u, Scalar epsilon) {
  if (epsilon < 0) throw Error("mollify: epsilon must be >= 0");
  if (epsilon == 0) return u;
  return apply_multiplier(u, mollifier_symbol(*u.grid, epsilon));
}

}  // namespace gaam
