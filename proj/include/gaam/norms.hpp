#pragma once

#include "gaam/operators.hpp"
#include "gaam/transform.hpp"

namespace gaam {

enum class SobolevVariant { inhomogeneous, homogeneous, delta_weighted };

namespace detail {

template <typename Scalar>
RealArray<Scalar> sobolev_weight(const SpectralGrid<Scalar>& g, Scalar s,
                                 SobolevVariant variant, Scalar delta) {
  switch (variant) {
    case SobolevVariant::inhomogeneous:
      return (Scalar(1) + g.k_sq()).pow(s);
    case SobolevVariant::delta_weighted:
      return (Scalar(1) + delta * delta * g.k_sq()).pow(s);
    case SobolevVariant::homogeneous: {
      RealArray<Scalar> w(g.n_modes());
      for (Eigen::Index m = 0; m < g.n_modes(); ++m) {
        const Scalar k2 = g.k_sq()(m);
        w(m) = (k2 == Scalar(0)) ? (s == Scalar(0) ? Scalar(1) : Scalar(0))
                                 : std::pow(k2, s);
      }
      return w;
    }
  }
  throw Error("unreachable");
}

}  // namespace detail

// Weighted spectral inner product (u, v)_w = L^dim sum_k w(k) u_hat . conj(v_hat),
// real by Hermitian symmetry.
template <typename Scalar>
Scalar weighted_inner(const VectorField<Scalar>& u, const VectorField<Scalar>& v,
                      const RealArray<Scalar>& w) {
  require_same_grid(u, v);
  const auto& g = *u.grid;
  Scalar acc = 0;
  for (int j = 0; j < u.dim(); ++j)
    acc += (g.multiplicity() * w *
            (u.coef.col(j) * v.coef.col(j).conjugate()).real())
               .sum();
  return g.box_volume() * acc;
}

template <typename Scalar>
Scalar weighted_norm_sq(const VectorField<Scalar>& u, const RealArray<Scalar>& w) {
  const auto& g = *u.grid;
  Scalar acc = 0;
  for (int j = 0; j < u.dim(); ++j)
    acc += (g.multiplicity() * w * u.coef.col(j).abs2()).sum();
  return g.box_volume() * acc;
}

template <typename Scalar>
Scalar l2_inner(const VectorField<Scalar>& u, const VectorField<Scalar>& v) {
  return weighted_inner(u, v, RealArray<Scalar>::Ones(u.grid->n_modes()).eval());
}

template <typename Scalar>
Scalar sobolev_norm_sq(const VectorField<Scalar>& u, Scalar s,
                       SobolevVariant variant = SobolevVariant::inhomogeneous,
                       Scalar delta = 1) {
  return weighted_norm_sq(u, detail::sobolev_weight(*u.grid, s, variant, delta));
}

template <typename Scalar>
Scalar sobolev_norm(const VectorField<Scalar>& u, Scalar s,
                    SobolevVariant variant = SobolevVariant::inhomogeneous,
                    Scalar delta = 1) {
  return std::sqrt(sobolev_norm_sq(u, s, variant, delta));
}

// Inner product of H^{beta/2} with the delta-equivalent weight
// (1 + delta^2 |k|^2)^{beta/2}.
template <typename Scalar>
Scalar delta_inner(const VectorField<Scalar>& u, const VectorField<Scalar>& v,
                   Scalar beta, Scalar delta) {
  return weighted_inner(
      u, v,
      detail::sobolev_weight(*u.grid, beta / 2, SobolevVariant::delta_weighted,
                             delta));
}

// Strong phase-space distance ||u - v||_{H^{beta/2}}.
template <typename Scalar>
Scalar strong_distance(const VectorField<Scalar>& u, const VectorField<Scalar>& v,
                       Scalar beta) {
  return sobolev_norm(u - v, beta / 2);
}

// Weak distance sum_n 2^{-n} |u_n - v_n| / (1 + |u_n - v_n|), with u_n the
// coefficients against the deterministic orthonormal basis of H^{beta/2}
// built from the grid enumeration: real then imaginary part of each
// component at each retained mode, unit-normalized.
template <typename Scalar>
Scalar weak_distance(const VectorField<Scalar>& u, const VectorField<Scalar>& v,
                     Scalar beta) {
  require_same_grid(u, v);
  const auto& g = *u.grid;
  const RealArray<Scalar> w = (Scalar(1) + g.k_sq()).pow(beta / 2);
  Scalar dist = 0;
  Scalar scale = 1;  // 2^{-n}
  for (Eigen::Index m = 0; m < g.n_modes(); ++m) {
    // Basis vector with unit H^{beta/2} norm carries the normalization
    // sqrt(L^dim w mult); the coefficient of u along it is that factor times
    // Re/Im of the stored coefficient.
    const Scalar unit =
        std::sqrt(g.box_volume() * w(m) * g.multiplicity()(m));
    for (int j = 0; j < g.dim(); ++j) {
      const std::complex<Scalar> d = u.coef(m, j) - v.coef(m, j);
      const Scalar dr = std::abs(unit * d.real());
      dist += scale * dr / (1 + dr);
      scale /= 2;
      if (!g.self_conjugate(m)) {
        const Scalar di = std::abs(unit * d.imag());
        dist += scale * di / (1 + di);
        scale /= 2;
      }
      if (scale == 0) return dist;
    }
  }
  return dist;
}

// ||grad (x) u||_{L^p} by collocation-grid quadrature with cell weight
// (L/N)^dim; |grad u| is the pointwise Frobenius norm.  Exact for p = 2.
template <typename Scalar>
Scalar lp_gradient_norm(const VectorField<Scalar>& u, Scalar p = Scalar(2.5)) {
  if (p < 1) throw Error("lp_gradient_norm: p must be >= 1");
  const auto& g = *u.grid;
  RealArray<Scalar> frob_sq = RealArray<Scalar>::Zero(g.n_points());
  ComplexArray<Scalar> dcoef(g.n_modes());
  const std::complex<Scalar> I(0, 1);
  for (int i = 0; i < u.dim(); ++i)
    for (int j = 0; j < u.dim(); ++j) {
      for (Eigen::Index m = 0; m < g.n_modes(); ++m)
        dcoef(m) = I * g.k_component(m, j) * u.coef(m, i);
      const RealArray<Scalar> dphys = to_physical<Scalar>(g, dcoef);
      frob_sq += dphys.square();
    }
  const Scalar integral = (frob_sq.pow(p / 2)).sum() * g.cell_volume();
  return std::pow(integral, Scalar(1) / p);
}

}  // namespace gaam
