#pragma once

#include <functional>

#include "gaam/norms.hpp"

namespace gaam {

namespace detail {

// Filtered divergence of a symmetric tensor given by its physical-space
// entries q_ij (i <= j): returns J^{-beta}_delta P [ M_eps div q ].
template <typename Scalar>
VectorField<Scalar> filtered_tensor_divergence(
    const GridPtr<Scalar>& grid,
    const std::vector<RealArray<Scalar>>& q_upper,  // packed (i,j), i <= j
    const ModelParams<Scalar>& p, Scalar epsilon) {
  const auto& g = *grid;
  const int d = g.dim();
  std::vector<ComplexArray<Scalar>> qhat;
  qhat.reserve(q_upper.size());
  for (const auto& q : q_upper) qhat.push_back(from_physical(g, q));

  const auto packed = [d](int i, int j) {
    if (i > j) std::swap(i, j);
    // Upper-triangular packing: (0,0),(0,1),..,(0,d-1),(1,1),..
    return i * d - i * (i - 1) / 2 + (j - i);
  };

  VectorField<Scalar> div(grid);
  const std::complex<Scalar> I(0, 1);
  for (Eigen::Index m = 0; m < g.n_modes(); ++m)
    for (int i = 0; i < d; ++i) {
      std::complex<Scalar> acc(0, 0);
      for (int j = 0; j < d; ++j)
        acc += g.k_component(m, j) * qhat[packed(i, j)](m);
      div.coef(m, i) = I * acc;
    }
  div.enforce_reality();
  if (epsilon > 0) div = mollify(div, epsilon);
  return bessel_filter(leray_project(div), p.beta, p.delta,
                       FilterDirection::inverse);
}

}  // namespace detail

// The transport term of the model: J^{-beta}_delta P div(u (x) u), evaluated
// pseudo-spectrally on the dealiased grid.  With epsilon > 0 the mollified
// variant J^{-beta}_delta P [theta_eps * div((theta_eps*u) (x) (theta_eps*u))]
// is produced, with the Gaussian spectral mollifier standing in for theta.
template <typename Scalar>
VectorField<Scalar> nonlinear_term(const VectorField<Scalar>& u,
                                   const ModelParams<Scalar>& p,
                                   Scalar epsilon = 0) {
  if (!u.divergence_free)
    throw Error("nonlinear_term: field is not flagged divergence-free");
  const auto phys = to_physical_all(epsilon > 0 ? mollify(u, epsilon) : u);
  const int d = u.dim();
  std::vector<RealArray<Scalar>> q;
  q.reserve(d * (d + 1) / 2);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      q.push_back((phys.col(i) * phys.col(j)).eval());
  return detail::filtered_tensor_divergence(u.grid, q, p, epsilon);
}

// Symmetrized bilinear transport J^{-beta}_delta P [(w . grad) u + (u . grad) w]
// = J^{-beta}_delta P div(u (x) w + w (x) u) for divergence-free u, w.  This is
// both the directional derivative of the nonlinear term and the transport part
// of the linearized generator.
template <typename Scalar>
VectorField<Scalar> transport_sym(const VectorField<Scalar>& u,
                                  const VectorField<Scalar>& w,
                                  const ModelParams<Scalar>& p,
                                  Scalar epsilon = 0) {
  require_same_grid(u, w);
  const auto pu = to_physical_all(epsilon > 0 ? mollify(u, epsilon) : u);
  const auto pw = to_physical_all(epsilon > 0 ? mollify(w, epsilon) : w);
  const int d = u.dim();
  std::vector<RealArray<Scalar>> q;
  q.reserve(d * (d + 1) / 2);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      q.push_back((pu.col(i) * pw.col(j) + pw.col(i) * pu.col(j)).eval());
  return detail::filtered_tensor_divergence(u.grid, q, p, epsilon);
}

using AmplitudeSpectrum = std::function<double(double)>;

inline double default_amplitude_spectrum(double k_sq) {
  return 1.0 / ((1.0 + k_sq) * (1.0 + k_sq));
}

// Reproducible random divergence-free field: independent complex Gaussian
// coefficients shaped by `spectrum(|k|^2)`, then Leray-projected.  The mean
// mode is left empty: constants are not finite-energy objects on the whole
// space this grid stands in for, and a seeded mean would cap the collapse
// rate of trajectory pairs at exactly gamma.
template <typename Scalar>
VectorField<Scalar> random_divfree_field(
    const GridPtr<Scalar>& grid, std::uint64_t seed, Scalar amplitude = 1,
    const AmplitudeSpectrum& spectrum = default_amplitude_spectrum) {
  const auto& g = *grid;
  VectorField<Scalar> u(grid);
  Rng rng(seed);
  for (Eigen::Index m = 1; m < g.n_modes(); ++m) {
    const Scalar mag = amplitude * Scalar(spectrum(double(g.k_sq()(m))));
    for (int j = 0; j < g.dim(); ++j)
      u.coef(m, j) =
          mag * std::complex<Scalar>(Scalar(rng.normal()), Scalar(rng.normal()));
  }
  u = leray_project(u);
  u.enforce_reality();
  return u;
}

}  // namespace gaam
