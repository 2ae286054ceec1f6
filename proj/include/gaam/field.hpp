#pragma once

#include <complex>
#include <utility>

#include "gaam/grid.hpp"

namespace gaam {

// Divergence-capable velocity field in spectral representation: one complex
// coefficient per retained half-spectrum mode and component.  Hermitian
// symmetry of the underlying real field is implicit in the storage; the only
// self-conjugate mode (k = 0) is kept real-valued.
template <typename Scalar>
struct VectorField {
  GridPtr<Scalar> grid;
  CoefMatrix<Scalar> coef;  // n_modes x dim
  bool divergence_free = false;

  VectorField() = default;
  explicit VectorField(GridPtr<Scalar> g)
      : grid(std::move(g)),
        coef(CoefMatrix<Scalar>::Zero(grid->n_modes(), grid->dim())) {}

  static VectorField zero(GridPtr<Scalar> g) {
    VectorField f(std::move(g));
    f.divergence_free = true;
    return f;
  }

  Eigen::Index n_modes() const { return coef.rows(); }
  int dim() const { return static_cast<int>(coef.cols()); }

  // Zero-mode coefficients of real fields are real.
  void enforce_reality() {
    for (int j = 0; j < dim(); ++j)
      coef(0, j) = std::complex<Scalar>(coef(0, j).real(), Scalar(0));
  }

  bool all_finite() const {
    return coef.real().isFinite().all() && coef.imag().isFinite().all();
  }
};

template <typename Scalar>
void require_same_grid(const VectorField<Scalar>& u, const VectorField<Scalar>& v) {
  if (!u.grid || !v.grid || !u.grid->compatible(*v.grid))
    throw GridMismatch("fields live on incompatible grids");
}

template <typename Scalar>
VectorField<Scalar> operator+(const VectorField<Scalar>& u,
                              const VectorField<Scalar>& v) {
  require_same_grid(u, v);
  VectorField<Scalar> w(u.grid);
  w.coef = u.coef + v.coef;
  w.divergence_free = u.divergence_free && v.divergence_free;
  return w;
}

template <typename Scalar>
VectorField<Scalar> operator-(const VectorField<Scalar>& u,
                              const VectorField<Scalar>& v) {
  require_same_grid(u, v);
  VectorField<Scalar> w(u.grid);
  w.coef = u.coef - v.coef;
  w.divergence_free = u.divergence_free && v.divergence_free;
  return w;
}

template <typename Scalar>
VectorField<Scalar> operator*(Scalar s, const VectorField<Scalar>& u) {
  VectorField<Scalar> w(u.grid);
  w.coef = u.coef * std::complex<Scalar>(s, 0);
  w.divergence_free = u.divergence_free;
  return w;
}

template <typename Scalar>
VectorField<Scalar>& operator+=(VectorField<Scalar>& u, const VectorField<Scalar>& v) {
  require_same_grid(u, v);
  u.coef += v.coef;
  u.divergence_free = u.divergence_free && v.divergence_free;
  return u;
}

// Applies a diagonal Fourier multiplier w(k) to every component.
template <typename Scalar>
VectorField<Scalar> apply_multiplier(const VectorField<Scalar>& u,
                                     const RealArray<Scalar>& w) {
  VectorField<Scalar> out(u.grid);
  const auto wc = w.template cast<std::complex<Scalar>>().eval();
  for (int j = 0; j < u.dim(); ++j) out.coef.col(j) = u.coef.col(j) * wc;
  out.divergence_free = u.divergence_free;
  return out;
}

// Largest |k . u_hat(k)| over retained modes; zero for solenoidal fields.
template <typename Scalar>
Scalar max_divergence(const VectorField<Scalar>& u) {
  const auto& g = *u.grid;
  Scalar worst = 0;
  for (Eigen::Index m = 0; m < u.n_modes(); ++m) {
    std::complex<Scalar> dot(0, 0);
    for (int j = 0; j < u.dim(); ++j)
      dot += g.k_component(m, j) * u.coef(m, j);
    worst = std::max(worst, std::abs(dot));
  }
  return worst;
}

}  // namespace gaam
