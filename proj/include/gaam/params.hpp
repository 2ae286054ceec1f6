#pragma once

#include <algorithm>
#include <cmath>

#include "gaam/core.hpp"

namespace gaam {

// Parameters of the damped fractional alpha model
//   du/dt + nu (-Lap)^{alpha/2} u + (I - delta^2 Lap)^{-beta/2} P div(u (x) u)
//     = f - gamma u,
// posed on the periodic box [0, box_length]^dim.
template <typename Scalar>
struct ModelParams {
  Scalar alpha = 2;         // dissipation order, > 0
  Scalar beta = 2;          // filter order, >= 0
  Scalar gamma = 1;         // damping (Ekman) coefficient, > 0
  Scalar delta = 1;         // filter length, > 0
  Scalar nu = 1;            // viscosity, > 0
  int dim = 3;              // 2 or 3
  int modes_per_axis = 16;  // even, >= 8
  Scalar box_length = two_pi<Scalar>();

  void validate() const {
    if (!(alpha > 0)) throw ConfigError("model: alpha must be > 0");
    if (!(beta >= 0)) throw ConfigError("model: beta must be >= 0");
    if (!(gamma > 0)) throw ConfigError("model: gamma must be > 0");
    if (!(delta > 0)) throw ConfigError("model: delta must be > 0");
    if (!(nu > 0)) throw ConfigError("model: nu must be > 0");
    if (dim != 2 && dim != 3) throw ConfigError("model: dim must be 2 or 3");
    if (modes_per_axis < 8 || modes_per_axis % 2 != 0)
      throw ConfigError("model: modes_per_axis must be even and >= 8");
    if (!(box_length > 0)) throw ConfigError("model: box_length must be > 0");
  }
};

// a = min(1, delta^beta), b = max(1, delta^beta),
// m_alpha = inf_r (1+r^alpha)/(1+r^2)^{alpha/2}, M_alpha = sup of the same,
// c = m_alpha min(gamma, nu), d = M_alpha max(gamma, nu).
template <typename Scalar>
struct DerivedConstants {
  Scalar a = 1;
  Scalar b = 1;
  Scalar m_alpha = 1;
  Scalar M_alpha = 1;
  Scalar c = 1;
  Scalar d = 1;
};

namespace detail {

// h(r) = (1 + r^alpha) / (1 + r^2)^{alpha/2}; h(0) = h(inf) = 1.
template <typename Scalar>
Scalar symbol_ratio(Scalar r, Scalar alpha) {
  return (Scalar(1) + std::pow(r, alpha)) /
         std::pow(Scalar(1) + r * r, alpha / 2);
}

// Golden-section refinement of an extremum of h on log r, seeded by a coarse
// scan over [1e-6, 1e6]. `sign` = +1 minimizes, -1 maximizes.
template <typename Scalar>
Scalar extremize_symbol_ratio(Scalar alpha, int sign) {
  const auto g = [&](Scalar x) {
    return Scalar(sign) * symbol_ratio(std::exp(x), alpha);
  };
  const Scalar x_lo = std::log(Scalar(1e-6));
  const Scalar x_hi = std::log(Scalar(1e6));
  const int n_scan = 4096;

  int best = 0;
  Scalar best_val = g(x_lo);
  for (int i = 1; i <= n_scan; ++i) {
    const Scalar x = x_lo + (x_hi - x_lo) * Scalar(i) / Scalar(n_scan);
    const Scalar v = g(x);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }

  Scalar lo = x_lo + (x_hi - x_lo) * Scalar(std::max(0, best - 1)) / Scalar(n_scan);
  Scalar hi = x_lo + (x_hi - x_lo) * Scalar(std::min(n_scan, best + 1)) / Scalar(n_scan);
  const Scalar invphi = Scalar(0.6180339887498948482);
  Scalar x1 = hi - invphi * (hi - lo);
  Scalar x2 = lo + invphi * (hi - lo);
  Scalar f1 = g(x1);
  Scalar f2 = g(x2);
  while (hi - lo > Scalar(1e-12)) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = g(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = g(x2);
    }
  }
  const Scalar interior = Scalar(sign) * std::min(f1, f2);
  // r -> 0 and r -> inf both give h = 1 and are always candidates.
  return sign > 0 ? std::min(interior, Scalar(1)) : std::max(interior, Scalar(1));
}

}  // namespace detail

template <typename Scalar>
DerivedConstants<Scalar> derived_constants(const ModelParams<Scalar>& p) {
  p.validate();
  DerivedConstants<Scalar> dc;
  const Scalar db = std::pow(p.delta, p.beta);
  dc.a = std::min(Scalar(1), db);
  dc.b = std::max(Scalar(1), db);
  dc.m_alpha = detail::extremize_symbol_ratio(p.alpha, +1);
  dc.M_alpha = detail::extremize_symbol_ratio(p.alpha, -1);
  dc.c = dc.m_alpha * std::min(p.gamma, p.nu);
  dc.d = dc.M_alpha * std::max(p.gamma, p.nu);
  return dc;
}

// Zero-order symbols m1, m2 relating the filtered operators to (I - Lap)
// powers: J^beta_delta = D(m1) (I-Lap)^{beta/2}, J^alpha_gamma = D(m2)
// (I-Lap)^{alpha/2}.
template <typename Scalar>
Scalar symbol_m1(Scalar xi_sq, const ModelParams<Scalar>& p) {
  return std::pow((1 + p.delta * p.delta * xi_sq) / (1 + xi_sq), p.beta / 2);
}

template <typename Scalar>
Scalar symbol_m2(Scalar xi_sq, const ModelParams<Scalar>& p) {
  return (p.gamma + p.nu * std::pow(xi_sq, p.alpha / 2)) /
         std::pow(1 + xi_sq, p.alpha / 2);
}

}  // namespace gaam
