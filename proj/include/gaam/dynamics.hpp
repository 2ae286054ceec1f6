#pragma once

#include <type_traits>
#include <vector>

#include "gaam/nonlinear.hpp"

namespace gaam {

template <typename Scalar>
struct SimulationConfig {
  Scalar dt = Scalar(0.01);
  Scalar t_end = 1;
  int record_stride = 1;
  Scalar mollifier_epsilon = 0;  // 0 = un-mollified model
  bool nonlinearity_enabled = true;
  // Skips the L^{5/2} gradient column when a run is sampled densely and the
  // column is not needed; everything else in the record is unaffected.
  bool record_gradients = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(dt > 0)) throw ConfigError("sim: dt must be > 0");
    if (!(t_end > 0)) throw ConfigError("sim: t_end must be > 0");
    if (!(dt < t_end)) throw ConfigError("sim: dt must be < t_end");
    if (record_stride < 1) throw ConfigError("sim: record_stride must be >= 1");
    if (mollifier_epsilon < 0)
      throw ConfigError("sim: mollifier_epsilon must be >= 0");
  }

  long n_steps() const {
    const long n = std::lround(double(t_end / dt));
    return n > 0 ? n : 1;
  }
};

// Per-sample time series of the norms and balance residuals tracked along a
// run, plus the final state.
template <typename Scalar>
struct TrajectoryRecord {
  std::vector<Scalar> times;
  std::vector<Scalar> l2_sq;
  std::vector<Scalar> h_beta_sq;        // ||u||^2_{H^{beta/2}}
  std::vector<Scalar> h_beta_delta_sq;  // ||u||^2_{H^{beta/2}_delta}
  std::vector<Scalar> h_alphabeta_sq;   // ||u||^2_{H^{(alpha+beta)/2}}
  std::vector<Scalar> energy_residual;  // residual of the step ending here
  std::vector<Scalar> grad_l52;         // ||grad (x) u||_{L^{5/2}}
  // Present only when a reference field was supplied.
  std::vector<Scalar> dist_strong;
  std::vector<Scalar> dist_weak;
  std::vector<Scalar> dist_delta_sq;  // ||J^{beta/2}_delta (u - ref)||^2_{L^2}
  Scalar max_energy_residual = 0;
  Scalar max_energy_flux = 0;  // max |G| along the run, the residual's scale
  bool has_reference = false;
  VectorField<Scalar> final_state;

  std::size_t size() const { return times.size(); }
};

// States at every step, kept so tangent runs can replay the frozen
// trajectory at step resolution.  The forcing is stored too: the tangent
// step linearizes around the same stage values the nonlinear update used.
template <typename Scalar>
struct StateHistory {
  Scalar dt = 0;
  std::vector<VectorField<Scalar>> states;  // states[n] at t = n dt
  VectorField<Scalar> forcing;
};

namespace detail {

inline double phi1(double z) {
  if (z == 0.0) return 1.0;
  return std::expm1(z) / z;
}

inline double phi2(double z) {
  if (std::abs(z) < 0.1) {
    // Taylor series; |z| < 0.1 keeps the truncation below 1e-16.
    double term = 0.5, acc = 0.5;
    for (int n = 1; n <= 9; ++n) {
      term *= z / double(n + 2);
      acc += term;
    }
    return acc;
  }
  return (std::expm1(z) - z) / (z * z);
}

}  // namespace detail

// Exponential-time-differencing RK2 integrator for
//   du/dt = -(gamma + nu |k|^alpha) u + N(u),  N(u) = f - J^{-beta} P div(u(x)u).
// The linear factor is the exact semigroup, so runs with the nonlinearity
// disabled reproduce the closed-form decay to round-off, and exact stationary
// points are fixed points of the discrete map.
template <typename Scalar>
class Etdrk2 {
 public:
  Etdrk2(const ModelParams<Scalar>& params, const SimulationConfig<Scalar>& cfg,
         VectorField<Scalar> forcing)
      : params_(params), cfg_(cfg), f_(std::move(forcing)) {
    params_.validate();
    cfg_.validate();
    grid_ = f_.grid;
    const auto lam = damped_diffusion_symbol(*grid_, params_, ApplyMode::apply);
    const Eigen::Index m = grid_->n_modes();
    semigroup_.resize(m);
    dt_phi1_.resize(m);
    dt_phi2_.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double z = -double(cfg_.dt) * double(lam(i));
      semigroup_(i) = Scalar(std::exp(z));
      dt_phi1_(i) = cfg_.dt * Scalar(detail::phi1(z));
      dt_phi2_(i) = cfg_.dt * Scalar(detail::phi2(z));
    }
    w_delta_ = detail::sobolev_weight(*grid_, params_.beta / 2,
                                      SobolevVariant::delta_weighted,
                                      params_.delta);
    w_delta_alpha_ =
        (w_delta_ * fractional_laplacian_symbol(*grid_, params_.alpha)).eval();
  }

  const ModelParams<Scalar>& params() const { return params_; }
  const SimulationConfig<Scalar>& config() const { return cfg_; }
  const VectorField<Scalar>& forcing() const { return f_; }

  VectorField<Scalar> nonlinear_rhs(const VectorField<Scalar>& u) const {
    if (!cfg_.nonlinearity_enabled) return f_;
    return f_ - nonlinear_term(u, params_, cfg_.mollifier_epsilon);
  }

  VectorField<Scalar> nonlinear_rhs_derivative(const VectorField<Scalar>& u,
                                               const VectorField<Scalar>& v) const {
    if (!cfg_.nonlinearity_enabled) return VectorField<Scalar>::zero(v.grid);
    return Scalar(-1) * transport_sym(u, v, params_, cfg_.mollifier_epsilon);
  }

  VectorField<Scalar> step(const VectorField<Scalar>& u) const {
    const VectorField<Scalar> nu0 = nonlinear_rhs(u);
    const VectorField<Scalar> a = stage(u, nu0);
    const VectorField<Scalar> nua = nonlinear_rhs(a);
    VectorField<Scalar> out = a + apply_multiplier(nua - nu0, dt_phi2_);
    out.enforce_reality();
    out.divergence_free = u.divergence_free;
    return out;
  }

  // Exact directional derivative of the discrete step map at u, so the
  // Taylor remainder of the flow map is quadratic down to round-off.
  VectorField<Scalar> tangent_step(const VectorField<Scalar>& u,
                                   const VectorField<Scalar>& v) const {
    const VectorField<Scalar> nu0 = nonlinear_rhs(u);
    const VectorField<Scalar> a = stage(u, nu0);
    const VectorField<Scalar> dv0 = nonlinear_rhs_derivative(u, v);
    const VectorField<Scalar> va = stage(v, dv0);
    const VectorField<Scalar> dva = nonlinear_rhs_derivative(a, va);
    VectorField<Scalar> out = va + apply_multiplier(dva - dv0, dt_phi2_);
    out.enforce_reality();
    out.divergence_free = v.divergence_free;
    return out;
  }

  // Energy functional E = 1/2 ||J^{beta/2}_delta u||^2_{L^2} and the balance
  // flux G = nu ||(-Lap)^{alpha/4} J^{beta/2}_delta u||^2 + gamma
  // ||J^{beta/2}_delta u||^2 - (J^{beta/2}_delta f, J^{beta/2}_delta u); along
  // the truncated dynamics dE/dt + G = 0 holds up to time-discretization
  // error.
  Scalar energy(const VectorField<Scalar>& u) const {
    return weighted_norm_sq(u, w_delta_) / 2;
  }

  Scalar energy_flux(const VectorField<Scalar>& u) const {
    return params_.nu * weighted_norm_sq(u, w_delta_alpha_) +
           params_.gamma * weighted_norm_sq(u, w_delta_) -
           weighted_inner(f_, u, w_delta_);
  }

 private:
  VectorField<Scalar> stage(const VectorField<Scalar>& u,
                            const VectorField<Scalar>& rhs) const {
    return apply_multiplier(u, semigroup_) + apply_multiplier(rhs, dt_phi1_);
  }

  ModelParams<Scalar> params_;
  SimulationConfig<Scalar> cfg_;
  VectorField<Scalar> f_;
  GridPtr<Scalar> grid_;
  RealArray<Scalar> semigroup_;
  RealArray<Scalar> dt_phi1_;
  RealArray<Scalar> dt_phi2_;
  RealArray<Scalar> w_delta_;
  RealArray<Scalar> w_delta_alpha_;
};

// One integrator step; convenience wrapper over a throwaway Etdrk2.
template <typename Scalar>
VectorField<Scalar> step(const VectorField<Scalar>& state,
                         const VectorField<Scalar>& f,
                         const ModelParams<Scalar>& params, Scalar dt,
                         SimulationConfig<Scalar> cfg) {
  cfg.dt = dt;
  if (!(cfg.t_end > dt)) cfg.t_end = 2 * dt;
  Etdrk2<Scalar> integ(params, cfg, f);
  VectorField<Scalar> out = integ.step(state);
  if (!out.all_finite()) throw BlowUp("step produced non-finite coefficients");
  return out;
}

namespace detail {

template <typename Scalar>
void record_sample(TrajectoryRecord<Scalar>& rec, const Etdrk2<Scalar>& integ,
                   const VectorField<Scalar>& u, Scalar t, Scalar residual,
                   const VectorField<Scalar>* reference) {
  const auto& p = integ.params();
  rec.times.push_back(t);
  rec.l2_sq.push_back(sobolev_norm_sq(u, Scalar(0)));
  rec.h_beta_sq.push_back(sobolev_norm_sq(u, p.beta / 2));
  rec.h_beta_delta_sq.push_back(
      sobolev_norm_sq(u, p.beta / 2, SobolevVariant::delta_weighted, p.delta));
  rec.h_alphabeta_sq.push_back(sobolev_norm_sq(u, (p.alpha + p.beta) / 2));
  rec.energy_residual.push_back(residual);
  rec.grad_l52.push_back(
      integ.config().record_gradients ? lp_gradient_norm(u, Scalar(2.5)) : Scalar(0));
  if (reference) {
    rec.dist_strong.push_back(strong_distance(u, *reference, p.beta));
    rec.dist_weak.push_back(weak_distance(u, *reference, p.beta));
    rec.dist_delta_sq.push_back(sobolev_norm_sq(
        u - *reference, p.beta / 2, SobolevVariant::delta_weighted, p.delta));
  }
}

}  // namespace detail

// Advances u0 to t_end, recording diagnostics every record_stride steps (the
// initial and final states are always recorded).  Aborts with BlowUp when the
// H^{beta/2} norm leaves 10^3 x the absorbing radius; the truncated dynamics
// is globally well-posed, so tripping the guard flags a numerical fault.
template <typename Scalar>
TrajectoryRecord<Scalar> simulate(const VectorField<Scalar>& u0,
                                  const VectorField<Scalar>& f,
                                  const ModelParams<Scalar>& params,
                                  const SimulationConfig<Scalar>& cfg,
                                  std::type_identity_t<const VectorField<Scalar>*> reference = nullptr,
                                  std::type_identity_t<StateHistory<Scalar>*> history = nullptr) {
  require_same_grid(u0, f);
  if (!u0.divergence_free)
    throw Error("simulate: initial state is not flagged divergence-free");
  if (!f.divergence_free)
    throw Error("simulate: forcing is not flagged divergence-free");
  Etdrk2<Scalar> integ(params, cfg, f);

  const auto dc = derived_constants(params);
  const Scalar f_norm_sq = sobolev_norm_sq(f, params.beta / 2);
  const Scalar radius_sq = 2 * dc.b * dc.b / (dc.a * dc.a * params.gamma * params.gamma) * f_norm_sq;
  const Scalar guard =
      Scalar(1e3) * std::max(std::sqrt(radius_sq),
                             std::sqrt(sobolev_norm_sq(u0, params.beta / 2)));

  TrajectoryRecord<Scalar> rec;
  rec.has_reference = reference != nullptr;
  VectorField<Scalar> u = u0;
  if (history) {
    history->dt = cfg.dt;
    history->states.clear();
    history->states.push_back(u);
    history->forcing = f;
  }
  detail::record_sample(rec, integ, u, Scalar(0), Scalar(0), reference);

  const long n_steps = cfg.n_steps();
  Scalar e_prev = integ.energy(u);
  Scalar g_prev = integ.energy_flux(u);
  for (long n = 1; n <= n_steps; ++n) {
    u = integ.step(u);
    const Scalar t = Scalar(n) * cfg.dt;
    if (!u.all_finite())
      throw BlowUp("simulate: non-finite coefficients at t = " + std::to_string(double(t)));
    const Scalar e_cur = integ.energy(u);
    const Scalar g_cur = integ.energy_flux(u);
    const Scalar residual = (e_cur - e_prev) / cfg.dt + (g_prev + g_cur) / 2;
    rec.max_energy_residual = std::max(rec.max_energy_residual, std::abs(residual));
    rec.max_energy_flux =
        std::max({rec.max_energy_flux, std::abs(g_prev), std::abs(g_cur)});
    if (std::sqrt(sobolev_norm_sq(u, params.beta / 2)) > guard)
      throw BlowUp("simulate: H^{beta/2} norm exceeded the blow-up guard at t = " +
                   std::to_string(double(t)));
    if (history) history->states.push_back(u);
    if (n % cfg.record_stride == 0 || n == n_steps)
      detail::record_sample(rec, integ, u, t, residual, reference);
    e_prev = e_cur;
    g_prev = g_cur;
  }
  rec.final_state = u;
  return rec;
}

// Tangent (linearized) dynamics d v/dt + nu (-Lap)^{alpha/2} v +
// J^{-beta}_delta P[(v.grad)u + (u.grad)v] = -gamma v along a frozen
// trajectory, realized as the exact derivative of the discrete flow map.
template <typename Scalar>
TrajectoryRecord<Scalar> tangent_simulate(const StateHistory<Scalar>& history,
                                          const ModelParams<Scalar>& params,
                                          const SimulationConfig<Scalar>& cfg,
                                          const VectorField<Scalar>& v0) {
  if (history.states.empty())
    throw Error("tangent_simulate: empty trajectory history");
  if (!(std::abs(history.dt - cfg.dt) <= Scalar(1e-14) * std::max<Scalar>(1, cfg.dt)))
    throw Error("tangent_simulate: trajectory/config dt mismatch");
  require_same_grid(history.states.front(), v0);
  if (!v0.divergence_free)
    throw Error("tangent_simulate: v0 is not flagged divergence-free");
  const long n_steps = cfg.n_steps();
  if (n_steps + 1 > long(history.states.size()))
    throw Error("tangent_simulate: trajectory shorter than requested horizon");

  VectorField<Scalar> forcing = history.forcing;
  if (!forcing.grid) forcing = VectorField<Scalar>::zero(v0.grid);
  Etdrk2<Scalar> integ(params, cfg, forcing);
  TrajectoryRecord<Scalar> rec;
  VectorField<Scalar> v = v0;
  detail::record_sample(rec, integ, v, Scalar(0), Scalar(0),
                        static_cast<const VectorField<Scalar>*>(nullptr));
  for (long n = 1; n <= n_steps; ++n) {
    v = integ.tangent_step(history.states[std::size_t(n - 1)], v);
    if (!v.all_finite())
      throw BlowUp("tangent_simulate: non-finite coefficients");
    if (n % cfg.record_stride == 0 || n == n_steps)
      detail::record_sample(rec, integ, v, Scalar(n) * cfg.dt, Scalar(0),
                            static_cast<const VectorField<Scalar>*>(nullptr));
  }
  rec.final_state = v;
  return rec;
}

}  // namespace gaam
