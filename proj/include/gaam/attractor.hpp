#pragma once

#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "gaam/stationary.hpp"

namespace gaam {

// Pass/fail result of a quantitative check; max_violation is the largest
// relative excess of the asserted bound over the run ("pass" means violation
// within tolerance, 1e-9 relative unless stated otherwise).
template <typename Scalar>
struct CheckReport {
  std::string name;
  bool pass = true;
  Scalar max_violation = 0;
  std::vector<std::pair<std::string, Scalar>> metrics;
  std::string note;

  void metric(const std::string& key, Scalar value) {
    metrics.emplace_back(key, value);
  }
};

inline constexpr double kDefaultCheckTol = 1e-9;

// Absorbing ball ||u||^2_{H^{beta/2}} <= 2 b^2 / (a^2 gamma^2) ||f||^2 and the
// entry-time bound obtained by solving e^{-gamma T} ||u0||^2 = (b^2/(a^2
// gamma^2)) ||f||^2.
template <typename Scalar>
struct AbsorbingSetSpec {
  Scalar radius_sq = 0;
  Scalar f_norm_sq = 0;
  Scalar gamma = 1;

  Scalar predicted_entry_time(Scalar u0_norm_sq) const {
    if (radius_sq <= 0) return 0;
    const Scalar t = std::log(2 * u0_norm_sq / radius_sq) / gamma;
    return std::max(Scalar(0), t);
  }
};

template <typename Scalar>
AbsorbingSetSpec<Scalar> absorbing_set_spec(const VectorField<Scalar>& f,
                                            const ModelParams<Scalar>& p) {
  const auto dc = derived_constants(p);
  AbsorbingSetSpec<Scalar> spec;
  spec.f_norm_sq = sobolev_norm_sq(f, p.beta / 2);
  spec.radius_sq =
      2 * dc.b * dc.b / (dc.a * dc.a * p.gamma * p.gamma) * spec.f_norm_sq;
  spec.gamma = p.gamma;
  return spec;
}

namespace detail {

template <typename Scalar>
void track_violation(CheckReport<Scalar>& rep, Scalar lhs, Scalar rhs) {
  const Scalar denom = std::max(std::abs(rhs), Scalar(1e-30));
  rep.max_violation = std::max(rep.max_violation, (lhs - rhs) / denom);
}

// Least-squares slope of ln(y) against t over samples with y above a
// round-off floor.
template <typename Scalar>
Scalar fit_log_slope(const std::vector<Scalar>& t, const std::vector<Scalar>& y,
                     Scalar floor) {
  Scalar st = 0, sl = 0, stt = 0, stl = 0;
  long n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(y[i] > floor)) continue;
    const Scalar l = std::log(y[i]);
    st += t[i];
    sl += l;
    stt += t[i] * t[i];
    stl += t[i] * l;
    ++n;
  }
  if (n < 2) return 0;
  const Scalar det = Scalar(n) * stt - st * st;
  if (det == 0) return 0;
  return (Scalar(n) * stl - st * sl) / det;
}

}  // namespace detail

// exp-decay energy bound for time-independent forcing:
//   ||u(t)||^2_{H^{beta/2}} <= e^{-gamma t} ||u0||^2
//     + (b^2/(a^2 gamma^2)) ||f||^2 (1 - e^{-gamma t})  at every sample.
template <typename Scalar>
CheckReport<Scalar> energy_decay_check(const TrajectoryRecord<Scalar>& rec,
                                      const VectorField<Scalar>& u0,
                                      const VectorField<Scalar>& f,
                                      const ModelParams<Scalar>& p,
                                      Scalar tol = Scalar(kDefaultCheckTol)) {
  const auto dc = derived_constants(p);
  CheckReport<Scalar> rep;
  rep.name = "energy_decay_bound";
  const Scalar u0_sq = sobolev_norm_sq(u0, p.beta / 2);
  const Scalar forced =
      dc.b * dc.b / (dc.a * dc.a * p.gamma * p.gamma) * sobolev_norm_sq(f, p.beta / 2);
  Scalar min_slack = std::numeric_limits<Scalar>::max();
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const Scalar decay = std::exp(-p.gamma * rec.times[i]);
    const Scalar rhs = decay * u0_sq + forced * (1 - decay);
    detail::track_violation(rep, rec.h_beta_sq[i], rhs);
    min_slack = std::min(min_slack, rhs - rec.h_beta_sq[i]);
  }
  rep.pass = rep.max_violation <= tol;
  rep.metric("samples", Scalar(rec.size()));
  rep.metric("min_slack", min_slack);
  return rep;
}

// Windowed dissipation bound for time-independent forcing:
//   c int_t^{t+T} ||u||^2_{H^{(alpha+beta)/2}}
//     <= e^{-gamma t} ||u0||^2 + (b^2/(a^2 gamma^2)) ||f||^2 (1 - e^{-gamma t})
//        + (b^2/(a^2 c)) T ||f||^2,
// checked with trapezoidal quadrature for every window start on the sample
// grid.
template <typename Scalar>
CheckReport<Scalar> dissipation_window_check(const TrajectoryRecord<Scalar>& rec,
                                         const VectorField<Scalar>& u0,
                                         const VectorField<Scalar>& f,
                                         const ModelParams<Scalar>& p,
                                         Scalar window_T,
                                         Scalar tol = Scalar(kDefaultCheckTol)) {
  if (rec.size() < 2 || rec.times.back() - rec.times.front() < window_T)
    throw Error("dissipation_window_check: window longer than the record");
  const auto dc = derived_constants(p);
  CheckReport<Scalar> rep;
  rep.name = "windowed_dissipation_bound";
  const Scalar u0_sq = sobolev_norm_sq(u0, p.beta / 2);
  const Scalar f_sq = sobolev_norm_sq(f, p.beta / 2);
  const Scalar forced = dc.b * dc.b / (dc.a * dc.a * p.gamma * p.gamma) * f_sq;
  long windows = 0;
  Scalar min_slack = std::numeric_limits<Scalar>::max();
  for (std::size_t i = 0; i + 1 < rec.size(); ++i) {
    // End of the first sample interval reaching the requested width.
    std::size_t j = i + 1;
    while (j < rec.size() && rec.times[j] - rec.times[i] < window_T - Scalar(1e-12))
      ++j;
    if (j >= rec.size()) break;
    Scalar integral = 0;
    for (std::size_t s = i; s < j; ++s)
      integral += (rec.times[s + 1] - rec.times[s]) *
                  (rec.h_alphabeta_sq[s] + rec.h_alphabeta_sq[s + 1]) / 2;
    const Scalar t = rec.times[i];
    const Scalar width = rec.times[j] - rec.times[i];
    const Scalar decay = std::exp(-p.gamma * t);
    const Scalar rhs =
        decay * u0_sq + forced * (1 - decay) + dc.b * dc.b / (dc.a * dc.a * dc.c) * width * f_sq;
    detail::track_violation(rep, dc.c * integral, rhs);
    min_slack = std::min(min_slack, rhs - dc.c * integral);
    ++windows;
  }
  rep.pass = rep.max_violation <= tol;
  rep.metric("windows", Scalar(windows));
  if (windows > 0) rep.metric("min_slack", min_slack);
  return rep;
}

// First sample inside the absorbing ball; must not lag the predicted entry
// time by more than one sample stride.
template <typename Scalar>
CheckReport<Scalar> absorbing_entry(const TrajectoryRecord<Scalar>& rec,
                                    const AbsorbingSetSpec<Scalar>& spec) {
  CheckReport<Scalar> rep;
  rep.name = "absorbing_entry";
  if (spec.radius_sq <= 0) {
    rep.note = "degenerate absorbing set (f = 0); check skipped";
    rep.metric("radius_sq", Scalar(0));
    return rep;
  }
  const Scalar predicted = spec.predicted_entry_time(rec.h_beta_sq.front());
  Scalar stride = rec.size() >= 2 ? rec.times[1] - rec.times[0] : Scalar(0);
  Scalar entry = Scalar(-1);
  for (std::size_t i = 0; i < rec.size(); ++i) {
    if (rec.h_beta_sq[i] <= spec.radius_sq) {
      entry = rec.times[i];
      break;
    }
  }
  rep.metric("predicted_entry_time", predicted);
  rep.metric("radius_sq", spec.radius_sq);
  if (entry < 0) {
    rep.pass = false;
    rep.max_violation = 1;
    rep.note = "trajectory never entered the absorbing set";
    return rep;
  }
  rep.metric("entry_time", entry);
  detail::track_violation(rep, entry, predicted + stride);
  rep.pass = rep.max_violation <= Scalar(kDefaultCheckTol);
  return rep;
}

// Pointwise exponential convergence to the stationary state in the
// delta-weighted norm, ||J^{beta/2}_delta (u(t)-U)||^2 <= e^{-gamma t} x
// initial, plus the fitted log-slope of the squared distance (expected at or
// below -gamma).
template <typename Scalar>
CheckReport<Scalar> stationary_decay_check(const TrajectoryRecord<Scalar>& rec,
                                         const ModelParams<Scalar>& p,
                                         Scalar tol = Scalar(kDefaultCheckTol)) {
  if (!rec.has_reference || rec.dist_delta_sq.empty())
    throw Error("stationary_decay_check: record carries no reference field");
  CheckReport<Scalar> rep;
  rep.name = "stationary_decay_bound";
  const Scalar d0 = rec.dist_delta_sq.front();
  // Round-off allowance: starting exactly on the reference keeps the exact
  // distance at zero but the computed one at integrator-drift level.
  const Scalar floor =
      Scalar(1e-16) * (1 + rec.h_beta_delta_sq.front());
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const Scalar rhs = d0 * std::exp(-p.gamma * rec.times[i]);
    const Scalar denom = std::max(rhs, floor);
    rep.max_violation = std::max(
        rep.max_violation, (rec.dist_delta_sq[i] - rhs - floor) / denom);
  }
  rep.pass = rep.max_violation <= tol;
  if (d0 > 0) {
    const Scalar slope = detail::fit_log_slope(
        rec.times, rec.dist_delta_sq, d0 * Scalar(1e-24));
    rep.metric("fitted_slope", slope);
    rep.metric("slope_bound", -p.gamma * Scalar(0.95));
    if (slope > -p.gamma * Scalar(0.95)) {
      rep.pass = false;
      rep.note = "fitted slope above -0.95 gamma";
    }
  } else {
    rep.note = "zero initial distance; slope fit skipped";
  }
  return rep;
}

// Evolves several starts to t_end and measures the collapse onto the unique
// stationary state: max pairwise strong distance and max distance to U.
template <typename Scalar>
CheckReport<Scalar> singleton_attractor_check(
    const VectorField<Scalar>& f, const ModelParams<Scalar>& p,
    const SimulationConfig<Scalar>& cfg,
    const std::vector<VectorField<Scalar>>& starts,
    const VectorField<Scalar>& stationary_state, Scalar tol = Scalar(1e-6)) {
  CheckReport<Scalar> rep;
  rep.name = "singleton_collapse";
  std::vector<VectorField<Scalar>> finals;
  finals.reserve(starts.size());
  for (const auto& u0 : starts)
    finals.push_back(simulate(u0, f, p, cfg).final_state);
  Scalar spread = 0, to_u = 0;
  for (std::size_t i = 0; i < finals.size(); ++i) {
    to_u = std::max(to_u, strong_distance(finals[i], stationary_state, p.beta));
    for (std::size_t j = i + 1; j < finals.size(); ++j)
      spread = std::max(spread, strong_distance(finals[i], finals[j], p.beta));
  }
  rep.metric("spread", spread);
  rep.metric("dist_to_stationary", to_u);
  rep.metric("n_starts", Scalar(starts.size()));
  rep.max_violation = std::max(spread, to_u) / tol;
  rep.pass = spread < tol && to_u < tol;
  return rep;
}

template <typename Scalar>
CheckReport<Scalar> singleton_attractor_check(const VectorField<Scalar>& f,
                                              const ModelParams<Scalar>& p,
                                              const SimulationConfig<Scalar>& cfg,
                                              int n_starts, Scalar amplitude = 1,
                                              Scalar tol = Scalar(1e-6)) {
  auto sol = continuation_solve(f, p, {Scalar(0)});
  if (!sol.converged)
    throw Error("singleton_attractor_check: stationary solve did not converge");
  std::vector<VectorField<Scalar>> starts;
  starts.reserve(std::size_t(n_starts));
  for (int i = 0; i < n_starts; ++i)
    starts.push_back(
        random_divfree_field(f.grid, cfg.seed + std::uint64_t(i) + 1, amplitude));
  return singleton_attractor_check(f, p, cfg, starts, sol.field, tol);
}

// Linearized generator along a frozen snapshot u:
//   L w = -nu (-Lap)^{alpha/2} w - J^{-beta}_delta P[(w.grad)u + (u.grad)w]
//         - gamma w.
template <typename Scalar>
VectorField<Scalar> l_operator_apply(const VectorField<Scalar>& w,
                                     const VectorField<Scalar>& u_snapshot,
                                     const ModelParams<Scalar>& p) {
  require_same_grid(w, u_snapshot);
  VectorField<Scalar> out =
      Scalar(-1) * damped_diffusion_apply(w, p, ApplyMode::apply) -
      transport_sym(u_snapshot, w, p);
  out.divergence_free = w.divergence_free;
  return out;
}

// Family of divergence-free fields orthonormal in the inner product of
// H^{beta/2} with the delta-equivalent weight.
template <typename Scalar>
struct OrthonormalFamily {
  std::vector<VectorField<Scalar>> members;
  Scalar beta = 0;
  Scalar delta = 1;

  int size() const { return static_cast<int>(members.size()); }

  Scalar gram_deviation() const {
    Scalar worst = 0;
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i; j < members.size(); ++j) {
        const Scalar g = delta_inner(members[i], members[j], beta, delta);
        worst = std::max(worst, std::abs(g - (i == j ? Scalar(1) : Scalar(0))));
      }
    return worst;
  }

  void validate(Scalar tol = Scalar(1e-10)) const {
    if (members.empty()) throw Error("orthonormal family is empty");
    if (gram_deviation() > tol)
      throw Error("orthonormal family fails the Gram identity");
    for (const auto& w : members)
      if (!w.divergence_free)
        throw Error("orthonormal family member is not divergence-free");
  }
};

// Modified Gram-Schmidt in the delta-weighted inner product; the Leray
// projection is re-applied after each orthogonalization step.
template <typename Scalar>
OrthonormalFamily<Scalar> gram_schmidt_delta(
    const std::vector<VectorField<Scalar>>& fields, Scalar beta, Scalar delta) {
  if (fields.empty()) throw Error("gram_schmidt_delta: no input fields");

  // Independence pre-check on the normalized Gram matrix.
  const int n = static_cast<int>(fields.size());
  std::vector<VectorField<Scalar>> unit;
  unit.reserve(fields.size());
  for (const auto& v : fields) {
    const Scalar nrm = std::sqrt(delta_inner(v, v, beta, delta));
    if (!(nrm > 0)) throw RankDeficient("gram_schmidt_delta: zero input field");
    unit.push_back(Scalar(1) / nrm * v);
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      gram(i, j) = delta_inner(unit[i], unit[j], beta, delta);
  if (!(gram.determinant() > Scalar(1e-14)))
    throw RankDeficient("gram_schmidt_delta: inputs are linearly dependent");

  OrthonormalFamily<Scalar> fam;
  fam.beta = beta;
  fam.delta = delta;
  for (int i = 0; i < n; ++i) {
    VectorField<Scalar> v = fields[std::size_t(i)];
    for (const auto& q : fam.members) {
      const Scalar proj = delta_inner(v, q, beta, delta);
      v = v - proj * q;
    }
    v = leray_project(v);
    v.enforce_reality();
    const Scalar nrm = std::sqrt(delta_inner(v, v, beta, delta));
    if (!(nrm > Scalar(1e-14)))
      throw RankDeficient("gram_schmidt_delta: pivot collapsed");
    fam.members.push_back(Scalar(1) / nrm * v);
  }
  return fam;
}

// Numerical Lieb-Thirring constant C_LT = (3/5^{5/3}) (16 pi^{3/2}
// Gamma(7/2) / Gamma(5))^{2/3}.
inline double lieb_thirring_constant() {
  const double pi_d = 3.141592653589793238462643383279502884;
  const double inner =
      16.0 * std::pow(pi_d, 1.5) * std::tgamma(3.5) / std::tgamma(5.0);
  return 3.0 / std::pow(5.0, 5.0 / 3.0) * std::pow(inner, 2.0 / 3.0);
}

// Constant of the dimension estimate,
//   frak c = (2/5) C_LT^{5/2} / (a c)^{3/2} (b^4/(4 a^8 gamma^4)
//            + 3 b^2/(4 a^4 c^2)).
template <typename Scalar>
Scalar dimension_bound_constant(Scalar a, Scalar b, Scalar c, Scalar gamma) {
  const Scalar clt = Scalar(lieb_thirring_constant());
  const Scalar pref =
      Scalar(0.4) * std::pow(clt, Scalar(2.5)) / std::pow(a * c, Scalar(1.5));
  const Scalar paren = std::pow(b, Scalar(4)) / (4 * std::pow(a, Scalar(8)) *
                                                 std::pow(gamma, Scalar(4))) +
                       3 * b * b / (4 * std::pow(a, Scalar(4)) * c * c);
  return pref * paren;
}

template <typename Scalar>
Scalar dimension_bound_constant(const ModelParams<Scalar>& p) {
  const auto dc = derived_constants(p);
  return dimension_bound_constant(dc.a, dc.b, dc.c, p.gamma);
}

// Fractal-dimension bound (2 frak_c / gamma) max(||f||^2, ||f||^4) in the
// delta-weighted H^{beta/2} norm.  The estimate is derived for alpha >= 1,
// beta >= 2; outside that range the value is still reported, with a warning.
template <typename Scalar>
Scalar fractal_dim_bound(const VectorField<Scalar>& f,
                         const ModelParams<Scalar>& p,
                         std::ostream* warn = nullptr) {
  if ((p.alpha < 1 || p.beta < 2) && warn)
    *warn << "fractal_dim_bound: outside the hypothesis range alpha >= 1, "
             "beta >= 2; value is heuristic\n";
  const Scalar fd =
      sobolev_norm(f, p.beta / 2, SobolevVariant::delta_weighted, p.delta);
  const Scalar frak_c = dimension_bound_constant(p);
  return 2 * frak_c / p.gamma *
         std::max(fd * fd, fd * fd * fd * fd);
}

// Trace of the linearized generator over an orthonormal family against the
// Lieb-Thirring bound
//   sum_i (L w_i, w_i)_delta <= -(gamma a / 2) n
//     + (2/5) C_LT^{5/2}/(a c)^{3/2} ||grad (x) u||^{5/2}_{L^{5/2}}.
template <typename Scalar>
CheckReport<Scalar> lyapunov_trace_check(const VectorField<Scalar>& u_snapshot,
                                         const OrthonormalFamily<Scalar>& family,
                                         const ModelParams<Scalar>& p,
                                         Scalar tol = Scalar(kDefaultCheckTol)) {
  family.validate();
  const auto dc = derived_constants(p);
  CheckReport<Scalar> rep;
  rep.name = "lyapunov_trace_bound";
  Scalar trace = 0;
  for (const auto& w : family.members)
    trace += delta_inner(l_operator_apply(w, u_snapshot, p), w, p.beta, p.delta);
  const Scalar grad52 = lp_gradient_norm(u_snapshot, Scalar(2.5));
  const Scalar clt = Scalar(lieb_thirring_constant());
  const Scalar rhs =
      -p.gamma * dc.a / 2 * Scalar(family.size()) +
      Scalar(0.4) * std::pow(clt, Scalar(2.5)) / std::pow(dc.a * dc.c, Scalar(1.5)) *
          std::pow(grad52, Scalar(2.5));
  detail::track_violation(rep, trace, rhs);
  rep.pass = rep.max_violation <= tol;
  rep.metric("trace", trace);
  rep.metric("bound", rhs);
  rep.metric("slack", rhs - trace);
  rep.metric("grad_l52", grad52);
  rep.metric("n", Scalar(family.size()));
  return rep;
}

}  // namespace gaam
