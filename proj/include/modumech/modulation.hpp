#pragma once

#include <cmath>
#include <limits>

#include "modumech/common.hpp"
#include "modumech/dynamics.hpp"
#include "modumech/fock.hpp"

namespace modumech {

// Drive parameters for coupling modulation g(t) = g_max[(1-eta) + eta cos(nu t)],
// with nu = Omega - delta detuned slightly below the mechanical frequency.
struct ModulationParams {
  double g_max = 0;  // bare coupling amplitude
  double eta = 1;    // modulation depth in [0, 1]
  double nu = 0;     // modulation frequency
  double delta = 0;  // residual detuning

  void validate() const {
    if (g_max < 0) throw error("ModulationParams: g_max must be >= 0");
    if (eta < 0 || eta > 1) throw error("ModulationParams: eta must be in [0, 1]");
    if (!(nu > 0)) throw error("ModulationParams: nu must be positive");
  }

  // nu = Omega - delta must hold when the mechanical frequency is known.
  void check_consistent(double Omega, double tol = 1e-9) const {
    validate();
    if (std::abs(nu - (Omega - delta)) > tol * std::max(1.0, std::abs(Omega)))
      throw error("ModulationParams: nu != Omega - delta");
  }
};

inline ModulationParams make_modulation(double g_max, double eta, double Omega, double delta) {
  ModulationParams mp{g_max, eta, Omega - delta, delta};
  mp.validate();
  return mp;
}

// Instantaneous coupling of the modulated drive.
inline double modulated_coupling(const ModulationParams& mp, double t) {
  return mp.g_max * ((1.0 - mp.eta) + mp.eta * std::cos(mp.nu * t));
}

// Schedule with g(t) = g_max[(1-eta) + eta cos(nu t)] and constant omega, Omega,
// consumable by the numeric propagator.
inline Schedule modulated_schedule(const ModulationParams& mp, double Omega, double duration,
                                   double omega = 0) {
  mp.check_consistent(Omega);
  if (!(duration > 0)) throw error("modulated_schedule: duration must be positive");
  return Schedule::sampled(
      [mp, Omega, omega](double t) {
        return SystemParams{.omega = omega, .Omega = Omega, .g = modulated_coupling(mp, t)};
      },
      2.0 * pi / mp.nu);
}

// Rotating-wave effective model of the resonantly modulated interaction:
// Omega is replaced by delta and the coupling amplitude by g/2. Valid for
// g << nu; the ratio g/nu is reported, not enforced.
struct EffectiveModel {
  SystemParams params;
  double validity_ratio;  // |g| / nu
};

inline EffectiveModel effective_params(double g, double Omega, double delta,
                                       double omega = 0) {
  const double nu = Omega - delta;
  const double ratio = (nu > 0) ? std::abs(g) / nu : std::numeric_limits<double>::infinity();
  return {SystemParams{.omega = omega, .Omega = delta, .g = g / 2.0}, ratio};
}

// Kerr rate of the effective model, chi = g^2/(4 delta).
inline double effective_kerr_rate(double g, double delta) {
  if (delta == 0)
    throw error("effective_kerr_rate: delta = 0 is the resonant-drive regime; "
                "use the photon-pressure operations instead");
  return kerr_rate(g / 2.0, delta);
}

// Multiplies each amplitude by exp(i phase * n_b); used to hop between the
// lab frame and the frame rotating at nu b†b.
inline StateVector rotate_mechanics(const StateVector& psi, double phase) {
  StateVector out = psi;
  for (int na = 0; na < psi.space.dim_a; ++na)
    for (int nb = 0; nb < psi.space.dim_b; ++nb)
      out.amps(psi.space.index(na, nb)) *= std::polar(1.0, phase * nb);
  return out;
}

// 1 - fidelity between the full modulated evolution (viewed in the rotating
// frame at nu b†b) and the effective-model evolution over time t.
inline double rwa_error(const ModulationParams& mp, const SystemParams& base,
                        const StateVector& psi0, double t,
                        const PropagationOptions& opts = {}) {
  mp.check_consistent(base.Omega);
  if (mp.g_max == 0) {
    // no interaction: both routes are free evolution of the same state
    return 0.0;
  }
  const Schedule lab = modulated_schedule(mp, base.Omega, t, base.omega);
  const StateVector full = propagate_state(lab, psi0, t, opts);
  const StateVector full_rot = rotate_mechanics(full, mp.nu * t);

  const EffectiveModel eff = effective_params(mp.eta * mp.g_max, base.Omega, mp.delta, base.omega);
  const StateVector ref = propagate_state(Schedule::constant(eff.params), psi0, t, opts);
  return 1.0 - fidelity(full_rot, ref);
}

// Timing of Kerr-by-modulation with detuning ratio r (delta = g/(2r)): the
// modes decouple after one full effective period tau = 4 pi r / g, having
// accumulated the Kerr phase chi * tau = 2 pi r^2. r = 1/2 is the
// minimum-time choice for a cat state (chi tau = pi/2, tau = 2 pi / g).
struct CatSchedule {
  double delta;
  double tau;
  double chi;
  double chi_tau;
  bool decoupled;     // tau lands on an integer number of effective periods
  bool is_cat_time;   // chi * tau = pi/2
};

inline CatSchedule cat_schedule(double g, double r) {
  if (!(g > 0) || !(r > 0)) throw error("cat_schedule: g and r must be positive");
  CatSchedule cs{};
  cs.delta = g / (2.0 * r);
  cs.chi = r * g / 2.0;
  cs.tau = 4.0 * pi * r / g;
  cs.chi_tau = cs.chi * cs.tau;
  const double periods = cs.tau * cs.delta / (2.0 * pi);
  cs.decoupled = std::abs(periods - std::round(periods)) < 1e-12;
  cs.is_cat_time = std::abs(cs.chi_tau - pi / 2.0) < 1e-12;
  return cs;
}

// Resonant drive (delta = 0): interaction-picture momentum drift
// |<p>(t) - <p>(0)| = sqrt(2) (g/2) n t.
inline double momentum_drift(double g, int n, double t) {
  if (n < 0) throw error("momentum_drift: n must be >= 0");
  return std::sqrt(2.0) * (g / 2.0) * n * t;
}

// Damping-limited displacement, Delta_s_max = g n / (sqrt(2) gamma).
inline double max_displacement(double g, int n, double gamma) {
  if (n < 0) throw error("max_displacement: n must be >= 0");
  if (!(gamma > 0)) throw error("max_displacement: gamma must be positive");
  return g * n / (std::sqrt(2.0) * gamma);
}

// Reduced-depth variant in its conventional form
// Delta_s_max = sqrt(2) eta (g_max/gamma) n. Note this sits a factor 2 above
// the eta-scaled full-depth formula; the circuit report surfaces both.
inline double max_displacement_reduced(double g_max, double eta, int n, double gamma) {
  if (n < 0) throw error("max_displacement_reduced: n must be >= 0");
  if (!(gamma > 0)) throw error("max_displacement_reduced: gamma must be positive");
  return std::sqrt(2.0) * eta * (g_max / gamma) * n;
}

// Coherent amplitude of the resonantly driven mechanics.
struct DisplacementReport {
  cplx beta;
  double phonons;  // |beta|^2
  double delta_s;  // sqrt(2) |beta|
  double time;
};

inline DisplacementReport displacement_report(cplx beta, double t) {
  return {beta, std::norm(beta), std::sqrt(2.0) * std::abs(beta), t};
}

// Undamped drive from vacuum: beta(t) = -i (g/2) n t.
inline DisplacementReport coherent_amplitude(double g, int n, double t) {
  if (n < 0) throw error("coherent_amplitude: n must be >= 0");
  return displacement_report(cplx(0, -1) * (g / 2.0) * double(n) * t, t);
}

// Mean-value solution of d<b>/dt = -gamma <b> - i (g/2) n:
//   beta(t) = -i (g n / (2 gamma)) (1 - e^{-gamma t}),
// chosen so the steady state reproduces Delta_s = g n / (sqrt(2) gamma).
inline DisplacementReport damped_mean_evolution(double g, int n, double gamma, double t) {
  if (n < 0) throw error("damped_mean_evolution: n must be >= 0");
  if (gamma < 0) throw error("damped_mean_evolution: gamma must be >= 0");
  const double ramp = (gamma > 0) ? -std::expm1(-gamma * t) / gamma : t;
  return displacement_report(cplx(0, -1) * (g / 2.0) * double(n) * ramp, t);
}

inline DisplacementReport damped_steady_state(double g, int n, double gamma) {
  if (!(gamma > 0)) throw error("damped_steady_state: gamma must be positive");
  return displacement_report(cplx(0, -1) * g * double(n) / (2.0 * gamma),
                             std::numeric_limits<double>::infinity());
}

}  // namespace modumech
