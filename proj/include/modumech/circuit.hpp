#pragma once

#include <cmath>
#include <limits>

#include "modumech/common.hpp"

namespace modumech::circuit {

// Physical constants used by every SI-unit map in this module.
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double flux_quantum = 2.067833848e-15;  // Wb, h/(2e)

// Hardware parameters of the flux-modulated electromechanical circuit.
// I0/C describe the junction-pair LC loop; d, mass, Omega_si, Q the
// mechanical plate; L is the fixed-inductor variant.
struct CircuitParams {
  double I0 = 0;        // junction critical current, A
  double C = 0;         // capacitance at x = 0, F
  double d = 0;         // plate gap, m
  double mass = 0;      // kg
  double Omega_si = 0;  // mechanical angular frequency, rad/s
  double Q = 0;         // mechanical quality factor (0: unknown)
  double L = 0;         // fixed inductance variant, H (0: junction loop)

  void validate() const {
    if (!(I0 > 0) || !(C > 0) || !(d > 0) || !(mass > 0) || !(Omega_si > 0))
      throw error("CircuitParams: I0, C, d, mass, Omega_si must be positive");
  }
};

struct DerivedCircuit {
  double omega_max;  // rad/s, sqrt(4 pi I0 / (phi0 C))
  double x_zp;       // m, sqrt(hbar / (2 m Omega))
  double g_max;      // rad/s, omega_max x_zp / (2 d)
  double L_J;        // H, phi0 / (4 pi I0)
};

inline DerivedCircuit derive(const CircuitParams& cp) {
  cp.validate();
  DerivedCircuit out;
  out.omega_max = std::sqrt(4.0 * pi * cp.I0 / (flux_quantum * cp.C));
  out.x_zp = std::sqrt(hbar / (2.0 * cp.mass * cp.Omega_si));
  out.g_max = out.omega_max * out.x_zp / (2.0 * cp.d);
  out.L_J = flux_quantum / (4.0 * pi * cp.I0);
  return out;
}

// Fixed-inductor variant: omega = 1/sqrt(L C), g = omega/(2d) sqrt(hbar/(2 m Omega)).
struct LcRates {
  double omega;  // rad/s
  double g;      // rad/s
};

inline LcRates lc_basic(double L, double C, double d, double mass, double Omega_si) {
  if (!(L > 0) || !(C > 0) || !(d > 0) || !(mass > 0) || !(Omega_si > 0))
    throw error("lc_basic: all inputs must be positive");
  LcRates r;
  r.omega = 1.0 / std::sqrt(L * C);
  r.g = r.omega / (2.0 * d) * std::sqrt(hbar / (2.0 * mass * Omega_si));
  return r;
}

namespace detail {

// cos(pi x) with the flux reduced into its 2-periodic branch and the zero at
// x = 1/2 evaluated without cancellation (plain cos(pi/2) leaves an O(1e-16)
// residue that would leak through the sqrt into the rate maps).
inline double cos_pi_flux(double phi) {
  double r = std::fmod(std::abs(phi), 2.0);  // cos(pi x) is even and 2-periodic
  if (r > 1.0) r = 2.0 - r;
  if (std::abs(r - 0.5) < 0.25) return std::sin(pi * (0.5 - r));
  return std::cos(pi * r);
}

}  // namespace detail

// L_s(phi) = L_J / cos(pi phi); valid only on the cos(pi phi) > 0 branch.
inline double junction_inductance(double phi, double I0) {
  if (!(I0 > 0)) throw error("junction_inductance: I0 must be positive");
  const double c = detail::cos_pi_flux(phi);
  if (c <= 0)
    throw branch_error("junction_inductance: flux outside the cos(pi phi) > 0 branch");
  return flux_quantum / (4.0 * pi * I0 * c);
}

inline double flux_frequency(double phi, const DerivedCircuit& dc) {
  const double c = detail::cos_pi_flux(phi);
  if (c < 0) throw branch_error("flux_frequency: flux outside the cos(pi phi) >= 0 branch");
  return dc.omega_max * std::sqrt(c);
}

inline double flux_coupling(double phi, const DerivedCircuit& dc) {
  const double c = detail::cos_pi_flux(phi);
  if (c < 0) throw branch_error("flux_coupling: flux outside the cos(pi phi) >= 0 branch");
  return dc.g_max * std::sqrt(c);
}

inline double flux_frequency(double phi, const CircuitParams& cp) {
  return flux_frequency(phi, derive(cp));
}

inline double flux_coupling(double phi, const CircuitParams& cp) {
  return flux_coupling(phi, derive(cp));
}

// Flux waveform realizing sqrt(cos(pi phi)) = [1 + cos(nu t)]/2, which gives
// the half-depth modulation g(t) = (g_max/2)[1 + cos(nu t)] (eta = 1/2).
// phi(t) sweeps [0, 1/2].
inline double flux_waveform(double nu, double t) {
  const double c = 0.5 * (1.0 + std::cos(nu * t));
  return std::acos(c * c) / pi;
}

struct AdiabaticityOptions {
  double threshold = 0.01;            // ok when nu/omega_min < threshold
  double omega_floor_fraction = 1e-9;  // floor on omega_min, relative to omega_max
  int samples = 4096;
};

// Adiabaticity of the flux drive. ratio_nu_omega_max uses the peak frequency;
// ratio_nu_omega_min uses the minimum over one waveform period, floored when
// the sweep crosses the omega = 0 turning point at phi = 1/2 (that crossing
// can never be adiabatic and is reported, not silently passed).
struct AdiabaticityReport {
  double ratio_nu_omega_max = 0;
  double ratio_nu_omega_min = 0;
  double omega_min = 0;
  double max_dphi_dt = 0;         // 1/s
  double max_dphi_per_cycle = 0;  // max|dphi/dt| * 2 pi / omega_min
  bool floored = false;
  bool ok = true;
};

// Static-flux variant: the modulation is taken as a small perturbation around
// the operating point phi.
inline AdiabaticityReport adiabaticity_report_static(double nu, const CircuitParams& cp,
                                                     double phi = 0.0,
                                                     const AdiabaticityOptions& opt = {}) {
  const DerivedCircuit dc = derive(cp);
  const double w = flux_frequency(phi, dc);
  AdiabaticityReport r;
  r.omega_min = w;
  r.ratio_nu_omega_max = nu / dc.omega_max;
  r.ratio_nu_omega_min = (w > 0) ? nu / w : std::numeric_limits<double>::infinity();
  r.ok = r.ratio_nu_omega_min < opt.threshold;
  return r;
}

// Full-waveform variant for the phi in [0, 1/2] sweep of flux_waveform.
inline AdiabaticityReport adiabaticity_report(double nu, const CircuitParams& cp,
                                              const AdiabaticityOptions& opt = {}) {
  const DerivedCircuit dc = derive(cp);
  AdiabaticityReport r;
  r.ratio_nu_omega_max = nu / dc.omega_max;
  if (nu == 0) {
    r.omega_min = dc.omega_max;
    r.ratio_nu_omega_min = 0;
    r.ok = true;
    return r;
  }
  const double period = 2.0 * pi / nu;
  double omega_min = dc.omega_max;
  double max_slope = 0;
  const int n = opt.samples;
  double prev_phi = flux_waveform(nu, 0.0);
  for (int k = 1; k <= n; ++k) {
    const double t = period * k / n;
    const double phi = flux_waveform(nu, t);
    omega_min = std::min(omega_min, flux_frequency(phi, dc));
    max_slope = std::max(max_slope, std::abs(phi - prev_phi) / (period / n));
    prev_phi = phi;
  }
  const double floor = opt.omega_floor_fraction * dc.omega_max;
  r.floored = omega_min < floor;
  r.omega_min = std::max(omega_min, floor);
  r.ratio_nu_omega_min = nu / r.omega_min;
  r.max_dphi_dt = max_slope;
  r.max_dphi_per_cycle = max_slope * 2.0 * pi / r.omega_min;
  r.ok = r.ratio_nu_omega_min < opt.threshold;
  return r;
}

// Rate estimates for a modulated circuit. The steady-state section is
// dual-reported under both quality-factor conventions because the two
// displacement conventions are mutually inconsistent; neither is
// endorsed as a single phonon number.
struct SteadyStateBranch {
  double gamma = 0;              // rad/s
  double delta_s = 0;            // g n / (sqrt(2) gamma)
  double phonons_mean_ode = 0;   // (g n / (2 gamma))^2, from d<b>/dt
  double phonons_quadratic = 0;  // (g n / gamma)^2, alternative convention
  double amplitude_linear = 0;   // g n / gamma
};

struct EnhancementReport {
  double chi_modulated = 0;       // eta g / 4
  double chi_static = 0;          // g^2 / Omega
  double enhancement_ratio = 0;   // chi_modulated / chi_static = eta Omega/(4 g)
  double time_inverse_g_s = 0;    // 1/g
  double phonons_at_inverse_g = 0;  // (n/2)^2, undamped drive at full g
  SteadyStateBranch gamma_q;      // gamma = Omega / Q
  SteadyStateBranch gamma_2q;     // gamma = Omega / (2 Q)
  bool steady_state_available = false;
  bool steady_state_convention_ambiguous = true;
};

inline EnhancementReport enhancement_estimates(double g, double Omega, double eta, int n,
                                               double Q = 0) {
  if (!(g > 0) || !(Omega > 0)) throw error("enhancement_estimates: g, Omega must be positive");
  if (eta < 0 || eta > 1) throw error("enhancement_estimates: eta must be in [0, 1]");
  if (n < 0) throw error("enhancement_estimates: n must be >= 0");
  EnhancementReport r;
  r.chi_modulated = eta * g / 4.0;
  r.chi_static = g * g / Omega;
  r.enhancement_ratio = r.chi_modulated / r.chi_static;
  r.time_inverse_g_s = 1.0 / g;
  r.phonons_at_inverse_g = 0.25 * double(n) * double(n);
  if (Q > 0) {
    auto branch = [&](double gamma) {
      SteadyStateBranch b;
      b.gamma = gamma;
      b.delta_s = g * n / (std::sqrt(2.0) * gamma);
      b.phonons_mean_ode = std::pow(g * n / (2.0 * gamma), 2);
      b.phonons_quadratic = std::pow(g * n / gamma, 2);
      b.amplitude_linear = g * n / gamma;
      return b;
    };
    r.gamma_q = branch(Omega / Q);
    r.gamma_2q = branch(Omega / (2.0 * Q));
    r.steady_state_available = true;
  }
  return r;
}

inline EnhancementReport enhancement_estimates(const CircuitParams& cp, double eta, int n) {
  const DerivedCircuit dc = derive(cp);
  return enhancement_estimates(dc.g_max, cp.Omega_si, eta, n, cp.Q);
}

}  // namespace modumech::circuit
