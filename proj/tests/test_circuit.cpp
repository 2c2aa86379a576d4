#include <catch2/catch.hpp>

#include <cmath>

#include "modumech/circuit.hpp"

using namespace modumech;
using namespace modumech::circuit;
using Catch::Detail::Approx;

namespace {

// 10 MHz mechanics, junction loop sized for omega_max = 2 pi x 7.5 GHz and
// a gap tuned to the record coupling 2 pi x 230 Hz.
CircuitParams record_coupling_params() {
  CircuitParams cp;
  cp.I0 = 1e-6;
  cp.Omega_si = 2.0 * pi * 1e7;
  cp.mass = 3e-15;
  cp.Q = 1e5;
  const double omega_target = 2.0 * pi * 7.5e9;
  cp.C = 4.0 * pi * cp.I0 / (flux_quantum * omega_target * omega_target);
  const double x_zp = std::sqrt(hbar / (2.0 * cp.mass * cp.Omega_si));
  cp.d = omega_target * x_zp / (2.0 * (2.0 * pi * 230.0));
  return cp;
}

}  // namespace

TEST_CASE("lc_basic", "[circuit]") {
  const double m = 1e-14, W = 2.0 * pi * 1e7;

  // g is inversely proportional to the gap at fixed omega
  const LcRates r1 = lc_basic(1e-9, 1e-12, 1e-7, m, W);
  const LcRates r2 = lc_basic(1e-9, 1e-12, 2e-7, m, W);
  CHECK(r1.omega == Approx(r2.omega));
  CHECK(r1.g == Approx(2.0 * r2.g).epsilon(1e-12));

  // L = 1 nH, C = 1 pF
  CHECK(r1.omega == Approx(3.16228e10).epsilon(1e-5));
  CHECK(r1.g / r1.omega == Approx(std::sqrt(hbar / (2 * m * W)) / (2e-7)).epsilon(1e-12));

  // gap tuned for the record coupling 2 pi x 230 Hz
  const double omega = 2.0 * pi * 7.5e9;
  const double x_zp = std::sqrt(hbar / (2.0 * 3e-15 * W));
  const double d = omega * x_zp / (2.0 * (2.0 * pi * 230.0));
  const LcRates rec = lc_basic(1.0 / (omega * omega * 1e-13), 1e-13, d, 3e-15, W);
  CHECK(rec.g == Approx(2.0 * pi * 230.0).epsilon(1e-10));
  CHECK(rec.g == Approx(1445.13).epsilon(1e-4));

  CHECK_THROWS_AS(lc_basic(0.0, 1e-12, 1e-7, m, W), error);
}

TEST_CASE("junction inductance", "[circuit]") {
  const double I0 = 1e-6;
  CHECK(junction_inductance(0.0, I0) == Approx(flux_quantum / (4.0 * pi * I0)).epsilon(1e-14));
  CHECK(junction_inductance(0.0, I0) == Approx(1.6455e-10).epsilon(1e-4));

  // grows toward the branch edge and is 2-periodic in phi
  CHECK(junction_inductance(0.49, I0) > 10.0 * junction_inductance(0.0, I0));
  CHECK(junction_inductance(2.3, I0) == Approx(junction_inductance(0.3, I0)).epsilon(1e-12));

  CHECK_THROWS_AS(junction_inductance(0.5, I0), branch_error);
  CHECK_THROWS_AS(junction_inductance(0.75, I0), branch_error);
  CHECK_THROWS_AS(junction_inductance(1.0, I0), branch_error);
}

TEST_CASE("flux maps", "[circuit]") {
  const CircuitParams cp = record_coupling_params();
  const DerivedCircuit dc = derive(cp);

  CHECK(flux_frequency(0.0, dc) == Approx(dc.omega_max).epsilon(1e-14));
  CHECK(flux_coupling(0.0, dc) == Approx(dc.g_max).epsilon(1e-14));
  CHECK(flux_frequency(0.5, dc) == Approx(0.0).margin(1e-6));
  CHECK(flux_coupling(0.5, dc) == Approx(0.0).margin(1e-12));

  // common sqrt(cos) factor cancels in g/omega
  const double ref = dc.g_max / dc.omega_max;
  for (double phi : {0.05, 0.2, 0.35, 0.45})
    CHECK(flux_coupling(phi, dc) / flux_frequency(phi, dc) == Approx(ref).epsilon(1e-12));

  // monotone decreasing on [0, 1/2]
  double prev = flux_frequency(0.0, dc);
  for (int k = 1; k <= 50; ++k) {
    const double w = flux_frequency(0.5 * k / 50.0, dc);
    CHECK(w <= prev + 1e-12);
    prev = w;
  }

  CHECK_THROWS_AS(flux_frequency(0.7, dc), branch_error);
}

TEST_CASE("flux waveform", "[circuit]") {
  const double nu = 2.0 * pi * 1e7;
  CHECK(flux_waveform(nu, 0.0) == Approx(0.0).margin(1e-12));
  CHECK(flux_waveform(nu, pi / nu) == Approx(0.5).epsilon(1e-12));

  // nu t = pi/2: the defining relation gives sqrt(cos(pi phi)) = 1/2, so
  // phi = arccos(1/4)/pi
  const double phi_quarter = flux_waveform(nu, (pi / 2.0) / nu);
  CHECK(phi_quarter == Approx(std::acos(1.0 / 4.0) / pi).epsilon(1e-12));
  CHECK(phi_quarter == Approx(0.41957).margin(1e-5));
  CHECK(std::sqrt(std::cos(pi * phi_quarter)) == Approx(0.5).epsilon(1e-12));

  // round trip: the realized coupling is exactly (g_max/2)(1 + cos(nu t))
  const DerivedCircuit dc = derive(record_coupling_params());
  for (int k = 0; k <= 400; ++k) {
    const double t = (2.0 * pi / nu) * k / 400.0;
    const double expected = 0.5 * dc.g_max * (1.0 + std::cos(nu * t));
    CHECK(std::abs(flux_coupling(flux_waveform(nu, t), dc) - expected) <=
          1e-10 * dc.g_max);
  }
}

TEST_CASE("adiabaticity report", "[circuit]") {
  CircuitParams cp = record_coupling_params();
  // resize the loop for a 10 GHz peak frequency
  const double w_target = 2.0 * pi * 1e10;
  cp.C = 4.0 * pi * cp.I0 / (flux_quantum * w_target * w_target);

  // static flux: 10 MHz drive on a 10 GHz oscillator
  const double nu = 2.0 * pi * 1e7;
  const AdiabaticityReport stat = adiabaticity_report_static(nu, cp, 0.0);
  CHECK(stat.ratio_nu_omega_max == Approx(1e-3).epsilon(1e-9));
  CHECK(stat.ok);

  // zero drive is trivially adiabatic
  CHECK(adiabaticity_report(0.0, cp).ok);

  // the full eta = 1/2 waveform crosses omega = 0 and cannot pass
  const AdiabaticityReport full = adiabaticity_report(nu, cp);
  CHECK(full.floored);
  CHECK_FALSE(full.ok);
  CHECK(full.ratio_nu_omega_min > 1.0);
  CHECK(full.max_dphi_dt > 0.0);
}

TEST_CASE("enhancement estimates", "[circuit]") {
  const double g = 2.0 * pi * 100.0;       // record-scale coupling
  const double Omega = 2.0 * pi * 1e7;     // 10 MHz mechanics
  const EnhancementReport r = enhancement_estimates(g, Omega, 0.2, 10, 1e5);

  CHECK(r.chi_modulated == Approx(10.0 * pi).epsilon(1e-12));
  CHECK(r.chi_static == Approx(2.0 * pi * 1e-3).epsilon(1e-12));
  // eta Omega/(4 g); note the often-quoted factor-500 figure is 10x below this
  CHECK(r.enhancement_ratio == Approx(5000.0).epsilon(1e-12));

  // 25 phonons at t = 1/g for n = 10, g = 5780 1/s
  const EnhancementReport f = enhancement_estimates(5780.0, Omega, 0.5, 10, 1e5);
  CHECK(f.phonons_at_inverse_g == Approx(25.0).epsilon(1e-12));
  CHECK(f.time_inverse_g_s == Approx(1.0 / 5780.0).epsilon(1e-12));
  CHECK(f.time_inverse_g_s == Approx(173e-6).epsilon(0.01));

  // steady-state figures are dual-reported, never collapsed to one number
  CHECK(f.steady_state_available);
  CHECK(f.steady_state_convention_ambiguous);
  CHECK(f.gamma_q.gamma == Approx(Omega / 1e5).epsilon(1e-12));
  CHECK(f.gamma_2q.gamma == Approx(Omega / 2e5).epsilon(1e-12));
  CHECK(f.gamma_q.phonons_mean_ode ==
        Approx(std::pow(5780.0 * 10 / (2 * Omega / 1e5), 2)).epsilon(1e-12));
  CHECK(f.gamma_q.amplitude_linear == Approx(91.99).epsilon(1e-3));
  CHECK(f.gamma_q.phonons_quadratic == Approx(f.gamma_q.amplitude_linear *
                                              f.gamma_q.amplitude_linear).epsilon(1e-12));

  const EnhancementReport off = enhancement_estimates(g, Omega, 0.0, 10, 0);
  CHECK(off.chi_modulated == 0.0);
  CHECK(off.enhancement_ratio == 0.0);
  CHECK_FALSE(off.steady_state_available);

  CHECK_THROWS_AS(enhancement_estimates(0.0, Omega, 0.2, 1), error);
}

TEST_CASE("units audit", "[circuit]") {
  const CircuitParams cp = record_coupling_params();
  const DerivedCircuit dc = derive(cp);

  // rebuild every derived quantity from base constants, in a different order
  const double lj = flux_quantum / (4.0 * pi * cp.I0);
  const double w = 1.0 / std::sqrt(lj * cp.C);
  CHECK(dc.omega_max == Approx(w).epsilon(1e-12));
  CHECK(dc.L_J == Approx(lj).epsilon(1e-12));
  const double xzp = std::sqrt(hbar / 2.0 / cp.mass / cp.Omega_si);
  CHECK(dc.x_zp == Approx(xzp).epsilon(1e-12));
  CHECK(dc.g_max == Approx(w / (2.0 * cp.d) * xzp).epsilon(1e-12));

  // and the two formulations of the loop frequency agree:
  // 1/sqrt(L_s(0) C) = omega_max
  CHECK(1.0 / std::sqrt(junction_inductance(0.0, cp.I0) * cp.C) ==
        Approx(dc.omega_max).epsilon(1e-12));
}
