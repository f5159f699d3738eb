#pragma once

#include "numstab/sme.hpp"
#include "numstab/units.hpp"

namespace numstab {

// Atomic transition used for the dispersive probe.
struct AtomLine {
  RateQuantity gamma{};  // natural linewidth
};

// Cs D2 line; the linewidth is printed as an ordinary frequency.
AtomLine cesium_d2();

// Lab-frame description of the probed cavity. Rates keep the convention they
// were printed in so the same inputs can be evaluated under both readings.
struct QEDParams {
  double probe_power = 0.0;        // W
  double wavelength = 0.0;         // m
  RateQuantity detuning{};         // probe-atom detuning
  double beam_radius = 0.0;        // m
  double atom_count = 0.0;         // N
  double saturation = 0.0;         // probe intensity over I_sat
  RateQuantity g0{};               // single-atom vacuum coupling
  RateQuantity kappa{};            // cavity energy decay rate
  double detection_efficiency = 0.0;
  double gain = 0.0;               // feedback gain for derived simulations
  AtomLine atom = cesium_d2();
  double cavity_length = 0.0;      // m; <= 0 means not specified
  double finesse = 0.0;            // <= 0 means not specified

  void validate() const;  // throws std::invalid_argument
};

// 2 pi c / lambda.
double optical_angular_frequency(double wavelength);

// Gamma sqrt(s / 2) for saturation s = I / I_sat, in the units of gamma.
double rabi_frequency(double gamma, double saturation);

// Cavity linewidth implied by length and finesse: pi c / (2 L F), rad/s.
double kappa_from_geometry(double length, double finesse);

// One evaluation of the effective measurement strength
//   M = Phi (A K)^2,   A = (3 N lambda^2 / (4 pi^2 r^2)) (Gamma / Delta),
//   K = g0^2 / (g0^2 + Omega^2),   Phi = P / (hbar omega).
struct FeasibilityNumbers {
  double omega_b = 0.0;          // probe angular frequency, rad/s
  double photon_flux = 0.0;      // Phi, photons/s
  double rabi = 0.0;             // Omega, rad/s
  double mode_factor = 0.0;      // A
  double lorentz_factor = 0.0;   // K
  double measurement_rate = 0.0; // M, 1/s
  double m_over_kappa = 0.0;
  double strong_coupling = 0.0;  // sqrt(N) g0^2 / (Gamma kappa)
};

// The same inputs under both frequency readings. as_declared honors each
// rate's printed convention; all_ordinary re-reads every printed number as
// cycles/s. The two disagree in M by exactly (2 pi)^2 when detuning and
// kappa are declared angular, which is the sensitivity being surfaced.
struct FeasibilityReport {
  FeasibilityNumbers as_declared{};
  FeasibilityNumbers all_ordinary{};
  double kappa_geometry = 0.0;  // rad/s; 0 when geometry was not given
};

FeasibilityReport feasibility(const QEDParams& qed);

// Scaled simulation parameters implied by the as-declared evaluation:
// M = 1, kappa in units of M, efficiency and gain carried over. Numerics
// (dt, t_final, n_star, n_max, strides, seed, initial state) come from base.
SimParams to_sim_params(const QEDParams& qed, const SimParams& base);

}  // namespace numstab
