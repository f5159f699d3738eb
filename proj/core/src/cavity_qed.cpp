#include "numstab/cavity_qed.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace numstab {

namespace {

constexpr double kHbar = 1.054571817e-34;      // J s
constexpr double kSpeedOfLight = 2.99792458e8; // m/s

}  // namespace

AtomLine cesium_d2() {
  return AtomLine{RateQuantity{5.2227e6, FreqConvention::kOrdinary}};
}

void QEDParams::validate() const {
  if (probe_power <= 0.0) {
    throw std::invalid_argument("QEDParams: probe power must be positive");
  }
  if (wavelength <= 0.0) {
    throw std::invalid_argument("QEDParams: wavelength must be positive");
  }
  if (detuning.printed == 0.0) {
    throw std::invalid_argument("QEDParams: detuning must be nonzero");
  }
  if (beam_radius <= 0.0) {
    throw std::invalid_argument("QEDParams: beam radius must be positive");
  }
  if (atom_count <= 0.0) {
    throw std::invalid_argument("QEDParams: atom count must be positive");
  }
  if (saturation <= 0.0) {
    throw std::invalid_argument("QEDParams: saturation must be positive");
  }
  if (g0.printed <= 0.0) {
    throw std::invalid_argument("QEDParams: coupling g0 must be positive");
  }
  if (kappa.printed <= 0.0) {
    throw std::invalid_argument("QEDParams: kappa must be positive");
  }
  if (detection_efficiency <= 0.0 || detection_efficiency > 1.0) {
    throw std::invalid_argument(
        "QEDParams: detection efficiency must lie in (0, 1]");
  }
  if (gain < 0.0) {
    throw std::invalid_argument("QEDParams: gain must be >= 0");
  }
  if (atom.gamma.printed <= 0.0) {
    throw std::invalid_argument("QEDParams: atomic linewidth must be positive");
  }
  if ((cavity_length > 0.0) != (finesse > 0.0)) {
    throw std::invalid_argument(
        "QEDParams: cavity length and finesse must be given together");
  }
}

double optical_angular_frequency(double wavelength) {
  return 2.0 * std::numbers::pi * kSpeedOfLight / wavelength;
}

double rabi_frequency(double gamma, double saturation) {
  return gamma * std::sqrt(0.5 * saturation);
}

double kappa_from_geometry(double length, double finesse) {
  if (length <= 0.0 || finesse <= 0.0) {
    throw std::invalid_argument("kappa_from_geometry: need positive inputs");
  }
  return std::numbers::pi * kSpeedOfLight / (2.0 * length * finesse);
}

namespace {

// One pass of the feasibility arithmetic with rates read by `read`.
template <typename Reader>
FeasibilityNumbers evaluate(const QEDParams& q, Reader read) {
  FeasibilityNumbers out;
  out.omega_b = optical_angular_frequency(q.wavelength);
  out.photon_flux = q.probe_power / (kHbar * out.omega_b);
  const double gamma = read(q.atom.gamma);
  const double delta = std::abs(read(q.detuning));
  const double g = read(q.g0);
  const double kap = read(q.kappa);
  out.rabi = rabi_frequency(gamma, q.saturation);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  out.mode_factor = 3.0 * q.atom_count * q.wavelength * q.wavelength /
                    (4.0 * pi2 * q.beam_radius * q.beam_radius) *
                    (gamma / delta);
  out.lorentz_factor = g * g / (g * g + out.rabi * out.rabi);
  const double ak = out.mode_factor * out.lorentz_factor;
  out.measurement_rate = out.photon_flux * ak * ak;
  out.m_over_kappa = out.measurement_rate / kap;
  out.strong_coupling = std::sqrt(q.atom_count) * g * g / (gamma * kap);
  return out;
}

}  // namespace

FeasibilityReport feasibility(const QEDParams& qed) {
  qed.validate();
  FeasibilityReport rep;
  rep.as_declared =
      evaluate(qed, [](const RateQuantity& r) { return r.angular(); });
  rep.all_ordinary = evaluate(
      qed, [](const RateQuantity& r) { return r.angular_if_ordinary(); });
  if (qed.cavity_length > 0.0 && qed.finesse > 0.0) {
    rep.kappa_geometry = kappa_from_geometry(qed.cavity_length, qed.finesse);
  }
  return rep;
}

SimParams to_sim_params(const QEDParams& qed, const SimParams& base) {
  FeasibilityReport rep = feasibility(qed);
  SimParams p = base;
  p.measurement_rate = 1.0;
  p.kappa = qed.kappa.angular() / rep.as_declared.measurement_rate;
  p.eta = qed.detection_efficiency;
  p.gain = qed.gain;
  return p;
}

}  // namespace numstab
