#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "numstab/fock.hpp"

namespace numstab {

enum class InitialStateKind { kVacuum, kCoherent, kNumber };

struct InitialState {
  InitialStateKind kind = InitialStateKind::kVacuum;
  Complex amplitude{0.0, 0.0};
  int level = 0;

  static InitialState vacuum() { return {}; }
  static InitialState coherent(Complex amp) {
    return {InitialStateKind::kCoherent, amp, 0};
  }
  static InitialState number(int m) {
    return {InitialStateKind::kNumber, {0.0, 0.0}, m};
  }
  DensityMatrix realize(const HilbertConfig& cfg) const;
};

// All rates are in the measurement-scaled time base (typically M = 1 and
// time measured in units of 1/M). measurement_rate = 0 switches the probe
// off entirely (no conditioning, photocurrent is bare noise).
struct SimParams {
  double measurement_rate = 1.0;  // M
  double kappa = 0.0;             // cavity energy decay rate
  double eta = 1.0;               // detection efficiency in (0, 1]
  double gain = 20.0;             // feedback gain G
  int n_star = 2;                 // target occupation
  bool feedback_enabled = true;
  double dt = 1e-3;
  double t_final = 10.0;
  int n_max = -1;                 // -1 -> default_n_max(n_star)
  std::uint64_t seed = 0;
  InitialState initial_state{};
  int record_stride = 1;
  std::vector<double> snapshot_times{};
  // Cadence of the exact smallest-eigenvalue check that decides validity.
  // Between checkpoints only the cheap min-diagonal diagnostic runs. The
  // step map is completely positive up to rounding, so a breach signals a
  // serious configuration problem rather than routine integrator error.
  int positivity_check_stride = 100;

  HilbertConfig space() const;
  int total_steps() const;
  void validate() const;  // throws std::invalid_argument
};

struct StepDiagnostics {
  double trace_drift = 0.0;       // |tr - 1| before renormalization
  double min_eig_estimate = 0.0;  // min diagonal, or exact value at the stride
};

struct StepResult {
  DensityMatrix rho_next;
  double dy = 0.0;
  double error_signal = 0.0;
  StepDiagnostics diagnostics{};
  bool valid = true;
  std::string failure_reason{};
};

// One update of the conditioned state over dt, weakly first-order in
//   drho = -i[G e X, rho] dt + M D[n] rho dt + kappa D[a] rho dt
//          + sqrt(M) H[n] rho (dy - 2 eta sqrt(M) <n> dt)
// with dy = 2 eta sqrt(M) <n> dt + sqrt(eta) dW synthesized from the passed
// Wiener increment, followed by hermitization and trace renormalization.
// Each substep is a completely positive map, so the state cannot leave the
// positive cone (a raw first-order update of the same equation does, badly,
// once G e dt or the conditioning kick is not small):
//   1. measurement conditioning and dephasing, entrywise by the exact
//      one-step factors exp[b_j dW - b_j^2 dt] with b_j = sqrt(M eta)(j - <n>)
//      plus the Gaussian kernel exp[-(1-eta) M (j-k)^2 dt / 2], which solve
//      the measurement part of the equation exactly at frozen <n>;
//   2. cavity decay as the no-jump factor exp[-kappa j dt / 2] and a
//      first-order jump branch kappa dt a rho a†;
//   3. the feedback commutator as its exact unitary, the Cayley transform
//      of G e X dt.
// Convenience wrapper over Stepper; rebuilds the factor tables per call,
// and always runs the exact positivity check.
StepResult step(const DensityMatrix& rho, const SimParams& p, double dW);

// Reusable stepper for one HilbertConfig. The measured operator is diagonal,
// so every substep acts entrywise or on index-shifted entries of rho and one
// update costs O(dim^2) with no matrix products. advance() mutates rho in
// place.
class Stepper {
 public:
  explicit Stepper(const SimParams& p);

  struct Outcome {
    double dy = 0.0;
    double error_signal = 0.0;
    double drive = 0.0;  // G * e actually applied (0 when feedback is off)
    StepDiagnostics diagnostics{};
    bool valid = true;
  };

  // force_exact_check runs the eigensolve this step regardless of the
  // checkpoint stride (used for the final step of a trajectory).
  Outcome advance(CMatrix& rho, double dW, bool force_exact_check = false);
  const std::string& failure_reason() const { return failure_; }
  long steps_taken() const { return steps_; }

 private:
  void apply_drive(CMatrix& rho, double theta);

  SimParams p_;
  int dim_;
  double sqrt_m_;
  double sqrt_eta_;
  Eigen::VectorXd sqrt_level_;  // sqrt(j), j = 0..dim
  Eigen::VectorXd gfac_;        // per-level conditioning factors, per step
  Eigen::VectorXd deph_;        // residual dephasing kernel by |j - k|
  CMatrix scratch_;
  CVector tri_w_, tri_m_;  // Thomas factor workspaces for the drive solve
  long steps_ = 0;
  std::string failure_{};
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> dy;        // photocurrent increment summed per window
  std::vector<double> n_est;     // tr(n rho)
  std::vector<double> n_var;
  std::vector<double> distance;  // target-distance series (see qfunc)
  std::vector<double> drive;     // applied G * e
  DensityMatrix final_state{};
  bool valid = true;
  std::string failure_reason{};
  std::vector<std::pair<double, DensityMatrix>> snapshots;
};

// Integrates one trajectory with noise stream (p.seed, 0). Identical params
// and seed give a bit-identical record. On invalidation the record is
// truncated at the failing step and valid is false.
TrajectoryRecord simulate_trajectory(const SimParams& p);

// Ensemble entry point: noise stream (master_seed, stream_index).
TrajectoryRecord simulate_trajectory_stream(const SimParams& p,
                                            std::uint64_t master_seed,
                                            std::uint64_t stream_index);

}  // namespace numstab
