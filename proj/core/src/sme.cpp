#include "numstab/sme.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "numstab/qfunc.hpp"
#include "numstab/rng.hpp"

namespace numstab {

namespace {

// A negative eigenvalue excursion past this floor, or tail population above
// this ceiling, invalidates the trajectory instead of being repaired.
constexpr double kPositivityFloor = -1e-6;
constexpr double kTailCeiling = 1e-6;

}  // namespace

DensityMatrix InitialState::realize(const HilbertConfig& cfg) const {
  switch (kind) {
    case InitialStateKind::kVacuum:
      return DensityMatrix::vacuum(cfg);
    case InitialStateKind::kCoherent:
      return DensityMatrix::coherent(amplitude, cfg);
    case InitialStateKind::kNumber:
      return DensityMatrix::number(level, cfg);
  }
  throw std::invalid_argument("InitialState: unknown kind");
}

HilbertConfig SimParams::space() const {
  return HilbertConfig(n_max < 0 ? default_n_max(n_star) : n_max);
}

int SimParams::total_steps() const {
  return std::max(1, static_cast<int>(std::llround(t_final / dt)));
}

void SimParams::validate() const {
  if (measurement_rate < 0.0) {
    throw std::invalid_argument("SimParams: measurement rate must be >= 0");
  }
  if (kappa < 0.0) {
    throw std::invalid_argument("SimParams: kappa must be >= 0");
  }
  if (eta <= 0.0 || eta > 1.0) {
    throw std::invalid_argument("SimParams: eta must lie in (0, 1]");
  }
  if (gain < 0.0) {
    throw std::invalid_argument("SimParams: gain must be >= 0");
  }
  if (n_star < 0) {
    throw std::invalid_argument("SimParams: n_star must be >= 0");
  }
  if (dt <= 0.0 || t_final < dt) {
    throw std::invalid_argument("SimParams: need 0 < dt <= t_final");
  }
  double fastest = std::max(measurement_rate, kappa);
  if (dt * fastest > 1e-2 * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "SimParams: dt * max(M, kappa) = " + std::to_string(dt * fastest) +
        " exceeds 1e-2; shrink the step");
  }
  HilbertConfig cfg = space();
  if (n_star > cfg.n_max - truncation_headroom(n_star)) {
    throw std::invalid_argument(
        "SimParams: n_max " + std::to_string(cfg.n_max) +
        " leaves no tail headroom above n_star " + std::to_string(n_star));
  }
  if (record_stride < 1 || positivity_check_stride < 1) {
    throw std::invalid_argument("SimParams: strides must be >= 1");
  }
  for (double ts : snapshot_times) {
    if (ts < 0.0 || ts > t_final + dt) {
      throw std::invalid_argument("SimParams: snapshot time outside run");
    }
  }
}

Stepper::Stepper(const SimParams& p) : p_(p), dim_(p.space().dim()) {
  sqrt_m_ = std::sqrt(p_.measurement_rate);
  sqrt_eta_ = std::sqrt(p_.eta);
  sqrt_level_.resize(dim_ + 1);
  for (int j = 0; j <= dim_; ++j) {
    sqrt_level_(j) = std::sqrt(static_cast<double>(j));
  }
  gfac_.resize(dim_);
  // Dephasing not matched by detected information, exp[-(1-eta) M m^2 dt/2]
  // for coherences m levels apart. All ones at unit efficiency.
  deph_.resize(dim_);
  const double resid = 0.5 * (1.0 - p_.eta) * p_.measurement_rate * p_.dt;
  for (int m = 0; m < dim_; ++m) {
    deph_(m) = std::exp(-resid * m * m);
  }
  scratch_.resize(dim_, dim_);
  tri_w_.resize(dim_);
  tri_m_.resize(dim_);
}

namespace {

// T(theta) = I + i (theta/2) X is tridiagonal with couplings
// u_j = i theta sqrt(j+1) / 4 between levels j and j+1.
Complex coupling(const Eigen::VectorXd& s, double theta, int j) {
  return Complex(0.0, 0.25 * theta * s(j + 1));
}

// out = T(theta) * m (left) or m * T(theta) (right).
void tri_mul(const Eigen::VectorXd& s, double theta, const CMatrix& m,
             CMatrix& out, bool left) {
  const int d = static_cast<int>(m.rows());
  out = m;
  for (int j = 0; j + 1 < d; ++j) {
    const Complex u = coupling(s, theta, j);
    if (left) {
      out.row(j) += u * m.row(j + 1);
      out.row(j + 1) += u * m.row(j);
    } else {
      out.col(j) += u * m.col(j + 1);
      out.col(j + 1) += u * m.col(j);
    }
  }
}

// In-place solve T(theta) m = rhs over the columns of m (Thomas algorithm;
// T has unit diagonal and is diagonally dominant at the step sizes the
// parameter validation admits, so no pivoting is needed). Pivot reciprocals
// are factored once and reused across columns.
void tri_solve_left(const Eigen::VectorXd& s, double theta, CMatrix& m,
                    CVector& w, CVector& pinv) {
  const int d = static_cast<int>(m.rows());
  Complex piv(1.0, 0.0);
  pinv(0) = 1.0;
  for (int j = 1; j < d; ++j) {
    const Complex u = coupling(s, theta, j - 1);
    w(j) = u * pinv(j - 1);
    piv = 1.0 - w(j) * u;
    pinv(j) = 1.0 / piv;
  }
  for (int k = 0; k < d; ++k) {
    for (int j = 1; j < d; ++j) {
      m(j, k) -= w(j) * m(j - 1, k);
    }
    m(d - 1, k) *= pinv(d - 1);
    for (int j = d - 2; j >= 0; --j) {
      m(j, k) = (m(j, k) - coupling(s, theta, j) * m(j + 1, k)) * pinv(j);
    }
  }
}

}  // namespace

// rho <- U rho U† with U = T(-theta) T(theta)^{-1}, the Cayley transform of
// the feedback generator. U is exactly unitary, so the drive can never push
// the state out of the positive cone the way a raw first-order commutator
// update does when G e dt is not small.
void Stepper::apply_drive(CMatrix& rho, double theta) {
  // Right-side factors act on the transpose, where they become left-side
  // solves against the same symmetric T.
  tri_solve_left(sqrt_level_, theta, rho, tri_w_, tri_m_);
  scratch_ = rho.transpose();
  tri_solve_left(sqrt_level_, -theta, scratch_, tri_w_, tri_m_);
  rho = scratch_.transpose();
  tri_mul(sqrt_level_, -theta, rho, scratch_, true);
  tri_mul(sqrt_level_, theta, scratch_, rho, false);
}

Stepper::Outcome Stepper::advance(CMatrix& rho, double dW,
                                  bool force_exact_check) {
  Outcome out;
  const int d = dim_;
  const double kap = p_.kappa;
  const double dt = p_.dt;

  double n_mean = 0.0;
  for (int j = 0; j < d; ++j) {
    n_mean += j * rho(j, j).real();
  }
  out.error_signal = p_.n_star - n_mean;
  out.dy = 2.0 * p_.eta * sqrt_m_ * n_mean * dt + sqrt_eta_ * dW;

  const bool driven = p_.feedback_enabled && p_.gain != 0.0;
  out.drive = driven ? p_.gain * out.error_signal : 0.0;

  // Conditioning, dephasing, and the no-jump half of decay in one entrywise
  // factor per level. exp[b dW - b^2 dt] with b = sqrt(M eta)(j - <n>) is the
  // exact one-step solution of the measurement terms at frozen <n>; its
  // rank-one structure over (j, k) makes the map completely positive. The
  // exponent peaks at dW^2/(4 dt) regardless of parameters, so it cannot
  // overflow.
  const double cond = sqrt_m_ * sqrt_eta_;
  for (int j = 0; j < d; ++j) {
    const double b = cond * (j - n_mean);
    gfac_(j) = std::exp(b * dW - b * b * dt - 0.5 * kap * j * dt);
  }

  // Ascending order keeps rho(j+1, k+1) unread when rho(j, k) is written,
  // so the decay jump branch can feed from the pre-step state in place.
  const double* s = sqrt_level_.data();
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j < d; ++j) {
      Complex r = gfac_(j) * gfac_(k) * deph_(std::abs(j - k)) * rho(j, k);
      if (kap != 0.0 && j + 1 < d && k + 1 < d) {
        r += kap * dt * s[j + 1] * s[k + 1] * rho(j + 1, k + 1);
      }
      rho(j, k) = r;
    }
  }

  const double theta = out.drive * dt;
  if (driven && theta != 0.0) {
    apply_drive(rho, theta);
  }

  scratch_ = rho.adjoint();
  rho += scratch_;
  rho *= 0.5;

  double trace = 0.0;
  for (int j = 0; j < d; ++j) {
    trace += rho(j, j).real();
  }
  out.diagnostics.trace_drift = std::abs(trace - 1.0);
  rho /= trace;

  ++steps_;
  double min_diag = rho(0, 0).real();
  for (int j = 1; j < d; ++j) {
    min_diag = std::min(min_diag, rho(j, j).real());
  }
  out.diagnostics.min_eig_estimate = min_diag;

  if (force_exact_check || steps_ % p_.positivity_check_stride == 0) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    out.diagnostics.min_eig_estimate = min_eig;
    if (min_eig < kPositivityFloor) {
      failure_ = "positivity breach: estimated min eigenvalue " +
                 std::to_string(min_eig) + " at step " +
                 std::to_string(steps_) + " (dt too large for this regime)";
      out.valid = false;
      return out;
    }
  }
  if (rho(d - 1, d - 1).real() > kTailCeiling) {
    failure_ = "truncation tail overflow: population " +
               std::to_string(rho(d - 1, d - 1).real()) + " at n_max " +
               std::to_string(d - 1) + " (raise n_max)";
    out.valid = false;
    return out;
  }
  return out;
}

StepResult step(const DensityMatrix& rho, const SimParams& p, double dW) {
  p.validate();
  if (rho.dim() != p.space().dim()) {
    throw std::invalid_argument("step: state dimension does not match params");
  }
  Stepper st(p);
  CMatrix m = rho.mat();
  Stepper::Outcome out = st.advance(m, dW, true);
  StepResult res{DensityMatrix(std::move(m)), out.dy,         out.error_signal,
                 out.diagnostics,             out.valid,      st.failure_reason()};
  return res;
}

namespace {

struct RowStats {
  double n_mean, n_var, dist, drive;
};

RowStats row_stats(const CMatrix& rho, const SimParams& p,
                   const std::vector<double>& weights) {
  RowStats rs{};
  double m1 = 0.0, m2 = 0.0, overlap = 0.0;
  for (int j = 0; j < rho.rows(); ++j) {
    double pop = rho(j, j).real();
    m1 += j * pop;
    m2 += static_cast<double>(j) * j * pop;
    overlap += weights[static_cast<std::size_t>(j)] * pop;
  }
  rs.n_mean = m1;
  rs.n_var = m2 - m1 * m1;
  rs.dist = 1.0 - overlap;
  rs.drive = p.feedback_enabled ? p.gain * (p.n_star - m1) : 0.0;
  return rs;
}

}  // namespace

TrajectoryRecord simulate_trajectory_stream(const SimParams& p,
                                            std::uint64_t master_seed,
                                            std::uint64_t stream_index) {
  p.validate();
  HilbertConfig cfg = p.space();
  CMatrix rho = p.initial_state.realize(cfg).mat();
  std::vector<double> weights = distance_weights(p.n_star, cfg.n_max);

  const int total = p.total_steps();
  const int stride = p.record_stride;
  TrajectoryRecord rec;
  std::size_t expect = static_cast<std::size_t>(total / stride) + 2;
  rec.times.reserve(expect);
  rec.dy.reserve(expect);
  rec.n_est.reserve(expect);
  rec.n_var.reserve(expect);
  rec.distance.reserve(expect);
  rec.drive.reserve(expect);

  std::vector<double> snaps = p.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t snap_i = 0;
  while (snap_i < snaps.size() && snaps[snap_i] <= 0.0) {
    rec.snapshots.emplace_back(0.0, DensityMatrix(rho));
    ++snap_i;
  }

  auto push_row = [&](double t, double dy_window) {
    RowStats rs = row_stats(rho, p, weights);
    rec.times.push_back(t);
    rec.dy.push_back(dy_window);
    rec.n_est.push_back(rs.n_mean);
    rec.n_var.push_back(rs.n_var);
    rec.distance.push_back(rs.dist);
    rec.drive.push_back(rs.drive);
  };
  push_row(0.0, 0.0);

  Stepper st(p);
  CounterRng rng(master_seed, stream_index);
  const double sqrt_dt = std::sqrt(p.dt);
  double dy_acc = 0.0;

  for (int k = 1; k <= total; ++k) {
    double dW = rng.gaussian() * sqrt_dt;
    Stepper::Outcome out = st.advance(rho, dW, k == total);
    dy_acc += out.dy;
    double t = k * p.dt;
    if (!out.valid) {
      rec.valid = false;
      rec.failure_reason = st.failure_reason();
      break;
    }
    while (snap_i < snaps.size() && t >= snaps[snap_i] - 1e-12) {
      rec.snapshots.emplace_back(t, DensityMatrix(rho));
      ++snap_i;
    }
    if (k % stride == 0 || k == total) {
      push_row(t, dy_acc);
      dy_acc = 0.0;
    }
  }
  rec.final_state = DensityMatrix(rho);
  return rec;
}

TrajectoryRecord simulate_trajectory(const SimParams& p) {
  return simulate_trajectory_stream(p, p.seed, 0);
}

}  // namespace numstab
