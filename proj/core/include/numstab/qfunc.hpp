#pragma once

#include <string>
#include <vector>

#include "numstab/fock.hpp"

namespace numstab {

// Phase-space convention: Q(alpha) = <beta|rho|beta>/pi evaluated at
// beta = alpha/2, so the vacuum reads exp(-|alpha|^2/4)/pi and a coherent
// state of amplitude b peaks at alpha = 2b. The tag below is stamped into
// every exported grid so downstream plots know which scaling they hold.
inline constexpr const char* kQConventionTag = "paper-quarter-exponent";

struct QGridSpec {
  int nx = 201;
  int ny = 201;
  // Half width of the square grid in alpha units; 0 picks 2*(sqrt(n_max)+3),
  // wide enough that the normalization deficit stays below 1e-4.
  double half_width = 0.0;
};

struct QGrid {
  std::vector<double> x;  // Re(alpha) axis
  std::vector<double> y;  // Im(alpha) axis
  Eigen::MatrixXd values; // values(i, j) = Q(x[i] + i*y[j])
  std::string convention_tag = kQConventionTag;
};

// Throws std::invalid_argument when the grid clips the state (normalization
// deficit above 1e-4) or the grid spec is degenerate.
QGrid q_function(const DensityMatrix& rho, const QGridSpec& spec = {});

enum class DistanceMethod { kGridQuadrature, kFockDiagonal };

struct DistanceReport {
  double value = 0.0;
  DistanceMethod method = DistanceMethod::kFockDiagonal;
  int n_star = 0;
  double normalization_used = 0.0;    // calibrated: distance(|n*><n*|) == 0
  double literal_normalization = 0.0; // 1/(pi 4^{n*+1} n*!), for comparison
};

// Diagonal weights of the distance functional: distance = 1 - sum_m w_m rho_mm.
// The kernel |alpha|^{2s} e^{-|alpha|^2/4} against Q_m reduces, after the
// angular integral kills off-diagonal terms, to a radial Gamma integral
//   I_m = integral = 2^{s+1} (s+m)! / (m! 2^m)  (s = n_star),
// and calibration divides by I_s so that w_s = 1:
//   w_m = 2^{s-m} (s+m)! s! / ((2s)! m!).
// Note w_{s-1} = w_s = 1: the kernel cannot separate the target from the
// state one level below it, so both read zero distance. Callers that need
// the raw weights (hot loops, diagnostics) should use this directly.
std::vector<double> distance_weights(int n_star, int n_max);

// Distance of rho from the target number state n_star, in [0, 1] on states
// within the truncation. kFockDiagonal is closed-form and cheap; the
// quadrature route integrates the defining functional on a grid and agrees
// with the closed form to 1e-6 at the default resolution.
DistanceReport distance(const DensityMatrix& rho, int n_star,
                        DistanceMethod method = DistanceMethod::kFockDiagonal,
                        const QGridSpec& grid = {});

double number_fidelity(const DensityMatrix& rho, int m);
Eigen::VectorXd photon_distribution(const DensityMatrix& rho);

}  // namespace numstab
