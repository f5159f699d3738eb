#pragma once

#include <complex>

#include <Eigen/Dense>

namespace numstab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Truncated single-mode Fock space spanning |0>..|n_max>.
struct HilbertConfig {
  explicit HilbertConfig(int n_max);
  int n_max;
  int dim() const { return n_max + 1; }
};

// Tail headroom above the target occupation. Sized so that a Poissonian state
// at mean n_star keeps negligible weight at the truncation edge.
int truncation_headroom(int n_star);
int default_n_max(int n_star);

// Ladder and quadrature operators on the truncated space.
// annihilation_op: <m|a|m+1> = sqrt(m+1); quadrature_x_op = (a + a†)/2.
CMatrix annihilation_op(const HilbertConfig& cfg);
CMatrix creation_op(const HilbertConfig& cfg);
CMatrix number_op(const HilbertConfig& cfg);
CMatrix quadrature_x_op(const HilbertConfig& cfg);

class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(CMatrix rho);

  static DensityMatrix vacuum(const HilbertConfig& cfg);
  static DensityMatrix number(int m, const HilbertConfig& cfg);
  // c_n = exp(-|amp|^2/2) amp^n / sqrt(n!), renormalized after truncation.
  // Warns on std::clog when the truncated norm deficit exceeds 1e-6.
  static DensityMatrix coherent(Complex amplitude, const HilbertConfig& cfg);
  static DensityMatrix from_pure(const CVector& psi);

  const CMatrix& mat() const { return rho_; }
  CMatrix& mat() { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }

  double trace_defect() const;       // |tr(rho) - 1|
  double hermiticity_defect() const; // max |rho - rho†|
  double min_eigenvalue() const;     // exact (self-adjoint solve)
  double purity() const;             // tr(rho^2)
  Eigen::VectorXd populations() const;

  // Throws std::invalid_argument when a tolerance is violated. The eigenvalue
  // floor is a diagnostic bound, not a per-step constraint of the integrator.
  void validate(double herm_tol = 1e-10, double trace_tol = 1e-9,
                double eig_floor = -1e-8) const;

 private:
  CMatrix rho_;
};

// D[r]rho = r rho r† - (r†r rho + rho r†r)/2. Trace-free for any r.
CMatrix lindblad_d(const CMatrix& r, const CMatrix& rho);

// H[r]rho = r rho + rho r† - tr[(r + r†) rho] rho. Trace-free by construction.
CMatrix measurement_h(const CMatrix& r, const CMatrix& rho);

Complex expectation(const CMatrix& op, const DensityMatrix& rho);
// Expectation of a Hermitian operator; throws if |imag| > 1e-10.
double real_expectation(const CMatrix& op, const DensityMatrix& rho);

double mean_n(const DensityMatrix& rho);
double var_n(const DensityMatrix& rho);

}  // namespace numstab
