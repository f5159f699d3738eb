#include "numstab/fock.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace numstab {

HilbertConfig::HilbertConfig(int n_max_) : n_max(n_max_) {
  if (n_max < 1) {
    throw std::invalid_argument("HilbertConfig: n_max must be >= 1, got " +
                                std::to_string(n_max));
  }
}

int truncation_headroom(int n_star) {
  int spread = static_cast<int>(std::ceil(6.0 * std::sqrt(n_star + 1.0)));
  return std::max(10, spread);
}

int default_n_max(int n_star) { return n_star + truncation_headroom(n_star); }

CMatrix annihilation_op(const HilbertConfig& cfg) {
  CMatrix a = CMatrix::Zero(cfg.dim(), cfg.dim());
  for (int m = 0; m + 1 < cfg.dim(); ++m) {
    a(m, m + 1) = std::sqrt(m + 1.0);
  }
  return a;
}

CMatrix creation_op(const HilbertConfig& cfg) {
  return annihilation_op(cfg).adjoint();
}

CMatrix number_op(const HilbertConfig& cfg) {
  CMatrix n = CMatrix::Zero(cfg.dim(), cfg.dim());
  for (int m = 0; m < cfg.dim(); ++m) {
    n(m, m) = static_cast<double>(m);
  }
  return n;
}

CMatrix quadrature_x_op(const HilbertConfig& cfg) {
  CMatrix a = annihilation_op(cfg);
  return 0.5 * (a + a.adjoint());
}

DensityMatrix::DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() < 1) {
    throw std::invalid_argument("DensityMatrix: matrix must be square");
  }
}

DensityMatrix DensityMatrix::vacuum(const HilbertConfig& cfg) {
  return number(0, cfg);
}

DensityMatrix DensityMatrix::number(int m, const HilbertConfig& cfg) {
  if (m < 0 || m > cfg.n_max) {
    throw std::invalid_argument("number state level " + std::to_string(m) +
                                " outside truncation n_max=" +
                                std::to_string(cfg.n_max));
  }
  CMatrix rho = CMatrix::Zero(cfg.dim(), cfg.dim());
  rho(m, m) = 1.0;
  return DensityMatrix(rho);
}

DensityMatrix DensityMatrix::coherent(Complex amplitude,
                                      const HilbertConfig& cfg) {
  CVector psi(cfg.dim());
  psi(0) = std::exp(-0.5 * std::norm(amplitude));
  for (int m = 1; m < cfg.dim(); ++m) {
    psi(m) = psi(m - 1) * amplitude / std::sqrt(static_cast<double>(m));
  }
  double captured = psi.squaredNorm();
  double deficit = 1.0 - captured;
  if (deficit > 1e-6) {
    std::clog << "coherent state |amp|^2=" << std::norm(amplitude)
              << " loses " << deficit << " norm at n_max=" << cfg.n_max
              << "; raise the truncation\n";
  }
  psi /= std::sqrt(captured);
  return from_pure(psi);
}

DensityMatrix DensityMatrix::from_pure(const CVector& psi) {
  double n2 = psi.squaredNorm();
  if (n2 <= 0.0) {
    throw std::invalid_argument("from_pure: zero state vector");
  }
  return DensityMatrix(CMatrix(psi * psi.adjoint() / n2));
}

double DensityMatrix::trace_defect() const {
  return std::abs(rho_.trace() - Complex(1.0, 0.0));
}

double DensityMatrix::hermiticity_defect() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::purity() const { return rho_.squaredNorm(); }

Eigen::VectorXd DensityMatrix::populations() const {
  return rho_.diagonal().real();
}

void DensityMatrix::validate(double herm_tol, double trace_tol,
                             double eig_floor) const {
  double h = hermiticity_defect();
  if (h > herm_tol) {
    throw std::invalid_argument("density matrix hermiticity defect " +
                                std::to_string(h));
  }
  double t = trace_defect();
  if (t > trace_tol) {
    throw std::invalid_argument("density matrix trace defect " +
                                std::to_string(t));
  }
  double lo = min_eigenvalue();
  if (lo < eig_floor) {
    throw std::invalid_argument("density matrix minimum eigenvalue " +
                                std::to_string(lo));
  }
}

CMatrix lindblad_d(const CMatrix& r, const CMatrix& rho) {
  CMatrix rr = r.adjoint() * r;
  return r * rho * r.adjoint() - 0.5 * (rr * rho + rho * rr);
}

CMatrix measurement_h(const CMatrix& r, const CMatrix& rho) {
  Complex mean = ((r + r.adjoint()) * rho).trace();
  return r * rho + rho * r.adjoint() - mean * rho;
}

Complex expectation(const CMatrix& op, const DensityMatrix& rho) {
  return (op * rho.mat()).trace();
}

double real_expectation(const CMatrix& op, const DensityMatrix& rho) {
  Complex v = expectation(op, rho);
  if (std::abs(v.imag()) > 1e-10) {
    throw std::invalid_argument(
        "expectation has imaginary part " + std::to_string(v.imag()) +
        "; operator not Hermitian or state invalid");
  }
  return v.real();
}

double mean_n(const DensityMatrix& rho) {
  double s = 0.0;
  for (int j = 0; j < rho.dim(); ++j) {
    s += j * rho.mat()(j, j).real();
  }
  return s;
}

double var_n(const DensityMatrix& rho) {
  double m1 = 0.0;
  double m2 = 0.0;
  for (int j = 0; j < rho.dim(); ++j) {
    double p = rho.mat()(j, j).real();
    m1 += j * p;
    m2 += static_cast<double>(j) * j * p;
  }
  return m2 - m1 * m1;
}

}  // namespace numstab
