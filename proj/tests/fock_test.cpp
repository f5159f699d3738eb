#include "numstab/fock.hpp"

#include <cmath>

#include "doctest.h"
#include "support/random_state.hpp"

using namespace numstab;

TEST_CASE("truncation headroom covers a Poisson tail above the target") {
  CHECK(truncation_headroom(0) == 10);
  CHECK(truncation_headroom(2) == 11);  // ceil(6 sqrt(3))
  CHECK(default_n_max(2) == 13);
  for (int n = 0; n < 40; ++n) {
    CHECK(default_n_max(n + 1) >= default_n_max(n));
    CHECK(default_n_max(n) >= n + 10);
  }
}

TEST_CASE("ladder operators act on basis vectors with sqrt factors") {
  HilbertConfig cfg(6);
  CMatrix a = annihilation_op(cfg);
  CMatrix ad = creation_op(cfg);
  CMatrix n = number_op(cfg);

  CVector e2 = CVector::Zero(cfg.dim());
  e2(2) = 1.0;

  CVector lowered = a * e2;
  CHECK(std::abs(lowered(1) - std::sqrt(2.0)) < 1e-15);
  CHECK(lowered.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  CVector counted = n * e2;
  CHECK(std::abs(counted(2) - 2.0) < 1e-15);

  CHECK((ad - a.adjoint()).norm() < 1e-15);
  CHECK((n - ad * a).norm() < 1e-14);

  // X = (a + a†)/2, Hermitian with sqrt(j+1)/2 couplings.
  CMatrix x = quadrature_x_op(cfg);
  CHECK((x - x.adjoint()).norm() < 1e-15);
  CHECK(std::abs(x(1, 2) - 0.5 * std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("density matrix factories produce unit-trace positive states") {
  HilbertConfig cfg(14);

  DensityMatrix vac = DensityMatrix::vacuum(cfg);
  CHECK(vac.populations()(0) == doctest::Approx(1.0).epsilon(1e-15));
  vac.validate();

  DensityMatrix three = DensityMatrix::number(3, cfg);
  CHECK(three.populations()(3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mean_n(three) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(var_n(three) == doctest::Approx(0.0).epsilon(1e-12));

  DensityMatrix coh = DensityMatrix::coherent(Complex(1.2, -0.4), cfg);
  coh.validate();
  const double nbar = 1.2 * 1.2 + 0.4 * 0.4;
  CHECK(mean_n(coh) == doctest::Approx(nbar).epsilon(1e-6));
  CHECK(var_n(coh) == doctest::Approx(nbar).epsilon(1e-4));
  // Populations are Poissonian despite the truncation renormalization.
  Eigen::VectorXd pops = coh.populations();
  CHECK(pops(0) == doctest::Approx(std::exp(-nbar)).epsilon(1e-5));
  CHECK(pops(2) / pops(1) == doctest::Approx(nbar / 2.0).epsilon(1e-6));
}

TEST_CASE("number factory rejects levels outside the space") {
  HilbertConfig cfg(5);
  CHECK_THROWS_AS(DensityMatrix::number(6, cfg), std::invalid_argument);
  CHECK_THROWS_AS(DensityMatrix::number(-1, cfg), std::invalid_argument);
}

TEST_CASE("dissipator and conditioning superoperators are trace free") {
  const int dim = 9;
  DensityMatrix rho = teststat::random_density(dim, 2024);
  CMatrix a = annihilation_op(HilbertConfig(dim - 1));
  CMatrix n = number_op(HilbertConfig(dim - 1));
  CMatrix r = teststat::random_matrix(dim, 77);

  for (const CMatrix* op : {&a, &n, &r}) {
    CHECK(std::abs(lindblad_d(*op, rho.mat()).trace()) < 1e-12);
    CHECK(std::abs(measurement_h(*op, rho.mat()).trace()) < 1e-12);
  }
}

TEST_CASE("dissipator moves a number state one level down") {
  HilbertConfig cfg(8);
  CMatrix a = annihilation_op(cfg);
  DensityMatrix three = DensityMatrix::number(3, cfg);
  CMatrix d = lindblad_d(a, three.mat());
  // D[a]|3><3| = 3|2><2| - 3|3><3|.
  CHECK(d(2, 2).real() == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(d(3, 3).real() == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK(std::abs(d.trace()) < 1e-13);
}

TEST_CASE("number states are fixed points of the conditioning superoperator") {
  HilbertConfig cfg(10);
  CMatrix n = number_op(cfg);
  for (int m : {0, 2, 7}) {
    DensityMatrix s = DensityMatrix::number(m, cfg);
    CHECK(measurement_h(n, s.mat()).norm() < 1e-13);
  }
}

TEST_CASE("conditioning superoperator matches its definition on mixed states") {
  const int dim = 7;
  DensityMatrix rho = teststat::random_density(dim, 5150);
  CMatrix r = teststat::random_matrix(dim, 5151);
  CMatrix expected = r * rho.mat() + rho.mat() * r.adjoint() -
                     ((r + r.adjoint()) * rho.mat()).trace() * rho.mat();
  CHECK((measurement_h(r, rho.mat()) - expected).norm() < 1e-12);
}

TEST_CASE("expectation helpers agree with direct traces") {
  HilbertConfig cfg(9);
  DensityMatrix rho = teststat::random_density(cfg.dim(), 999);
  CMatrix n = number_op(cfg);
  Complex direct = (n * rho.mat()).trace();
  CHECK(std::abs(expectation(n, rho) - direct) < 1e-13);
  CHECK(real_expectation(n, rho) == doctest::Approx(direct.real()).epsilon(1e-13));
  CHECK(mean_n(rho) == doctest::Approx(direct.real()).epsilon(1e-13));

  CMatrix n2 = n * n;
  double expected_var =
      (n2 * rho.mat()).trace().real() - direct.real() * direct.real();
  CHECK(var_n(rho) == doctest::Approx(expected_var).epsilon(1e-12));
}

TEST_CASE("validate flags broken states") {
  HilbertConfig cfg(4);
  DensityMatrix good = DensityMatrix::vacuum(cfg);
  CHECK_NOTHROW(good.validate());

  CMatrix bad_trace = good.mat() * 1.5;
  CHECK_THROWS_AS(DensityMatrix(bad_trace).validate(), std::invalid_argument);

  CMatrix bad_herm = good.mat();
  bad_herm(0, 1) = Complex(1e-3, 0.0);
  CHECK_THROWS_AS(DensityMatrix(bad_herm).validate(), std::invalid_argument);

  CMatrix bad_eig = CMatrix::Zero(cfg.dim(), cfg.dim());
  bad_eig(0, 0) = 1.1;
  bad_eig(1, 1) = -0.1;
  CHECK_THROWS_AS(DensityMatrix(bad_eig).validate(), std::invalid_argument);
}

TEST_CASE("purity and eigenvalue diagnostics") {
  HilbertConfig cfg(6);
  DensityMatrix pure = DensityMatrix::number(2, cfg);
  CHECK(pure.purity() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pure.min_eigenvalue() == doctest::Approx(0.0).epsilon(1e-14));

  DensityMatrix mixed = teststat::random_density(cfg.dim(), 31337);
  CHECK(mixed.purity() < 1.0);
  CHECK(mixed.min_eigenvalue() > 0.0);
}
