#pragma once

#include "numstab/fock.hpp"
#include "numstab/rng.hpp"

namespace teststat {

// Random full-rank density matrix: rho = A A† / tr(A A†).
inline numstab::DensityMatrix random_density(int dim, std::uint64_t seed) {
  numstab::CounterRng rng(seed, 0);
  numstab::CMatrix a(dim, dim);
  for (int k = 0; k < dim; ++k) {
    for (int j = 0; j < dim; ++j) {
      a(j, k) = numstab::Complex(rng.gaussian(), rng.gaussian());
    }
  }
  numstab::CMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return numstab::DensityMatrix(rho);
}

// Random complex matrix without structure, for superoperator identities.
inline numstab::CMatrix random_matrix(int dim, std::uint64_t seed) {
  numstab::CounterRng rng(seed, 1);
  numstab::CMatrix m(dim, dim);
  for (int k = 0; k < dim; ++k) {
    for (int j = 0; j < dim; ++j) {
      m(j, k) = numstab::Complex(rng.gaussian(), rng.gaussian());
    }
  }
  return m;
}

}  // namespace teststat
