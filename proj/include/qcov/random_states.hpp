// Seeded generators for states, observables, and settings. Everything is
// driven by CounterRng, so a fixed seed reproduces the same objects on any
// platform.

#pragma once

#include <cmath>
#include <vector>

#include "qcov/bellwitness.hpp"
#include "qcov/core.hpp"
#include "qcov/rng.hpp"
#include "qcov/types.hpp"

namespace qcov {

inline Vector3 random_unit_vector(CounterRng& rng) {
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * M_PI);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Vector3(r * std::cos(phi), r * std::sin(phi), z);
}

inline CMatrix random_hermitian(CounterRng& rng, int dim) {
  CMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    m(i, i) = Complex(rng.gaussian(), 0.0);
    for (int j = i + 1; j < dim; ++j) {
      const Complex z(rng.gaussian(), rng.gaussian());
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  }
  return m;
}

/// Hermitian with spectrum rescaled into [-1, 1] (max |eigenvalue| = 1
/// unless the draw is zero).
inline CMatrix random_bounded_hermitian(CounterRng& rng, int dim) {
  CMatrix m = random_hermitian(rng, dim);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::EigenvaluesOnly);
  const double scale = solver.eigenvalues().cwiseAbs().maxCoeff();
  if (scale > 1e-12) m /= scale;
  return m;
}

inline CMatrix random_pure_density(CounterRng& rng, int dim) {
  CVector psi(dim);
  for (int i = 0; i < dim; ++i) psi(i) = Complex(rng.gaussian(), rng.gaussian());
  psi.normalize();
  return psi * psi.adjoint();
}

/// Full-rank mixed state ψψ†/tr from a Ginibre draw.
inline CMatrix random_mixed_density(CounterRng& rng, int dim) {
  CMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  return rho;
}

inline StateSpec random_product_state(CounterRng& rng, const Split& split) {
  return StateSpec::product(DensityOperator(random_mixed_density(rng, split.d1)),
                            DensityOperator(random_mixed_density(rng, split.d2)));
}

/// Convex mixture of 2..max_terms pure products with nondegenerate weights.
inline StateSpec random_mixture(CounterRng& rng, const Split& split, int max_terms = 8) {
  const int k = 2 + static_cast<int>(rng.uniform() * (max_terms - 1));
  std::vector<MixtureTerm> terms;
  terms.reserve(static_cast<std::size_t>(k));
  std::vector<double> weights(static_cast<std::size_t>(k));
  double total = 0.0;
  for (double& w : weights) {
    w = 0.05 + rng.uniform();
    total += w;
  }
  for (int i = 0; i < k; ++i)
    terms.push_back({weights[static_cast<std::size_t>(i)] / total,
                     DensityOperator(random_pure_density(rng, split.d1)),
                     DensityOperator(random_pure_density(rng, split.d2))});
  return StateSpec::mixture(std::move(terms));
}

inline ChshSettings random_settings(CounterRng& rng) {
  return ChshSettings(random_unit_vector(rng), random_unit_vector(rng), random_unit_vector(rng),
                      random_unit_vector(rng));
}

}  // namespace qcov
