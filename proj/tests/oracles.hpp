// Independent computation routes used to cross-check the library. These
// deliberately avoid the code paths under test: eigenvalues come from a
// hand-rolled Jacobi sweep rather than Eigen's solver, traces from explicit
// index loops, and dice moments from integer face enumeration.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qcov/types.hpp"

namespace oracle {

using qcov::CMatrix;
using qcov::Complex;

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations. Each
/// rotation is applied as a full unitary conjugation; dimensions here are
/// tiny, so clarity wins over the usual row/column update tricks.
inline std::vector<double> jacobi_eigenvalues(CMatrix a, int max_sweeps = 100) {
  const Eigen::Index n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("jacobi: square matrices only");

  const double scale = std::max(1.0, qcov::max_abs(a));
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= 1e-14 * scale) {
      std::vector<double> ev(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i).real();
      std::sort(ev.begin(), ev.end());
      return ev;
    }
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const Complex phase = apq / std::abs(apq);

        // Classic symmetric Schur rotation on the phase-aligned 2x2 block.
        const double tau = (aqq - app) / (2.0 * std::abs(apq));
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        CMatrix u = CMatrix::Identity(n, n);
        u(p, p) = c;
        u(p, q) = s;
        u(q, p) = -s * std::conj(phase);
        u(q, q) = c * std::conj(phase);
        a = (u.adjoint() * a * u).eval();
      }
  }
  throw std::runtime_error("jacobi: no convergence");
}

inline double min_eigenvalue(const CMatrix& a) { return jacobi_eigenvalues(a).front(); }

/// Tr(rho * op) by explicit index loops.
inline Complex direct_trace_product(const CMatrix& rho, const CMatrix& op) {
  Complex total = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    for (Eigen::Index k = 0; k < rho.cols(); ++k) total += rho(i, k) * op(k, i);
  return total;
}

/// Exact fraction num/den over 64-bit integers, for enumeration results.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  bool equals(std::int64_t n, std::int64_t d) const {
    return static_cast<__int128>(num) * d == static_cast<__int128>(n) * den;
  }
};

/// The two-dice experiment enumerated face by face: die 1 shows success on
/// 3 of 6 faces, die 2 on 4 of 6; a branch weight w/4 hands both parties
/// the same die type. Returns exact fractions without any probability
/// shortcuts.
struct DiceEnumeration {
  Fraction e_a, e_b, e_ab, cov;
};

inline DiceEnumeration enumerate_threshold_dice() {
  const int d1[6] = {1, 1, 1, 0, 0, 0};
  const int d2[6] = {1, 1, 1, 1, 0, 0};
  const int branch_weight[2] = {1, 3};  // out of 4

  std::int64_t sum_a = 0, sum_b = 0, sum_ab = 0;
  for (int branch = 0; branch < 2; ++branch) {
    const int* die = branch == 0 ? d1 : d2;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        sum_a += branch_weight[branch] * die[i];
        sum_b += branch_weight[branch] * die[j];
        sum_ab += branch_weight[branch] * die[i] * die[j];
      }
  }
  const std::int64_t total = 4 * 36;
  DiceEnumeration out;
  out.e_a = {sum_a, total};
  out.e_b = {sum_b, total};
  out.e_ab = {sum_ab, total};
  out.cov = {sum_ab * total - sum_a * sum_b, total * total};
  return out;
}

/// Analytic moments for A = X1+X2, B = X1-X2 on a Gaussian product state.
struct GaussianMoments {
  double e_a, e_b, e_ab, cov, var_a, var_b;
};

inline GaussianMoments gaussian_sum_difference_moments(double mu1, double v1, double mu2,
                                                       double v2) {
  GaussianMoments m;
  m.e_a = mu1 + mu2;
  m.e_b = mu1 - mu2;
  m.e_ab = (v1 + mu1 * mu1) - (v2 + mu2 * mu2);
  m.cov = v1 - v2;
  m.var_a = v1 + v2;
  m.var_b = v1 + v2;
  return m;
}

}  // namespace oracle
