// Two demonstrations that a nonzero covariance of commuting joint
// observables says nothing about entanglement: sum/difference coordinates
// on a Gaussian product state, and squared collective spin components on a
// two-qubit product state.

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qcov/bellwitness.hpp"
#include "qcov/core.hpp"
#include "qcov/correlation.hpp"
#include "qcov/types.hpp"

namespace qcov {

// ---------------------------------------------------------------------------
// Position demonstration: A = X₁+X₂, B = X₁−X₂ on a Gaussian product state
// ---------------------------------------------------------------------------

/// Midpoint-rule grid: n cells over [x_min, x_max], nodes at cell centers.
struct GridSpec {
  double x_min = 0.0;
  double x_max = 0.0;
  int n = 0;

  GridSpec() = default;
  GridSpec(double lo, double hi, int n_) : x_min(lo), x_max(hi), n(n_) {
    if (!(x_max > x_min)) throw InvalidInputError("GridSpec: empty domain");
    if (n < 2) throw InvalidInputError("GridSpec: need at least 2 cells");
  }

  double step() const { return (x_max - x_min) / n; }
  double node(int i) const { return x_min + (i + 0.5) * step(); }
};

/// Product of two 1-D Gaussians with means mu and variances v.
struct GaussianProductState {
  double mu1 = 0.0;
  double v1 = 1.0;
  double mu2 = 0.0;
  double v2 = 1.0;

  GaussianProductState() = default;
  GaussianProductState(double mu1_, double v1_, double mu2_, double v2_)
      : mu1(mu1_), v1(v1_), mu2(mu2_), v2(v2_) {
    if (!(v1 > 0.0) || !(v2 > 0.0))
      throw InvalidInputError("GaussianProductState: variances must be positive");
  }
};

/// Grid wide enough that truncation is negligible next to the acceptance
/// tolerances: cell centers span mean ± sigmas·σ.
inline GridSpec auto_grid(double mu, double v, int n, double sigmas = 7.5) {
  const double half = sigmas * std::sqrt(v);
  return GridSpec(mu - half, mu + half, n);
}

struct PositionCovReport {
  CorrelationReport report;
  double var_x1 = 0.0;          // analytic input variance
  double var_x2 = 0.0;          // analytic input variance
  double identity_residual = 0.0;  // |cov − (var_x1 − var_x2)|
  Classification classification;
};

namespace detail {

/// Normalized midpoint weights of a 1-D Gaussian on a grid. The grid must
/// reach 6σ past the mean on both sides and capture the distribution to
/// 1e-8 before normalization; a coarser grid aliases the density and every
/// moment downstream would be silently wrong.
inline std::vector<double> gaussian_weights(const GridSpec& grid, double mu, double v) {
  const double sigma = std::sqrt(v);
  if (grid.x_min > mu - 6.0 * sigma || grid.x_max < mu + 6.0 * sigma)
    throw InvalidInputError("gaussian_weights: grid must cover mean ± 6σ");
  const double h = grid.step();
  std::vector<double> w(static_cast<std::size_t>(grid.n));
  const double norm = 1.0 / std::sqrt(2.0 * M_PI * v);
  double mass = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double z = grid.node(i) - mu;
    w[static_cast<std::size_t>(i)] = norm * std::exp(-0.5 * z * z / v) * h;
    mass += w[static_cast<std::size_t>(i)];
  }
  if (std::abs(mass - 1.0) > 1e-8)
    throw NumericError("gaussian_weights: grid too coarse, captured mass deviates from 1 by " +
                       std::to_string(std::abs(mass - 1.0)));
  for (double& wi : w) wi /= mass;
  return w;
}

}  // namespace detail

/// Discretize the Gaussian product state on the given grids and evaluate
/// E(A), E(B), E(AB) for A = X₁+X₂, B = X₁−X₂ by direct double sums over
/// the joint distribution. On any product state cov(A, B) equals
/// var(X₁) − var(X₂); the residual against the analytic variances measures
/// pure discretization error.
inline PositionCovReport position_cov_demo(const GaussianProductState& state,
                                           const GridSpec& grid1, const GridSpec& grid2) {
  const std::vector<double> w1 = detail::gaussian_weights(grid1, state.mu1, state.v1);
  const std::vector<double> w2 = detail::gaussian_weights(grid2, state.mu2, state.v2);

  double e_a = 0.0, e_b = 0.0, e_ab = 0.0, e_a2 = 0.0, e_b2 = 0.0;
  for (int i = 0; i < grid1.n; ++i) {
    const double x = grid1.node(i);
    const double wx = w1[static_cast<std::size_t>(i)];
    for (int j = 0; j < grid2.n; ++j) {
      const double y = grid2.node(j);
      const double w = wx * w2[static_cast<std::size_t>(j)];
      const double a = x + y;
      const double b = x - y;
      e_a += w * a;
      e_b += w * b;
      e_ab += w * a * b;
      e_a2 += w * a * a;
      e_b2 += w * b * b;
    }
  }

  PositionCovReport out;
  out.report.e_a = e_a;
  out.report.e_b = e_b;
  out.report.e_ab = e_ab;
  out.report.cov = e_ab - e_a * e_b;
  out.report.var_a = e_a2 - e_a * e_a;
  out.report.var_b = e_b2 - e_b * e_b;
  out.var_x1 = state.v1;
  out.var_x2 = state.v2;
  out.identity_residual = std::abs(out.report.cov - (state.v1 - state.v2));
  out.classification.verdict = Verdict::Separable;
  out.classification.construction = "product";
  out.classification.note =
      "separable by construction: a product of local Gaussian states; the nonzero "
      "covariance of X1+X2 and X1-X2 reflects unequal local variances, not entanglement";
  return out;
}

/// One grid shared by both coordinates.
inline PositionCovReport position_cov_demo(const GaussianProductState& state,
                                           const GridSpec& grid) {
  return position_cov_demo(state, grid, grid);
}

inline PositionCovReport position_cov_demo(const GaussianProductState& state, int n = 1024) {
  return position_cov_demo(state, auto_grid(state.mu1, state.v1, n),
                           auto_grid(state.mu2, state.v2, n));
}

/// (grid size, identity residual) rows at a fixed domain and refining n.
inline std::vector<std::pair<int, double>> position_convergence(const GaussianProductState& state,
                                                                const std::vector<int>& sizes) {
  std::vector<std::pair<int, double>> rows;
  rows.reserve(sizes.size());
  for (const int n : sizes)
    rows.emplace_back(n, position_cov_demo(state, n).identity_residual);
  return rows;
}

// ---------------------------------------------------------------------------
// Spin demonstration: squared collective spin components on a product state
// ---------------------------------------------------------------------------

/// (S_u)² for the collective spin S_u = (σ_u⊗I + I⊗σ_u)/2 of two qubits:
/// equals (I + σ_u⊗σ_u)/2, with eigenvalues 0 and 1.
inline CMatrix collective_spin_squared(const Vector3& axis) {
  const CMatrix s = bloch_observable(axis);
  return 0.5 * (identity(4) + kron(s, s));
}

inline CMatrix collective_spin_squared(Axis axis) {
  const CMatrix s = pauli(axis);
  return 0.5 * (identity(4) + kron(s, s));
}

/// Qubit state (I + c·σ)/2 from a Bloch vector with |c| ≤ 1.
inline CMatrix bloch_state(const Vector3& c) {
  if (c.norm() > 1.0 + kUnitVectorTol)
    throw InvalidInputError("bloch_state: Bloch vector must have norm at most 1");
  CMatrix m = 0.5 * identity(2);
  m += 0.5 * (c.x() * pauli(Axis::X) + c.y() * pauli(Axis::Y) + c.z() * pauli(Axis::Z));
  return m;
}

/// Two spin-1/2 factors in pure Bloch states c and d.
struct SpinProductState {
  Vector3 c;
  Vector3 d;

  SpinProductState(const Vector3& c_, const Vector3& d_) : c(c_), d(d_) {
    if (std::abs(c.norm() - 1.0) > kUnitVectorTol || std::abs(d.norm() - 1.0) > kUnitVectorTol)
      throw InvalidInputError("SpinProductState: Bloch vectors must be unit");
  }
};

struct SpinCovReport {
  CorrelationReport report;  // A = S_z², B = S_x²
  double closed_form = 0.0;  // −(c_y d_y + c_x c_z d_x d_z)/4
  Classification classification;
};

/// cov(S_z², S_x²) on the product of Bloch states c ⊗ d. The observables
/// commute exactly, yet the covariance is generically nonzero:
/// −(c_y d_y + c_x c_z d_x d_z)/4 in closed form.
inline SpinCovReport spin_cov_demo(const SpinProductState& state) {
  const Vector3& c = state.c;
  const Vector3& d = state.d;
  const StateSpec spec =
      StateSpec::product(DensityOperator(bloch_state(c)), DensityOperator(bloch_state(d)));
  const DensityOperator rho = realize(spec);

  SpinCovReport out;
  out.report = covariance(rho, collective_spin_squared(Axis::Z),
                          collective_spin_squared(Axis::X));
  out.closed_form = -(c.y() * d.y() + c.x() * c.z() * d.x() * d.z()) / 4.0;
  out.classification = classify(spec);
  return out;
}

inline SpinCovReport spin_cov_demo(const Vector3& c, const Vector3& d) {
  return spin_cov_demo(SpinProductState(c, d));
}

}  // namespace qcov
