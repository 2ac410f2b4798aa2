// Expectation values, variances, and the conditional covariance
// cov(A, B | ρ) = E(AB | ρ) − E(A | ρ)E(B | ρ).

#pragma once

#include <cmath>
#include <string>

#include "qcov/core.hpp"
#include "qcov/types.hpp"

namespace qcov {

struct CorrelationReport {
  double e_a = 0.0;
  double e_b = 0.0;
  double e_ab = 0.0;
  double cov = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
};

/// Tr(ρ·op). The trace of a Hermitian pair is real; any imaginary residue
/// is checked against kImagResidueTol and then discarded.
inline double expectation(const DensityOperator& rho, const CMatrix& op) {
  if (op.rows() != op.cols() || op.rows() != rho.dim())
    throw DimensionError("expectation: observable dimension " + std::to_string(op.rows()) +
                         " does not match state dimension " + std::to_string(rho.dim()));
  const Complex tr = (rho.matrix() * op).trace();
  if (std::abs(tr.imag()) > kImagResidueTol)
    throw NumericError("expectation: imaginary residue " + std::to_string(tr.imag()) +
                       " signals a non-Hermitian observable");
  return tr.real();
}

/// var(A | ρ) = E(A² | ρ) − E(A | ρ)².
inline double variance(const DensityOperator& rho, const CMatrix& op) {
  if (!is_hermitian(op, kCommutatorTol))
    throw InvalidInputError("variance: observable must be Hermitian");
  const double mean = expectation(rho, op);
  const double second = expectation(rho, (op * op).eval());
  const double var = second - mean * mean;
  if (var < -kPsdTol)
    throw NumericError("variance: negative value " + std::to_string(var) +
                       " beyond the PSD tolerance");
  return var;
}

/// How E(AB) is formed for a pair of observables.
enum class PairOrdering {
  RequireCommuting,  // reject non-commuting pairs
  Symmetrize,        // opt-in: E(½(AB + BA))
};

/// Full second-moment report for a pair of observables on one state.
/// The pair must commute (max-norm of [a, b] within kCommutatorTol) unless
/// symmetrization is requested explicitly.
inline CorrelationReport covariance(const DensityOperator& rho, const CMatrix& a, const CMatrix& b,
                                    PairOrdering ordering = PairOrdering::RequireCommuting) {
  if (!is_hermitian(a, kCommutatorTol) || !is_hermitian(b, kCommutatorTol))
    throw InvalidInputError("covariance: both observables must be Hermitian");
  if (a.rows() != b.rows())
    throw DimensionError("covariance: observables have mismatched dimensions");
  CMatrix product;
  if (ordering == PairOrdering::Symmetrize) {
    product = 0.5 * (a * b + b * a);
  } else {
    const double defect = commutator_norm(a, b);
    if (defect > kCommutatorTol)
      throw InvalidInputError(
          "covariance: observables do not commute (defect " + std::to_string(defect) +
          "); the product ordering would be ambiguous. Use PairOrdering::Symmetrize to opt in "
          "to E((AB+BA)/2).");
    product = a * b;
  }
  CorrelationReport r;
  r.e_a = expectation(rho, a);
  r.e_b = expectation(rho, b);
  r.e_ab = expectation(rho, product);
  r.cov = r.e_ab - r.e_a * r.e_b;
  r.var_a = variance(rho, a);
  r.var_b = variance(rho, b);
  return r;
}

/// E(AB | ρ) for a convex sum of products, via the weighted product of
/// local expectations Σᵢ pᵢ E(A | ρᵢ) E(B | ρ̃ᵢ). Matches the direct trace
/// of Â⊗B̂ on the realized state.
inline double mixture_expectation(const StateSpec& spec, const LocalObservable& a,
                                  const LocalObservable& b) {
  if (spec.kind() == StateSpec::Kind::General)
    throw InvalidInputError("mixture_expectation: spec must be a product or a mixture");
  if (a.side() != Side::Left || b.side() != Side::Right)
    throw InvalidInputError("mixture_expectation: expects a left observable and a right one");
  const Split s = spec.split();
  if (a.dim() != s.d1 || b.dim() != s.d2)
    throw DimensionError("mixture_expectation: observable dimensions do not match split " +
                         to_string(s));
  auto term = [&](const DensityOperator& left, const DensityOperator& right) {
    return expectation(left, a.op()) * expectation(right, b.op());
  };
  if (spec.kind() == StateSpec::Kind::Product) {
    const auto& p = spec.as_product();
    return term(p.left, p.right);
  }
  double sum = 0.0;
  for (const auto& t : spec.as_mixture().terms) sum += t.weight * term(t.left, t.right);
  return sum;
}

}  // namespace qcov
