// Complex linear algebra and state/observable construction for
// finite-dimensional bipartite systems.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "qcov/types.hpp"

namespace qcov {

// ---------------------------------------------------------------------------
// Elementary operators
// ---------------------------------------------------------------------------

inline CMatrix identity(Eigen::Index dim) { return CMatrix::Identity(dim, dim); }

inline CMatrix pauli(Axis axis) {
  CMatrix m(2, 2);
  const Complex i(0.0, 1.0);
  switch (axis) {
    case Axis::X:
      m << 0, 1, 1, 0;
      break;
    case Axis::Y:
      m << 0, -i, i, 0;
      break;
    case Axis::Z:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

/// Kronecker product; works on any pair of dense Eigen expressions.
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b)
    -> DenseMatrix<decltype(typename DerivedA::Scalar{} * typename DerivedB::Scalar{})> {
  using Scalar = decltype(typename DerivedA::Scalar{} * typename DerivedB::Scalar{});
  DenseMatrix<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b.derived();
  return out;
}

/// Qubit observable n·σ for a unit Bloch vector n; eigenvalues are ±1.
inline CMatrix bloch_observable(const Vector3& n) {
  if (std::abs(n.norm() - 1.0) > kUnitVectorTol)
    throw InvalidInputError("bloch_observable: direction must be a unit vector, |n| = " +
                            std::to_string(n.norm()));
  return n.x() * pauli(Axis::X) + n.y() * pauli(Axis::Y) + n.z() * pauli(Axis::Z);
}

/// Pure qubit state (I + n·σ)/2 for a unit Bloch vector.
inline CMatrix bloch_projector(const Vector3& n) {
  return 0.5 * (identity(2) + bloch_observable(n));
}

// ---------------------------------------------------------------------------
// DensityOperator
// ---------------------------------------------------------------------------

/// Hermitian, positive semidefinite, unit-trace matrix. A bipartite split
/// (d1, d2) is attached when the operator describes a composite system;
/// single-factor states carry no split.
class DensityOperator {
 public:
  explicit DensityOperator(CMatrix matrix) : matrix_(std::move(matrix)) { validate(); }

  DensityOperator(CMatrix matrix, Split split) : matrix_(std::move(matrix)), split_(split) {
    if (split.d1 < 1 || split.d2 < 1)
      throw DimensionError("DensityOperator: split dimensions must be positive");
    if (split.d1 > kMaxFactorDim || split.d2 > kMaxFactorDim)
      throw DimensionError("DensityOperator: factor dimensions above " +
                           std::to_string(kMaxFactorDim) + " are unsupported");
    if (split.dim() != matrix_.rows())
      throw DimensionError("DensityOperator: split " + to_string(split) +
                           " does not match matrix dimension " + std::to_string(matrix_.rows()));
    validate();
  }

  const CMatrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  const std::optional<Split>& split() const { return split_; }

  const Split& split_or_throw() const {
    if (!split_) throw DimensionError("DensityOperator: operation requires a bipartite split");
    return *split_;
  }

  /// Same matrix viewed under an explicit split.
  DensityOperator with_split(Split split) const { return DensityOperator(matrix_, split); }

 private:
  void validate() const {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1)
      throw DimensionError("DensityOperator: matrix must be square and non-empty");
    if (hermiticity_defect(matrix_) > kHermitianTol)
      throw InvalidInputError("DensityOperator: matrix is not Hermitian (defect " +
                              std::to_string(hermiticity_defect(matrix_)) + ")");
    const Complex tr = matrix_.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTol)
      throw InvalidInputError("DensityOperator: trace must be 1, got " +
                              std::to_string(tr.real()));
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kPsdTol)
      throw InvalidInputError("DensityOperator: matrix has eigenvalue " +
                              std::to_string(solver.eigenvalues().minCoeff()) +
                              " below the PSD tolerance");
  }

  CMatrix matrix_;
  std::optional<Split> split_;
};

// ---------------------------------------------------------------------------
// LocalObservable
// ---------------------------------------------------------------------------

/// Hermitian operator on one factor plus the side it acts on.
class LocalObservable {
 public:
  LocalObservable(CMatrix op, Side side) : op_(std::move(op)), side_(side) {
    if (op_.rows() != op_.cols() || op_.rows() < 1)
      throw DimensionError("LocalObservable: operator must be square and non-empty");
    if (hermiticity_defect(op_) > kHermitianTol)
      throw InvalidInputError("LocalObservable: operator is not Hermitian");
  }

  const CMatrix& op() const { return op_; }
  Side side() const { return side_; }
  Eigen::Index dim() const { return op_.rows(); }

 private:
  CMatrix op_;
  Side side_;
};

/// Embed a local observable into the composite space: A ⊗ I or I ⊗ B.
inline CMatrix embed(const LocalObservable& obs, const Split& split) {
  const Eigen::Index expected = obs.side() == Side::Left ? split.d1 : split.d2;
  if (obs.dim() != expected)
    throw DimensionError("embed: observable dimension " + std::to_string(obs.dim()) +
                         " does not match its side of split " + to_string(split));
  return obs.side() == Side::Left ? kron(obs.op(), identity(split.d2))
                                  : kron(identity(split.d1), obs.op());
}

// ---------------------------------------------------------------------------
// StateSpec
// ---------------------------------------------------------------------------

/// Algebraic description of how a bipartite state was constructed.
struct ProductForm {
  DensityOperator left;
  DensityOperator right;
};

struct MixtureTerm {
  double weight;
  DensityOperator left;
  DensityOperator right;
};

struct MixtureForm {
  std::vector<MixtureTerm> terms;
};

struct GeneralForm {
  DensityOperator rho;
};

class StateSpec {
 public:
  enum class Kind { Product, Mixture, General };

  static StateSpec product(DensityOperator left, DensityOperator right) {
    return StateSpec(ProductForm{std::move(left), std::move(right)});
  }

  /// Weights must be strictly inside (0, 1) and sum to 1 within 1e-12.
  /// A single-term mixture collapses to the Product form.
  static StateSpec mixture(std::vector<MixtureTerm> terms) {
    if (terms.empty()) throw InvalidInputError("StateSpec: mixture needs at least one term");
    double total = 0.0;
    for (const auto& t : terms) total += t.weight;
    if (std::abs(total - 1.0) > kTraceTol)
      throw InvalidInputError("StateSpec: mixture weights sum to " + std::to_string(total));
    const Split s{terms.front().left.dim(), terms.front().right.dim()};
    for (const auto& t : terms) {
      if (t.left.dim() != s.d1 || t.right.dim() != s.d2)
        throw DimensionError("StateSpec: mixture terms must share factor dimensions");
    }
    if (terms.size() == 1) {
      return StateSpec(ProductForm{std::move(terms.front().left), std::move(terms.front().right)});
    }
    for (const auto& t : terms) {
      if (!(t.weight > 0.0) || !(t.weight < 1.0))
        throw InvalidInputError("StateSpec: mixture weights must lie strictly in (0, 1)");
    }
    return StateSpec(MixtureForm{std::move(terms)});
  }

  static StateSpec general(DensityOperator rho) {
    rho.split_or_throw();
    return StateSpec(GeneralForm{std::move(rho)});
  }

  Kind kind() const { return static_cast<Kind>(form_.index()); }

  const ProductForm& as_product() const { return get<ProductForm>("product"); }
  const MixtureForm& as_mixture() const { return get<MixtureForm>("mixture"); }
  const GeneralForm& as_general() const { return get<GeneralForm>("general"); }

  Split split() const {
    switch (kind()) {
      case Kind::Product: {
        const auto& p = as_product();
        return Split{p.left.dim(), p.right.dim()};
      }
      case Kind::Mixture: {
        const auto& t = as_mixture().terms.front();
        return Split{t.left.dim(), t.right.dim()};
      }
      default:
        return as_general().rho.split_or_throw();
    }
  }

 private:
  template <typename Form>
  explicit StateSpec(Form f) : form_(std::move(f)) {}

  template <typename Form>
  const Form& get(const char* name) const {
    if (!std::holds_alternative<Form>(form_))
      throw InvalidInputError(std::string("StateSpec: not a ") + name + " spec");
    return std::get<Form>(form_);
  }

  std::variant<ProductForm, MixtureForm, GeneralForm> form_;
};

/// The density operator a StateSpec describes.
inline DensityOperator realize(const StateSpec& spec) {
  switch (spec.kind()) {
    case StateSpec::Kind::Product: {
      const auto& p = spec.as_product();
      return DensityOperator(kron(p.left.matrix(), p.right.matrix()),
                             Split{p.left.dim(), p.right.dim()});
    }
    case StateSpec::Kind::Mixture: {
      const auto& terms = spec.as_mixture().terms;
      const Split s = spec.split();
      CMatrix sum = CMatrix::Zero(s.dim(), s.dim());
      for (const auto& t : terms) sum += t.weight * kron(t.left.matrix(), t.right.matrix());
      return DensityOperator(std::move(sum), s);
    }
    default:
      return spec.as_general().rho;
  }
}

// ---------------------------------------------------------------------------
// Partial transpose / partial trace
// ---------------------------------------------------------------------------

/// Transpose applied to one factor's indices only. An involution. The
/// matrix form exists because a partial transpose is generally not a valid
/// state (that sign is the entanglement witness).
inline CMatrix partial_transpose(const CMatrix& m, const Split& s, Side side) {
  if (m.rows() != m.cols() || m.rows() != s.dim())
    throw DimensionError("partial_transpose: matrix does not match split " + to_string(s));
  CMatrix out(s.dim(), s.dim());
  for (Eigen::Index i1 = 0; i1 < s.d1; ++i1)
    for (Eigen::Index i2 = 0; i2 < s.d2; ++i2)
      for (Eigen::Index j1 = 0; j1 < s.d1; ++j1)
        for (Eigen::Index j2 = 0; j2 < s.d2; ++j2) {
          const Eigen::Index row = i1 * s.d2 + i2, col = j1 * s.d2 + j2;
          out(row, col) = side == Side::Right ? m(i1 * s.d2 + j2, j1 * s.d2 + i2)
                                              : m(j1 * s.d2 + i2, i1 * s.d2 + j2);
        }
  return out;
}

inline CMatrix partial_transpose(const DensityOperator& rho, Side side) {
  return partial_transpose(rho.matrix(), rho.split_or_throw(), side);
}

/// Trace out the given factor; returns the reduced state of the other one.
inline CMatrix partial_trace(const DensityOperator& rho, Side traced_out) {
  const Split s = rho.split_or_throw();
  const CMatrix& m = rho.matrix();
  if (traced_out == Side::Right) {
    CMatrix out = CMatrix::Zero(s.d1, s.d1);
    for (Eigen::Index i1 = 0; i1 < s.d1; ++i1)
      for (Eigen::Index j1 = 0; j1 < s.d1; ++j1)
        for (Eigen::Index k = 0; k < s.d2; ++k) out(i1, j1) += m(i1 * s.d2 + k, j1 * s.d2 + k);
    return out;
  }
  CMatrix out = CMatrix::Zero(s.d2, s.d2);
  for (Eigen::Index i2 = 0; i2 < s.d2; ++i2)
    for (Eigen::Index j2 = 0; j2 < s.d2; ++j2)
      for (Eigen::Index k = 0; k < s.d1; ++k) out(i2, j2) += m(k * s.d2 + i2, k * s.d2 + j2);
  return out;
}

// ---------------------------------------------------------------------------
// Named two-qubit states
// ---------------------------------------------------------------------------

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

/// Parse "phi+", "phi-", "psi+", "psi-".
inline BellKind bell_kind_from_string(const std::string& name) {
  if (name == "phi+") return BellKind::PhiPlus;
  if (name == "phi-") return BellKind::PhiMinus;
  if (name == "psi+") return BellKind::PsiPlus;
  if (name == "psi-") return BellKind::PsiMinus;
  throw InvalidInputError("bell state: expected phi+|phi-|psi+|psi-, got '" + name + "'");
}

/// Rank-1 projector onto the named Bell vector, split (2, 2).
inline DensityOperator bell_state(BellKind kind) {
  CVector v = CVector::Zero(4);
  const double r = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case BellKind::PhiPlus:
      v(0) = r;
      v(3) = r;
      break;
    case BellKind::PhiMinus:
      v(0) = r;
      v(3) = -r;
      break;
    case BellKind::PsiPlus:
      v(1) = r;
      v(2) = r;
      break;
    case BellKind::PsiMinus:
      v(1) = r;
      v(2) = -r;
      break;
  }
  return DensityOperator(v * v.adjoint(), Split{2, 2});
}

/// Singlet-plus-noise family p|Ψ⁻⟩⟨Ψ⁻| + (1−p)I/4 for p in [0, 1].
inline StateSpec werner(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidInputError("werner: mixing parameter must lie in [0, 1], got " +
                            std::to_string(p));
  CMatrix m = p * bell_state(BellKind::PsiMinus).matrix() + (1.0 - p) * 0.25 * identity(4);
  return StateSpec::general(DensityOperator(std::move(m), Split{2, 2}));
}

/// Maximally mixed state I/(d1*d2) under the given split.
inline StateSpec maximally_mixed(Split split) {
  const Eigen::Index d = split.dim();
  return StateSpec::general(DensityOperator(identity(d) / static_cast<double>(d), split));
}

}  // namespace qcov
