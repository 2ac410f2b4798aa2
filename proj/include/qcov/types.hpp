// Shared scalar/matrix aliases, error types, and tolerance conventions.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qcov {

using Complex = std::complex<double>;

/// Dense column/matrix types, templated on scalar.
template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CMatrix = DenseMatrix<Complex>;
using CVector = DenseVector<Complex>;
using Vector3 = Eigen::Vector3d;

/// Malformed values in user-supplied data (bad weights, non-PSD matrices, ...).
struct InvalidInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shape/dimension violations (wrong split, mismatched operator sizes, ...).
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Internal numeric failures (imaginary residue too large, negative variance, ...).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tolerance conventions used throughout.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kUnitVectorTol = 1e-10;
inline constexpr double kCommutatorTol = 1e-10;
inline constexpr double kImagResidueTol = 1e-8;

// Factor dimensions stay desk-scale.
inline constexpr Eigen::Index kMaxFactorDim = 16;

/// Which tensor factor a local object lives on.
enum class Side { Left, Right };

enum class Axis { X, Y, Z };

/// Bipartite dimension split (d1, d2); composite dimension is d1*d2.
struct Split {
  Eigen::Index d1 = 0;
  Eigen::Index d2 = 0;

  Eigen::Index dim() const { return d1 * d2; }
  friend bool operator==(const Split&, const Split&) = default;
};

inline std::string to_string(const Split& s) {
  return std::to_string(s.d1) + "x" + std::to_string(s.d2);
}

/// Largest entry magnitude; the max-norm used by every tolerance check here.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

/// Entry-wise comparison with an explicit absolute tolerance.
template <typename DerivedA, typename DerivedB>
bool approx_equal(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                  double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return max_abs(a - b) <= tol;
}

template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
  return max_abs(m - m.adjoint());
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

/// Max-norm of the commutator [a, b].
inline double commutator_norm(const CMatrix& a, const CMatrix& b) {
  return max_abs((a * b - b * a).eval());
}

}  // namespace qcov
