#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "spherebound/rational.hpp"

namespace spherebound {

using QMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using QVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
/// Exact inner products of a code; unit diagonal.
using GramMatrix = QMatrix;

bool is_symmetric(const QMatrix& m);

/// Outcome of the exact semidefiniteness test.
///
/// For PSD, `permutation`, `lower` and `diagonal` satisfy
/// P^T M P = L D L^T with L unit lower triangular and D >= 0 (P is the
/// symmetric pivoting permutation; `permutation[i]` is the original index of
/// pivot row i). For NOT-PSD, `witness` satisfies v^T M v < 0 exactly.
struct PsdVerdict {
  bool psd = false;
  std::vector<Eigen::Index> permutation;
  QMatrix lower;
  QVector diagonal;
  QVector witness;
  Rational witness_value;  ///< v^T M v when NOT-PSD

  explicit operator bool() const { return psd; }
};

/// Exact LDL^T with diagonal pivoting. A zero pivot is accepted only when its
/// remaining row/column is zero. Throws std::invalid_argument on asymmetry.
PsdVerdict ldlt_psd(const QMatrix& m);

/// Positive definiteness (all pivots strictly positive).
bool is_positive_definite(const QMatrix& m);

/// Exact rank by fraction-free (Bareiss) elimination.
Eigen::Index rank(const QMatrix& m);

/// Affine solution set of A x = b: x = particular + nullspace * lambda.
struct SolutionReport {
  enum class Kind { Unique, Affine, Inconsistent };
  Kind kind = Kind::Inconsistent;
  QVector particular;
  QMatrix nullspace;  ///< columns form a basis of ker A
  /// For Inconsistent: y with y^T A = 0 and y^T b != 0 (Fredholm witness).
  QVector certificate;

  bool consistent() const { return kind != Kind::Inconsistent; }
};

/// Exact solve by fraction-free elimination. Throws std::invalid_argument
/// on dimension mismatch.
SolutionReport solve_linear(const QMatrix& a, const QVector& b);

/// Basis of the right kernel of A (columns).
QMatrix nullspace(const QMatrix& a);

/// Indices of a maximal linearly independent subset of rows, in order.
std::vector<Eigen::Index> independent_rows(const QMatrix& a);

/// Entry-wise conversions.
Eigen::MatrixXd to_double(const QMatrix& m);
QMatrix from_double(const Eigen::MatrixXd& m);

/// E_0: the size x size matrix with a single 1 in the top-left corner.
QMatrix corner_unit(Eigen::Index size);

/// trace(A B) for equally shaped symmetric matrices.
Rational frobenius(const QMatrix& a, const QMatrix& b);

}  // namespace spherebound
