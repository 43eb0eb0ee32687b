#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "spherebound/linalg.hpp"
#include "spherebound/poly3.hpp"
#include "spherebound/verdict.hpp"

namespace spherebound {

/// Symmetric polynomial in the basis m_abc (a >= b >= c), where m_abc is the
/// average of x^a y^b z^c over the six permutations of (x, y, z).
class SymPoly3 {
 public:
  using Terms = std::map<Exponent, Rational>;

  SymPoly3() = default;
  SymPoly3(const Rational& c);  // NOLINT

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Coefficient of m_abc; the exponent order does not matter.
  Rational coeff(unsigned a, unsigned b, unsigned c) const;
  void add_term(Exponent e, const Rational& c);

  Poly3 to_poly() const;
  Rational operator()(const Rational& x, const Rational& y, const Rational& z) const;

  SymPoly3& operator+=(const SymPoly3& o);
  SymPoly3& operator-=(const SymPoly3& o);
  SymPoly3& operator*=(const Rational& s);
  friend SymPoly3 operator+(SymPoly3 a, const SymPoly3& b) { return a += b; }
  friend SymPoly3 operator-(SymPoly3 a, const SymPoly3& b) { return a -= b; }
  friend SymPoly3 operator*(SymPoly3 a, const Rational& s) { return a *= s; }
  friend SymPoly3 operator*(const Rational& s, SymPoly3 a) { return a *= s; }
  friend bool operator==(const SymPoly3& a, const SymPoly3& b) { return a.terms_ == b.terms_; }

  /// "11664*m320 + ... - 118/3"
  std::string str() const;
  friend std::ostream& operator<<(std::ostream& os, const SymPoly3& p) { return os << p.str(); }

 private:
  Terms terms_;
};

/// The basis element m_ijk.
SymPoly3 m_sym(unsigned i, unsigned j, unsigned k);

/// Average of p over the six variable permutations, in the m-basis.
SymPoly3 symmetrize(const Poly3& p);

/// True if p is fixed by every permutation of (x, y, z).
bool is_symmetric(const Poly3& p);

/// x^i y^j ((1-x^2)(1-y^2))^{k/2} C_k((z-xy)/sqrt((1-x^2)(1-y^2))) with the
/// normalised Gegenbauer polynomial for parameter (n-3)/2.
Poly3 ynk_entry(int n, int k, int i, int j);

struct ThreePointBlock {
  int n = 0;
  int k = 0;
  int size = 0;
  std::vector<std::vector<SymPoly3>> entries;

  const SymPoly3& operator()(int i, int j) const {
    return entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
};

/// Symmetrised block S^n_k truncated to size x size.
ThreePointBlock snk_matrix(int n, int k, int size);

/// (F_0, ..., F_d), F_k of size sizes[k].
using MatrixTuple = std::vector<QMatrix>;

std::vector<int> tuple_sizes(const MatrixTuple& t);
MatrixTuple zero_tuple(const std::vector<int>& sizes);
MatrixTuple operator+(const MatrixTuple& a, const MatrixTuple& b);
MatrixTuple operator*(const Rational& s, const MatrixTuple& a);

/// sum_k <F_k, S^n_k> in the m-basis.
SymPoly3 expand(const MatrixTuple& tuple, int n);

/// Linear map from the upper-triangular entries of a tuple to m-basis
/// coefficients. Columns follow tuple_coordinates order; rows follow `basis`.
struct ExpansionMap {
  std::vector<int> sizes;
  std::vector<Exponent> basis;
  QMatrix matrix;
};
ExpansionMap expansion_map(int n, const std::vector<int>& sizes);

/// Upper-triangular entries of every block, block by block, row major.
QVector tuple_coordinates(const MatrixTuple& t);
MatrixTuple tuple_from_coordinates(const QVector& v, const std::vector<int>& sizes);

/// Basis of {K : expand(K) = 0}.
std::vector<MatrixTuple> kernel_basis(int n, const std::vector<int>& sizes);

/// True if t lies in the linear span of `basis`.
bool in_span(const std::vector<MatrixTuple>& basis, const MatrixTuple& t);

/// Sum over all ordered triples (c, c', c'') of S^n_k(c.c', c.c'', c'.c'').
QMatrix triple_sum(const GramMatrix& gram, int n, int k, int size);

/// Smallest eigenvalue of triple sums over random codes stays above -1e-8.
Verdict psd_sample_test(int n, int k, int size, int trials, std::uint64_t seed = 1);

}  // namespace spherebound
