#include "spherebound/linalg.hpp"

#include <stdexcept>

namespace spherebound {

namespace {

using ZMatrix = std::vector<std::vector<mpz_class>>;

// Scales each row by the lcm of its denominators so all entries are integers.
ZMatrix integer_rows(const QMatrix& m) {
  ZMatrix z(static_cast<std::size_t>(m.rows()),
            std::vector<mpz_class>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    mpz_class l = 1;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).den().get_mpz_t());
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      z[i][j] = m(i, j).num() * (l / m(i, j).den());
    }
  }
  return z;
}

struct Echelon {
  ZMatrix rows;
  std::vector<std::size_t> pivot_cols;
  std::vector<std::size_t> row_order;  // original index of each echelon row
};

// Fraction-free Gaussian elimination (Bareiss). Every division is exact.
Echelon bareiss(ZMatrix a, std::size_t col_limit) {
  const std::size_t n_rows = a.size();
  const std::size_t n_cols = n_rows ? a[0].size() : 0;
  std::vector<std::size_t> order(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) order[i] = i;
  std::vector<std::size_t> pivots;
  mpz_class prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < col_limit && r < n_rows; ++c) {
    std::size_t p = r;
    while (p < n_rows && a[p][c] == 0) ++p;
    if (p == n_rows) continue;
    std::swap(a[p], a[r]);
    std::swap(order[p], order[r]);
    for (std::size_t i = r + 1; i < n_rows; ++i) {
      for (std::size_t j = c + 1; j < n_cols; ++j) {
        a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]);
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = a[r][c];
    pivots.push_back(c);
    ++r;
  }
  return {std::move(a), std::move(pivots), std::move(order)};
}

QMatrix to_rational(const ZMatrix& z) {
  const auto rows = static_cast<Eigen::Index>(z.size());
  const auto cols = rows ? static_cast<Eigen::Index>(z[0].size()) : 0;
  QMatrix q(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) q(i, j) = Rational(z[i][j]);
  }
  return q;
}

// Reduced row echelon form over Q from a Bareiss echelon (pivot rows only).
QMatrix reduce(const Echelon& e) {
  const std::size_t k = e.pivot_cols.size();
  QMatrix r = to_rational(ZMatrix(e.rows.begin(), e.rows.begin() + static_cast<long>(k)));
  for (std::size_t i = k; i-- > 0;) {
    const auto pc = static_cast<Eigen::Index>(e.pivot_cols[i]);
    const auto ii = static_cast<Eigen::Index>(i);
    const Rational piv = r(ii, pc);
    for (Eigen::Index j = 0; j < r.cols(); ++j) {
      if (!r(ii, j).is_zero()) r(ii, j) /= piv;
    }
    for (std::size_t up = 0; up < i; ++up) {
      const auto uu = static_cast<Eigen::Index>(up);
      const Rational f = r(uu, pc);
      if (f.is_zero()) continue;
      for (Eigen::Index j = 0; j < r.cols(); ++j) {
        if (!r(ii, j).is_zero()) r(uu, j) -= f * r(ii, j);
      }
    }
  }
  return r;
}

}  // namespace

bool is_symmetric(const QMatrix& m) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if (m(i, j) != m(j, i)) return false;
    }
  }
  return true;
}

PsdVerdict ldlt_psd(const QMatrix& m) {
  if (!is_symmetric(m)) throw std::invalid_argument("ldlt_psd: matrix is not symmetric");
  const Eigen::Index n = m.rows();
  QMatrix work = m;  // lower-left holds L multipliers, diagonal D after step
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;

  auto swap_sym = [&](Eigen::Index a, Eigen::Index b) {
    if (a == b) return;
    work.row(a).swap(work.row(b));
    work.col(a).swap(work.col(b));
    std::swap(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
  };

  // v with v^T M v = u^T S u for u supported on the trailing block from k.
  auto lift = [&](Eigen::Index k, const QVector& u) {
    QVector w = QVector::Constant(n, Rational(0));
    for (Eigen::Index i = k; i < n; ++i) w(i) = u(i - k);
    for (Eigen::Index i = k; i-- > 0;) {
      Rational s(0);
      for (Eigen::Index r = i + 1; r < n; ++r) {
        if (!work(r, i).is_zero() && !w(r).is_zero()) s += work(r, i) * w(r);
      }
      w(i) = -s;
    }
    QVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(perm[static_cast<std::size_t>(i)]) = w(i);
    return v;
  };

  PsdVerdict out;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index best = -1;
    for (Eigen::Index i = k; i < n; ++i) {
      if (work(i, i).sign() < 0) {
        QVector u = QVector::Constant(n - k, Rational(0));
        u(i - k) = 1;
        out.witness = lift(k, u);
        out.witness_value = (out.witness.transpose() * m * out.witness)(0, 0);
        return out;
      }
      if (work(i, i).sign() > 0 && (best < 0 || work(best, best) < work(i, i))) best = i;
    }
    if (best < 0) {
      // Remaining diagonal is zero; PSD only if the whole block is zero.
      for (Eigen::Index i = k; i < n; ++i) {
        for (Eigen::Index j = k; j < i; ++j) {
          if (!work(i, j).is_zero()) {
            QVector u = QVector::Constant(n - k, Rational(0));
            u(j - k) = 1;
            u(i - k) = work(i, j).sign() > 0 ? Rational(-1) : Rational(1);
            out.witness = lift(k, u);
            out.witness_value = (out.witness.transpose() * m * out.witness)(0, 0);
            return out;
          }
        }
      }
      for (Eigen::Index i = k; i < n; ++i) {
        for (Eigen::Index j = k; j < i; ++j) work(i, j) = 0;
      }
      break;
    }
    swap_sym(k, best);
    const Rational d = work(k, k);
    const QVector col = work.col(k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (col(i).is_zero()) continue;
      const Rational l = col(i) / d;
      for (Eigen::Index j = k + 1; j <= i; ++j) {
        if (!col(j).is_zero()) work(i, j) -= l * col(j);
      }
      work(i, k) = l;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) work(i, j) = work(j, i);
    }
  }
  out.psd = true;
  out.permutation = perm;
  out.lower = QMatrix::Identity(n, n);
  out.diagonal = QVector(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.diagonal(i) = work(i, i);
    for (Eigen::Index j = 0; j < i; ++j) out.lower(i, j) = work(i, j);
  }
  return out;
}

bool is_positive_definite(const QMatrix& m) {
  const PsdVerdict v = ldlt_psd(m);
  if (!v.psd) return false;
  for (Eigen::Index i = 0; i < v.diagonal.size(); ++i) {
    if (v.diagonal(i).sign() <= 0) return false;
  }
  return true;
}

Eigen::Index rank(const QMatrix& m) {
  if (m.size() == 0) return 0;
  return static_cast<Eigen::Index>(
      bareiss(integer_rows(m), static_cast<std::size_t>(m.cols())).pivot_cols.size());
}

std::vector<Eigen::Index> independent_rows(const QMatrix& a) {
  // Row rank via elimination on A^T: pivot columns of A^T are independent rows of A.
  if (a.size() == 0) return {};
  const QMatrix t = a.transpose();
  const Echelon e = bareiss(integer_rows(t), static_cast<std::size_t>(t.cols()));
  std::vector<Eigen::Index> out;
  for (auto c : e.pivot_cols) out.push_back(static_cast<Eigen::Index>(c));
  return out;
}

QMatrix nullspace(const QMatrix& a) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return QMatrix::Identity(n, n);
  const Echelon e = bareiss(integer_rows(a), static_cast<std::size_t>(n));
  const QMatrix r = reduce(e);
  std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
  for (auto c : e.pivot_cols) is_pivot[c] = true;
  const Eigen::Index dim = n - static_cast<Eigen::Index>(e.pivot_cols.size());
  QMatrix basis = QMatrix::Constant(n, dim, Rational(0));
  Eigen::Index col = 0;
  for (Eigen::Index f = 0; f < n; ++f) {
    if (is_pivot[static_cast<std::size_t>(f)]) continue;
    basis(f, col) = 1;
    for (std::size_t i = 0; i < e.pivot_cols.size(); ++i) {
      basis(static_cast<Eigen::Index>(e.pivot_cols[i]), col) = -r(static_cast<Eigen::Index>(i), f);
    }
    ++col;
  }
  return basis;
}

SolutionReport solve_linear(const QMatrix& a, const QVector& b) {
  if (a.rows() != b.size()) throw std::invalid_argument("solve_linear: dimension mismatch");
  const Eigen::Index n = a.cols();
  QMatrix aug(a.rows(), n + 1);
  aug.leftCols(n) = a;
  aug.col(n) = b;
  SolutionReport out;
  const Echelon e = bareiss(integer_rows(aug), static_cast<std::size_t>(n));
  // Inconsistent iff some non-pivot row keeps a nonzero right-hand side.
  bool inconsistent = false;
  for (std::size_t i = e.pivot_cols.size(); i < e.rows.size(); ++i) {
    if (e.rows[i][static_cast<std::size_t>(n)] != 0) inconsistent = true;
  }
  if (inconsistent) {
    out.kind = SolutionReport::Kind::Inconsistent;
    const QMatrix left = nullspace(a.transpose());
    for (Eigen::Index c = 0; c < left.cols(); ++c) {
      if (!(left.col(c).transpose() * b)(0, 0).is_zero()) {
        out.certificate = left.col(c);
        break;
      }
    }
    return out;
  }
  const QMatrix r = reduce(e);
  out.particular = QVector::Constant(n, Rational(0));
  for (std::size_t i = 0; i < e.pivot_cols.size(); ++i) {
    out.particular(static_cast<Eigen::Index>(e.pivot_cols[i])) = r(static_cast<Eigen::Index>(i), n);
  }
  out.nullspace = nullspace(a);
  out.kind = out.nullspace.cols() == 0 ? SolutionReport::Kind::Unique
                                       : SolutionReport::Kind::Affine;
  return out;
}

Eigen::MatrixXd to_double(const QMatrix& m) {
  Eigen::MatrixXd d(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) d(i, j) = m(i, j).to_double();
  }
  return d;
}

QMatrix from_double(const Eigen::MatrixXd& m) {
  QMatrix q(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) q(i, j) = Rational::from_double(m(i, j));
  }
  return q;
}

QMatrix corner_unit(Eigen::Index size) {
  QMatrix e = QMatrix::Constant(size, size, Rational(0));
  if (size > 0) e(0, 0) = 1;
  return e;
}

Rational frobenius(const QMatrix& a, const QMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("frobenius: shape mismatch");
  }
  Rational s(0);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (!a(i, j).is_zero() && !b(j, i).is_zero()) s += a(i, j) * b(j, i);
    }
  }
  return s;
}

}  // namespace spherebound
