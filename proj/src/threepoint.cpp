#include "spherebound/threepoint.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "spherebound/gegenbauer.hpp"

namespace spherebound {

namespace {

Exponent sorted_desc(Exponent e) {
  std::sort(e.begin(), e.end(), std::greater<>());
  return e;
}

const std::array<std::array<int, 3>, 6> kPerms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                                {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

}  // namespace

SymPoly3::SymPoly3(const Rational& c) {
  if (!c.is_zero()) terms_[{0, 0, 0}] = c;
}

Rational SymPoly3::coeff(unsigned a, unsigned b, unsigned c) const {
  auto it = terms_.find(sorted_desc({a, b, c}));
  return it == terms_.end() ? Rational(0) : it->second;
}

void SymPoly3::add_term(Exponent e, const Rational& c) {
  if (c.is_zero()) return;
  e = sorted_desc(e);
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (inserted) return;
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

Poly3 SymPoly3::to_poly() const {
  Poly3 p;
  for (const auto& [e, c] : terms_) {
    const Rational w = c / Rational(6);
    for (const auto& perm : kPerms) {
      p.add_term({e[static_cast<std::size_t>(perm[0])], e[static_cast<std::size_t>(perm[1])],
                  e[static_cast<std::size_t>(perm[2])]},
                 w);
    }
  }
  return p;
}

Rational SymPoly3::operator()(const Rational& x, const Rational& y, const Rational& z) const {
  return to_poly()(x, y, z);
}

SymPoly3& SymPoly3::operator+=(const SymPoly3& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

SymPoly3& SymPoly3::operator-=(const SymPoly3& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

SymPoly3& SymPoly3::operator*=(const Rational& s) {
  if (s.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

std::string SymPoly3::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    os << (first ? (c.sign() < 0 ? "-" : "") : (c.sign() < 0 ? " - " : " + "));
    first = false;
    os << abs(c);
    if (e[0] + e[1] + e[2] > 0) os << "*m" << e[0] << e[1] << e[2];
  }
  return os.str();
}

SymPoly3 m_sym(unsigned i, unsigned j, unsigned k) {
  SymPoly3 s;
  s.add_term({i, j, k}, Rational(1));
  return s;
}

SymPoly3 symmetrize(const Poly3& p) {
  SymPoly3 s;
  for (const auto& [e, c] : p.terms()) s.add_term(e, c);
  return s;
}

bool is_symmetric(const Poly3& p) {
  for (const auto& perm : kPerms) {
    if (!(p.permute(perm) == p)) return false;
  }
  return true;
}

Poly3 ynk_entry(int n, int k, int i, int j) {
  if (n < 3) throw std::invalid_argument("ynk_entry: dimension must be >= 3");
  if (k < 0 || i < 0 || j < 0) throw std::invalid_argument("ynk_entry: negative index");
  const UniPoly c = gegenbauer(n - 1, k);
  const Poly3 x = Poly3::var(0), y = Poly3::var(1), z = Poly3::var(2);
  const Poly3 u = z - x * y;
  const Poly3 w = (Poly3(Rational(1)) - x * x) * (Poly3(Rational(1)) - y * y);
  Poly3 body;
  for (int p = 0; p <= c.degree(); ++p) {
    const Rational& cp = c.coeffs()[static_cast<std::size_t>(p)];
    if (cp.is_zero()) continue;
    // Parity of C_k guarantees the radical cancels.
    if ((k - p) % 2 != 0) throw std::logic_error("ynk_entry: radical does not cancel");
    body += cp * pow(u, static_cast<unsigned>(p)) * pow(w, static_cast<unsigned>((k - p) / 2));
  }
  return pow(x, static_cast<unsigned>(i)) * pow(y, static_cast<unsigned>(j)) * body;
}

ThreePointBlock snk_matrix(int n, int k, int size) {
  if (size < 1) throw std::invalid_argument("snk_matrix: size must be >= 1");
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, ThreePointBlock> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({n, k, size});
    if (it != cache.end()) return it->second;
  }
  ThreePointBlock b{n, k, size, {}};
  b.entries.assign(static_cast<std::size_t>(size), std::vector<SymPoly3>(static_cast<std::size_t>(size)));
  for (int i = 0; i < size; ++i) {
    for (int j = i; j < size; ++j) {
      const SymPoly3 s = symmetrize(ynk_entry(n, k, i, j));
      b.entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
      b.entries[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = s;
    }
  }
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(std::make_tuple(n, k, size), b);
  return b;
}

std::vector<int> tuple_sizes(const MatrixTuple& t) {
  std::vector<int> s;
  for (const auto& m : t) s.push_back(static_cast<int>(m.rows()));
  return s;
}

MatrixTuple zero_tuple(const std::vector<int>& sizes) {
  MatrixTuple t;
  for (int s : sizes) t.push_back(QMatrix::Constant(s, s, Rational(0)));
  return t;
}

MatrixTuple operator+(const MatrixTuple& a, const MatrixTuple& b) {
  if (tuple_sizes(a) != tuple_sizes(b)) throw std::invalid_argument("tuple sum: shape mismatch");
  MatrixTuple r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += b[k];
  return r;
}

MatrixTuple operator*(const Rational& s, const MatrixTuple& a) {
  MatrixTuple r = a;
  for (auto& m : r) m *= s;
  return r;
}

SymPoly3 expand(const MatrixTuple& tuple, int n) {
  SymPoly3 out;
  for (std::size_t k = 0; k < tuple.size(); ++k) {
    const QMatrix& f = tuple[k];
    if (f.rows() != f.cols()) throw std::invalid_argument("expand: non-square block");
    const ThreePointBlock s = snk_matrix(n, static_cast<int>(k), static_cast<int>(f.rows()));
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      for (Eigen::Index j = 0; j < f.cols(); ++j) {
        if (f(i, j).is_zero()) continue;
        out += f(i, j) * s(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  return out;
}

QVector tuple_coordinates(const MatrixTuple& t) {
  std::vector<Rational> v;
  for (const auto& m : t) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = i; j < m.cols(); ++j) v.push_back(m(i, j));
    }
  }
  QVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

MatrixTuple tuple_from_coordinates(const QVector& v, const std::vector<int>& sizes) {
  MatrixTuple t = zero_tuple(sizes);
  Eigen::Index p = 0;
  for (auto& m : t) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = i; j < m.cols(); ++j) {
        if (p >= v.size()) throw std::invalid_argument("tuple_from_coordinates: too few values");
        m(i, j) = v(p);
        m(j, i) = v(p);
        ++p;
      }
    }
  }
  if (p != v.size()) throw std::invalid_argument("tuple_from_coordinates: too many values");
  return t;
}

ExpansionMap expansion_map(int n, const std::vector<int>& sizes) {
  std::vector<SymPoly3> columns;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const ThreePointBlock s = snk_matrix(n, static_cast<int>(k), sizes[k]);
    for (int i = 0; i < sizes[k]; ++i) {
      for (int j = i; j < sizes[k]; ++j) {
        columns.push_back(i == j ? s(i, j) : Rational(2) * s(i, j));
      }
    }
  }
  std::map<Exponent, Eigen::Index> index;
  for (const auto& c : columns) {
    for (const auto& [e, v] : c.terms()) index.emplace(e, 0);
  }
  ExpansionMap out{sizes, {}, {}};
  for (auto& [e, idx] : index) {
    idx = static_cast<Eigen::Index>(out.basis.size());
    out.basis.push_back(e);
  }
  out.matrix = QMatrix::Constant(static_cast<Eigen::Index>(out.basis.size()),
                                 static_cast<Eigen::Index>(columns.size()), Rational(0));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    for (const auto& [e, v] : columns[c].terms()) out.matrix(index[e], static_cast<Eigen::Index>(c)) = v;
  }
  return out;
}

std::vector<MatrixTuple> kernel_basis(int n, const std::vector<int>& sizes) {
  const ExpansionMap em = expansion_map(n, sizes);
  const QMatrix ns = nullspace(em.matrix);
  std::vector<MatrixTuple> out;
  for (Eigen::Index c = 0; c < ns.cols(); ++c) out.push_back(tuple_from_coordinates(ns.col(c), sizes));
  return out;
}

bool in_span(const std::vector<MatrixTuple>& basis, const MatrixTuple& t) {
  if (basis.empty()) return tuple_coordinates(t).isZero();
  const QVector target = tuple_coordinates(t);
  QMatrix a(target.size(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = tuple_coordinates(basis[i]);
  return solve_linear(a, target).consistent();
}

QMatrix triple_sum(const GramMatrix& gram, int n, int k, int size) {
  const Eigen::Index N = gram.rows();
  for (Eigen::Index i = 0; i < N; ++i) {
    if (gram(i, i) != Rational(1)) throw std::invalid_argument("triple_sum: diagonal must be 1");
  }
  // Entries of S are symmetric, so count sorted value triples.
  std::map<std::array<Rational, 3>, long> counts;
  for (Eigen::Index a = 0; a < N; ++a) {
    for (Eigen::Index b = 0; b < N; ++b) {
      for (Eigen::Index c = 0; c < N; ++c) {
        std::array<Rational, 3> t{gram(a, b), gram(a, c), gram(b, c)};
        std::sort(t.begin(), t.end());
        ++counts[t];
      }
    }
  }
  const ThreePointBlock s = snk_matrix(n, k, size);
  QMatrix out = QMatrix::Constant(size, size, Rational(0));
  for (int i = 0; i < size; ++i) {
    for (int j = i; j < size; ++j) {
      const Poly3 p = s(i, j).to_poly();
      Rational acc(0);
      for (const auto& [t, cnt] : counts) acc += Rational(cnt) * p(t[0], t[1], t[2]);
      out(i, j) = acc;
      out(j, i) = acc;
    }
  }
  return out;
}

Verdict psd_sample_test(int n, int k, int size, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> count(2, 8);
  const ThreePointBlock s = snk_matrix(n, k, size);
  std::vector<std::vector<Poly3>> polys(static_cast<std::size_t>(size), std::vector<Poly3>(static_cast<std::size_t>(size)));
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) polys[i][j] = s(i, j).to_poly();
  double worst = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const int N = count(rng);
    Eigen::MatrixXd pts(N, n);
    for (int a = 0; a < N; ++a) {
      for (int d = 0; d < n; ++d) pts(a, d) = normal(rng);
      pts.row(a).normalize();
    }
    const Eigen::MatrixXd g = pts * pts.transpose();
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(size, size);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        for (int c = 0; c < N; ++c)
          for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j) sum(i, j) += polys[i][j].eval_double(g(a, b), g(a, c), g(b, c));
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sum).eigenvalues().minCoeff();
    worst = std::min(worst, lo);
  }
  std::ostringstream os;
  os << "n=" << n << " k=" << k << " size=" << size << " trials=" << trials << " min eigenvalue " << worst;
  return {"S^n_k sampling", worst >= -1e-8, os.str()};
}

}  // namespace spherebound
