#include "spherebound/sdpio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <sys/wait.h>

#include <json.hpp>

#include "spherebound/lpbound.hpp"
#include "spherebound/uniqueness.hpp"

namespace spherebound {

namespace {

using Point3 = std::array<Rational, 3>;
using Kind = SdpaFormatError::Kind;

const Rational kTraceCap(10000);

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& tok, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v)) {
    throw SdpaFormatError(Kind::NonNumeric, std::string(what) + ": non-numeric token '" + tok + "'");
  }
  return v;
}

int parse_int(const std::string& tok, const char* what) {
  const double v = parse_double(tok, what);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw SdpaFormatError(Kind::NonNumeric, std::string(what) + ": expected an integer, got '" + tok + "'");
  }
  return static_cast<int>(v);
}

std::vector<std::string> tokens_of(const std::string& text) {
  std::string clean = text;
  for (char& ch : clean) {
    if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
  }
  std::istringstream is(clean);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

/// Upper-triangular coordinate layout of a tuple, plus B last.
struct Layout {
  std::vector<int> sizes;
  std::vector<int> offset;
  int coords = 0;

  explicit Layout(std::vector<int> s) : sizes(std::move(s)) {
    for (int size : sizes) {
      offset.push_back(coords);
      coords += size * (size + 1) / 2;
    }
  }
  int index(std::size_t k, int i, int j) const {
    if (i > j) std::swap(i, j);
    const int s = sizes[k];
    return offset[k] + i * s - i * (i - 1) / 2 + (j - i);
  }
  int b_index() const { return coords; }
  int width() const { return coords + 1; }
};

/// Linear functionals z -> F(p) and z -> dF/dx_i(p) on certificate coordinates.
class Evaluator {
 public:
  Evaluator(int n, const Layout& layout) : layout_(layout) {
    const ExpansionMap em = expansion_map(n, layout.sizes);
    map_ = em.matrix;
    for (const auto& e : em.basis) {
      const Poly3 p = m_sym(e[0], e[1], e[2]).to_poly();
      basis_.push_back(p);
      grads_.push_back({p.derivative(0), p.derivative(1), p.derivative(2)});
    }
  }

  QVector value(const Point3& p) const {
    QVector m(static_cast<Eigen::Index>(basis_.size()));
    for (std::size_t r = 0; r < basis_.size(); ++r) m(static_cast<Eigen::Index>(r)) = basis_[r](p[0], p[1], p[2]);
    return extend(m);
  }

  QVector gradient(const Point3& p, int var) const {
    QVector m(static_cast<Eigen::Index>(basis_.size()));
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      m(static_cast<Eigen::Index>(r)) = grads_[r][static_cast<std::size_t>(var)](p[0], p[1], p[2]);
    }
    return extend(m);
  }

 private:
  QVector extend(const QVector& m) const {
    QVector w = QVector::Zero(layout_.width());
    w.head(layout_.coords) = map_.transpose() * m;
    return w;
  }

  Layout layout_;
  QMatrix map_;
  std::vector<Poly3> basis_;
  std::vector<std::array<Poly3, 3>> grads_;
};

QVector unit(Eigen::Index size, Eigen::Index i) {
  QVector v = QVector::Zero(size);
  v(i) = 1;
  return v;
}

Rational rationalise(double v, long den) { return best_approximation(v, mpz_class(den)); }

bool in_d(const Point3& p) { return gram_determinant()(p[0], p[1], p[2]).sign() >= 0; }

double sq_distance(const Point3& a, const Point3& b) {
  double s = 0;
  for (int i = 0; i < 3; ++i) {
    const double d = a[static_cast<std::size_t>(i)].to_double() - b[static_cast<std::size_t>(i)].to_double();
    s += d * d;
  }
  return s;
}

std::vector<Rational> segment_values(const Rational& t, const GridSpec& grid) {
  std::vector<Rational> u;
  const int m = std::max(grid.segment_points, 2);
  for (int i = 0; i < m; ++i) u.push_back(Rational(-1) + (t + 1) * Rational(i, m - 1));
  for (const auto& v : grid.extra_values) {
    if (v >= Rational(-1) && v <= t) u.push_back(v);
  }
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

/// Everything the generic and tight builds share.
struct Builder {
  int n;
  Rational t;
  int d;
  Layout layout;
  Evaluator eval;
  QVector particular;
  QMatrix directions;
  bool margin;

  Builder(int n_, Rational t_, int d_, const std::vector<int>& sizes)
      : n(n_), t(std::move(t_)), d(d_), layout(sizes), eval(n_, layout), margin(false) {}

  int params() const { return static_cast<int>(directions.cols()); }
  int num_vars() const { return params() + (margin ? 1 : 0); }

  /// Affine form over y: column 0 constant, then one column per variable.
  QVector compose(const Rational& constant, const QVector& lin, const Rational& margin_coeff = Rational(0)) const {
    QVector out = QVector::Zero(num_vars() + 1);
    out(0) = constant + lin.dot(particular);
    out.segment(1, params()) = directions.transpose() * lin;
    if (margin) out(num_vars()) = margin_coeff;
    return out;
  }

  QMatrix block_of(const QVector& z, std::size_t k) const {
    const int s = layout.sizes[k];
    QMatrix m(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) m(i, j) = z(layout.index(k, i, j));
    return m;
  }

  /// Q^T (F_k - [k = 0] E_0) Q - margin * I as affine matrices.
  std::vector<QMatrix> psd_block(std::size_t k, const QMatrix& q) const {
    const Eigen::Index s = q.cols();
    std::vector<QMatrix> out;
    QMatrix c = block_of(particular, k);
    if (k == 0) c(0, 0) -= 1;
    out.push_back(q.transpose() * c * q);
    for (int j = 0; j < params(); ++j) {
      const QVector dj = directions.col(j);
      out.push_back(q.transpose() * block_of(dj, k) * q);
    }
    if (margin) out.push_back(-QMatrix::Identity(s, s));
    return out;
  }
};

QMatrix rows_to_matrix(const std::vector<QVector>& rows, Eigen::Index width) {
  QMatrix m(static_cast<Eigen::Index>(rows.size()), width);
  for (std::size_t r = 0; r < rows.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return m;
}

nlohmann::ordered_json rationals_json(const QVector& v) {
  auto a = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i).str());
  return a;
}

std::string mode_name(SdpMode m) { return m == SdpMode::Generic ? "generic" : "tight-face"; }

}  // namespace

std::string write_sdpa(const SdpaProblem& p) {
  std::ostringstream os;
  os << "\"sphere-bound three-point SDP\"\n";
  os << p.num_vars() << "\n" << p.block_sizes.size() << "\n";
  for (std::size_t b = 0; b < p.block_sizes.size(); ++b) os << (b ? " " : "") << p.block_sizes[b];
  os << "\n";
  for (std::size_t i = 0; i < p.c.size(); ++i) os << (i ? " " : "") << fmt17(p.c[i]);
  os << "\n";
  for (const auto& e : p.entries) {
    os << e.matrix << " " << e.block << " " << e.i << " " << e.j << " " << fmt17(e.value) << "\n";
  }
  return os.str();
}

SdpaProblem read_sdpa(const std::string& text) {
  std::istringstream lines(text);
  std::string body;
  bool header = true;
  for (std::string line; std::getline(lines, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (header && first != std::string::npos && (line[first] == '"' || line[first] == '*')) continue;
    if (first != std::string::npos) header = false;
    body += line + "\n";
  }
  const auto tok = tokens_of(body);
  std::size_t pos = 0;
  auto next = [&](const char* what) -> const std::string& {
    if (pos >= tok.size()) throw SdpaFormatError(Kind::Malformed, std::string("sdpa: truncated at ") + what);
    return tok[pos++];
  };
  SdpaProblem p;
  const int m = parse_int(next("variable count"), "variable count");
  const int nb = parse_int(next("block count"), "block count");
  if (m < 0 || nb <= 0) throw SdpaFormatError(Kind::Malformed, "sdpa: bad header counts");
  for (int b = 0; b < nb; ++b) {
    const int s = parse_int(next("block sizes"), "block size");
    if (s == 0) throw SdpaFormatError(Kind::WrongSize, "sdpa: block of size 0");
    p.block_sizes.push_back(s);
  }
  for (int i = 0; i < m; ++i) p.c.push_back(parse_double(next("objective"), "objective"));
  while (pos < tok.size()) {
    if (tok.size() - pos < 5) throw SdpaFormatError(Kind::Malformed, "sdpa: incomplete entry line");
    SdpaProblem::Entry e;
    e.matrix = parse_int(tok[pos], "matrix index");
    e.block = parse_int(tok[pos + 1], "block index");
    e.i = parse_int(tok[pos + 2], "row index");
    e.j = parse_int(tok[pos + 3], "column index");
    e.value = parse_double(tok[pos + 4], "entry value");
    pos += 5;
    if (e.matrix < 0 || e.matrix > m) {
      throw SdpaFormatError(Kind::WrongSize, "sdpa: matrix index " + std::to_string(e.matrix) + " out of range");
    }
    if (e.block < 1 || e.block > nb) {
      throw SdpaFormatError(Kind::WrongSize, "sdpa: block index " + std::to_string(e.block) + " out of range");
    }
    const int s = p.block_sizes[static_cast<std::size_t>(e.block - 1)];
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i < 1 || e.j > std::abs(s) || (s < 0 && e.i != e.j)) {
      throw SdpaFormatError(Kind::WrongSize, "sdpa: entry (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                                                 ") outside block " + std::to_string(e.block));
    }
    p.entries.push_back(e);
  }
  return p;
}

SdpaSolution parse_solution(const std::string& text, const SdpaProblem& problem) {
  std::istringstream lines(text);
  std::string first;
  while (std::getline(lines, first) && first.find_first_not_of(" \t\r") == std::string::npos) {
  }
  const auto ytok = tokens_of(first);
  if (ytok.empty()) throw SdpaFormatError(Kind::Malformed, "solution: empty file");
  SdpaSolution sol;
  for (const auto& tkn : ytok) sol.y.push_back(parse_double(tkn, "solution y"));
  if (static_cast<int>(sol.y.size()) != problem.num_vars()) {
    throw SdpaFormatError(Kind::WrongSize, "solution: y has " + std::to_string(sol.y.size()) + " entries, expected " +
                                               std::to_string(problem.num_vars()));
  }
  const std::size_t nb = problem.block_sizes.size();
  for (auto* sec : {&sol.z, &sol.x}) {
    for (int s : problem.block_sizes) sec->push_back(Eigen::MatrixXd::Zero(std::abs(s), std::abs(s)));
  }
  std::vector<std::vector<bool>> seen(2, std::vector<bool>(nb, false));
  std::string rest;
  for (std::string line; std::getline(lines, line);) rest += line + "\n";
  const auto tok = tokens_of(rest);
  if (tok.size() % 5 != 0) throw SdpaFormatError(Kind::Malformed, "solution: incomplete entry line");
  for (std::size_t pos = 0; pos < tok.size(); pos += 5) {
    const int mat = parse_int(tok[pos], "solution matrix");
    const int blk = parse_int(tok[pos + 1], "solution block");
    int i = parse_int(tok[pos + 2], "solution row");
    int j = parse_int(tok[pos + 3], "solution column");
    const double v = parse_double(tok[pos + 4], "solution value");
    if (mat != 1 && mat != 2) throw SdpaFormatError(Kind::Malformed, "solution: matrix number must be 1 or 2");
    if (blk < 1 || blk > static_cast<int>(nb)) {
      throw SdpaFormatError(Kind::WrongSize, "solution: block " + std::to_string(blk) + " not in problem");
    }
    const int s = problem.block_sizes[static_cast<std::size_t>(blk - 1)];
    if (i > j) std::swap(i, j);
    if (i < 1 || j > std::abs(s) || (s < 0 && i != j)) {
      throw SdpaFormatError(Kind::WrongSize, "solution: entry (" + std::to_string(i) + ", " + std::to_string(j) +
                                                 ") outside block " + std::to_string(blk));
    }
    auto& m = (mat == 1 ? sol.z : sol.x)[static_cast<std::size_t>(blk - 1)];
    m(i - 1, j - 1) = v;
    m(j - 1, i - 1) = v;
    seen[static_cast<std::size_t>(mat - 1)][static_cast<std::size_t>(blk - 1)] = true;
  }
  for (std::size_t sec = 0; sec < 2; ++sec) {
    for (std::size_t b = 0; b < nb; ++b) {
      if (!seen[sec][b]) {
        throw SdpaFormatError(Kind::MissingBlock, std::string("solution: block ") + std::to_string(b + 1) +
                                                      " missing from " + (sec == 0 ? "Z" : "X"));
      }
    }
  }
  return sol;
}

std::string metadata_to_json(const SdpMetadata& m) {
  nlohmann::ordered_json j;
  j["n"] = m.n;
  j["t"] = m.t.str();
  j["d"] = m.d;
  j["sizes"] = m.sizes;
  j["mode"] = mode_name(m.mode);
  j["nbar"] = m.nbar.str();
  j["f0"] = m.f0.str();
  j["num_vars"] = m.num_vars;
  j["grid_points"] = m.grid_points;
  j["segment_points"] = m.segment_points;
  j["particular"] = rationals_json(m.particular);
  auto dirs = nlohmann::ordered_json::array();
  for (Eigen::Index c = 0; c < m.directions.cols(); ++c) dirs.push_back(rationals_json(m.directions.col(c)));
  j["directions"] = dirs;
  auto checks = nlohmann::ordered_json::array();
  for (const auto& v : m.checks) checks.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  j["checks"] = checks;
  return j.dump(2) + "\n";
}

SdpMetadata metadata_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("metadata: invalid JSON: ") + e.what());
  }
  for (const char* key : {"n", "t", "d", "sizes", "mode", "nbar", "f0", "num_vars", "particular", "directions"}) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("metadata: missing field ") + key);
  }
  SdpMetadata m;
  try {
    m.n = j["n"].get<int>();
    m.t = Rational::parse(j["t"].get<std::string>());
    m.d = j["d"].get<int>();
    m.sizes = j["sizes"].get<std::vector<int>>();
    const auto mode = j["mode"].get<std::string>();
    if (mode != "generic" && mode != "tight-face") throw std::invalid_argument("metadata: unknown mode " + mode);
    m.mode = mode == "generic" ? SdpMode::Generic : SdpMode::TightFace;
    m.nbar = Rational::parse(j["nbar"].get<std::string>());
    m.f0 = Rational::parse(j["f0"].get<std::string>());
    m.num_vars = j["num_vars"].get<int>();
    m.grid_points = j.value("grid_points", std::size_t{0});
    m.segment_points = j.value("segment_points", std::size_t{0});
    const auto& part = j["particular"];
    m.particular = QVector(static_cast<Eigen::Index>(part.size()));
    for (std::size_t i = 0; i < part.size(); ++i) {
      m.particular(static_cast<Eigen::Index>(i)) = Rational::parse(part[i].get<std::string>());
    }
    const auto& dirs = j["directions"];
    m.directions = QMatrix(m.particular.size(), static_cast<Eigen::Index>(dirs.size()));
    for (std::size_t c = 0; c < dirs.size(); ++c) {
      if (static_cast<Eigen::Index>(dirs[c].size()) != m.particular.size()) {
        throw std::invalid_argument("metadata: direction length mismatch");
      }
      for (std::size_t r = 0; r < dirs[c].size(); ++r) {
        m.directions(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            Rational::parse(dirs[c][r].get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("metadata: ") + e.what());
  }
  if (Layout(m.sizes).width() != m.particular.size()) {
    throw std::invalid_argument("metadata: parametrisation does not match sizes");
  }
  return m;
}

std::vector<int> default_sizes(int d) {
  if (d < 0) throw std::invalid_argument("default_sizes: negative degree");
  std::vector<int> s;
  for (int k = 0; k < d; ++k) s.push_back(d + 2 - k);
  s.push_back(1);
  return s;
}

std::vector<Point3> grid_points(const Rational& t, const GridSpec& grid) {
  std::vector<Rational> axis;
  for (double v : chebyshev_grid(-1.0, t.to_double(), grid.points_per_axis)) {
    axis.push_back(rationalise(v, grid.node_denominator));
  }
  axis.front() = Rational(-1);
  axis.back() = t;
  for (const auto& v : grid.extra_values) {
    if (v >= Rational(-1) && v <= t) axis.push_back(v);
  }
  std::sort(axis.begin(), axis.end());
  axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
  std::vector<Point3> pts;
  for (std::size_t a = 0; a < axis.size(); ++a)
    for (std::size_t b = a; b < axis.size(); ++b)
      for (std::size_t c = b; c < axis.size(); ++c) {
        Point3 p{axis[a], axis[b], axis[c]};
        if (in_d(p)) pts.push_back(p);
      }
  for (auto p : grid.extra_points) {
    std::sort(p.begin(), p.end());
    if (p[0] < Rational(-1) || p[2] > t || !in_d(p)) {
      throw std::invalid_argument("grid: point (" + p[0].str() + ", " + p[1].str() + ", " + p[2].str() +
                                  ") is outside D");
    }
    pts.push_back(p);
  }
  return pts;
}

SdpInstance assemble(int n, const Rational& t, int d, const std::vector<int>& sizes_in, const GridSpec& grid,
                     const Rational& nbar) {
  if (n < 3) throw std::invalid_argument("assemble: n must be at least 3");
  if (t <= Rational(-1) || t >= Rational(1)) throw std::invalid_argument("assemble: t must lie in (-1, 1)");
  const std::vector<int> sizes = sizes_in.empty() ? default_sizes(d) : sizes_in;
  if (static_cast<int>(sizes.size()) != d + 1) throw std::invalid_argument("assemble: need d + 1 block sizes");
  Builder bld(n, t, d, sizes);
  const Eigen::Index w = bld.layout.width();
  bld.particular = QVector::Zero(w);
  bld.directions = QMatrix::Identity(w, w);

  SdpInstance inst;
  inst.meta.n = n;
  inst.meta.t = t;
  inst.meta.d = d;
  inst.meta.sizes = sizes;
  inst.meta.mode = SdpMode::Generic;
  inst.meta.nbar = nbar;
  inst.meta.particular = bld.particular;
  inst.meta.directions = bld.directions;
  inst.meta.num_vars = bld.num_vars();

  const QVector f111 = bld.eval.value({Rational(1), Rational(1), Rational(1)});
  inst.objective = (f111 + Rational(3) * (nbar - 1) * unit(w, bld.layout.b_index()));

  for (std::size_t k = 0; k < sizes.size(); ++k) {
    inst.psd.push_back(bld.psd_block(k, QMatrix::Identity(sizes[k], sizes[k])));
  }
  std::vector<QVector> rows;
  const auto pts = grid_points(t, grid);
  for (const auto& p : pts) rows.push_back(bld.compose(Rational(0), -bld.eval.value(p)));
  const auto seg = segment_values(t, grid);
  for (const auto& u : seg) {
    rows.push_back(bld.compose(Rational(0), unit(w, bld.layout.b_index()) - bld.eval.value({u, u, Rational(1)})));
  }
  QVector trace = QVector::Zero(w);
  for (std::size_t k = 0; k < sizes.size(); ++k)
    for (int i = 0; i < sizes[k]; ++i) trace(bld.layout.index(k, i, i)) = -1;
  rows.push_back(bld.compose(kTraceCap, trace));
  inst.lp = rows_to_matrix(rows, bld.num_vars() + 1);
  inst.meta.grid_points = pts.size();
  inst.meta.segment_points = seg.size();
  return inst;
}

SdpInstance assemble_tight_face(int n, const Rational& t, int d, const std::vector<int>& sizes_in,
                                const GridSpec& grid_in, const TightFace& face) {
  const std::vector<int> sizes = sizes_in.empty() ? default_sizes(d) : sizes_in;
  if (static_cast<int>(sizes.size()) != d + 1) throw std::invalid_argument("assemble: need d + 1 block sizes");
  if (face.gram.rows() != face.N) throw std::invalid_argument("assemble: Gram matrix does not match N");
  Builder bld(n, t, d, sizes);
  const Layout& lay = bld.layout;
  const Eigen::Index w = lay.width();
  const Rational one(1);

  std::set<Rational> root_set;
  for (Eigen::Index i = 0; i < face.gram.rows(); ++i)
    for (Eigen::Index j = i + 1; j < face.gram.cols(); ++j) root_set.insert(face.gram(i, j));
  std::vector<Point3> zeros;
  for (const auto& [tri, a] : distribution_from_gram(face.gram)) {
    if (tri[2] < one) zeros.push_back(tri);
  }
  auto interior = [&](const Rational& v) { return v > Rational(-1) && v < t; };

  std::vector<QVector> eq;
  std::vector<Rational> rhs;
  for (const auto& z : zeros) {
    eq.push_back(bld.eval.value(z));
    rhs.emplace_back(0);
    if (gram_determinant()(z[0], z[1], z[2]).sign() > 0) {
      for (int i = 0; i < 3; ++i) {
        if (!interior(z[static_cast<std::size_t>(i)])) continue;
        eq.push_back(bld.eval.gradient(z, i));
        rhs.emplace_back(0);
      }
    }
  }
  const QVector eb = unit(w, lay.b_index());
  for (const auto& r : root_set) {
    const Point3 p{r, r, one};
    eq.push_back(bld.eval.value(p) - eb);
    rhs.emplace_back(0);
    if (interior(r)) {
      eq.push_back(bld.eval.gradient(p, 0) + bld.eval.gradient(p, 1));
      rhs.emplace_back(0);
    }
  }
  std::vector<QMatrix> projections;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const QMatrix tk = triple_sum(face.gram, n, static_cast<int>(k), sizes[k]);
    for (int i = 0; i < sizes[k]; ++i) {
      for (int j = 0; j < sizes[k]; ++j) {
        QVector row = QVector::Zero(w);
        for (int l = 0; l < sizes[k]; ++l) row(lay.index(k, i, l)) += tk(l, j);
        if (row.isZero()) continue;
        eq.push_back(row);
        rhs.push_back(k == 0 && i == 0 ? tk(0, j) : Rational(0));
      }
    }
    projections.push_back(tk.isZero() ? QMatrix(QMatrix::Identity(sizes[k], sizes[k])) : nullspace(tk));
  }

  const QMatrix a = rows_to_matrix(eq, w);
  QVector b(static_cast<Eigen::Index>(rhs.size()));
  for (std::size_t i = 0; i < rhs.size(); ++i) b(static_cast<Eigen::Index>(i)) = rhs[i];
  const SolutionReport sol = solve_linear(a, b);

  SdpInstance inst;
  inst.meta.n = n;
  inst.meta.t = t;
  inst.meta.d = d;
  inst.meta.sizes = sizes;
  inst.meta.mode = SdpMode::TightFace;
  inst.meta.nbar = Rational(face.N);
  inst.meta.checks.push_back({"tightness conditions consistent", sol.consistent(),
                              std::to_string(eq.size()) + " equations in " + std::to_string(w) + " unknowns"});
  if (!sol.consistent()) throw std::runtime_error("assemble: tightness conditions are inconsistent");
  bld.particular = sol.particular;
  bld.directions = sol.kind == SolutionReport::Kind::Unique ? QMatrix(w, 0) : sol.nullspace;
  bld.margin = true;
  inst.meta.checks.push_back({"face dimension", bld.params() > 0, std::to_string(bld.params()) + " free parameters"});
  inst.meta.particular = bld.particular;
  inst.meta.directions = bld.directions;
  inst.meta.num_vars = bld.num_vars();

  inst.objective = QVector::Zero(bld.num_vars());
  inst.objective(bld.num_vars() - 1) = -1;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (projections[k].cols() > 0) inst.psd.push_back(bld.psd_block(k, projections[k]));
  }

  GridSpec grid = grid_in;
  for (const auto& r : root_set) grid.extra_values.push_back(r);
  std::vector<QVector> rows;
  const auto pts = grid_points(t, grid);
  for (const auto& p : pts) {
    double rho = 1;
    for (const auto& z : zeros) rho = std::min(rho, sq_distance(p, z));
    rows.push_back(bld.compose(Rational(0), -bld.eval.value(p), -rationalise(face.weight * rho, 1000000)));
  }
  const auto seg = segment_values(t, grid);
  for (const auto& u : seg) {
    double rho = 1;
    for (const auto& r : root_set) {
      const double dist = std::abs(u.to_double() - r.to_double());
      rho *= interior(r) ? dist * dist : dist;
    }
    rho = std::min(rho, 1.0);
    rows.push_back(bld.compose(Rational(0), eb - bld.eval.value({u, u, one}), -rationalise(face.weight * rho, 1000000)));
  }
  QVector cap = QVector::Zero(bld.num_vars() + 1);
  cap(0) = rationalise(face.margin_cap, 1);
  cap(bld.num_vars()) = -1;
  rows.push_back(cap);
  inst.lp = rows_to_matrix(rows, bld.num_vars() + 1);
  inst.meta.grid_points = pts.size();
  inst.meta.segment_points = seg.size();
  return inst;
}

SdpaProblem to_sdpa(const SdpInstance& inst) {
  SdpaProblem p;
  const int m = inst.meta.num_vars;
  for (Eigen::Index i = 0; i < inst.objective.size(); ++i) p.c.push_back(inst.objective(i).to_double());
  int block = 0;
  for (const auto& blk : inst.psd) {
    ++block;
    const auto s = blk.front().rows();
    p.block_sizes.push_back(static_cast<int>(s));
    for (int v = 0; v <= m; ++v) {
      const QMatrix& a = blk[static_cast<std::size_t>(v)];
      for (Eigen::Index i = 0; i < s; ++i)
        for (Eigen::Index j = i; j < s; ++j) {
          if (a(i, j).is_zero()) continue;
          const double val = v == 0 ? -a(i, j).to_double() : a(i, j).to_double();
          p.entries.push_back({v, block, static_cast<int>(i + 1), static_cast<int>(j + 1), val});
        }
    }
  }
  if (inst.lp.rows() > 0) {
    ++block;
    p.block_sizes.push_back(-static_cast<int>(inst.lp.rows()));
    for (int v = 0; v <= m; ++v) {
      for (Eigen::Index r = 0; r < inst.lp.rows(); ++r) {
        if (inst.lp(r, v).is_zero()) continue;
        const double val = v == 0 ? -inst.lp(r, v).to_double() : inst.lp(r, v).to_double();
        p.entries.push_back({v, block, static_cast<int>(r + 1), static_cast<int>(r + 1), val});
      }
    }
  }
  return p;
}

NumericCertificate numeric_certificate(const SdpMetadata& meta, const std::vector<double>& y) {
  if (static_cast<int>(y.size()) != meta.num_vars) throw std::invalid_argument("numeric_certificate: wrong y length");
  const Eigen::MatrixXd dirs = to_double(meta.directions);
  Eigen::VectorXd theta(dirs.cols());
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = y[static_cast<std::size_t>(i)];
  const Eigen::VectorXd z = to_double(QMatrix(meta.particular)).col(0) + dirs * theta;
  const Layout lay(meta.sizes);
  NumericCertificate num;
  num.n = meta.n;
  num.t = meta.t;
  for (std::size_t k = 0; k < meta.sizes.size(); ++k) {
    const int s = meta.sizes[k];
    Eigen::MatrixXd m(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) m(i, j) = z(lay.index(k, i, j));
    num.blocks.push_back(m);
  }
  num.B = z(lay.b_index());
  num.f0 = meta.f0.to_double();
  return num;
}

RoundingResult round_certificate(const NumericCertificate& num, long denominator_bound,
                                 const ConditionCOptions& opt) {
  const mpz_class den(denominator_bound);
  RoundingResult res;
  SdpCertificate& c = res.certificate;
  c.n = num.n;
  c.t = num.t;
  for (const auto& m : num.blocks) {
    QMatrix q(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = i; j < m.cols(); ++j) {
        q(i, j) = best_approximation((m(i, j) + m(j, i)) / 2, den);
        q(j, i) = q(i, j);
      }
    c.blocks.push_back(q);
  }
  c.B = best_approximation(num.B, den);
  c.f0 = best_approximation(num.f0, den);
  res.report = verify_full(c, opt);
  res.certified = res.report.pass;
  res.diagnostic = res.certified ? "certified" : "rounded certificate fails verification";
  return res;
}

RoundingResult round_certificate(const SdpMetadata& meta, const std::vector<double>& y, long denominator_bound,
                                 const ConditionCOptions& opt) {
  if (static_cast<int>(y.size()) != meta.num_vars) throw std::invalid_argument("round_certificate: wrong y length");
  const mpz_class den(denominator_bound);
  RoundingResult res;
  QVector theta(meta.directions.cols());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    theta(i) = best_approximation(y[static_cast<std::size_t>(i)], den);
    res.parameters.push_back(theta(i));
  }
  const QVector z = meta.particular + meta.directions * theta;
  const Layout lay(meta.sizes);
  SdpCertificate& c = res.certificate;
  c.n = meta.n;
  c.t = meta.t;
  c.blocks = tuple_from_coordinates(z.head(lay.coords), meta.sizes);
  c.B = z(lay.b_index());
  c.f0 = meta.f0;
  res.report = verify_full(c, opt);
  res.certified = res.report.pass;
  res.diagnostic = res.certified ? "certified" : "rounded certificate fails verification";
  return res;
}

std::optional<BisectionResult> bisect_bound(int n, const Rational& t, int d, const std::vector<int>& sizes,
                                            const GridSpec& grid, Rational lo, Rational hi, const Rational& tol,
                                            const SdpSolver& solver) {
  auto attempt = [&](const Rational& nbar) -> std::optional<BisectionResult> {
    const SdpInstance inst = assemble(n, t, d, sizes, grid, nbar);
    const SdpaProblem prob = to_sdpa(inst);
    const auto y = solver(prob);
    if (!y) return std::nullopt;
    double obj = 0;
    for (std::size_t i = 0; i < y->size(); ++i) obj += prob.c[i] * (*y)[i];
    const double target = (nbar * nbar).to_double();
    if (obj > target * (1 + 1e-9)) return std::nullopt;
    return BisectionResult{nbar, *y, inst.meta, 0};
  };
  auto best = attempt(hi);
  if (!best) return std::nullopt;
  int steps = 0;
  while (hi - lo > tol) {
    const Rational mid = (lo + hi) / 2;
    ++steps;
    if (auto r = attempt(mid)) {
      best = std::move(r);
      hi = mid;
    } else {
      lo = mid;
    }
  }
  best->steps = steps;
  return best;
}

SdpSolver external_solver(const std::string& command, const std::string& workdir) {
  return [command, workdir](const SdpaProblem& p) -> std::optional<std::vector<double>> {
    std::filesystem::create_directories(workdir);
    const std::string in = workdir + "/problem.dat-s";
    const std::string out = workdir + "/problem.sol";
    {
      std::ofstream f(in);
      if (!f) throw std::runtime_error("cannot write " + in);
      f << write_sdpa(p);
    }
    std::filesystem::remove(out);
    const int status = std::system((command + " '" + in + "' '" + out + "'").c_str());
    if (status == -1) throw std::runtime_error("cannot run solver: " + command);
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (code == 2) return std::nullopt;
    if (code != 0) throw std::runtime_error("solver failed with status " + std::to_string(code));
    std::ifstream f(out);
    if (!f) throw std::runtime_error("solver wrote no solution: " + out);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_solution(ss.str(), p).y;
  };
}

}  // namespace spherebound
