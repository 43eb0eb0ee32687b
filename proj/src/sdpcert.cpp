#include "spherebound/sdpcert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace spherebound {

namespace {

QMatrix qmat(std::initializer_list<std::initializer_list<Rational>> rows) {
  QMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (const auto& v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

using Point3 = std::array<Rational, 3>;

std::string point_str(const Point3& p) {
  return "(" + p[0].str() + ", " + p[1].str() + ", " + p[2].str() + ")";
}

std::string box_str(const Box3& b) {
  std::ostringstream os;
  os << b[0] << " x " << b[1] << " x " << b[2];
  return os.str();
}

}  // namespace

bool operator==(const SdpCertificate& a, const SdpCertificate& b) {
  if (a.n != b.n || a.t != b.t || a.B != b.B || a.f0 != b.f0) return false;
  if (a.blocks.size() != b.blocks.size()) return false;
  for (std::size_t k = 0; k < a.blocks.size(); ++k) {
    if (a.blocks[k].rows() != b.blocks[k].rows() || a.blocks[k] != b.blocks[k]) return false;
  }
  return true;
}

SdpCertificate builtin_certificate() {
  SdpCertificate c;
  c.n = 4;
  c.t = Rational(1, 6);
  c.blocks = {qmat({{Rational(2882, 3), 114, -2500, 0},
                    {114, 324, 216, 0},
                    {-2500, 216, 8716, 1296},
                    {0, 0, 1296, 11664}}),
              qmat({{0, 0, 0}, {0, 3588, -4536}, {0, -4536, 11664}}),
              qmat({{2000}})};
  c.B = 250;
  c.f0 = Rational(800, 3);
  return c;
}

std::string certificate_to_json(const SdpCertificate& c) {
  nlohmann::ordered_json j;
  j["n"] = c.n;
  j["t"] = c.t.str();
  auto blocks = nlohmann::ordered_json::array();
  for (const auto& m : c.blocks) {
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      auto row = nlohmann::ordered_json::array();
      for (Eigen::Index s = 0; s < m.cols(); ++s) row.push_back(m(r, s).str());
      rows.push_back(row);
    }
    blocks.push_back(rows);
  }
  j["blocks"] = blocks;
  j["B"] = c.B.str();
  j["f0"] = c.f0.str();
  return j.dump(2) + "\n";
}

SdpCertificate certificate_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("certificate: invalid JSON: ") + e.what());
  }
  auto rational = [](const nlohmann::json& v, const char* what) {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    throw std::invalid_argument(std::string("certificate: ") + what + " must be a \"p/q\" string");
  };
  for (const char* key : {"n", "t", "blocks", "B", "f0"}) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("certificate: missing field ") + key);
  }
  SdpCertificate c;
  c.n = j["n"].get<int>();
  c.t = rational(j["t"], "t");
  c.B = rational(j["B"], "B");
  c.f0 = rational(j["f0"], "f0");
  for (const auto& block : j["blocks"]) {
    const auto size = static_cast<Eigen::Index>(block.size());
    QMatrix m(size, size);
    for (Eigen::Index r = 0; r < size; ++r) {
      if (static_cast<Eigen::Index>(block[r].size()) != size) {
        throw std::invalid_argument("certificate: block is not square");
      }
      for (Eigen::Index s = 0; s < size; ++s) m(r, s) = rational(block[r][s], "block entry");
    }
    if (!is_symmetric(m)) throw std::invalid_argument("certificate: block is not symmetric");
    c.blocks.push_back(m);
  }
  if (c.blocks.empty()) throw std::invalid_argument("certificate: no blocks");
  return c;
}

SdpCertificate load_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open certificate file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return certificate_from_json(ss.str());
}

void save_certificate(const SdpCertificate& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write certificate file: " + path);
  out << certificate_to_json(c);
}

SymPoly3 reference_expansion() {
  SymPoly3 s;
  s.add_term({3, 2, 0}, 11664);
  s.add_term({2, 2, 1}, 11664);
  s.add_term({2, 2, 0}, 7128);
  s.add_term({2, 1, 1}, -9072);
  s.add_term({2, 1, 0}, 432);
  s.add_term({1, 1, 1}, -2412);
  s.add_term({1, 1, 0}, 324);
  s.add_term({1, 0, 0}, 228);
  s.add_term({0, 0, 0}, Rational(-118, 3));
  return s;
}

Verdict verify_expansion(const SdpCertificate& c, const SymPoly3& expected) {
  const SymPoly3 got = expand(c.blocks, c.n);
  Verdict v{"expansion", got == expected, ""};
  if (v.pass) {
    v.detail = got.str();
    return v;
  }
  const SymPoly3 diff = got - expected;
  const auto& [e, d] = *diff.terms().begin();
  v.detail = "coefficient of m" + std::to_string(e[0]) + std::to_string(e[1]) + std::to_string(e[2]) +
             " is " + got.coeff(e[0], e[1], e[2]).str() + ", expected " + expected.coeff(e[0], e[1], e[2]).str();
  return v;
}

Verdict verify_expansion(const SdpCertificate& c) { return verify_expansion(c, reference_expansion()); }

UniPoly diagonal_polynomial(const SdpCertificate& c) {
  return expand(c.blocks, c.n).to_poly().diagonal(Rational(1)) - UniPoly::constant(c.B);
}

UniPoly reference_factorisation(const Rational& scale) {
  return scale * pow(UniPoly::linear_root(Rational(-2, 3)), 2) * UniPoly::linear_root(Rational(1, 6)) *
         UniPoly({Rational(20, 27), Rational(4, 9), Rational(1)});
}

std::optional<bool> factor_sign_nonpositive(const UniPoly& g, const Rational& lo, const Rational& hi) {
  if (g.is_zero()) return true;
  UniPoly q = g;
  int sign = 1;
  const UniPoly one = UniPoly::constant(Rational(1));
  for (const Rational& r : rational_roots(g, lo, hi)) {
    int mult = 0;
    const UniPoly lin = UniPoly::linear_root(r);
    while (true) {
      auto [quot, rem] = divmod(q, lin);
      if (!rem.is_zero()) break;
      q = quot;
      ++mult;
    }
    if (mult % 2 == 0) continue;
    if (r == hi) sign = -sign;
    else if (r != lo) return std::nullopt;
  }
  // Cofactor must keep one sign on [lo, hi].
  if (q.degree() == 0) {
    sign *= q.leading().sign();
  } else if (q.degree() == 1) {
    const Rational root = -q.coeff(0) / q.coeff(1);
    if (lo <= root && root <= hi) return std::nullopt;
    sign *= q(lo).sign();
  } else if (q.degree() == 2) {
    const Rational disc = q.coeff(1) * q.coeff(1) - Rational(4) * q.coeff(2) * q.coeff(0);
    if (disc.sign() >= 0) return std::nullopt;
    sign *= q.leading().sign();
  } else {
    return std::nullopt;
  }
  return sign < 0;
}

ConditionDReport verify_condition_d(const SdpCertificate& c) {
  ConditionDReport r;
  r.g = diagonal_polynomial(c);
  r.factor_identity = r.g == reference_factorisation(Rational(3888));
  r.printed_constant_matches = r.g == reference_factorisation(Rational(1, 3888));
  const Rational lo(-1);
  r.factor_sign_nonpositive = factor_sign_nonpositive(r.g, lo, c.t);
  r.sturm = sturm_max_on(r.g, lo, c.t);
  if (!r.g.is_zero()) r.roots = rational_roots(r.g, lo, c.t);
  r.verdict.name = "condition (d)";
  const bool agree = !r.factor_sign_nonpositive || *r.factor_sign_nonpositive == r.sturm.nonpositive();
  r.verdict.pass = r.sturm.nonpositive() && agree;
  std::ostringstream os;
  if (!r.sturm.nonpositive()) {
    os << "F(x,x,1) - B > 0 at x = " << *r.sturm.witness << " (value " << r.sturm.witness_value << ")";
  } else if (!agree) {
    os << "factor-sign and Sturm paths disagree";
  } else {
    os << "F(x,x,1) - B <= 0 on [-1, " << c.t << "]; rational roots";
    for (const auto& x : r.roots) os << " " << x;
    os << "; factor identity (3888): " << (r.factor_identity ? "yes" : "no");
  }
  r.verdict.detail = os.str();
  return r;
}

std::set<Point3> candidate_zero_set(const SdpCertificate& c) {
  const Poly3 f = expand(c.blocks, c.n).to_poly();
  const UniPoly g = diagonal_polynomial(c);
  std::vector<Rational> roots;
  if (!g.is_zero()) roots = rational_roots(g, Rational(-1), c.t);
  std::set<Point3> out;
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i; j < roots.size(); ++j)
      for (std::size_t k = j; k < roots.size(); ++k) {
        const Point3 p{roots[i], roots[j], roots[k]};
        if (f(p[0], p[1], p[2]).is_zero() && gram_determinant()(p[0], p[1], p[2]).sign() >= 0) out.insert(p);
      }
  return out;
}

bool local_zero_certificate(const Poly3& f, const Point3& z0, const Box3& box) {
  const Poly3 q = f.shift(z0);
  if (!q.coeff({0, 0, 0}).is_zero()) return false;
  Box3 h;
  for (std::size_t v = 0; v < 3; ++v) h[v] = RationalInterval(box[v].lo - z0[v], box[v].hi - z0[v]);
  std::array<Rational, 3> grad;
  std::vector<std::size_t> active, free;
  for (std::size_t v = 0; v < 3; ++v) {
    Exponent e{0, 0, 0};
    e[v] = 1;
    grad[v] = q.coeff(e);
    (grad[v].is_zero() ? free : active).push_back(v);
  }
  // Active coordinates must move against the gradient on the whole box.
  for (std::size_t v : active) {
    if (grad[v].sign() > 0 && h[v].hi.sign() > 0) return false;
    if (grad[v].sign() < 0 && h[v].lo.sign() < 0) return false;
  }
  std::array<Poly3, 3> rest;
  // Free part written as h^T M(h) h with interval entries.
  const auto nf = static_cast<Eigen::Index>(free.size());
  std::vector<std::vector<RationalInterval>> mat(free.size(),
                                                 std::vector<RationalInterval>(free.size(), RationalInterval(Rational(0))));
  for (const auto& [e, c] : q.terms()) {
    const unsigned deg = e[0] + e[1] + e[2];
    if (deg <= 1) continue;
    auto owner = std::find_if(active.begin(), active.end(), [&](std::size_t v) { return e[v] > 0; });
    if (owner != active.end()) {
      Exponent r = e;
      --r[*owner];
      rest[*owner].add_term(r, c);
      continue;
    }
    std::vector<std::size_t> idx;
    for (std::size_t a = 0; a < free.size(); ++a)
      for (unsigned p = 0; p < e[free[a]]; ++p) idx.push_back(a);
    Exponent r = e;
    --r[free[idx[0]]];
    --r[free[idx[1]]];
    const RationalInterval val = interval_eval(Poly3::monomial(r, c), h);
    if (idx[0] == idx[1]) {
      mat[idx[0]][idx[0]] = mat[idx[0]][idx[0]] + val;
    } else {
      const RationalInterval half = val * RationalInterval(Rational(1, 2));
      mat[idx[0]][idx[1]] = mat[idx[0]][idx[1]] + half;
      mat[idx[1]][idx[0]] = mat[idx[1]][idx[0]] + half;
    }
  }
  for (std::size_t v : active) {
    const RationalInterval enc = interval_eval(rest[v], h) + RationalInterval(grad[v]);
    if (grad[v].sign() > 0 && enc.lo.sign() < 0) return false;
    if (grad[v].sign() < 0 && enc.hi.sign() > 0) return false;
  }
  if (free.empty()) return true;
  // h^T M h <= h^T M_mid h + sum_i (sum_j rad_ij) h_i^2.
  QMatrix m(nf, nf);
  for (Eigen::Index i = 0; i < nf; ++i) {
    Rational spread(0);
    for (Eigen::Index j = 0; j < nf; ++j) {
      const auto& cell = mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      m(i, j) = -cell.midpoint();
      spread += cell.width() / Rational(2);
    }
    m(i, i) -= spread;
  }
  return ldlt_psd(m).psd;
}

int configured_workers() {
  if (const char* env = std::getenv("SPHEREBOUND_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return 1;
}

namespace {

const Rational kNearZero(1, 8);

struct BoxItem {
  Box3 box;
  int depth = 0;
};

enum class BoxOutcome { Discarded, Local, Split, Positive, DepthCap };

/// Upper enclosure of f on box after pinning every variable in which f is
/// strictly monotone to the maximising endpoint; `box` returns pinned.
Rational box_upper(const Poly3& f, const std::array<Poly3, 3>& grad, Box3& box) {
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t v = 0; v < 3; ++v) {
      if (box[v].lo == box[v].hi) continue;
      const RationalInterval g = interval_eval(grad[v], box);
      if (g.lo.sign() > 0) {
        box[v] = RationalInterval(box[v].hi, box[v].hi);
        changed = true;
      } else if (g.hi.sign() < 0) {
        box[v] = RationalInterval(box[v].lo, box[v].lo);
        changed = true;
      }
    }
  }
  return centered_eval(f, box).hi;
}

struct BoxResult {
  BoxOutcome outcome = BoxOutcome::Discarded;
  std::vector<BoxItem> children;
  std::optional<Point3> zero;
  std::optional<Point3> positive;
};

ConditionCReport sampled_check(const Poly3& f, const Rational& t, const ConditionCOptions& opt) {
  ConditionCReport r;
  std::vector<long double> grid;
  for (Rational x(-1); x <= t; x += opt.sample_step) grid.push_back(x.to_long_double());
  if (grid.back() != t.to_long_double()) grid.push_back(t.to_long_double());
  std::vector<std::pair<std::array<unsigned, 3>, long double>> terms;
  for (const auto& [e, c] : f.terms()) terms.push_back({e, c.to_long_double()});
  long double worst = -1e300L;
  Point3 worst_pt;
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      for (std::size_t k = j; k < n; ++k) {
        const long double x = grid[i], y = grid[j], z = grid[k];
        if (1 + 2 * x * y * z - x * x - y * y - z * z < -1e-15L) continue;
        long double val = 0;
        for (const auto& [e, c] : terms) {
          long double m = c;
          for (unsigned p = 0; p < e[0]; ++p) m *= x;
          for (unsigned p = 0; p < e[1]; ++p) m *= y;
          for (unsigned p = 0; p < e[2]; ++p) m *= z;
          val += m;
        }
        if (val > worst) {
          worst = val;
          worst_pt = {Rational::from_double(static_cast<double>(x)), Rational::from_double(static_cast<double>(y)),
                      Rational::from_double(static_cast<double>(z))};
        }
        ++r.boxes;
      }
    }
  }
  r.sampled_max = static_cast<double>(worst);
  r.verdict.name = "condition (c)";
  r.verdict.pass = worst <= static_cast<long double>(opt.sample_tolerance);
  std::ostringstream os;
  os << "sampled " << r.boxes << " grid points in D (step " << opt.sample_step << "), max F = "
     << static_cast<double>(worst);
  if (!r.verdict.pass) {
    os << " at " << point_str(worst_pt);
    r.positive_point = worst_pt;
  }
  r.verdict.detail = os.str();
  r.mode_achieved = r.verdict.pass ? "SAMPLED-ONLY" : "FAILED";
  return r;
}

}  // namespace

ConditionCReport verify_condition_c(const SdpCertificate& c, const ConditionCOptions& opt) {
  const Poly3 f = expand(c.blocks, c.n).to_poly();
  if (opt.mode == ConditionCMode::Sampled) return sampled_check(f, c.t, opt);

  std::vector<Point3> zeros;
  for (const Point3& z : candidate_zero_set(c)) {
    Point3 p = z;
    do zeros.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
  }
  const Poly3& det = gram_determinant();
  const std::array<Poly3, 3> grad{f.derivative(0), f.derivative(1), f.derivative(2)};

  auto process = [&](const BoxItem& item) {
    BoxResult res;
    const Box3& b = item.box;
    // Only the region x <= y <= z matters by symmetry of F and D.
    if (b[1].hi < b[0].lo || b[2].hi < b[1].lo) return res;
    if (interval_eval(det, b).hi.sign() < 0) return res;
    if (centered_eval(f, b).hi.sign() < 0) return res;
    Box3 pinned = b;
    const int upper = box_upper(f, grad, pinned).sign();
    if (upper < 0) return res;
    if (upper == 0) {
      const Point3 p{pinned[0].lo, pinned[1].lo, pinned[2].lo};
      const bool point = pinned[0].lo == pinned[0].hi && pinned[1].lo == pinned[1].hi && pinned[2].lo == pinned[2].hi;
      if (point && f(p[0], p[1], p[2]).is_zero()) {
        if (det(p[0], p[1], p[2]).sign() >= 0) {
          res.outcome = BoxOutcome::Local;
          Point3 s = p;
          std::sort(s.begin(), s.end());
          res.zero = s;
        }
        return res;
      }
    }
    for (const auto& z : zeros) {
      bool near = true;
      for (std::size_t v = 0; v < 3; ++v) {
        near = near && b[v].lo - kNearZero <= z[v] && z[v] <= b[v].hi + kNearZero;
      }
      if (near && local_zero_certificate(f, z, b)) {
        res.outcome = BoxOutcome::Local;
        Point3 s = z;
        std::sort(s.begin(), s.end());
        res.zero = s;
        return res;
      }
    }
    const Point3 mid{b[0].midpoint(), b[1].midpoint(), b[2].midpoint()};
    if (det(mid[0], mid[1], mid[2]).sign() >= 0 && f(mid[0], mid[1], mid[2]).sign() > 0) {
      res.outcome = BoxOutcome::Positive;
      res.positive = mid;
      return res;
    }
    if (item.depth >= opt.depth_cap) {
      res.outcome = BoxOutcome::DepthCap;
      return res;
    }
    std::size_t v = 0;
    for (std::size_t u = 1; u < 3; ++u)
      if (b[v].width() < b[u].width()) v = u;
    BoxItem lo = item, hi = item;
    lo.depth = hi.depth = item.depth + 1;
    lo.box[v] = RationalInterval(b[v].lo, mid[v]);
    hi.box[v] = RationalInterval(mid[v], b[v].hi);
    res.outcome = BoxOutcome::Split;
    res.children = {lo, hi};
    return res;
  };

  ConditionCReport r;
  r.verdict.name = "condition (c)";
  const int workers = opt.workers > 0 ? opt.workers : configured_workers();
  const RationalInterval side(Rational(-1), c.t);
  std::vector<BoxItem> frontier{{{side, side, side}, 0}};
  while (!frontier.empty()) {
    std::vector<BoxResult> results(frontier.size());
    if (workers <= 1 || frontier.size() < 64) {
      for (std::size_t i = 0; i < frontier.size(); ++i) results[i] = process(frontier[i]);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t i = static_cast<std::size_t>(w); i < frontier.size(); i += static_cast<std::size_t>(workers)) {
            results[i] = process(frontier[i]);
          }
        });
      }
      for (auto& th : pool) th.join();
    }
    std::vector<BoxItem> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      ++r.boxes;
      BoxResult& res = results[i];
      switch (res.outcome) {
        case BoxOutcome::Discarded:
          break;
        case BoxOutcome::Local:
          ++r.local_certificates;
          r.zero_set.insert(*res.zero);
          break;
        case BoxOutcome::Split:
          for (auto& ch : res.children) next.push_back(std::move(ch));
          break;
        case BoxOutcome::Positive:
          r.mode_achieved = "FAILED";
          r.verdict.pass = false;
          r.positive_point = res.positive;
          r.offending_box = frontier[i].box;
          r.verdict.detail = "F > 0 at " + point_str(*res.positive) + " (value " +
                             f((*res.positive)[0], (*res.positive)[1], (*res.positive)[2]).str() + ")";
          return r;
        case BoxOutcome::DepthCap:
          if (!r.offending_box) r.offending_box = frontier[i].box;
          break;
      }
    }
    if (r.offending_box) break;
    frontier = std::move(next);
  }
  if (r.offending_box) {
    // Honest fallback: certification did not close, report the sampled result.
    ConditionCOptions sampled = opt;
    sampled.mode = ConditionCMode::Sampled;
    ConditionCReport s = sampled_check(f, c.t, sampled);
    s.offending_box = r.offending_box;
    s.zero_set = r.zero_set;
    s.local_certificates = r.local_certificates;
    s.verdict.detail = "depth cap reached at box " + box_str(*r.offending_box) + "; " + s.verdict.detail;
    return s;
  }
  r.mode_achieved = "CERTIFIED";
  r.verdict.pass = true;
  std::ostringstream os;
  os << "certified F <= 0 on D with " << r.boxes << " boxes and " << r.local_certificates
     << " local certificates; zeros";
  for (const auto& z : r.zero_set) os << " " << point_str(z);
  r.verdict.detail = os.str();
  return r;
}

PsdReport verify_psd(const SdpCertificate& c) {
  PsdReport r;
  r.pass = true;
  auto check = [&](const std::string& name, const QMatrix& m) {
    const PsdVerdict v = ldlt_psd(m);
    Verdict out{name, v.psd, ""};
    std::ostringstream os;
    if (v.psd) {
      os << "PSD, D = (";
      for (Eigen::Index i = 0; i < v.diagonal.size(); ++i) os << (i ? ", " : "") << v.diagonal(i);
      os << ")";
    } else {
      os << "NOT PSD, witness v = (";
      for (Eigen::Index i = 0; i < v.witness.size(); ++i) os << (i ? ", " : "") << v.witness(i);
      os << "), v^T M v = " << v.witness_value;
      r.pass = false;
    }
    out.detail = os.str();
    r.blocks.push_back(out);
  };
  for (std::size_t k = 0; k < c.blocks.size(); ++k) check("F_" + std::to_string(k), c.blocks[k]);
  QMatrix shifted = c.blocks[0];
  shifted(0, 0) -= c.f0;
  check("F_0 - f0 E_0", shifted);
  if (c.f0.sign() <= 0) {
    r.pass = false;
    r.blocks.push_back({"f0 > 0", false, "f0 = " + c.f0.str()});
  }
  return r;
}

BoundValue compute_bound(const Rational& B, const Rational& f0, const Rational& f111) {
  if (f0.sign() <= 0) throw std::domain_error("compute_bound: f0 must be positive");
  BoundValue v;
  v.radicand = Rational(9) * B * B + Rational(4) * f0 * (f111 - Rational(3) * B);
  if (v.radicand.sign() < 0) throw std::domain_error("compute_bound: negative radicand");
  const Rational denom = Rational(2) * f0;
  if (auto s = exact_sqrt(v.radicand)) {
    v.exact = true;
    v.value = (Rational(3) * B + *s) / denom;
    v.lo = v.hi = v.value;
    return v;
  }
  const Rational target = Rational::parse("1e-30");
  for (int digits = 40;; digits += 20) {
    v.lo = (Rational(3) * B + sqrt_lower(v.radicand, digits)) / denom;
    v.hi = (Rational(3) * B + sqrt_upper(v.radicand, digits)) / denom;
    if (v.hi - v.lo <= target) break;
  }
  v.value = v.lo;
  return v;
}

BoundValue compute_bound(const SdpCertificate& c) {
  const Rational one(1);
  return compute_bound(c.B, c.f0, expand(c.blocks, c.n)(one, one, one));
}

VerificationReport verify_full(const SdpCertificate& c, const ConditionCOptions& opt,
                               const std::optional<SymPoly3>& expected) {
  VerificationReport r;
  r.psd = verify_psd(c);
  r.polynomial = expand(c.blocks, c.n);
  r.f111 = r.polynomial(1, 1, 1);
  if (expected) {
    r.expansion = verify_expansion(c, *expected);
  } else {
    r.expansion = {"expansion", true, r.polynomial.str()};
  }
  r.condition_d = verify_condition_d(c);
  r.condition_c = verify_condition_c(c, opt);
  bool bound_ok = true;
  try {
    r.bound = compute_bound(c.B, c.f0, r.f111);
  } catch (const std::domain_error&) {
    bound_ok = false;
  }
  r.pass = r.psd.pass && r.expansion.pass && r.condition_c.verdict.pass && r.condition_d.verdict.pass && bound_ok;
  return r;
}

MatrixTuple search_base() {
  return {qmat({{-18, -54, 0, 0}, {-54, 2268, -648, 0}, {0, -648, 3240, 5832}, {0, 0, 5832, 0}}),
          qmat({{0, 0, 0}, {0, -6480, 0}, {0, 0, 0}}), qmat({{0}})};
}

MatrixTuple search_direction() {
  return {qmat({{-64, 504, 0, 0}, {504, -5832, 2592, 0}, {0, 2592, 4428, -13608}, {0, 0, -13608, 34992}}),
          qmat({{0, 0, 0}, {0, 12204, -13608}, {0, -13608, 34992}}), qmat({{0}})};
}

std::vector<MatrixTuple> reference_kernel() {
  const Rational h(1, 2), q(5, 4);
  return {
      {qmat({{0, -h, 0, 0}, {-h, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}), qmat({{1, 0, 0}, {0, 0, 0}, {0, 0, 0}}),
       qmat({{0}})},
      {qmat({{h, 0, -q, 0}, {0, 0, 0, 0}, {-q, 0, 2, 0}, {0, 0, 0, 0}}), qmat({{0, 0, 0}, {0, 3, 0}, {0, 0, 0}}),
       qmat({{1}})},
      {qmat({{0, 0, 0, 0}, {0, -1, h, 0}, {0, h, 0, 0}, {0, 0, 0, 0}}), qmat({{0, h, 0}, {h, 0, 0}, {0, 0, 0}}),
       qmat({{0}})},
      {qmat({{0, 0, 0, 0}, {0, 0, -h, h}, {0, -h, 0, 0}, {0, h, 0, 0}}), qmat({{1, 0, h}, {0, 0, 0}, {h, 0, 0}}),
       qmat({{0}})},
  };
}

namespace {

const std::vector<Exponent>& search_span() {
  static const std::vector<Exponent> span{{3, 2, 0}, {2, 2, 1}, {2, 2, 0}, {2, 1, 1}, {2, 1, 0},
                                          {1, 1, 1}, {1, 1, 0}, {1, 0, 0}, {0, 0, 0}};
  return span;
}

// Coefficients of p in the search span; nullopt if p leaves the span.
std::optional<QVector> span_coordinates(const SymPoly3& p) {
  const auto& span = search_span();
  QVector v = QVector::Constant(static_cast<Eigen::Index>(span.size()), Rational(0));
  for (const auto& [e, c] : p.terms()) {
    auto it = std::find(span.begin(), span.end(), e);
    if (it == span.end()) return std::nullopt;
    v(it - span.begin()) = c;
  }
  return v;
}

constexpr int kTargetN = 10;

}  // namespace

SearchSpace build_search_space() {
  SearchSpace s;
  s.a = search_base();
  s.b = search_direction();
  s.kernel = reference_kernel();
  s.span = search_span();
  const auto& span = s.span;
  const auto m = static_cast<Eigen::Index>(span.size());
  const Eigen::Index nb = m, nf = m + 1, nvars = m + 2;
  const Rational a(-2, 3), b(1, 6), one(1);

  // Each basis polynomial's contribution to a linear functional.
  std::vector<Poly3> basis;
  for (const auto& e : span) basis.push_back(m_sym(e[0], e[1], e[2]).to_poly());
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> rhs;
  auto functional = [&](const std::function<Rational(const Poly3&)>& fn, Rational coef_b, Rational coef_f0,
                        Rational value) {
    std::vector<Rational> row(static_cast<std::size_t>(nvars));
    for (Eigen::Index i = 0; i < m; ++i) row[static_cast<std::size_t>(i)] = fn(basis[static_cast<std::size_t>(i)]);
    row[static_cast<std::size_t>(nb)] = coef_b;
    row[static_cast<std::size_t>(nf)] = coef_f0;
    rows.push_back(row);
    rhs.push_back(value);
  };
  auto at = [](Rational x, Rational y, Rational z) {
    return [=](const Poly3& p) { return p(x, y, z); };
  };
  auto partial = [](int v, Rational x, Rational y, Rational z) {
    return [=](const Poly3& p) { return p.derivative(v)(x, y, z); };
  };
  // F vanishes on the distance triples of the code.
  functional(at(a, a, b), 0, 0, 0);
  functional(at(a, b, b), 0, 0, 0);
  functional(at(b, b, b), 0, 0, 0);
  // Interior coordinates are critical.
  functional(partial(0, a, a, b), 0, 0, 0);
  functional(partial(1, a, a, b), 0, 0, 0);
  functional(partial(0, a, b, b), 0, 0, 0);
  // F(x,x,1) - B has a double root at -2/3 and a root at 1/6.
  functional([&](const Poly3& p) { return p.diagonal(one)(a); }, -1, 0, 0);
  functional([&](const Poly3& p) { return p.diagonal(one).derivative()(a); }, 0, 0, 0);
  functional([&](const Poly3& p) { return p.diagonal(one)(b); }, -1, 0, 0);
  // Tightness: f0 N^2 = F(1,1,1) + 3 (N - 1) B.
  functional([&](const Poly3& p) { return -p(one, one, one); }, Rational(-3 * (kTargetN - 1)),
             Rational(kTargetN * kTargetN), 0);
  // Scale: leading coefficient of the base polynomial.
  functional([&](const Poly3& p) { return p == basis[0] ? Rational(1) : Rational(0); }, 0, 0, 11664);

  QMatrix A(static_cast<Eigen::Index>(rows.size()), nvars);
  QVector rhs_v(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < nvars; ++c) A(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    rhs_v(static_cast<Eigen::Index>(r)) = rhs[r];
  }
  const SolutionReport sol = solve_linear(A, rhs_v);
  s.checks.push_back({"linear conditions consistent", sol.consistent(), ""});
  if (!sol.consistent()) return s;
  s.particular = sol.particular;
  s.directions = sol.nullspace;
  s.checks.push_back({"family dimension 1", s.directions.cols() == 1,
                      "dimension " + std::to_string(s.directions.cols())});
  if (s.directions.cols() != 1) return s;

  const auto pa = span_coordinates(expand(s.a, 4));
  const auto pb = span_coordinates(expand(s.b, 4));
  bool a_in = false, b_dir = false;
  if (pa && pb) {
    // A-part: particular + lambda d in the polynomial coordinates.
    const QVector d = s.directions.col(0);
    Eigen::Index piv = 0;
    while (piv < m && d(piv).is_zero()) ++piv;
    if (piv < m) {
      const Rational lam = ((*pa)(piv) - s.particular(piv)) / d(piv);
      a_in = ((s.particular + lam * d).head(m) - *pa).isZero();
      const Rational mu = (*pb)(piv) / d(piv);
      b_dir = ((mu * d).head(m) - *pb).isZero();
    }
  }
  s.checks.push_back({"A-part lies in the family", a_in, pa ? expand(s.a, 4).str() : "outside span"});
  s.checks.push_back({"B-part spans the direction", b_dir, pb ? expand(s.b, 4).str() : "outside span"});
  bool kernel_ok = true;
  for (const auto& k : s.kernel) kernel_ok = kernel_ok && expand(k, 4).is_zero();
  s.checks.push_back({"kernel tuples expand to zero", kernel_ok, ""});
  return s;
}

namespace {

MatrixTuple combine(const SearchSpace& s, const Rational& gamma, const std::vector<Rational>& beta) {
  MatrixTuple t = s.a + gamma * s.b;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (!beta[i].is_zero()) t = t + beta[i] * s.kernel[i];
  }
  return t;
}

struct NumericFamily {
  std::vector<Eigen::MatrixXd> base;
  std::vector<std::vector<Eigen::MatrixXd>> kernel;  // [i][k]
  std::vector<std::size_t> support;
  std::vector<std::vector<Eigen::Index>> keep;  // per block: rows not identically zero

  double min_eig(const Eigen::VectorXd& beta) const {
    double worst = 1e300;
    for (std::size_t k = 0; k < base.size(); ++k) {
      if (keep[k].empty()) continue;
      Eigen::MatrixXd m = base[k];
      for (std::size_t j = 0; j < support.size(); ++j) m += beta(static_cast<Eigen::Index>(j)) * kernel[support[j]][k];
      const auto n = static_cast<Eigen::Index>(keep[k].size());
      Eigen::MatrixXd r(n, n);
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) r(a, b) = m(keep[k][a], keep[k][b]);
      worst = std::min(worst, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(r).eigenvalues().minCoeff());
    }
    return worst;
  }
};

// Nelder-Mead maximisation of a concave function.
Eigen::VectorXd maximise(const std::function<double(const Eigen::VectorXd&)>& f, int dim) {
  if (dim == 1) {
    double lo = -1e6, hi = 1e6;
    const double phi = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200; ++it) {
      const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
      Eigen::VectorXd va(1), vb(1);
      va << a;
      vb << b;
      if (f(va) < f(vb)) lo = a;
      else hi = b;
    }
    Eigen::VectorXd v(1);
    v << (lo + hi) / 2;
    return v;
  }
  std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(dim) + 1, Eigen::VectorXd::Zero(dim));
  for (int i = 0; i < dim; ++i) simplex[static_cast<std::size_t>(i) + 1](i) = 1000;
  std::vector<double> val;
  for (const auto& p : simplex) val.push_back(f(p));
  for (int it = 0; it < 4000; ++it) {
    std::vector<std::size_t> order(simplex.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] > val[b]; });
    const std::size_t worst = order.back();
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += simplex[order[i]];
    centroid /= dim;
    const Eigen::VectorXd refl = centroid + (centroid - simplex[worst]);
    const double fr = f(refl);
    if (fr > val[order[0]]) {
      const Eigen::VectorXd exp = centroid + 2 * (centroid - simplex[worst]);
      const double fe = f(exp);
      if (fe > fr) {
        simplex[worst] = exp;
        val[worst] = fe;
      } else {
        simplex[worst] = refl;
        val[worst] = fr;
      }
    } else if (fr > val[order[order.size() - 2]]) {
      simplex[worst] = refl;
      val[worst] = fr;
    } else {
      const Eigen::VectorXd con = centroid + 0.5 * (simplex[worst] - centroid);
      const double fc = f(con);
      if (fc > val[worst]) {
        simplex[worst] = con;
        val[worst] = fc;
      } else {
        for (std::size_t i = 1; i < order.size(); ++i) {
          simplex[order[i]] = simplex[order[0]] + 0.5 * (simplex[order[i]] - simplex[order[0]]);
          val[order[i]] = f(simplex[order[i]]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < val.size(); ++i)
    if (val[i] > val[best]) best = i;
  return simplex[best];
}

// Candidates in [lo, hi], roundest first: multiples of the largest power of
// ten that fits, nearest the midpoint.
std::vector<Rational> round_candidates(double lo, double hi) {
  std::vector<Rational> out;
  const double mid = (lo + hi) / 2;
  for (int p = 9; p >= -6; --p) {
    const Rational step = p >= 0 ? Rational(static_cast<long>(std::pow(10, p))) : Rational(1, static_cast<long>(std::pow(10, -p)));
    const double s = step.to_double();
    const double first = std::ceil(lo / s), last = std::floor(hi / s);
    if (first > last) continue;
    double k = std::round(mid / s);
    k = std::clamp(k, first, last);
    const Rational cand = step * Rational(static_cast<long>(k));
    if (std::find(out.begin(), out.end(), cand) == out.end()) out.push_back(cand);
  }
  return out;
}

}  // namespace

FeasibilityResult feasibility_solve(const SearchSpace& space, const Rational& gamma) {
  FeasibilityResult res;
  res.best_min_eigenvalue = -1e300;
  const MatrixTuple base = space.a + gamma * space.b;
  const std::size_t nk = space.kernel.size();
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < nk; ++i)
    if (expand(space.kernel[i], 4).is_zero()) usable.push_back(i);
  auto certify = [&](const std::vector<Rational>& beta) {
    const MatrixTuple t = combine(space, gamma, beta);
    for (const auto& m : t)
      if (!ldlt_psd(m).psd) return false;
    return true;
  };
  // Supports of increasing size.
  for (std::size_t size = 0; size <= usable.size() && !res.certificate; ++size) {
    std::vector<std::vector<std::size_t>> supports;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> gen = [&](std::size_t from) {
      if (cur.size() == size) {
        supports.push_back(cur);
        return;
      }
      for (std::size_t i = from; i < usable.size(); ++i) {
        cur.push_back(usable[i]);
        gen(i + 1);
        cur.pop_back();
      }
    };
    gen(0);
    for (const auto& support : supports) {
      if (size == 0) {
        const std::vector<Rational> beta(nk, Rational(0));
        if (certify(beta)) {
          res.beta = beta;
          break;
        }
        continue;
      }
      NumericFamily fam;
      fam.support = support;
      for (const auto& m : base) fam.base.push_back(to_double(m));
      for (const auto& k : space.kernel) {
        std::vector<Eigen::MatrixXd> blocks;
        for (const auto& m : k) blocks.push_back(to_double(m));
        fam.kernel.push_back(blocks);
      }
      for (std::size_t k = 0; k < base.size(); ++k) {
        std::vector<Eigen::Index> keep;
        for (Eigen::Index r = 0; r < base[k].rows(); ++r) {
          bool zero = base[k].row(r).isZero();
          for (std::size_t i : support) zero = zero && space.kernel[i][k].row(r).isZero();
          if (!zero) keep.push_back(r);
        }
        fam.keep.push_back(keep);
      }
      const int dim = static_cast<int>(support.size());
      auto f = [&](const Eigen::VectorXd& b) { return fam.min_eig(b); };
      Eigen::VectorXd best = maximise(f, dim);
      const double best_val = f(best);
      res.best_min_eigenvalue = std::max(res.best_min_eigenvalue, best_val);
      if (best_val < 0) continue;
      // Coordinate-wise: feasible range along each axis, then the roundest value.
      std::vector<Rational> beta(nk, Rational(0));
      Eigen::VectorXd point = best;
      for (int j = 0; j < dim; ++j) {
        auto edge = [&](double dir) {
          double inside = point(j), outside = point(j) + dir * 1e7;
          for (int it = 0; it < 200; ++it) {
            Eigen::VectorXd p = point;
            p(j) = (inside + outside) / 2;
            if (f(p) >= 0) inside = p(j);
            else outside = p(j);
          }
          return inside;
        };
        const double lo = edge(-1), hi = edge(1);
        bool placed = false;
        for (const Rational& cand : round_candidates(lo, hi)) {
          Eigen::VectorXd p = point;
          p(j) = cand.to_double();
          if (f(p) < 0 && j + 1 < dim) continue;
          beta[support[static_cast<std::size_t>(j)]] = cand;
          point(j) = cand.to_double();
          placed = true;
          if (j + 1 < dim || certify(beta)) break;
        }
        if (!placed) break;
      }
      if (certify(beta)) {
        res.beta = beta;
        break;
      }
    }
    if (!res.beta.empty()) {
      SdpCertificate c;
      c.n = 4;
      c.t = Rational(1, 6);
      c.blocks = combine(space, gamma, res.beta);
      // B and f0 from the family at this gamma.
      const auto coords = span_coordinates(expand(c.blocks, 4));
      const QVector d = space.directions.col(0);
      Eigen::Index piv = 0;
      while (piv < d.size() && d(piv).is_zero()) ++piv;
      const Rational lam = ((*coords)(piv) - space.particular(piv)) / d(piv);
      const QVector full = space.particular + lam * d;
      const auto m = static_cast<Eigen::Index>(space.span.size());
      c.B = full(m);
      c.f0 = full(m + 1);
      res.certificate = c;
    }
  }
  if (!res.certificate) {
    std::ostringstream os;
    os << "no PSD point found; best minimum eigenvalue " << res.best_min_eigenvalue;
    res.diagnostic = os.str();
  }
  return res;
}

}  // namespace spherebound
