#include "spherebound/uniqueness.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "spherebound/gegenbauer.hpp"

namespace spherebound {

PetersenCode petersen_code() {
  PetersenCode pc;
  pc.centered = QMatrix::Constant(10, 5, Rational(-2, 5));
  int row = 0;
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) {
      pc.centered(row, i) += Rational(1);
      pc.centered(row, j) += Rational(1);
      pc.labels.push_back({i, j});
      ++row;
    }
  }
  pc.norm_sq = (pc.centered.row(0) * pc.centered.row(0).transpose())(0, 0);
  pc.gram = (pc.centered * pc.centered.transpose()) * (Rational(1) / pc.norm_sq);
  pc.unit = to_double(pc.centered);
  for (Eigen::Index r = 0; r < pc.unit.rows(); ++r) pc.unit.row(r).normalize();
  return pc;
}

int design_strength(const GramMatrix& gram, int n, int max_m) {
  int m = 0;
  while (m < max_m && pair_sum(n, m + 1, gram).is_zero()) ++m;
  return m;
}

ValueTriple sorted_triple(Rational a, Rational b, Rational c) {
  ValueTriple t{std::move(a), std::move(b), std::move(c)};
  std::sort(t.begin(), t.end());
  return t;
}

int orderings(const ValueTriple& t) {
  if (t[0] == t[1] && t[1] == t[2]) return 1;
  if (t[0] == t[1] || t[1] == t[2]) return 3;
  return 6;
}

ThreePointDistribution distribution_from_gram(const GramMatrix& gram) {
  const Eigen::Index N = gram.rows();
  std::map<ValueTriple, long> ordered;
  for (Eigen::Index a = 0; a < N; ++a)
    for (Eigen::Index b = 0; b < N; ++b)
      for (Eigen::Index c = 0; c < N; ++c) ++ordered[sorted_triple(gram(a, b), gram(a, c), gram(b, c))];
  ThreePointDistribution alpha;
  for (const auto& [t, count] : ordered) {
    // Each sorted triple collects all of its orderings.
    alpha[t] = Rational(count) / Rational(orderings(t) * N);
  }
  return alpha;
}

AlphaSystem alpha_system(const AlphaInputs& in, const std::set<std::string>& drop) {
  std::vector<Rational> values = in.roots;
  values.push_back(Rational(1));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  AlphaSystem sys;
  const Rational one(1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i; j < values.size(); ++j) {
      for (std::size_t k = j; k < values.size(); ++k) {
        const ValueTriple t{values[i], values[j], values[k]};
        // A repeated point forces two equal values next to the 1.
        if (t[2] == one && !(t[0] == t[1])) continue;
        if (t[1] == one && !(t[0] == one)) continue;
        sys.unknowns.push_back(t);
      }
    }
  }
  const auto m = static_cast<Eigen::Index>(sys.unknowns.size());
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> rhs;
  auto add = [&](const std::string& name, std::vector<Rational> row, const Rational& r) {
    if (drop.count(name)) return;
    sys.relation.push_back(name);
    rows.push_back(std::move(row));
    rhs.push_back(r);
  };
  auto index_of = [&](const ValueTriple& t) -> Eigen::Index {
    auto it = std::find(sys.unknowns.begin(), sys.unknowns.end(), t);
    return it == sys.unknowns.end() ? -1 : static_cast<Eigen::Index>(it - sys.unknowns.begin());
  };
  const std::vector<Rational> zero(static_cast<std::size_t>(m));
  const Rational N(in.N);

  {
    auto row = zero;
    row[static_cast<std::size_t>(index_of({one, one, one}))] = 1;
    add("unit", row, 1);
  }
  {
    auto row = zero;
    for (const auto& x : values) {
      const auto idx = index_of(sorted_triple(x, x, one));
      if (idx >= 0) row[static_cast<std::size_t>(idx)] = 1;
    }
    add("pairs", row, N);
  }
  {
    auto row = zero;
    for (Eigen::Index u = 0; u < m; ++u) row[static_cast<std::size_t>(u)] = orderings(sys.unknowns[static_cast<std::size_t>(u)]);
    add("triples", row, N * N);
  }
  const Poly3 f = expand(in.blocks, in.n).to_poly();
  for (Eigen::Index u = 0; u < m; ++u) {
    const ValueTriple& t = sys.unknowns[static_cast<std::size_t>(u)];
    std::string label = "(" + t[0].str() + "," + t[1].str() + "," + t[2].str() + ")";
    auto row = zero;
    row[static_cast<std::size_t>(u)] = 1;
    if (t[2] == one) {
      if (t[0] != one && f(t[0], t[0], one) != in.B) add("zero-G" + label, row, 0);
    } else if (!f(t[0], t[1], t[2]).is_zero()) {
      add("zero-F" + label, row, 0);
    }
  }
  // T_k(alpha) = N sum_u orderings(u) alpha_u S_k(u): one matrix per unknown.
  for (std::size_t k = 0; k < in.blocks.size(); ++k) {
    const int size = static_cast<int>(in.blocks[k].rows());
    const ThreePointBlock s = snk_matrix(in.n, static_cast<int>(k), size);
    std::vector<QMatrix> per_unknown;
    for (const auto& t : sys.unknowns) {
      QMatrix tm(size, size);
      for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) tm(i, j) = N * Rational(orderings(t)) * s(i, j)(t[0], t[1], t[2]);
      per_unknown.push_back(tm);
    }
    QMatrix fk = in.blocks[k];
    if (k == 0) fk(0, 0) -= in.f0;
    {
      auto row = zero;
      for (Eigen::Index u = 0; u < m; ++u) row[static_cast<std::size_t>(u)] = frobenius(fk, per_unknown[static_cast<std::size_t>(u)]);
      add("trace-" + std::to_string(k), row, 0);
    }
    if (ldlt_psd(fk).psd) {
      // Tr(F T) = 0 with F, T PSD implies F T = 0.
      for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
          auto row = zero;
          bool nonzero = false;
          for (Eigen::Index u = 0; u < m; ++u) {
            const Rational v = (fk.row(i) * per_unknown[static_cast<std::size_t>(u)].col(j))(0, 0);
            row[static_cast<std::size_t>(u)] = v;
            if (!v.is_zero()) nonzero = true;
          }
          if (nonzero) add("comp-" + std::to_string(k), row, 0);
        }
      }
    }
  }
  sys.a = QMatrix(static_cast<Eigen::Index>(rows.size()), m);
  sys.b = QVector(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index u = 0; u < m; ++u) sys.a(static_cast<Eigen::Index>(r), u) = rows[r][static_cast<std::size_t>(u)];
    sys.b(static_cast<Eigen::Index>(r)) = rhs[r];
  }
  return sys;
}

AlphaResult solve_alpha(const AlphaInputs& in, const std::set<std::string>& drop) {
  AlphaResult res;
  res.system = alpha_system(in, drop);
  const SolutionReport sol = solve_linear(res.system.a, res.system.b);
  if (!sol.consistent()) {
    res.diagnostic = "inconsistent alpha system";
    res.witness = sol.certificate;
    return res;
  }
  if (sol.kind == SolutionReport::Kind::Affine) {
    std::ostringstream os;
    os << "alpha not determined: kernel dimension " << sol.nullspace.cols();
    res.diagnostic = os.str();
    res.witness = sol.nullspace.col(0);
    return res;
  }
  for (std::size_t u = 0; u < res.system.unknowns.size(); ++u) {
    const Rational& v = sol.particular(static_cast<Eigen::Index>(u));
    const auto& t = res.system.unknowns[u];
    if (v.sign() < 0) {
      res.diagnostic = "negative alpha at (" + t[0].str() + "," + t[1].str() + "," + t[2].str() + ")";
      res.witness = sol.particular;
      return res;
    }
    res.alpha[t] = v;
  }
  res.ok = true;
  return res;
}

SrgParams srg_from_alpha(const ThreePointDistribution& alpha, int N, const Rational& adjacent,
                         const Rational& other) {
  auto get = [&](const ValueTriple& t) {
    auto it = alpha.find(t);
    return it == alpha.end() ? Rational(0) : it->second;
  };
  auto as_int = [](const Rational& r, const char* what) {
    if (!r.is_integer()) throw std::domain_error(std::string("srg_from_alpha: non-integer ") + what);
    return static_cast<int>(r.num().get_si());
  };
  const Rational one(1);
  SrgParams p;
  p.v = N;
  p.k = as_int(get(sorted_triple(adjacent, adjacent, one)), "degree");
  const int nonadjacent = N - 1 - p.k;
  // alpha(a,a,a) N counts (c', c'') adjacent with c adjacent to both.
  if (p.k > 0) {
    p.lambda = as_int(get(sorted_triple(adjacent, adjacent, adjacent)) * Rational(N) / Rational(N * p.k), "lambda");
  }
  if (nonadjacent > 0) {
    p.mu = as_int(get(sorted_triple(adjacent, adjacent, other)) * Rational(N) / Rational(N * nonadjacent), "mu");
  }
  return p;
}

void Graph::set_edge(int i, int j, bool on) {
  if (on) {
    adj[static_cast<std::size_t>(i)] |= 1U << j;
    adj[static_cast<std::size_t>(j)] |= 1U << i;
  } else {
    adj[static_cast<std::size_t>(i)] &= ~(1U << j);
    adj[static_cast<std::size_t>(j)] &= ~(1U << i);
  }
}

int Graph::degree(int i) const { return std::popcount(adj[static_cast<std::size_t>(i)]); }

int Graph::edge_count() const {
  int s = 0;
  for (int i = 0; i < n; ++i) s += degree(i);
  return s / 2;
}

Graph petersen_graph() {
  std::vector<std::array<int, 2>> pairs;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) pairs.push_back({i, j});
  Graph g(10);
  for (int a = 0; a < 10; ++a) {
    for (int b = a + 1; b < 10; ++b) {
      const auto& p = pairs[static_cast<std::size_t>(a)];
      const auto& q = pairs[static_cast<std::size_t>(b)];
      if (p[0] != q[0] && p[0] != q[1] && p[1] != q[0] && p[1] != q[1]) g.set_edge(a, b);
    }
  }
  return g;
}

Graph cycle_graph(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i) g.set_edge(i, (i + 1) % n);
  return g;
}

Graph complete_graph(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.set_edge(i, j);
  return g;
}

std::string to_graph6(const Graph& g) {
  if (g.n > 62) throw std::invalid_argument("to_graph6: more than 62 vertices");
  std::string s(1, static_cast<char>(g.n + 63));
  int bits = 0, acc = 0;
  for (int j = 1; j < g.n; ++j) {
    for (int i = 0; i < j; ++i) {
      acc = (acc << 1) | (g.edge(i, j) ? 1 : 0);
      if (++bits == 6) {
        s.push_back(static_cast<char>(acc + 63));
        bits = acc = 0;
      }
    }
  }
  if (bits > 0) s.push_back(static_cast<char>((acc << (6 - bits)) + 63));
  return s;
}

Graph from_graph6(const std::string& s) {
  if (s.empty() || s[0] < 63 || s[0] > 125) throw std::invalid_argument("from_graph6: bad header");
  const int n = s[0] - 63;
  if (n > 32) throw std::invalid_argument("from_graph6: more than 32 vertices");
  const std::size_t pairs = static_cast<std::size_t>(n * (n - 1) / 2);
  if (s.size() != 1 + (pairs + 5) / 6) throw std::invalid_argument("from_graph6: wrong length");
  Graph g(n);
  std::size_t bit = 0;
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i, ++bit) {
      const int c = s[1 + bit / 6] - 63;
      if (c < 0 || c > 63) throw std::invalid_argument("from_graph6: bad character");
      if ((c >> (5 - bit % 6)) & 1) g.set_edge(i, j);
    }
  }
  return g;
}

namespace {

// Relabelled graph with new vertex i = old vertex order[i].
Graph relabel(const Graph& g, const std::vector<int>& order) {
  Graph h(g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = i + 1; j < g.n; ++j)
      if (g.edge(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)])) h.set_edge(i, j);
  return h;
}

}  // namespace

Graph canonical_form(const Graph& g) {
  // Depth-first over vertex orders; the code of a prefix is the sequence of
  // columns adj(v_0..v_{i-1}, v_i), compared lexicographically (largest wins).
  std::vector<int> order, best_order;
  std::vector<std::uint32_t> code, best_code;
  std::uint32_t used = 0;
  std::function<void()> dfs = [&]() {
    const std::size_t depth = order.size();
    if (depth == static_cast<std::size_t>(g.n)) {
      if (best_order.empty() || code > best_code) {
        best_code = code;
        best_order = order;
      }
      return;
    }
    for (int v = 0; v < g.n; ++v) {
      if ((used >> v) & 1U) continue;
      std::uint32_t col = 0;
      for (std::size_t i = 0; i < depth; ++i) col |= (g.edge(order[i], v) ? 1U : 0U) << (31 - i);
      code.push_back(col);
      // Prune when this prefix is already worse than the best code's prefix.
      bool viable = true;
      if (!best_order.empty()) {
        for (std::size_t i = 0; i <= depth; ++i) {
          if (code[i] != best_code[i]) {
            viable = code[i] > best_code[i];
            break;
          }
        }
      }
      if (viable) {
        order.push_back(v);
        used |= 1U << v;
        dfs();
        used &= ~(1U << v);
        order.pop_back();
      }
      code.pop_back();
    }
  };
  dfs();
  return relabel(g, best_order);
}

namespace {

// Calls visit(map) for every automorphism, extending partial maps in vertex order.
void for_each_automorphism(const Graph& g, const std::function<bool(const std::vector<int>&)>& visit,
                           int fix_first = -1) {
  std::vector<int> map(static_cast<std::size_t>(g.n), -1);
  std::uint32_t used = 0;
  bool stop = false;
  std::function<void(int)> dfs = [&](int v) {
    if (stop) return;
    if (v == g.n) {
      if (!visit(map)) stop = true;
      return;
    }
    for (int w = 0; w < g.n; ++w) {
      if ((used >> w) & 1U) continue;
      if (v == 0 && fix_first >= 0 && w != fix_first) continue;
      if (g.degree(v) != g.degree(w)) continue;
      bool ok = true;
      for (int u = 0; u < v && ok; ++u) ok = g.edge(u, v) == g.edge(map[static_cast<std::size_t>(u)], w);
      if (!ok) continue;
      map[static_cast<std::size_t>(v)] = w;
      used |= 1U << w;
      dfs(v + 1);
      used &= ~(1U << w);
      map[static_cast<std::size_t>(v)] = -1;
    }
  };
  dfs(0);
}

}  // namespace

std::uint64_t automorphism_count(const Graph& g) {
  std::uint64_t count = 0;
  for_each_automorphism(g, [&](const std::vector<int>&) { ++count; return true; });
  return count;
}

bool vertex_transitive(const Graph& g) {
  for (int target = 0; target < g.n; ++target) {
    bool found = false;
    for_each_automorphism(g, [&](const std::vector<int>&) { found = true; return false; }, target);
    if (!found) return false;
  }
  return true;
}

int girth(const Graph& g) {
  int best = 0;
  for (int s = 0; s < g.n; ++s) {
    std::vector<int> dist(static_cast<std::size_t>(g.n), -1), parent(static_cast<std::size_t>(g.n), -1);
    std::queue<int> q;
    dist[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int w = 0; w < g.n; ++w) {
        if (!g.edge(u, w)) continue;
        if (dist[static_cast<std::size_t>(w)] < 0) {
          dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
          parent[static_cast<std::size_t>(w)] = u;
          q.push(w);
        } else if (parent[static_cast<std::size_t>(u)] != w) {
          const int len = dist[static_cast<std::size_t>(u)] + dist[static_cast<std::size_t>(w)] + 1;
          if (best == 0 || len < best) best = len;
        }
      }
    }
  }
  return best;
}

bool is_srg(const Graph& g, const SrgParams& p) {
  if (g.n != p.v) return false;
  for (int i = 0; i < g.n; ++i) {
    if (g.degree(i) != p.k) return false;
    for (int j = i + 1; j < g.n; ++j) {
      const int common = std::popcount(g.adj[static_cast<std::size_t>(i)] & g.adj[static_cast<std::size_t>(j)]);
      if (common != (g.edge(i, j) ? p.lambda : p.mu)) return false;
    }
  }
  return true;
}

SrgEnumeration enumerate_srg(const SrgParams& p) {
  SrgEnumeration out;
  if (p.v > 16) throw std::invalid_argument("enumerate_srg: more than 16 vertices");
  if (p.v < 1 || p.k < 0 || p.k >= p.v || !p.feasible()) {
    out.diagnostic = "parameters violate k(k - lambda - 1) = (v - k - 1) mu";
    return out;
  }
  std::set<Graph> found;
  Graph g(p.v);
  // Rows are filled in order; row i chooses its remaining neighbours among
  // later vertices. Once row i is complete, every pair (a, i) with a < i has
  // fully known neighbourhoods and its common-neighbour count is checked.
  std::function<void(int)> fill_row = [&](int i) {
    if (i == p.v) {
      ++out.labelled_found;
      found.insert(canonical_form(g));
      return;
    }
    const int need = p.k - g.degree(i);
    std::vector<int> cand;
    for (int j = i + 1; j < p.v; ++j)
      if (g.degree(j) < p.k) cand.push_back(j);
    if (need < 0 || need > static_cast<int>(cand.size())) return;
    std::vector<int> pick;
    std::function<void(std::size_t)> choose = [&](std::size_t from) {
      if (static_cast<int>(pick.size()) == need) {
        // The first vertex's neighbours are 1..k without loss of generality.
        if (i == 0) {
          for (int t = 0; t < need; ++t)
            if (pick[static_cast<std::size_t>(t)] != t + 1) return;
        }
        for (int j : pick) g.set_edge(i, j);
        bool ok = true;
        for (int a = 0; a < i && ok; ++a) {
          const int common = std::popcount(g.adj[static_cast<std::size_t>(a)] & g.adj[static_cast<std::size_t>(i)]);
          ok = common == (g.edge(a, i) ? p.lambda : p.mu);
        }
        if (ok) fill_row(i + 1);
        for (int j : pick) g.set_edge(i, j, false);
        return;
      }
      for (std::size_t c = from; c < cand.size(); ++c) {
        pick.push_back(cand[c]);
        choose(c + 1);
        pick.pop_back();
      }
    };
    choose(0);
  };
  fill_row(0);
  out.graphs.assign(found.begin(), found.end());
  return out;
}

GramReconstruction gram_from_graph(const Graph& g, const Rational& adjacent_value, const Rational& other_value) {
  GramReconstruction r;
  r.gram = GramMatrix(g.n, g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) r.gram(i, j) = i == j ? Rational(1) : (g.edge(i, j) ? adjacent_value : other_value);
  r.psd = ldlt_psd(r.gram).psd;
  r.rank = rank(r.gram);
  return r;
}

}  // namespace spherebound
