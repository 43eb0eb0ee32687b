#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spherebound/linalg.hpp"
#include "spherebound/threepoint.hpp"

namespace spherebound {

struct PetersenCode {
  /// e_i + e_j - (2/5)(1,...,1), one row per 2-subset {i, j} of {0..4}.
  QMatrix centered;
  /// Common squared norm of the centred rows (6/5).
  Rational norm_sq;
  /// Unit vectors in R^5 (floating point; the sqrt is irrational).
  Eigen::MatrixXd unit;
  GramMatrix gram;
  std::vector<std::array<int, 2>> labels;
};

PetersenCode petersen_code();

/// Largest M <= max_m with pair_sum(n, k, gram) = 0 for 1 <= k <= M.
int design_strength(const GramMatrix& gram, int n, int max_m);

/// alpha indexed by the sorted value triple.
using ValueTriple = std::array<Rational, 3>;
using ThreePointDistribution = std::map<ValueTriple, Rational>;

ValueTriple sorted_triple(Rational a, Rational b, Rational c);

/// Number of distinct orderings of a value triple (1, 3 or 6).
int orderings(const ValueTriple& t);

/// alpha(u, v, w) = #{(c, c', c'') : (c.c', c.c'', c'.c'') = (u, v, w)} / N.
ThreePointDistribution distribution_from_gram(const GramMatrix& gram);

/// Data the alpha system depends on: the candidate inner products, the code
/// size and a certificate assumed tight.
struct AlphaInputs {
  int n = 4;
  int N = 10;
  std::vector<Rational> roots;
  MatrixTuple blocks;
  Rational f0;
  Rational B;
};

struct AlphaSystem {
  std::vector<ValueTriple> unknowns;
  std::vector<std::string> relation;  ///< group name of each row
  QMatrix a;
  QVector b;
};

/// Linear equations for alpha: normalisation, pair and triple counts,
/// vanishing of F and of F(x,x,1) - B off the support, and the
/// complementarity conditions against the triple-sum matrices. Rows whose
/// group name is in `drop` are omitted.
AlphaSystem alpha_system(const AlphaInputs& in, const std::set<std::string>& drop = {});

struct AlphaResult {
  bool ok = false;
  ThreePointDistribution alpha;
  AlphaSystem system;
  std::string diagnostic;
  /// Non-unique: a nonzero kernel vector; negative: the offending triple.
  QVector witness;
};

AlphaResult solve_alpha(const AlphaInputs& in, const std::set<std::string>& drop = {});

struct SrgParams {
  int v = 0, k = 0, lambda = 0, mu = 0;
  bool feasible() const { return k * (k - lambda - 1) == (v - k - 1) * mu; }
  friend bool operator==(const SrgParams&, const SrgParams&) = default;
};

/// Parameters read off alpha for adjacency value `adjacent` and non-adjacency
/// value `other`. Throws std::domain_error if a count is not an integer.
SrgParams srg_from_alpha(const ThreePointDistribution& alpha, int N, const Rational& adjacent,
                         const Rational& other);

struct Graph {
  int n = 0;
  std::vector<std::uint32_t> adj;  ///< row bitsets

  explicit Graph(int vertices = 0) : n(vertices), adj(static_cast<std::size_t>(vertices), 0) {}
  bool edge(int i, int j) const { return (adj[static_cast<std::size_t>(i)] >> j) & 1U; }
  void set_edge(int i, int j, bool on = true);
  int degree(int i) const;
  int edge_count() const;
  friend bool operator==(const Graph&, const Graph&) = default;
  friend bool operator<(const Graph& a, const Graph& b) { return a.adj < b.adj; }
};

Graph petersen_graph();
Graph cycle_graph(int n);
Graph complete_graph(int n);

std::string to_graph6(const Graph& g);
/// Throws std::invalid_argument on malformed input.
Graph from_graph6(const std::string& s);

/// Relabelled copy with the lexicographically largest adjacency string.
Graph canonical_form(const Graph& g);
std::uint64_t automorphism_count(const Graph& g);
bool vertex_transitive(const Graph& g);
/// Length of a shortest cycle; 0 for forests.
int girth(const Graph& g);
bool is_srg(const Graph& g, const SrgParams& p);

struct SrgEnumeration {
  std::vector<Graph> graphs;  ///< canonical representatives
  std::uint64_t labelled_found = 0;
  std::string diagnostic;
};

/// All SRG(v, k, lambda, mu) up to isomorphism (v <= 16).
SrgEnumeration enumerate_srg(const SrgParams& p);

struct GramReconstruction {
  GramMatrix gram;
  bool psd = false;
  Eigen::Index rank = 0;
};

GramReconstruction gram_from_graph(const Graph& g, const Rational& adjacent_value = Rational(-2, 3),
                                   const Rational& other_value = Rational(1, 6));

}  // namespace spherebound
