#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "spherebound/gegenbauer.hpp"
#include "spherebound/lpbound.hpp"
#include "spherebound/sdpcert.hpp"
#include "spherebound/sdpio.hpp"
#include "spherebound/threepoint.hpp"
#include "spherebound/uniqueness.hpp"

using namespace spherebound;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back((ok ? "ok: " : "FAILED: ") + what);
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string data(const std::string& name) { return std::string(SPHEREBOUND_SOURCE_DIR) + "/" + name; }

GramMatrix random_gram(std::mt19937_64& rng, int n, int points) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd pts(points, n);
  for (int i = 0; i < points; ++i) {
    for (int j = 0; j < n; ++j) pts(i, j) = normal(rng);
    pts.row(i).normalize();
  }
  const Eigen::MatrixXd g = pts * pts.transpose();
  GramMatrix out(points, points);
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j) out(i, j) = i == j ? Rational(1) : Rational::from_double(g(i, j));
  return out;
}

std::string point_str(const std::array<Rational, 3>& p) {
  return "(" + p[0].str() + ", " + p[1].str() + ", " + p[2].str() + ")";
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  const SdpCertificate c = builtin_certificate();
  const PsdReport psd = verify_psd(c);
  for (const auto& v : psd.blocks) o.require(v.pass, v.name + " " + v.detail);
  const Verdict e = verify_expansion(c);
  o.require(e.pass, "expansion identity, constant " + expand(c.blocks, 4).coeff(0, 0, 0).str());
  const ConditionDReport d = verify_condition_d(c);
  o.require(d.factor_identity, "factorisation of F(x,x,1) - B with constant 3888");
  const BoundValue b = compute_bound(c);
  o.require(b.exact && b.value == Rational(10), "bound " + (b.exact ? b.value.str() : std::string("inexact")));
  o.require(b.radicand == pow(Rational(13750, 3), 2), "radicand " + b.radicand.str());
  const double s = seconds_since(t0);
  o.require(s < 10, "runtime " + std::to_string(s) + " s");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = Clock::now();
  const ConditionCReport r = verify_condition_c(builtin_certificate());
  const double s = seconds_since(t0);
  o.require(r.verdict.pass, r.verdict.detail);
  o.require(r.mode_achieved == "CERTIFIED", "mode " + r.mode_achieved);
  const Rational a(-2, 3), b(1, 6);
  const std::set<std::array<Rational, 3>> want{{a, a, b}, {a, b, b}, {b, b, b}};
  std::string zs;
  for (const auto& z : r.zero_set) zs += point_str(z) + " ";
  o.require(r.zero_set == want, "zero set " + zs);
  o.require(s < 600, "runtime " + std::to_string(s) + " s");
  return o;
}

Outcome criterion3() {
  Outcome o;
  const Rational t(1, 6);
  const LpSolution s = optimize_lp(4, t, 3);
  o.require(s.report.feasible && s.report.bound == Rational(7225, 680), "d = 3 bound " + s.report.bound.str());
  o.require(s.poly.f.size() == 4 && s.poly.f[1] == Rational(2270, 680) && s.poly.f[2] == Rational(2775, 680) &&
                s.poly.f[3] == Rational(1500, 680),
            "coefficients (2270/680, 2775/680, 1500/680)");
  double worst = 0;
  bool all = true;
  for (int d = 4; d <= 12; ++d) {
    try {
      const LpSolution sd = optimize_lp(4, t, d);
      all = all && sd.report.feasible;
      worst = std::max(worst, std::abs(sd.report.bound.to_double() - 10.625));
    } catch (const std::exception& ex) {
      all = false;
      o.notes.push_back("d = " + std::to_string(d) + ": " + ex.what());
    }
  }
  o.require(all && worst < 1e-6, "d = 4..12 certified, max |bound - 10.625| = " + std::to_string(worst));
  const ObstructionReport ob = lp_tightness_obstruction(petersen_code().gram, 200);
  o.require(ob.zero_set == std::vector<int>{1, 2}, "zero set {1,2} for k <= 200");
  o.require(ob.tail_ok && ob.k0 == 10, "tail bound discharges k > " + std::to_string(ob.k0));
  o.require(ob.pass, "obstruction verdicts");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const GramMatrix g = petersen_code().gram;
  const QMatrix s0 = triple_sum(g, 4, 0, 4);
  o.require(s0(0, 0) == Rational(1000) && s0(0, 1).is_zero() && s0(0, 2) == Rational(250) &&
                s0(0, 3) == Rational(125, 9),
            "S_0 sum first row (1000, 0, 250, 125/9)");
  o.require(triple_sum(g, 4, 1, 3).isZero(), "S_1 sum is zero");
  o.require(triple_sum(g, 4, 2, 1).isZero(), "S_2 sum is zero");
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto ks = reference_kernel();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const SymPoly3 e = expand(ks[i], 4);
    o.require(e.is_zero(), "expand(K_" + std::to_string(i + 1) + ") = " + (e.is_zero() ? "0" : e.str()));
  }
  const auto basis = kernel_basis(4, {4, 3, 1});
  o.require(basis.size() == 4, "kernel dimension " + std::to_string(basis.size()));
  const MatrixTuple f = search_base() + Rational(1, 3) * search_direction() + Rational(2000) * ks[1];
  o.require(expand(f, 4) == reference_expansion(), "expand(A + B/3 + 2000 K_2) equals F");
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto t0 = Clock::now();
  const SdpCertificate c = builtin_certificate();
  const Rational a(-2, 3), b(1, 6), one(1);
  const AlphaResult r = solve_alpha({4, 10, {a, b}, c.blocks, c.f0, c.B});
  o.require(r.ok, "alpha solved " + r.diagnostic);
  const std::map<ValueTriple, Rational> want{{{a, a, b}, 6}, {{a, a, one}, 3}, {{a, b, b}, 12},
                                             {{b, b, b}, 18}, {{b, b, one}, 6}, {{one, one, one}, 1}};
  bool match = r.ok;
  for (const auto& [t, v] : r.alpha) {
    const auto it = want.find(t);
    match = match && (it == want.end() ? v.is_zero() : v == it->second);
  }
  o.require(match, "alpha = (6, 3, 12, 18, 6, 1), all other triples 0");
  if (!r.ok) return o;
  const SrgParams p = srg_from_alpha(r.alpha, 10, a, b);
  o.require(p == SrgParams{10, 3, 0, 1}, "SRG(" + std::to_string(p.v) + ", " + std::to_string(p.k) + ", " +
                                             std::to_string(p.lambda) + ", " + std::to_string(p.mu) + ")");
  const SrgEnumeration en = enumerate_srg({10, 3, 0, 1});
  o.require(en.graphs.size() == 1, std::to_string(en.graphs.size()) + " isomorphism class(es)");
  if (en.graphs.size() == 1) {
    const Graph& g = en.graphs.front();
    o.require(g.edge_count() == 15, std::to_string(g.edge_count()) + " edges");
    o.require(automorphism_count(g) == 120, "automorphism group order " + std::to_string(automorphism_count(g)));
    const GramReconstruction gr = gram_from_graph(g);
    o.require(gr.psd && gr.rank == 4, "Gram PSD of rank " + std::to_string(gr.rank));
  }
  const double s = seconds_since(t0);
  o.require(s < 300, "runtime " + std::to_string(s) + " s");
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(3, 5), size(2, 8);
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = dim(rng);
    const GramMatrix g = random_gram(rng, n, size(rng));
    for (int k = 0; k <= 10; ++k) worst = std::min(worst, pair_sum(n, k, g).to_double());
  }
  o.require(worst >= -1e-9, "Gegenbauer positivity, min pair sum " + std::to_string(worst));
  for (int n = 3; n <= 5; ++n) {
    for (int k = 1; k <= 3; ++k) {
      const Verdict v = psd_sample_test(n, k, 3, 50, static_cast<std::uint64_t>(10 * n + k));
      o.require(v.pass, "S^" + std::to_string(n) + "_" + std::to_string(k) + " sampling: " + v.detail);
    }
  }
  const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  bool invariant = true;
  for (int n = 3; n <= 5; ++n) {
    for (int k = 0; k <= 3; ++k) {
      const ThreePointBlock b = snk_matrix(n, k, 4);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          const Poly3 p = b(i, j).to_poly();
          invariant = invariant && b(i, j) == b(j, i);
          for (const auto& perm : perms) invariant = invariant && p.permute(perm) == p;
        }
    }
  }
  o.require(invariant, "permutation invariance of S^n_k entries, n = 3..5, k = 0..3");
  const SdpCertificate c = builtin_certificate();
  const auto basis = kernel_basis(4, tuple_sizes(c.blocks));
  std::uniform_int_distribution<long> num(-100, 100), den(1, 12);
  bool shift = !basis.empty();
  for (int trial = 0; trial < 20; ++trial) {
    MatrixTuple t = c.blocks;
    for (const auto& k : basis) t = t + Rational(num(rng), den(rng)) * k;
    shift = shift && expand(t, 4) == expand(c.blocks, 4);
  }
  o.require(shift, "kernel-shift invariance under 20 random beta");
  return o;
}

bool solver_available() {
  return std::system("python3 -c 'import cvxpy, numpy' > /dev/null 2>&1") == 0;
}

Outcome criterion8() {
  Outcome o;
  const Rational t(1, 6);
  const SdpInstance generic = assemble(4, t, 2);
  const SdpaProblem gp = to_sdpa(generic);
  o.require(read_sdpa(write_sdpa(gp)) == gp,
            "assemble(4, 1/6, 2): " + std::to_string(gp.num_vars()) + " variables, " +
                std::to_string(generic.lp.rows()) + " linear rows, SDPA round trip");

  TightFace face;
  face.N = 10;
  face.gram = petersen_code().gram;
  GridSpec grid;
  grid.points_per_axis = 25;
  grid.segment_points = 300;
  const SdpInstance inst = assemble_tight_face(4, t, 2, {}, grid, face);
  for (const auto& v : inst.meta.checks) o.require(v.pass, v.name + ": " + v.detail);
  const SdpaProblem prob = to_sdpa(inst);

  std::vector<double> y;
  if (solver_available()) {
    const std::string work = (std::filesystem::temp_directory_path() / "spherebound_acceptance").string();
    const SdpSolver solve = external_solver("python3 '" + data("tools/sdpa_solve.py") + "' 2>/dev/null", work);
    const auto sol = solve(prob);
    o.require(sol.has_value(), "external solver (cvxpy) solved the tight-face SDP");
    if (sol) y = *sol;
  } else {
    y = parse_solution(slurp(data("data/petersen_tight.sol")), prob).y;
    o.notes.push_back("ok: cvxpy unavailable, using the stored solver output data/petersen_tight.sol");
  }
  if (y.empty()) return o;
  o.require(y.back() > 0, "margin " + std::to_string(y.back()));
  const RoundingResult r = round_certificate(inst.meta, y, 1000);
  std::string params;
  for (const auto& p : r.parameters) params += p.str() + " ";
  o.notes.push_back("ok: rounded parameters " + params);
  o.require(r.report.psd.pass, "PSD blocks of the rounded certificate");
  o.require(r.report.condition_c.verdict.pass && r.report.condition_c.mode_achieved == "CERTIFIED",
            "condition (c) " + r.report.condition_c.mode_achieved);
  o.require(r.report.condition_d.verdict.pass, "condition (d)");
  o.require(r.certified, "verify_full passes");
  o.require(r.report.bound.exact && r.report.bound.value == Rational(10),
            "bound " + (r.report.bound.exact ? r.report.bound.value.str() : std::string("inexact")) + ", B = " +
                r.certificate.B.str() + ", f0 = " + r.certificate.f0.str());

  for (const auto& [n, tt, N] : {std::tuple{20, Rational(1, 6), 170}, std::tuple{21, Rational(1, 5), 336}}) {
    const SdpaProblem big = to_sdpa(assemble(n, tt, 2, {}, GridSpec{}, Rational(N)));
    const std::string text = write_sdpa(big);
    o.notes.push_back(std::string(read_sdpa(text) == big ? "ok: " : "not gated, FAILED: ") + "(" + std::to_string(n) +
                      ", " + std::to_string(N) + ", " + tt.str() + ") instance written, " +
                      std::to_string(text.size()) + " bytes");
  }
  return o;
}

Outcome criterion9() {
  Outcome o;
  const SdpCertificate base = builtin_certificate();
  int flipped = 0, total = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      for (int delta : {-1, 1}) {
        SdpCertificate c = base;
        c.blocks[1](i, j) += delta;
        if (i != j) c.blocks[1](j, i) += delta;
        const Verdict v = verify_expansion(c);
        ++total;
        if (!v.pass && !v.detail.empty()) ++flipped;
      }
    }
  }
  o.require(verify_expansion(base).pass, "unmutated expansion passes");
  o.require(flipped == total, "F_1 entry +-1: " + std::to_string(flipped) + "/" + std::to_string(total) +
                                  " mutations fail the expansion check with the differing coefficient");

  SdpCertificate low = base;
  low.B = 249;
  const ConditionDReport d = verify_condition_d(low);
  o.require(verify_condition_d(base).verdict.pass && !d.verdict.pass, "B -> 249: " + d.verdict.detail);

  const Rational a(-2, 3), b(1, 6);
  const AlphaInputs in{4, 10, {a, b}, base.blocks, base.f0, base.B};
  const AlphaSystem sys = alpha_system(in);
  std::set<std::string> groups(sys.relation.begin(), sys.relation.end());
  int alpha_flipped = 0;
  std::string kept;
  for (const auto& g : groups) {
    const AlphaResult r = solve_alpha(in, {g});
    if (!r.ok && r.witness.size() > 0) {
      ++alpha_flipped;
    } else {
      kept += g + " ";
    }
  }
  o.require(alpha_flipped == static_cast<int>(groups.size()),
            "alpha constraint deleted: " + std::to_string(alpha_flipped) + "/" + std::to_string(groups.size()) +
                " groups fail with a witness" + (kept.empty() ? "" : "; still determined without: " + kept));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact certificate verification", criterion1},
      {"condition (c) certified", criterion2},
      {"LP side", criterion3},
      {"triple sums over the Petersen Gram matrix", criterion4},
      {"kernel", criterion5},
      {"uniqueness chain", criterion6},
      {"property suites", criterion7},
      {"pipeline rediscovery", criterion8},
      {"mutation tests", criterion9},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    all = all && o.pass;
    std::cout << "criterion " << (i + 1) << ": " << (o.pass ? "PASS" : "FAIL") << " - " << criteria[i].first << "\n";
    for (const auto& n : o.notes) std::cout << "    " << n << "\n";
    std::cout.flush();
  }
  return all ? 0 : 1;
}
