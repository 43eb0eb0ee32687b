#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spherebound/linalg.hpp"
#include "spherebound/poly3.hpp"
#include "spherebound/threepoint.hpp"
#include "spherebound/unipoly.hpp"
#include "spherebound/verdict.hpp"

namespace spherebound {

struct SdpCertificate {
  int n = 4;
  Rational t;
  MatrixTuple blocks;
  Rational B;
  Rational f0;

  friend bool operator==(const SdpCertificate& a, const SdpCertificate& b);
};

/// F_0, F_1, F_2 with B = 250, f_0 = 800/3 for (n, t) = (4, 1/6).
SdpCertificate builtin_certificate();

/// JSON with every rational written as "p/q"; round-trips bit-exactly.
std::string certificate_to_json(const SdpCertificate& c);
/// Throws std::invalid_argument on malformed documents.
SdpCertificate certificate_from_json(const std::string& text);
SdpCertificate load_certificate(const std::string& path);
void save_certificate(const SdpCertificate& c, const std::string& path);

/// The nine-term expansion displayed for the builtin certificate.
SymPoly3 reference_expansion();

Verdict verify_expansion(const SdpCertificate& c, const SymPoly3& expected);
Verdict verify_expansion(const SdpCertificate& c);

/// G(x) = F(x, x, 1) - B.
UniPoly diagonal_polynomial(const SdpCertificate& c);

/// The displayed factorisation with constant `scale`:
/// scale (x + 2/3)^2 (x - 1/6) (x^2 + 4/9 x + 20/27).
UniPoly reference_factorisation(const Rational& scale);

struct ConditionDReport {
  Verdict verdict;
  UniPoly g;
  /// G equals the displayed factorisation with constant 3888.
  bool factor_identity = false;
  /// G equals the factorisation with the printed constant 1/3888.
  bool printed_constant_matches = false;
  /// Sign argument from the rational roots and a root-free cofactor.
  std::optional<bool> factor_sign_nonpositive;
  SignVerdict sturm;
  std::vector<Rational> roots;
};

ConditionDReport verify_condition_d(const SdpCertificate& c);

/// Product of linear factors and a cofactor without roots in [lo, hi]; returns
/// the sign conclusion, or nullopt if the argument does not apply.
std::optional<bool> factor_sign_nonpositive(const UniPoly& g, const Rational& lo, const Rational& hi);

enum class ConditionCMode { Certified, Sampled };

struct ConditionCOptions {
  ConditionCMode mode = ConditionCMode::Certified;
  int depth_cap = 20;
  Rational sample_step = Rational(1, 200);
  double sample_tolerance = 1e-12;
  /// 0 means SPHEREBOUND_WORKERS or 1.
  int workers = 0;
};

struct ConditionCReport {
  Verdict verdict;
  /// "CERTIFIED", "SAMPLED-ONLY" or "FAILED".
  std::string mode_achieved;
  /// Zeros of F on D found by the search, as sorted triples.
  std::set<std::array<Rational, 3>> zero_set;
  std::size_t boxes = 0;
  std::size_t local_certificates = 0;
  std::optional<Box3> offending_box;
  std::optional<std::array<Rational, 3>> positive_point;
  double sampled_max = 0;
};

ConditionCReport verify_condition_c(const SdpCertificate& c, const ConditionCOptions& opt = {});

/// Candidate zeros of F in D built from the rational roots of F(x,x,1) - B.
std::set<std::array<Rational, 3>> candidate_zero_set(const SdpCertificate& c);

/// Second-order certificate that F <= 0 on box, expanding around the zero z0
/// of F (z0 need not lie in the box).
bool local_zero_certificate(const Poly3& f, const std::array<Rational, 3>& z0, const Box3& box);

struct PsdReport {
  std::vector<Verdict> blocks;  ///< F_0..F_d, then F_0 - f_0 E_0
  bool pass = false;
};

PsdReport verify_psd(const SdpCertificate& c);

struct BoundValue {
  Rational radicand;
  bool exact = false;
  Rational value;  ///< exact bound when `exact`
  Rational lo, hi; ///< enclosure otherwise (lo = hi = value when exact)
};

/// (3B + sqrt(9B^2 + 4 f0 (F(1,1,1) - 3B))) / (2 f0).
BoundValue compute_bound(const SdpCertificate& c);
BoundValue compute_bound(const Rational& B, const Rational& f0, const Rational& f111);

struct VerificationReport {
  PsdReport psd;
  Verdict expansion;
  SymPoly3 polynomial;
  Rational f111;
  ConditionCReport condition_c;
  ConditionDReport condition_d;
  BoundValue bound;
  bool pass = false;
};

/// Runs all checks; `expected` (if given) is compared with the expansion.
VerificationReport verify_full(const SdpCertificate& c, const ConditionCOptions& opt = {},
                               const std::optional<SymPoly3>& expected = std::nullopt);

/// The one-parameter family A + gamma B plus kernel shifts.
struct SearchSpace {
  MatrixTuple a;
  MatrixTuple b;
  std::vector<MatrixTuple> kernel;  ///< K_1..K_4
  /// Exact solution of the linear conditions in the 9-term span.
  QVector particular;
  QMatrix directions;
  std::vector<Exponent> span;
  std::vector<Verdict> checks;
};

/// Reference matrices for the search.
MatrixTuple search_base();
MatrixTuple search_direction();
std::vector<MatrixTuple> reference_kernel();

SearchSpace build_search_space();

struct FeasibilityResult {
  std::optional<SdpCertificate> certificate;
  std::vector<Rational> beta;
  std::string diagnostic;
  double best_min_eigenvalue = 0;
};

/// Searches beta over the kernel tuples that expand to zero, with A + gamma B + sum beta_i K_i PSD blockwise, then
/// certifies the rounded point exactly. B and f_0 of the result are read off
/// the family: B from F(x,x,1) at the double root, f_0 from tightness.
FeasibilityResult feasibility_solve(const SearchSpace& space, const Rational& gamma);

/// Worker count from SPHEREBOUND_WORKERS (default 1).
int configured_workers();

}  // namespace spherebound
