#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spherebound/linalg.hpp"
#include "spherebound/sdpcert.hpp"

namespace spherebound {

/// Problem in SDPA form: minimise c.y subject to sum_i y_i F_i - F_0 >= 0.
/// Indices are 1-based as in the file format; matrix 0 is F_0.
struct SdpaProblem {
  struct Entry {
    int matrix = 0;
    int block = 1;
    int i = 1;
    int j = 1;
    double value = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };
  std::vector<int> block_sizes;  ///< negative for diagonal (LP) blocks
  std::vector<double> c;
  std::vector<Entry> entries;

  int num_vars() const { return static_cast<int>(c.size()); }
  friend bool operator==(const SdpaProblem&, const SdpaProblem&) = default;
};

struct SdpaFormatError : std::runtime_error {
  enum class Kind { Malformed, NonNumeric, WrongSize, MissingBlock };
  SdpaFormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind(kind) {}
  Kind kind;
};

/// .dat-s text; every value printed with %.17g so doubles round-trip.
std::string write_sdpa(const SdpaProblem& p);
SdpaProblem read_sdpa(const std::string& text);

/// CSDP-style solution: the y vector on the first line, then
/// "matno block i j value" rows for Z (matno 1) and X (matno 2).
struct SdpaSolution {
  std::vector<double> y;
  std::vector<Eigen::MatrixXd> z;
  std::vector<Eigen::MatrixXd> x;
};

/// Every block of `problem` must appear in both the Z and X sections.
SdpaSolution parse_solution(const std::string& text, const SdpaProblem& problem);

enum class SdpMode { Generic, TightFace };

/// Candidate points for the linear constraints.
struct GridSpec {
  int points_per_axis = 21;   ///< Chebyshev-Lobatto nodes on [-1, t]
  int segment_points = 201;   ///< uniform points u for F(u, u, 1) <= B
  long node_denominator = 10000;
  std::vector<Rational> extra_values;              ///< added to axis and segment
  std::vector<std::array<Rational, 3>> extra_points; ///< must lie in D
};

/// Target code for the tight-face reduction.
struct TightFace {
  int N = 10;
  GramMatrix gram;
  double weight = 0.05;
  double margin_cap = 10;
};

/// How SDPA variables y map to certificate coordinates
/// z = (tuple_coordinates, B) = particular + directions * y[0..p).
struct SdpMetadata {
  int n = 4;
  Rational t;
  int d = 2;
  std::vector<int> sizes;
  SdpMode mode = SdpMode::Generic;
  Rational nbar;
  Rational f0 = Rational(1);
  QVector particular;
  QMatrix directions;
  int num_vars = 0;
  std::size_t grid_points = 0;
  std::size_t segment_points = 0;
  std::vector<Verdict> checks;
};

std::string metadata_to_json(const SdpMetadata& m);
SdpMetadata metadata_from_json(const std::string& text);

/// Exact data: each PSD block is A_0 + sum_i y_i A_i >= 0, each LP row
/// a_0 + sum_i y_i a_i >= 0 (column 0 is a_0).
struct SdpInstance {
  SdpMetadata meta;
  QVector objective;
  std::vector<std::vector<QMatrix>> psd;
  QMatrix lp;
};

/// Default sizes: d + 2 - k for k < d and 1 for k = d.
std::vector<int> default_sizes(int d);

/// Sorted triples of grid values inside D, then the extra points.
std::vector<std::array<Rational, 3>> grid_points(const Rational& t, const GridSpec& grid);

/// min F(1,1,1) + 3 (nbar - 1) B with f_0 = 1, F_0 - E_0 and F_k PSD,
/// F <= 0 on the grid, F(u,u,1) <= B on the segment and sum_k tr F_k <= 10^4.
SdpInstance assemble(int n, const Rational& t, int d, const std::vector<int>& sizes = {},
                     const GridSpec& grid = {}, const Rational& nbar = Rational(10));

/// Restricts to the face where the target code is tight: the linear tightness
/// conditions are solved exactly and the SDP maximises a margin s over the
/// remaining parameters.
SdpInstance assemble_tight_face(int n, const Rational& t, int d, const std::vector<int>& sizes,
                                const GridSpec& grid, const TightFace& face);

SdpaProblem to_sdpa(const SdpInstance& inst);

/// Numeric certificate; blocks are symmetric.
struct NumericCertificate {
  int n = 4;
  Rational t;
  std::vector<Eigen::MatrixXd> blocks;
  double B = 0;
  double f0 = 1;
};

NumericCertificate numeric_certificate(const SdpMetadata& meta, const std::vector<double>& y);

struct RoundingResult {
  SdpCertificate certificate;
  std::vector<Rational> parameters;
  VerificationReport report;
  bool certified = false;
  std::string diagnostic;
};

/// Entry-wise continued-fraction rounding, then verify_full.
RoundingResult round_certificate(const NumericCertificate& num, long denominator_bound,
                                 const ConditionCOptions& opt = {});

/// Rounds the free parameters y (tight face) or the coordinates (generic)
/// and maps them through the exact parametrisation.
RoundingResult round_certificate(const SdpMetadata& meta, const std::vector<double>& y,
                                 long denominator_bound, const ConditionCOptions& opt = {});

/// Solves an SDPA problem, returning y or nothing when infeasible.
using SdpSolver = std::function<std::optional<std::vector<double>>(const SdpaProblem&)>;

struct BisectionResult {
  Rational nbar;
  std::vector<double> y;
  SdpMetadata meta;
  int steps = 0;
};

/// Smallest nbar on a grid of width `tol` with optimum <= nbar^2.
std::optional<BisectionResult> bisect_bound(int n, const Rational& t, int d, const std::vector<int>& sizes,
                                            const GridSpec& grid, Rational lo, Rational hi,
                                            const Rational& tol, const SdpSolver& solver);

/// Runs `command input output` through the shell and parses the result.
SdpSolver external_solver(const std::string& command, const std::string& workdir);

}  // namespace spherebound
