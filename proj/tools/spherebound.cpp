#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "spherebound/lpbound.hpp"
#include "spherebound/sdpcert.hpp"
#include "spherebound/sdpio.hpp"
#include "spherebound/uniqueness.hpp"

using namespace spherebound;
using json = nlohmann::ordered_json;

namespace {

enum Exit : int { kPass = 0, kFail = 1, kUsage = 2, kIo = 3, kData = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + path);
}

std::string sha256(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

Rational parse_rational(const std::string& s, const char* what) {
  try {
    return Rational::parse(s);
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string(what) + ": not a rational number: " + s);
  }
}

class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  json inputs = json::object();
  json values = json::object();

  void add(const Verdict& v) { verdicts_.push_back(v); }
  void add(const std::string& name, bool pass, const std::string& detail) { verdicts_.push_back({name, pass, detail}); }
  void artifact(const std::string& path, const std::string& bytes) { artifacts_[path] = sha256(bytes); }

  bool pass() const {
    for (const auto& v : verdicts_)
      if (!v.pass) return false;
    return !verdicts_.empty();
  }

  std::string render(double seconds) const {
    json j;
    j["schema"] = 1;
    j["command"] = command_;
    j["inputs"] = inputs;
    auto vs = json::array();
    for (const auto& v : verdicts_) vs.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
    j["verdicts"] = vs;
    j["values"] = values;
    j["artifacts"] = artifacts_;
    j["pass"] = pass();
    j["timings"] = {{"total_seconds", seconds}};
    return j.dump(2) + "\n";
  }

  void summarise(std::ostream& os) const {
    for (const auto& v : verdicts_) os << (v.pass ? "PASS " : "FAIL ") << v.name << ": " << v.detail << "\n";
  }

 private:
  std::string command_;
  std::vector<Verdict> verdicts_;
  json artifacts_ = json::object();
};

struct CommonOptions {
  std::string report_path;
  std::string config_path;
  int workers = 0;
  std::string mode = "certified";
  int depth_cap = 20;
  std::string sample_step = "1/200";
};

ConditionCOptions condition_c_options(const CommonOptions& o) {
  ConditionCOptions opt;
  if (o.mode == "certified") {
    opt.mode = ConditionCMode::Certified;
  } else if (o.mode == "sampled") {
    opt.mode = ConditionCMode::Sampled;
  } else {
    throw UsageError("--mode must be certified or sampled");
  }
  opt.depth_cap = o.depth_cap;
  opt.sample_step = parse_rational(o.sample_step, "--sample-step");
  if (opt.sample_step.sign() <= 0) throw UsageError("--sample-step must be positive");
  opt.workers = o.workers;
  return opt;
}

void add_condition_c_flags(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--mode", o.mode, "certified or sampled")->capture_default_str();
  sub->add_option("--depth-cap", o.depth_cap, "branch-and-bound depth cap")->capture_default_str();
  sub->add_option("--sample-step", o.sample_step, "grid step of sampled mode")->capture_default_str();
}

void add_verification(Report& rep, const SdpCertificate& c, const VerificationReport& r) {
  for (const auto& v : r.psd.blocks) rep.add(v);
  rep.add(r.expansion);
  rep.add(r.condition_c.verdict.name + " [" + r.condition_c.mode_achieved + "]", r.condition_c.verdict.pass,
          r.condition_c.verdict.detail);
  rep.add(r.condition_d.verdict);
  rep.values["F(1,1,1)"] = r.f111.str();
  rep.values["condition_c_mode"] = r.condition_c.mode_achieved;
  try {
    const BoundValue b = compute_bound(c.B, c.f0, r.f111);
    rep.values["radicand"] = b.radicand.str();
    if (b.exact) {
      rep.values["bound"] = b.value.str();
      rep.add("bound", true, b.value.str());
    } else {
      rep.values["bound_lo"] = b.lo.str();
      rep.values["bound_hi"] = b.hi.str();
      rep.add("bound", true, "[" + b.lo.str() + ", " + b.hi.str() + "]");
    }
  } catch (const std::domain_error& e) {
    rep.add("bound", false, e.what());
  }
}

SdpCertificate certificate_input(const std::string& path, Report& rep) {
  if (path.empty() || path == "builtin") {
    rep.inputs["certificate"] = "builtin";
    return builtin_certificate();
  }
  const std::string text = read_file(path);
  rep.inputs["certificate"] = path;
  rep.artifact(path, text);
  return certificate_from_json(text);
}

/// Sets options absent from the command line from the JSON config: top-level
/// keys apply when the command has such a flag, keys under the command name
/// must match a flag.
void apply_config(CLI::App* app, CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  json cfg;
  try {
    cfg = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config: top level must be an object");
  auto set = [&](const std::string& key, const json& val, bool strict) {
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr && !strict) opt = app->get_option_no_throw("--" + key);
    if (opt == nullptr) {
      if (strict) throw UsageError("config: unknown option " + key + " for " + sub->get_name());
      return;
    }
    if (opt->count() > 0) return;
    if (val.is_boolean()) {
      if (val.get<bool>()) opt->add_result("true");
    } else {
      opt->add_result(val.is_string() ? val.get<std::string>() : val.dump());
    }
    opt->run_callback();
  };
  for (const auto& [key, val] : cfg.items()) {
    if (val.is_object()) continue;
    set(key, val, false);
  }
  if (cfg.contains(sub->get_name())) {
    const json& section = cfg[sub->get_name()];
    if (!section.is_object()) throw UsageError("config: section " + sub->get_name() + " must be an object");
    for (const auto& [key, val] : section.items()) set(key, val, true);
  }
}

std::vector<int> parse_sizes(const std::string& s) {
  std::vector<int> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("--sizes: expected comma-separated positive integers, got " + s);
    }
  }
  return out;
}

void cmd_verify_petersen(Report& rep, const CommonOptions& co, const std::string& cert_path, std::string expansion) {
  const SdpCertificate c = certificate_input(cert_path, rep);
  if (expansion.empty()) expansion = rep.inputs["certificate"] == "builtin" ? "reference" : "none";
  if (expansion != "reference" && expansion != "none") throw UsageError("--expansion must be reference or none");
  rep.inputs["expansion"] = expansion;
  const VerificationReport r = verify_full(
      c, condition_c_options(co), expansion == "reference" ? std::optional<SymPoly3>(reference_expansion()) : std::nullopt);
  add_verification(rep, c, r);
  rep.add("bound equals 10", r.bound.exact && r.bound.value == Rational(10),
          r.bound.exact ? r.bound.value.str() : "not a rational value");

  const Rational adj(-2, 3), other(1, 6);
  const AlphaResult alpha = solve_alpha({4, 10, {adj, other}, c.blocks, c.f0, c.B});
  std::ostringstream ad;
  for (const auto& [t, a] : alpha.alpha) {
    if (!a.is_zero()) ad << "(" << t[0] << ", " << t[1] << ", " << t[2] << ")=" << a << " ";
  }
  rep.add("alpha system", alpha.ok, alpha.ok ? ad.str() : alpha.diagnostic);
  if (!alpha.ok) return;
  for (const auto& [t, a] : alpha.alpha) {
    rep.values["alpha"][t[0].str() + "," + t[1].str() + "," + t[2].str()] = a.str();
  }
  SrgParams p;
  try {
    p = srg_from_alpha(alpha.alpha, 10, adj, other);
  } catch (const std::domain_error& e) {
    rep.add("SRG parameters", false, e.what());
    return;
  }
  const SrgParams want{10, 3, 0, 1};
  rep.add("SRG parameters", p == want,
          "(" + std::to_string(p.v) + ", " + std::to_string(p.k) + ", " + std::to_string(p.lambda) + ", " +
              std::to_string(p.mu) + ")");
  const SrgEnumeration en = enumerate_srg(p);
  bool one = en.graphs.size() == 1;
  std::string detail = std::to_string(en.graphs.size()) + " isomorphism classes";
  if (one) {
    const Graph& g = en.graphs.front();
    const auto aut = automorphism_count(g);
    one = one && g.edge_count() == 15 && aut == 120;
    detail += ", " + std::to_string(g.edge_count()) + " edges, automorphism group order " + std::to_string(aut) +
              ", graph6 " + to_graph6(g);
    rep.values["graph6"] = to_graph6(g);
    const GramReconstruction gr = gram_from_graph(g, adj, other);
    rep.add("Gram reconstruction", gr.psd && gr.rank == 4,
            std::string(gr.psd ? "PSD" : "not PSD") + ", rank " + std::to_string(gr.rank));
  }
  rep.add("SRG enumeration", one, detail);
}

void cmd_verify_cert(Report& rep, const CommonOptions& co, const std::string& path, const std::string& expect) {
  const SdpCertificate c = certificate_input(path, rep);
  const VerificationReport r = verify_full(c, condition_c_options(co));
  add_verification(rep, c, r);
  if (!expect.empty()) {
    const Rational want = parse_rational(expect, "--expect-bound");
    rep.add("bound equals " + want.str(), r.bound.exact && r.bound.value == want,
            r.bound.exact ? r.bound.value.str() : "[" + r.bound.lo.str() + ", " + r.bound.hi.str() + "]");
  }
}

void cmd_lp_bound(Report& rep, int n, const std::string& ts, int d, bool obstruction, int kmax, int grid) {
  const Rational t = parse_rational(ts, "--t");
  rep.inputs["n"] = n;
  rep.inputs["t"] = t.str();
  rep.inputs["d"] = d;
  LpOptions opt;
  opt.grid_size = grid;
  try {
    const LpSolution s = optimize_lp(n, t, d, opt);
    for (const auto& v : s.report.verdicts) rep.add(v);
    rep.values["bound"] = s.report.bound.str();
    rep.values["method"] = s.method;
    auto coeffs = json::array();
    for (const auto& f : s.poly.f) coeffs.push_back(f.str());
    rep.values["coefficients"] = coeffs;
  } catch (const LpInfeasible& e) {
    rep.add("LP feasible", false, e.what());
  } catch (const LpNoConvergence& e) {
    rep.add("LP converged", false, e.what());
  }
  if (obstruction) {
    rep.inputs["obstruction_K"] = kmax;
    const ObstructionReport o = lp_tightness_obstruction(petersen_code().gram, kmax);
    for (const auto& v : o.verdicts) rep.add(v);
    auto zs = json::array();
    for (int k : o.zero_set) zs.push_back(k);
    rep.values["zero_set"] = zs;
    rep.values["tail_constant"] = o.tail_constant.str();
    rep.values["k0"] = o.k0;
  }
}

struct GenOptions {
  int n = 4;
  std::string t = "1/6";
  int d = 2;
  std::string sizes;
  std::string nbar = "10";
  int grid = 21;
  int segment = 201;
  std::string face;
  std::string out;
};

void cmd_gen_sdpa(Report& rep, const GenOptions& g) {
  const Rational t = parse_rational(g.t, "--t");
  const Rational nbar = parse_rational(g.nbar, "--nbar");
  if (g.out.empty()) throw UsageError("gen-sdpa: --out is required");
  rep.inputs["n"] = g.n;
  rep.inputs["t"] = t.str();
  rep.inputs["d"] = g.d;
  rep.inputs["grid"] = g.grid;
  rep.inputs["segment"] = g.segment;
  GridSpec grid;
  grid.points_per_axis = g.grid;
  grid.segment_points = g.segment;
  SdpInstance inst;
  if (g.face.empty()) {
    rep.inputs["nbar"] = nbar.str();
    inst = assemble(g.n, t, g.d, parse_sizes(g.sizes), grid, nbar);
  } else if (g.face == "petersen") {
    rep.inputs["face"] = g.face;
    TightFace face;
    face.N = 10;
    face.gram = petersen_code().gram;
    inst = assemble_tight_face(g.n, t, g.d, parse_sizes(g.sizes), grid, face);
  } else {
    throw UsageError("--face: only petersen is known");
  }
  for (const auto& v : inst.meta.checks) rep.add(v);
  const SdpaProblem prob = to_sdpa(inst);
  const std::string text = write_sdpa(prob);
  const std::string meta = metadata_to_json(inst.meta);
  write_file(g.out, text);
  write_file(g.out + ".meta.json", meta);
  rep.artifact(g.out, text);
  rep.artifact(g.out + ".meta.json", meta);
  const bool same = read_sdpa(read_file(g.out)) == prob;
  rep.add("SDPA file re-reads identically", same, g.out);
  rep.values["variables"] = prob.num_vars();
  rep.values["grid_points"] = inst.meta.grid_points;
  rep.values["segment_points"] = inst.meta.segment_points;
  auto bs = json::array();
  for (int b : prob.block_sizes) bs.push_back(b);
  rep.values["block_sizes"] = bs;
}

void cmd_round_cert(Report& rep, const CommonOptions& co, const std::string& problem_path, const std::string& sol_path,
                    long den, const std::string& out) {
  const std::string problem_text = read_file(problem_path);
  const std::string meta_text = read_file(problem_path + ".meta.json");
  const std::string sol_text = read_file(sol_path);
  rep.inputs["problem"] = problem_path;
  rep.inputs["solution"] = sol_path;
  rep.inputs["denominator"] = den;
  rep.artifact(problem_path, problem_text);
  rep.artifact(problem_path + ".meta.json", meta_text);
  rep.artifact(sol_path, sol_text);
  const SdpMetadata meta = metadata_from_json(meta_text);
  const SdpaSolution sol = parse_solution(sol_text, read_sdpa(problem_text));
  const RoundingResult r = round_certificate(meta, sol.y, den, condition_c_options(co));
  auto params = json::array();
  for (const auto& p : r.parameters) params.push_back(p.str());
  rep.values["parameters"] = params;
  add_verification(rep, r.certificate, r.report);
  rep.values["B"] = r.certificate.B.str();
  rep.values["f0"] = r.certificate.f0.str();
  if (!out.empty()) {
    const std::string text = certificate_to_json(r.certificate);
    write_file(out, text);
    rep.artifact(out, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = std::chrono::steady_clock::now();
  CLI::App app{"Exact three-point and linear-programming bounds for spherical codes"};
  app.require_subcommand(1);
  app.fallthrough();
  CommonOptions co;
  app.add_option("--report", co.report_path, "write the JSON report here instead of stdout");
  app.add_option("--config", co.config_path, "JSON file with defaults; flags win");
  app.add_option("--workers", co.workers, "worker threads (default: SPHEREBOUND_WORKERS or 1)");

  std::string cert_path, expansion;
  auto* vp = app.add_subcommand("verify-petersen", "optimality and uniqueness chain for the Petersen code");
  vp->add_option("--certificate", cert_path, "certificate JSON (default: builtin)");
  vp->add_option("--expansion", expansion, "compare F with the displayed polynomial: reference or none");
  add_condition_c_flags(vp, co);

  std::string file, expect;
  auto* vc = app.add_subcommand("verify-cert", "verify a certificate file");
  vc->add_option("--file", file, "certificate JSON")->required();
  vc->add_option("--expect-bound", expect, "require this exact bound");
  add_condition_c_flags(vc, co);

  int n = 4, d = 3, kmax = 200, grid = 2001;
  std::string ts = "1/6";
  bool obstruction = false;
  auto* lp = app.add_subcommand("lp-bound", "optimise and certify the linear-programming bound");
  lp->add_option("--n", n, "dimension")->capture_default_str();
  lp->add_option("--t", ts, "maximal inner product")->capture_default_str();
  lp->add_option("--d", d, "degree")->capture_default_str();
  lp->add_option("--grid-size", grid, "initial discretisation")->capture_default_str();
  lp->add_flag("--obstruction", obstruction, "show that no LP certificate proves N = 10");
  lp->add_option("--k-max", kmax, "exact pair sums up to this degree")->capture_default_str();

  GenOptions go;
  auto* gs = app.add_subcommand("gen-sdpa", "write an SDPA instance and its metadata");
  gs->add_option("--n", go.n)->capture_default_str();
  gs->add_option("--t", go.t)->capture_default_str();
  gs->add_option("--d", go.d)->capture_default_str();
  gs->add_option("--sizes", go.sizes, "block sizes, e.g. 4,3,1");
  gs->add_option("--nbar", go.nbar, "trial code size")->capture_default_str();
  gs->add_option("--grid", go.grid, "Chebyshev points per axis")->capture_default_str();
  gs->add_option("--segment", go.segment, "points on the diagonal segment")->capture_default_str();
  gs->add_option("--face", go.face, "restrict to the tight face of a target code (petersen)");
  gs->add_option("--out", go.out, "output .dat-s path")->required();

  std::string problem, solution, out;
  long den = 1000;
  auto* rc = app.add_subcommand("round-cert", "round a solver solution and verify it exactly");
  rc->add_option("--problem", problem, ".dat-s written by gen-sdpa")->required();
  rc->add_option("--solution", solution, "solver output")->required();
  rc->add_option("--denominator", den, "denominator bound")->capture_default_str();
  rc->add_option("--out", out, "write the rounded certificate here");
  add_condition_c_flags(rc, co);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  Report rep(sub->get_name());
  try {
    apply_config(&app, sub, co.config_path);
    if (co.workers < 0) throw UsageError("--workers must be nonnegative");
    if (sub == vp) cmd_verify_petersen(rep, co, cert_path, expansion);
    if (sub == vc) cmd_verify_cert(rep, co, file, expect);
    if (sub == lp) cmd_lp_bound(rep, n, ts, d, obstruction, kmax, grid);
    if (sub == gs) cmd_gen_sdpa(rep, go);
    if (sub == rc) cmd_round_cert(rep, co, problem, solution, den, out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const SdpaFormatError& e) {
    std::cerr << "invalid SDPA data: " << e.what() << "\n";
    return kData;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kData;
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string text = rep.render(seconds);
  if (co.report_path.empty()) {
    std::cout << text;
  } else {
    try {
      write_file(co.report_path, text);
    } catch (const IoError& e) {
      std::cerr << "I/O error: " << e.what() << "\n";
      return kIo;
    }
  }
  rep.summarise(std::cerr);
  return rep.pass() ? kPass : kFail;
}
