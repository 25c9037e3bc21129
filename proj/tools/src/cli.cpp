#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tkmp/certify.hpp"
#include "tkmp/errors.hpp"
#include "tkmp/io.hpp"
#include "tkmp/pipeline.hpp"

namespace tkmp::cli {

namespace {

double env_or(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const double x = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(x > 0.0)) throw ValidationError(std::string(name) + " must be a positive number");
  return x;
}

struct SolverFlags {
  double sdp_tol = 1e-9;
  int max_iter = 200;
  double rank_tau = 1e-6;
  bool relative_rank = false;
  bool no_scale = false;
  std::string out;

  void add(CLI::App* app) {
    app->add_option("--sdp-tol", sdp_tol, "SDP gap and feasibility tolerance (env TKMP_SDP_TOL)");
    app->add_option("--max-iter", max_iter, "interior-point iteration limit");
    app->add_option("--rank-tol", rank_tau, "eigenvalue threshold for numerical rank (env TKMP_RANK_TOL)");
    app->add_flag("--relative-rank", relative_rank, "scale the rank threshold by the largest eigenvalue");
    app->add_flag("--no-scale", no_scale, "solve in the original coordinates");
    app->add_option("-o,--out", out, "write the JSON record here instead of stdout");
  }

  PipelineOptions pipeline() const {
    PipelineOptions o;
    o.sdp.tol_gap = o.sdp.tol_feas = sdp_tol;
    o.sdp.max_iter = max_iter;
    o.rank.tau = rank_tau;
    o.rank.relative = relative_rank;
    o.extraction.rank = o.rank;
    o.scale = !no_scale;
    return o;
  }

  Json echo() const {
    return Json{{"sdp_tol", sdp_tol}, {"max_iter", max_iter}, {"rank_tol", rank_tau},
                {"relative_rank", relative_rank}, {"scale", !no_scale}};
  }
};

// JSON goes to --out or stdout; the human summary goes to whichever stream
// the JSON does not use.
void emit(const SolverFlags& f, const Json& j, std::ostream& out, std::ostream& err, const std::string& summary) {
  if (f.out.empty()) {
    out << j.dump(2) << "\n";
    err << summary;
    return;
  }
  std::ofstream file(f.out);
  if (!file) throw ValidationError("cannot write " + f.out);
  file << j.dump(2) << "\n";
  out << summary;
}

ReferenceSpec reference_from_flag(const std::string& kind, const std::string& file, const Instance& inst,
                                  std::int64_t samples, std::uint64_t seed) {
  ReferenceSpec s;
  s.kind = reference_kind_from_string(kind);
  switch (s.kind) {
    case ReferenceKind::ball_uniform:
      if (inst.reference && inst.reference->kind == ReferenceKind::ball_uniform) return *inst.reference;
      if (inst.K.interior_witness()) {
        s.center = inst.K.interior_witness()->center;
        s.radius = inst.K.interior_witness()->radius;
      } else {
        s.center = Eigen::VectorXd::Zero(inst.n);
      }
      break;
    case ReferenceKind::box_uniform: {
      const auto box = inst.K.as_box();
      if (!box) throw ValidationError("--xi box needs a set given by interval constraints (hi - xi)(xi - lo) >= 0");
      s.lo = box->first;
      s.hi = box->second;
      break;
    }
    case ReferenceKind::gaussian: break;
    case ReferenceKind::monte_carlo:
      s.sample_count = samples;
      s.seed = seed;
      break;
    case ReferenceKind::explicit_tms: {
      if (file.empty()) throw ValidationError("--xi file needs --xi-file");
      const Json j = read_json_file(file);
      s.moments = tms_from_json(j.at("moments"), inst.n, j.at("degree").get<int>());
      break;
    }
  }
  return s;
}

std::string lambda_table(const std::vector<LambdaStep>& history) {
  std::ostringstream os;
  os << "   k  lambda_k            status\n";
  for (const auto& s : history) {
    os << std::setw(4) << s.k << "  " << std::setw(18) << std::left << std::setprecision(10) << s.lambda
       << std::right << "  " << to_string(s.status);
    if (s.flat_t) os << "  flat at t=" << *s.flat_t;
    if (!s.note.empty()) os << "  (" << s.note << ")";
    os << "\n";
  }
  return os.str();
}

std::string atoms_text(const AtomicMeasure& mu) {
  std::ostringstream os;
  os << std::setprecision(8);
  for (std::size_t j = 0; j < mu.points.size(); ++j) {
    os << "  weight " << std::setw(14) << std::left << mu.weights[j] << std::right << " at (";
    for (Eigen::Index i = 0; i < mu.points[j].size(); ++i) os << (i ? ", " : "") << mu.points[j][i];
    os << ")\n";
  }
  return os.str();
}

int kind_exit(VerdictKind k) {
  switch (k) {
    case VerdictKind::measure_found: return 0;
    case VerdictKind::no_measure: return 1;
    case VerdictKind::inconclusive: return 2;
  }
  return 2;
}

int kind_exit(FlatSearchKind k) {
  switch (k) {
    case FlatSearchKind::measure_found: return 0;
    case FlatSearchKind::infeasible: return 1;
    case FlatSearchKind::exhausted: return 2;
  }
  return 2;
}

Json argv_json(int argc, char** argv) {
  Json a = Json::array();
  for (int i = 1; i < argc; ++i) a.push_back(argv[i]);
  return a;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Truncated K-moment problems: membership, flat extensions and certificates", "tkmp"};
  app.require_subcommand(1);

  SolverFlags flags;
  PipelineOptions defaults;
  try {
    flags.sdp_tol = env_or("TKMP_SDP_TOL", defaults.sdp.tol_gap);
    flags.rank_tau = env_or("TKMP_RANK_TOL", defaults.rank.tau);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }

  // check
  auto* check = app.add_subcommand("check", "decide whether y admits a K-representing measure");
  std::string check_file, mode_name = "qm", xi_kind, xi_file;
  std::optional<int> kmax, kmin;
  std::int64_t mc_samples = 1000000;
  std::uint64_t mc_seed = 0;
  int cap = kDefaultPreorderingCap;
  check->add_option("instance", check_file, "instance JSON")->required();
  check->add_option("--mode", mode_name, "qm (quadratic module) or pre (preordering)")
      ->check(CLI::IsMember({"qm", "pre"}));
  check->add_option("--kmax", kmax, "highest relaxation order (default ceil(d/2) + 4)");
  check->add_option("--kmin", kmin, "lowest relaxation order");
  check->add_option("--xi", xi_kind, "reference measure: ball, box, gaussian, mc or file")
      ->check(CLI::IsMember({"ball", "box", "gaussian", "mc", "file"}));
  check->add_option("--xi-file", xi_file, "JSON {degree, moments} for --xi file");
  check->add_option("--samples", mc_samples, "Monte Carlo sample count for --xi mc");
  check->add_option("--seed", mc_seed, "Monte Carlo seed for --xi mc");
  check->add_option("--preordering-cap", cap, "largest generator count accepted in preordering mode");
  flags.add(check);

  // extend
  auto* extend = app.add_subcommand("extend", "search for a flat extension and extract its atoms");
  std::string extend_file, objective_name = "seeded";
  std::uint64_t objective_seed = 0;
  bool rn = false;
  extend->add_option("instance", extend_file, "instance JSON")->required();
  extend->add_option("--objective", objective_name, "seeded, ones or trace")
      ->check(CLI::IsMember({"seeded", "ones", "trace"}));
  extend->add_option("--seed", objective_seed, "seed of the random objective");
  extend->add_option("--kmax", kmax, "highest relaxation order (default d + 3)");
  extend->add_option("--kmin", kmin, "lowest relaxation order (default d)");
  extend->add_flag("--rn", rn, "ignore the set and search over R^n");

  // reuse the solver flags through a second instance bound to extend
  SolverFlags eflags = flags;
  eflags.add(extend);

  // bench
  auto* bench = app.add_subcommand("bench", "flat-extension search on seeded random atomic instances");
  int bn = 2, bd = 4, bcount = 20;
  std::uint64_t bseed = 0;
  std::string bkind = "box";
  bench->add_option("--n", bn, "number of variables")->check(CLI::PositiveNumber);
  bench->add_option("--d", bd, "degree")->check(CLI::PositiveNumber);
  bench->add_option("--kind", bkind, "box or rn")->check(CLI::IsMember({"box", "rn"}));
  bench->add_option("--count", bcount, "number of instances")->check(CLI::NonNegativeNumber);
  bench->add_option("--seed", bseed, "base seed");
  SolverFlags bflags = flags;
  bflags.add(bench);

  // certify-file
  auto* certify = app.add_subcommand("certify-file", "re-verify a MeasureFound or NoMeasure record offline");
  std::string verdict_file, instance_file;
  double measure_tol = 1e-5;
  certify->add_option("verdict", verdict_file, "verdict JSON")->required();
  certify->add_option("instance", instance_file, "instance JSON")->required();
  certify->add_option("--tol", measure_tol, "relative moment tolerance for measure records");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (check->parsed()) {
      const Instance inst = load_instance(check_file);
      std::optional<ReferenceSpec> xi;
      if (!xi_kind.empty()) {
        xi = reference_from_flag(xi_kind, xi_file, inst, mc_samples, mc_seed);
      } else if (inst.reference) {
        xi = inst.reference;
      }
      const FamilyMode mode = family_mode_from_string(mode_name);
      PipelineOptions po = flags.pipeline();
      po.preordering_cap = cap;
      const int k0 = std::max((inst.d + 1) / 2, half_degrees(inst.K).d_g);
      const int k_max = kmax.value_or(std::max(k0, (inst.d + 1) / 2 + 4));
      const MembershipVerdict v = check_membership(inst.y, inst.K, xi, mode, k_max, po, kmin);
      Json echo = flags.echo();
      echo["command"] = "check";
      echo["instance"] = check_file;
      echo["mode"] = mode_name;
      echo["kmax"] = k_max;
      if (kmin) echo["kmin"] = *kmin;
      echo["xi"] = xi_kind.empty() ? (inst.reference ? "instance" : "default") : xi_kind;
      echo["argv"] = argv_json(argc, argv);

      std::ostringstream summary;
      summary << "verdict: " << to_string(v.kind) << " (k = " << v.k << ", " << to_string(v.mode) << ")\n";
      summary << lambda_table(v.history);
      if (!v.trend.empty()) summary << "trend: " << v.trend << "\n";
      if (v.kind == VerdictKind::measure_found) {
        summary << v.measure.points.size() << " atoms, moment residual " << v.check.moment_residual << "\n"
                << atoms_text(v.measure);
      }
      if (v.certificate) {
        summary << "certificate p = " << v.certificate->p.to_string() << "\n  <p,y> = " << v.certificate->value_y
                << ", <p,xi> = " << v.certificate->value_xi << "\n";
      }
      for (const auto& n : v.notes) summary << "note: " << n << "\n";
      emit(flags, verdict_to_json(v, echo), out, err, summary.str());
      return kind_exit(v.kind);
    }

    if (extend->parsed()) {
      const Instance inst = load_instance(extend_file);
      ObjectiveSpec obj;
      obj.kind = objective_kind_from_string(objective_name);
      obj.seed = objective_seed;
      FlatSearchOptions fo;
      fo.pipeline = eflags.pipeline();
      fo.k_min = kmin;
      fo.k_max = kmax;
      const bool use_rn = rn || (inst.K.num_generators() == 0 && !inst.K.radius());
      const FlatSearchResult r = find_measure(inst.y, use_rn ? SemialgebraicSet(inst.n) : inst.K, use_rn, obj, fo);
      Json echo = eflags.echo();
      echo["command"] = "extend";
      echo["instance"] = extend_file;
      echo["objective"] = objective_name;
      echo["seed"] = objective_seed;
      echo["kmin"] = kmin.value_or(inst.d);
      echo["kmax"] = kmax.value_or(inst.d + 3);
      echo["rn"] = use_rn;
      echo["argv"] = argv_json(argc, argv);

      std::ostringstream summary;
      summary << "result: " << to_string(r.kind) << " (k = " << r.k << (use_rn ? ", R^n" : "") << ")\n";
      for (const auto& s : r.history) {
        summary << "  k=" << s.k << " " << to_string(s.status) << " ranks";
        for (int q : s.ranks) summary << " " << q;
        if (s.flat_t) summary << "  flat at t=" << *s.flat_t;
        if (!s.note.empty()) summary << "  (" << s.note << ")";
        summary << "\n";
      }
      if (r.kind == FlatSearchKind::measure_found) {
        summary << r.measure.points.size() << " atoms, moment residual " << r.check.moment_residual << "\n"
                << atoms_text(r.measure);
      }
      for (const auto& n : r.notes) summary << "note: " << n << "\n";
      emit(eflags, flat_search_to_json(r, echo), out, err, summary.str());
      return kind_exit(r.kind);
    }

    if (bench->parsed()) {
      FlatSearchOptions fo;
      fo.pipeline = bflags.pipeline();
      const auto rows = random_benchmark(bn, bd, bench_kind_from_string(bkind), bcount, bseed, fo);
      if (bflags.out.empty()) {
        write_bench_csv(out, rows);
      } else {
        std::ofstream file(bflags.out);
        if (!file) throw ValidationError("cannot write " + bflags.out);
        write_bench_csv(file, rows);
        int ok = 0;
        for (const auto& r : rows) ok += r.success ? 1 : 0;
        out << ok << "/" << rows.size() << " instances succeeded (n=" << bn << ", d=" << bd << ", kind=" << bkind
            << ", seed=" << bseed << ", sdp_tol=" << bflags.sdp_tol << ", rank_tol=" << bflags.rank_tau << ")\n";
      }
      return 0;
    }

    if (certify->parsed()) {
      const Instance inst = load_instance(instance_file);
      const Json j = read_json_file(verdict_file);
      if (!j.is_object() || j.value("schema", "") != kVerdictSchema) {
        throw ValidationError("not a " + std::string(kVerdictSchema) + " record");
      }
      const std::string outcome = j.contains("verdict") ? j["verdict"].get<std::string>() : j.value("result", "");
      std::optional<Tms> xi;
      if (j.contains("reference") && j["reference"].contains("moments")) {
        xi = tms_from_json(j["reference"]["moments"], inst.n, j["reference"].at("degree").get<int>());
      }
      if (outcome == "MeasureFound") {
        const AtomicMeasure mu = measure_from_json(j.at("measure"), inst.n);
        const double lambda = j.contains("lambda") ? parse_real(j["lambda"]) : 0.0;
        if (lambda != 0.0 && !xi) throw ValidationError("record has lambda != 0 but no reference moments");
        const MeasureRecordCheck c = verify_measure_record(inst.y, mu, lambda, xi ? &*xi : nullptr, inst.K, measure_tol);
        out << (c.pass ? "pass" : "fail") << ": measure record, " << mu.points.size() << " atoms, relative residual "
            << c.relative_residual << ", min generator " << c.min_generator << ", min weight " << c.min_weight << "\n";
        for (const auto& f : c.failures) out << "  " << f << "\n";
        return c.pass ? 0 : 1;
      }
      if (outcome == "NoMeasure") {
        if (!xi) throw ValidationError("NoMeasure record lacks reference moments");
        const NonexistenceCertificate cert = certificate_from_json(j.at("certificate"), inst.n);
        const CertificateCheck c = verify_certificate(cert, inst.y, *xi, inst.K);
        out << (c.pass ? "pass" : "fail") << ": certificate record, <p,y> = " << c.value_y << ", <p,xi> = " << c.value_xi
            << ", identity residual " << c.identity_residual << ", min Gram eigenvalue " << c.min_gram_eigenvalue << "\n";
        for (const auto& f : c.failures) out << "  " << f << "\n";
        return c.pass ? 0 : 1;
      }
      out << "fail: record outcome '" << outcome << "' carries nothing to verify\n";
      return 1;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kMalformedInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed record: " << e.what() << "\n";
    return kMalformedInput;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const DegreeExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const CombinatorialBlowup& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsage;
}

}  // namespace tkmp::cli
