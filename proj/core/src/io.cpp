#include "tkmp/io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "tkmp/errors.hpp"
#include "tkmp/expr.hpp"

namespace tkmp {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  return j.at(key);
}

int require_int(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number_integer()) throw ValidationError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

Eigen::VectorXd vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_real(j[i]);
  return v;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector_to_json(m.row(i).transpose()));
  return a;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("matrix must be an array of rows");
  const auto r = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    const Eigen::VectorXd row = vector_from_json(j[static_cast<std::size_t>(i)], "matrix row");
    if (row.size() != r) throw ValidationError("matrix must be square");
    m.row(i) = row.transpose();
  }
  return m;
}

Json residuals_to_json(const KktResiduals& r) {
  return Json{{"primal", r.primal}, {"dual", r.dual}, {"gap", r.gap}};
}

}  // namespace

double parse_real(const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const Polynomial p = parse_polynomial(v.get<std::string>(), 1);
    if (p.degree() != 0) throw ValidationError("expected a number, got '" + v.get<std::string>() + "'");
    return p.coefficient(Exponent(1));
  }
  throw ValidationError("expected a number");
}

Json tms_values_to_json(const Tms& y) { return vector_to_json(y.values()); }

Tms tms_from_json(const Json& values, int n, int d) {
  Eigen::VectorXd v = vector_from_json(values, "moments");
  if (static_cast<std::size_t>(v.size()) != monomial_count(n, d)) {
    throw ValidationError("moments has " + std::to_string(v.size()) + " entries, expected C(n+d, d) = " +
                          std::to_string(monomial_count(n, d)));
  }
  return Tms(n, d, std::move(v));
}

Json reference_to_json(const ReferenceSpec& s) {
  Json j;
  j["kind"] = to_string(s.kind);
  switch (s.kind) {
    case ReferenceKind::ball_uniform:
      if (s.center.size()) j["center"] = vector_to_json(s.center);
      j["radius"] = s.radius;
      break;
    case ReferenceKind::box_uniform:
      j["lo"] = vector_to_json(s.lo);
      j["hi"] = vector_to_json(s.hi);
      break;
    case ReferenceKind::gaussian: break;
    case ReferenceKind::monte_carlo:
      j["samples"] = s.sample_count;
      j["seed"] = s.seed;
      break;
    case ReferenceKind::explicit_tms: break;
  }
  if (s.moments) {
    j["degree"] = s.moments->degree();
    j["moments"] = tms_values_to_json(*s.moments);
  }
  return j;
}

ReferenceSpec reference_from_json(const Json& j, int n) {
  ReferenceSpec s;
  s.kind = reference_kind_from_string(require(j, "kind").get<std::string>());
  if (j.contains("center")) s.center = vector_from_json(j["center"], "center");
  if (j.contains("radius")) s.radius = parse_real(j["radius"]);
  if (j.contains("lo")) s.lo = vector_from_json(j["lo"], "lo");
  if (j.contains("hi")) s.hi = vector_from_json(j["hi"], "hi");
  if (j.contains("samples")) s.sample_count = j["samples"].get<std::int64_t>();
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("moments")) s.moments = tms_from_json(j["moments"], n, require_int(j, "degree"));
  if (s.kind == ReferenceKind::explicit_tms && !s.moments) throw ValidationError("explicit reference needs moments");
  if (s.kind == ReferenceKind::box_uniform && (s.lo.size() != n || s.hi.size() != n)) {
    throw ValidationError("box reference needs lo and hi of length n");
  }
  return s;
}

Instance instance_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("instance must be a JSON object");
  Instance inst;
  inst.n = require_int(j, "n");
  inst.d = require_int(j, "d");
  if (inst.n < 1) throw ValidationError("n must be positive");
  if (inst.d < 0) throw ValidationError("d must be nonnegative");
  inst.y = tms_from_json(require(j, "moments"), inst.n, inst.d);
  inst.K = SemialgebraicSet(inst.n);
  if (j.contains("set")) {
    const Json& s = j["set"];
    if (s.contains("inequalities")) {
      for (const auto& g : s["inequalities"]) {
        inst.inequalities.push_back(g.get<std::string>());
        inst.K.add_inequality(parse_polynomial(inst.inequalities.back(), inst.n), inst.inequalities.back() + " >= 0");
      }
    }
    if (s.contains("equalities")) {
      for (const auto& h : s["equalities"]) {
        inst.equalities.push_back(h.get<std::string>());
        inst.K.add_equality(parse_polynomial(inst.equalities.back(), inst.n), inst.equalities.back() + " = 0");
      }
    }
    if (s.contains("radius")) inst.K.set_radius(parse_real(s["radius"]));
    if (s.contains("interior_witness")) {
      const Json& w = s["interior_witness"];
      inst.K.set_interior_witness({vector_from_json(require(w, "center"), "center"), parse_real(require(w, "radius"))});
    }
  }
  if (j.contains("reference")) inst.reference = reference_from_json(j["reference"], inst.n);
  if (j.contains("description")) inst.description = j["description"].get<std::string>();
  return inst;
}

Json instance_to_json(const Instance& inst) {
  Json j;
  j["schema"] = kInstanceSchema;
  if (!inst.description.empty()) j["description"] = inst.description;
  j["n"] = inst.n;
  j["d"] = inst.d;
  j["moments"] = tms_values_to_json(inst.y);
  Json s = Json::object();
  s["inequalities"] = inst.inequalities;
  if (!inst.equalities.empty()) s["equalities"] = inst.equalities;
  if (inst.K.radius()) s["radius"] = *inst.K.radius();
  if (inst.K.interior_witness()) {
    s["interior_witness"] = Json{{"center", vector_to_json(inst.K.interior_witness()->center)},
                                 {"radius", inst.K.interior_witness()->radius}};
  }
  j["set"] = s;
  if (inst.reference) j["reference"] = reference_to_json(*inst.reference);
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    int line = 1, col = 1;
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("invalid JSON in " + path, line, col);
  }
}

Instance load_instance(const std::string& path) { return instance_from_json(read_json_file(path)); }

void save_instance(const std::string& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << instance_to_json(inst).dump(2) << "\n";
}

Json polynomial_to_json(const Polynomial& p) {
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms()) {
    Json ex = Json::array();
    for (int i = 0; i < e.size(); ++i) ex.push_back(e[i]);
    terms.push_back(Json{{"exponent", ex}, {"coef", c}});
  }
  return Json{{"text", p.to_string()}, {"terms", terms}};
}

Polynomial polynomial_from_json(const Json& j, int n) {
  Polynomial p(n);
  for (const auto& t : require(j, "terms")) {
    const Json& ex = require(t, "exponent");
    if (!ex.is_array() || static_cast<int>(ex.size()) != n) throw ValidationError("exponent has the wrong length");
    std::vector<int> e;
    for (const auto& v : ex) {
      const int a = v.get<int>();
      if (a < 0) throw ValidationError("negative exponent");
      e.push_back(a);
    }
    p.add_term(Exponent(std::span<const int>(e)), parse_real(require(t, "coef")));
  }
  return p;
}

Json measure_to_json(const AtomicMeasure& mu) {
  Json atoms = Json::array();
  for (std::size_t j = 0; j < mu.points.size(); ++j) {
    atoms.push_back(Json{{"point", vector_to_json(mu.points[j])}, {"weight", mu.weights[j]}});
  }
  return Json{{"atoms", atoms}, {"residual", mu.residual}};
}

AtomicMeasure measure_from_json(const Json& j, int n) {
  AtomicMeasure mu;
  for (const auto& a : require(j, "atoms")) {
    Eigen::VectorXd p = vector_from_json(require(a, "point"), "point");
    if (p.size() != n) throw ValidationError("atom has the wrong dimension");
    mu.points.push_back(std::move(p));
    mu.weights.push_back(parse_real(require(a, "weight")));
  }
  if (j.contains("residual")) mu.residual = parse_real(j["residual"]);
  return mu;
}

Json certificate_to_json(const NonexistenceCertificate& c) {
  Json blocks = Json::array();
  for (std::size_t b = 0; b < c.grams.size(); ++b) {
    blocks.push_back(Json{{"label", c.labels[b]},
                          {"multiplier", polynomial_to_json(c.multipliers[b])},
                          {"order", c.orders[b]},
                          {"gram", matrix_to_json(c.grams[b])}});
  }
  return Json{{"k", c.k},
              {"mode", to_string(c.mode)},
              {"p", polynomial_to_json(c.p)},
              {"value_y", c.value_y},
              {"value_xi", c.value_xi},
              {"identity_residual", c.identity_residual},
              {"min_gram_eigenvalue", c.min_gram_eigenvalue},
              {"blocks", blocks}};
}

NonexistenceCertificate certificate_from_json(const Json& j, int n) {
  NonexistenceCertificate c;
  c.k = require_int(j, "k");
  c.mode = family_mode_from_string(require(j, "mode").get<std::string>());
  c.p = polynomial_from_json(require(j, "p"), n);
  for (const auto& b : require(j, "blocks")) {
    c.labels.push_back(require(b, "label").get<std::vector<int>>());
    c.multipliers.push_back(polynomial_from_json(require(b, "multiplier"), n));
    c.orders.push_back(require_int(b, "order"));
    c.grams.push_back(matrix_from_json(require(b, "gram")));
  }
  if (j.contains("value_y")) c.value_y = parse_real(j["value_y"]);
  if (j.contains("value_xi")) c.value_xi = parse_real(j["value_xi"]);
  return c;
}

Json verdict_to_json(const MembershipVerdict& v, const Json& echo) {
  Json j;
  j["schema"] = kVerdictSchema;
  j["command"] = "check";
  j["verdict"] = to_string(v.kind);
  j["k"] = v.k;
  j["mode"] = to_string(v.mode);
  if (v.kind == VerdictKind::measure_found) {
    j["lambda"] = v.lambda;
    j["t"] = v.t;
    j["measure"] = measure_to_json(v.measure);
    j["check"] = Json{{"moment_residual", v.check.moment_residual}, {"min_generator", v.check.min_generator}};
  }
  if (v.kind == VerdictKind::no_measure && v.certificate) j["certificate"] = certificate_to_json(*v.certificate);
  if (v.kind == VerdictKind::inconclusive) j["last_lambda"] = v.lambda;
  Json ref = reference_to_json(v.reference);
  ref["degree"] = v.xi.degree();
  ref["moments"] = tms_values_to_json(v.xi);
  j["reference"] = ref;
  j["trend"] = v.trend;
  Json hist = Json::array();
  for (const auto& s : v.history) {
    Json h{{"k", s.k}, {"lambda", s.lambda}, {"status", to_string(s.status)},
           {"residuals", residuals_to_json(s.kkt)}, {"iterations", s.iterations}};
    if (s.flat_t) h["flat_t"] = *s.flat_t;
    if (!s.note.empty()) h["note"] = s.note;
    hist.push_back(h);
  }
  j["history"] = hist;
  Json ker{{"d0", v.kernel.d0}, {"rank", v.kernel.rank}, {"size", v.kernel.size}};
  Json polys = Json::array();
  for (const auto& q : v.kernel.kernel) polys.push_back(q.to_string());
  ker["polynomials"] = polys;
  j["kernel"] = ker;
  j["scaling"] = Json{{"coord", v.scaling.coord}, {"mass", v.scaling.mass}};
  j["notes"] = v.notes;
  j["options"] = echo;
  return j;
}

Json flat_search_to_json(const FlatSearchResult& r, const Json& echo) {
  Json j;
  j["schema"] = kVerdictSchema;
  j["command"] = "extend";
  j["result"] = to_string(r.kind);
  j["k"] = r.k;
  j["rn"] = r.rn;
  j["objective"] = Json{{"kind", to_string(r.objective.kind)}, {"seed", r.objective.seed}};
  if (r.kind == FlatSearchKind::measure_found) {
    j["t"] = r.t;
    j["lambda"] = 0.0;
    j["measure"] = measure_to_json(r.measure);
    j["objective_value"] = r.objective_value;
    j["check"] = Json{{"moment_residual", r.check.moment_residual}, {"min_generator", r.check.min_generator}};
  }
  Json hist = Json::array();
  for (const auto& s : r.history) {
    Json h{{"k", s.k}, {"status", to_string(s.status)}, {"residuals", residuals_to_json(s.kkt)},
           {"iterations", s.iterations}, {"ranks", s.ranks}};
    if (s.flat_t) h["flat_t"] = *s.flat_t;
    if (!s.note.empty()) h["note"] = s.note;
    hist.push_back(h);
  }
  j["history"] = hist;
  j["scaling"] = Json{{"coord", r.scaling.coord}, {"mass", r.scaling.mass}};
  j["notes"] = r.notes;
  j["options"] = echo;
  return j;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "instance,success,k,atoms,runtime_s,outcome\n";
  for (const auto& r : rows) {
    std::string outcome = r.outcome;
    for (auto& ch : outcome) {
      if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
    }
    os << r.instance << ',' << (r.success ? 1 : 0) << ',' << r.k << ',' << r.atoms << ',' << std::fixed
       << std::setprecision(4) << r.seconds << std::defaultfloat << ',' << outcome << '\n';
  }
}

}  // namespace tkmp
