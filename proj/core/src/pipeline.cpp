#include "tkmp/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tkmp/certify.hpp"
#include "tkmp/errors.hpp"

namespace tkmp {

const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::measure_found: return "MeasureFound";
    case VerdictKind::no_measure: return "NoMeasure";
    case VerdictKind::inconclusive: return "Inconclusive";
  }
  return "?";
}

const char* to_string(FlatSearchKind k) {
  switch (k) {
    case FlatSearchKind::measure_found: return "MeasureFound";
    case FlatSearchKind::infeasible: return "Infeasible";
    case FlatSearchKind::exhausted: return "Exhausted";
  }
  return "?";
}

const char* to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::seeded_random: return "seeded";
    case ObjectiveKind::all_ones: return "ones";
    case ObjectiveKind::trace: return "trace";
    case ObjectiveKind::user_vector: return "vector";
  }
  return "?";
}

ObjectiveKind objective_kind_from_string(const std::string& s) {
  if (s == "seeded" || s == "seeded_random" || s == "random") return ObjectiveKind::seeded_random;
  if (s == "ones" || s == "all_ones") return ObjectiveKind::all_ones;
  if (s == "trace") return ObjectiveKind::trace;
  if (s == "vector" || s == "user_vector") return ObjectiveKind::user_vector;
  throw ValidationError("unknown objective '" + s + "'");
}

BenchKind bench_kind_from_string(const std::string& s) {
  if (s == "box") return BenchKind::box;
  if (s == "rn" || s == "gaussian_rn" || s == "gaussian") return BenchKind::gaussian_rn;
  throw ValidationError("unknown benchmark kind '" + s + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool usable(const SdpSolution& s, const PipelineOptions& o) {
  if (s.status == SdpStatus::optimal) return true;
  return (s.status == SdpStatus::max_iterations || s.status == SdpStatus::numerical_failure) &&
         s.kkt_residuals.max() <= o.inaccurate_tol;
}

// Any x with A0 + sum x_i A_i PSD has |x| >= -<A0,X> / |(<A_i,X>)_i| for a
// PSD X; rays from the embedding are projected onto the cone first.
double ray_exclusion_radius(const SdpProblem& p, const std::vector<Eigen::MatrixXd>& X) {
  std::vector<Eigen::MatrixXd> Xc;
  for (const auto& B : X) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    Xc.push_back(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
  }
  const Eigen::VectorXd ip = p.inner_products(Xc);
  if (ip[0] >= 0.0) return 0.0;
  const double eps = ip.tail(ip.size() - 1).norm();
  return eps > 0.0 ? -ip[0] / eps : std::numeric_limits<double>::infinity();
}

// Standard normals from a 64-bit stream, two per Box-Muller draw; the
// sequence depends only on the seed.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : rng_(seed) {}
  double uniform() { return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53; }
  double operator()() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    have_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 rng_;
  bool have_ = false;
  double spare_ = 0.0;
};

AtomicMeasure unscale_measure(const AtomicMeasure& m, const Scaling& sc) {
  AtomicMeasure out = m;
  for (auto& p : out.points) p *= sc.coord;
  for (auto& w : out.weights) w *= sc.mass;
  out.residual *= sc.mass;
  return out;
}

Polynomial unscale_polynomial_coords(const Polynomial& q, double coord) {
  Polynomial out(q.num_vars());
  for (const auto& [e, c] : q.terms()) out.add_term(e, c / std::pow(coord, e.degree()));
  return out;
}

std::string lambda_trend(const std::vector<LambdaStep>& h) {
  std::vector<double> lam;
  for (const auto& s : h) {
    if (s.status == SdpStatus::optimal) lam.push_back(s.lambda);
  }
  if (lam.size() < 2) return "insufficient data";
  int stable = 0;
  bool monotone = true;
  for (std::size_t i = 1; i < lam.size(); ++i) {
    if (lam[i] > lam[i - 1] + 1e-6 * (1.0 + std::abs(lam[i - 1]))) monotone = false;
    stable = std::abs(lam[i] - lam[i - 1]) <= 1e-7 ? stable + 1 : 0;
  }
  if (stable >= 2) return "lambda_inf attained (stable over two consecutive orders)";
  return monotone ? "decreasing" : "not monotone (numerical noise)";
}

}  // namespace

KernelReport kernel_report(const Tms& y, const RankOptions& opt) {
  KernelReport r;
  r.d0 = y.degree() / 2;
  const Eigen::MatrixXd M = moment_matrix(truncate(y, 2 * r.d0), r.d0).entries;
  r.size = static_cast<int>(M.rows());
  const RankReport rank = numerical_rank(M, opt);
  r.rank = rank.rank;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const MonomialBasis basis(y.num_vars(), r.d0);
  for (Eigen::Index j = 0; j < M.rows(); ++j) {
    if (std::abs(es.eigenvalues()[j]) > rank.threshold) continue;
    Eigen::VectorXd v = es.eigenvectors().col(j);
    v /= v.cwiseAbs().maxCoeff();
    Polynomial q(y.num_vars());
    for (std::size_t a = 0; a < basis.size(); ++a) {
      if (std::abs(v[static_cast<Eigen::Index>(a)]) > 1e-12) q.add_term(basis[a], v[static_cast<Eigen::Index>(a)]);
    }
    r.kernel.push_back(std::move(q));
  }
  return r;
}

NonexistenceCertificate extract_certificate(const Relaxation& rel,
                                            const std::vector<Eigen::MatrixXd>& duals,
                                            const Tms& y, const Tms& xi,
                                            const SemialgebraicSet& K, FamilyMode mode,
                                            const Scaling& sc) {
  if (rel.kind != RelaxationKind::lambda_quadratic_module &&
      rel.kind != RelaxationKind::lambda_preordering && rel.kind != RelaxationKind::feasibility) {
    throw PreconditionError("certificates come from lambda or feasibility relaxations");
  }
  if (duals.size() != rel.sdp.blocks.size()) throw PreconditionError("dual matrices do not match the blocks");
  const int n = y.num_vars();
  const int d = y.degree();
  const int k = rel.layout.k;
  const GeneratorFamily fam = generator_family(K, mode, std::numeric_limits<int>::max());
  NonexistenceCertificate cert;
  cert.k = k;
  cert.mode = mode;
  Polynomial full(n);
  std::size_t blk = 0;
  for (const auto& m : fam.members) {
    const int order = k - m.half_degree;
    if (order < 0) continue;
    if (blk >= duals.size()) throw CertificateFailure("family and relaxation blocks disagree");
    // scaled generator g_s(z) = g(s z) / c
    const Polynomial& gs = rel.block_generator[blk];
    double c = 1.0;
    if (!gs.is_zero()) {
      const auto& [e0, v0] = *gs.terms().begin();
      c = m.g.coefficient(e0) * std::pow(sc.coord, e0.degree()) / v0;
    }
    if (!(c > 0) || !std::isfinite(c)) throw CertificateFailure("generator normalisation is not positive");
    const MonomialBasis basis(n, order);
    Eigen::VectorXd D(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t a = 0; a < basis.size(); ++a) D[static_cast<Eigen::Index>(a)] = std::pow(sc.coord, -basis.degree(a));
    Eigen::MatrixXd G = D.asDiagonal() * duals[blk] * D.asDiagonal() / c;
    G = 0.5 * (G + G.transpose());
    Polynomial sigma(n);
    for (std::size_t a = 0; a < basis.size(); ++a) {
      for (std::size_t b = 0; b < basis.size(); ++b) {
        sigma.add_term(basis[a] + basis[b], G(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
      }
    }
    full = full + sigma * m.g;
    cert.labels.push_back(m.label);
    cert.multipliers.push_back(m.g);
    cert.orders.push_back(order);
    cert.grams.push_back(std::move(G));
    ++blk;
  }
  Polynomial p(n);
  for (const auto& [e, v] : full.terms()) {
    if (e.degree() <= d) p.add_term(e, v);
  }
  const double pxi = riesz(xi, p);
  if (!(pxi > 0)) throw CertificateFailure("certificate has non-positive value on the reference");
  const double inv = 1.0 / pxi;
  p = p * inv;
  full = full * inv;
  for (auto& G : cert.grams) G *= inv;
  cert.p = p;
  cert.identity_residual = (p - full).max_abs_coefficient();
  cert.value_y = riesz(y, p);
  cert.value_xi = riesz(xi, p);
  cert.min_gram_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& G : cert.grams) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    cert.min_gram_eigenvalue = std::min(cert.min_gram_eigenvalue, es.eigenvalues()[0]);
  }
  if (!(cert.value_y < 0.0)) {
    throw PreconditionError("dual point gives <p, y> = " + std::to_string(cert.value_y) +
                            " >= 0; certificates need lambda_k < 0");
  }
  if (cert.identity_residual > 1e-6 * (1.0 + p.max_abs_coefficient())) {
    throw CertificateFailure("terms above degree d do not cancel (residual " +
                             std::to_string(cert.identity_residual) + ")");
  }
  return cert;
}

MembershipVerdict check_membership(const Tms& y, const SemialgebraicSet& K,
                                   const std::optional<ReferenceSpec>& xi_spec, FamilyMode mode,
                                   int k_max, const PipelineOptions& opt, std::optional<int> k_min) {
  if (K.num_vars() != y.num_vars()) throw ValidationError("set and tms differ in dimension");
  const int d = y.degree();
  MembershipVerdict v;
  v.mode = mode;
  v.scaling = opt.scale ? choose_scaling(y) : Scaling{};
  const Scaling& sc = v.scaling;

  v.reference = xi_spec.value_or(default_reference(K));
  v.xi = reference_moments(v.reference, K, d);
  if (v.reference.kind == ReferenceKind::monte_carlo) v.reference.moments = v.xi;
  if (v.reference.kind == ReferenceKind::ball_uniform && K.interior_witness()) {
    const WitnessCheck wc = spot_check_witness(K);
    if (!wc.ok) v.notes.push_back("interior witness ball leaves K on sampled boundary points (min g = " + std::to_string(wc.min_value) + ")");
  }
  if (!K.radius()) v.notes.push_back("K has no radius: only MeasureFound verdicts are sound");

  const Tms ys = scale_tms(y, sc);
  const Tms xis = scale_tms(v.xi, sc, false);
  const SemialgebraicSet Ks = scale_set(K, sc.coord);

  v.kernel = kernel_report(ys, opt.rank);
  const std::vector<Polynomial> kernel_s = v.kernel.kernel;
  for (auto& q : v.kernel.kernel) {
    q = unscale_polynomial_coords(q, sc.coord);
    q = q * (1.0 / q.max_abs_coefficient());
  }
  const bool route_feasibility = v.kernel.nontrivial();
  if (route_feasibility) {
    v.notes.push_back("M_" + std::to_string(v.kernel.d0) + "(y) is singular (rank " +
                      std::to_string(v.kernel.rank) + " of " + std::to_string(v.kernel.size) +
                      "): lambda > 0 is impossible, solving the feasibility problem instead");
  }

  const HalfDegrees hd = half_degrees(Ks);
  const int k0 = std::max({k_min.value_or((d + 1) / 2), (d + 1) / 2, hd.d_g});
  const double ltol = opt.lambda_tol * (1.0 + ys.values().cwiseAbs().maxCoeff());

  auto certificate_verdict = [&](const Relaxation& rel, const SdpSolution& sol, int k) -> bool {
    try {
      NonexistenceCertificate cert = extract_certificate(rel, sol.dual_matrices, y, v.xi, K, mode, sc);
      const CertificateCheck chk = verify_certificate(cert, y, v.xi, K);
      if (!chk.pass) {
        std::string why;
        for (const auto& f : chk.failures) why += (why.empty() ? "" : "; ") + f;
        v.notes.push_back("certificate at k=" + std::to_string(k) + " failed verification: " + why);
        return false;
      }
      v.kind = VerdictKind::no_measure;
      v.k = k;
      v.certificate = std::move(cert);
      return true;
    } catch (const Error& e) {
      v.notes.push_back("certificate extraction at k=" + std::to_string(k) + " failed: " + e.what());
      return false;
    }
  };

  for (int k = k0; k <= k_max; ++k) {
    const auto t0 = Clock::now();
    const Relaxation rel = route_feasibility
                               ? build_feasibility(ys, Ks, k, mode, opt.preordering_cap)
                               : build_lambda(ys, xis, Ks, k, mode, opt.preordering_cap);
    const SdpSolution sol = solve(rel.sdp, opt.sdp);
    LambdaStep step;
    step.k = k;
    step.status = sol.status;
    step.kkt = sol.kkt_residuals;
    step.iterations = sol.iterations;
    const bool ok = usable(sol, opt);
    if (ok && sol.status != SdpStatus::optimal) {
      step.note = std::string("accepted ") + to_string(sol.status) + " with residual " + std::to_string(sol.kkt_residuals.max());
      step.status = SdpStatus::optimal;
    }

    if (sol.status == SdpStatus::primal_infeasible) {
      step.seconds = seconds_since(t0);
      v.history.push_back(step);
      if (route_feasibility && certificate_verdict(rel, sol, k)) {
        v.trend = lambda_trend(v.history);
        return v;
      }
      if (!route_feasibility) v.notes.push_back("lambda relaxation reported infeasible at k=" + std::to_string(k));
      v.kind = VerdictKind::inconclusive;
      v.k = k;
      v.trend = lambda_trend(v.history);
      return v;
    }
    if (!ok) {
      step.seconds = seconds_since(t0);
      v.history.push_back(step);
      v.notes.push_back(std::string("solver returned ") + to_string(sol.status) + " at k=" + std::to_string(k));
      v.kind = VerdictKind::inconclusive;
      v.k = k;
      v.trend = lambda_trend(v.history);
      return v;
    }

    DecodedMoments dm = decode(rel, sol.x);
    if (route_feasibility) dm.w = impose_kernel_relations(dm.w, kernel_s, d);
    const double lam_s = dm.lambda.value_or(0.0);
    step.lambda = lam_s * sc.mass;
    if (lam_s < -ltol) {
      step.seconds = seconds_since(t0);
      v.history.push_back(step);
      v.trend = lambda_trend(v.history);
      if (!certificate_verdict(rel, sol, k)) {
        v.kind = VerdictKind::inconclusive;
        v.k = k;
      }
      return v;
    }
    auto ft = find_flat_truncation(dm.w, d, hd.d_g, Ks, opt.rank);
    if (ft) {
      step.flat_t = ft->t;
      try {
        const AtomicMeasure mu_s = extract_atoms(truncate(dm.w, ft->t), hd.d_g, opt.extraction);
        Tms target = ys - xis * lam_s;
        const MeasureCheck chk = verify_measure(target, mu_s, Ks, opt.verify_tol);
        if (chk.pass || mu_s.points.empty()) {
          v.kind = VerdictKind::measure_found;
          v.k = k;
          v.t = ft->t;
          v.lambda = step.lambda;
          v.measure = unscale_measure(mu_s, sc);
          v.check = chk;
          for (const auto& wmsg : mu_s.warnings) v.notes.push_back(wmsg);
          v.notes.push_back("rank maximality of the optimizer is assumed from interior-point centrality");
          step.seconds = seconds_since(t0);
          v.history.push_back(step);
          v.trend = lambda_trend(v.history);
          return v;
        }
        step.note = "extracted measure failed verification (residual " + std::to_string(chk.moment_residual) + ")";
      } catch (const ExtractionFailure& e) {
        step.note = std::string("extraction failed: ") + e.what();
      }
    }
    step.seconds = seconds_since(t0);
    v.history.push_back(step);
  }
  v.kind = VerdictKind::inconclusive;
  v.k = k_max;
  v.trend = lambda_trend(v.history);
  if (!v.history.empty()) v.lambda = v.history.back().lambda;
  v.notes.push_back("no flat truncation up to k_max; rank maximality of the optimizer is not guaranteed");
  return v;
}

Eigen::VectorXd objective_vector(const ObjectiveSpec& spec, int n, int k) {
  const auto len = static_cast<Eigen::Index>(monomial_count(n, 2 * k));
  Eigen::VectorXd c(len);
  switch (spec.kind) {
    case ObjectiveKind::seeded_random: {
      NormalStream z(spec.seed);
      for (Eigen::Index j = 0; j < len; ++j) c[j] = z();
      return c;
    }
    case ObjectiveKind::all_ones: return Eigen::VectorXd::Ones(len);
    case ObjectiveKind::trace: {
      c.setZero();
      const MonomialBasis rows(n, k);
      for (std::size_t a = 0; a < rows.size(); ++a) c[static_cast<Eigen::Index>(graded_lex_rank(rows[a] + rows[a]))] += 1.0;
      return c;
    }
    case ObjectiveKind::user_vector:
      if (spec.vector.size() < len) {
        throw ValidationError("objective vector has " + std::to_string(spec.vector.size()) +
                              " entries, order " + std::to_string(k) + " needs " + std::to_string(len));
      }
      return spec.vector.head(len);
  }
  return c;
}

Eigen::MatrixXd objective_matrix(const ObjectiveSpec& spec, int n, int k) {
  const auto N = static_cast<Eigen::Index>(monomial_count(n, k));
  switch (spec.kind) {
    case ObjectiveKind::trace: return Eigen::MatrixXd::Identity(N, N);
    case ObjectiveKind::all_ones: return Eigen::MatrixXd::Ones(N, N);
    case ObjectiveKind::seeded_random: {
      Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N, N);
      NormalStream z(spec.seed);
      for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) L(i, j) = z() / std::sqrt(static_cast<double>(i + 1));
      }
      return Eigen::MatrixXd::Identity(N, N) + L * L.transpose();
    }
    case ObjectiveKind::user_vector: break;
  }
  throw ValidationError("the R^n search takes a trace, ones or seeded objective");
}

FlatSearchResult find_measure(const Tms& y, const SemialgebraicSet& K, bool rn,
                              const ObjectiveSpec& objective, const FlatSearchOptions& options) {
  const PipelineOptions& opt = options.pipeline;
  const int n = y.num_vars(), d = y.degree();
  if (K.num_vars() != n) throw ValidationError("set and tms differ in dimension");
  FlatSearchResult res;
  res.objective = objective;
  res.rn = rn;
  if (!rn && !K.radius()) throw ValidationError("compact flat search needs a radius; use the R^n mode otherwise");
  res.scaling = opt.scale ? choose_scaling(y) : Scaling{};
  const Scaling& sc = res.scaling;
  const Tms ys = scale_tms(y, sc);
  const SemialgebraicSet Ks = rn ? SemialgebraicSet(n) : scale_set(K, sc.coord);
  const int d_g = half_degrees(Ks).d_g;
  const std::vector<Polynomial> kernel_s = kernel_report(ys, opt.rank).kernel;
  const int k0 = std::max({options.k_min.value_or(d), (d + 1) / 2, d_g});
  const int k1 = options.k_max.value_or(d + 3);

  for (int k = k0; k <= k1; ++k) {
    const auto t0 = Clock::now();
    // the objective is defined in the original coordinates
    Relaxation rel;
    if (rn) {
      Eigen::MatrixXd C = objective_matrix(objective, n, k);
      const MonomialBasis rows(n, k);
      Eigen::VectorXd D(C.rows());
      for (std::size_t a = 0; a < rows.size(); ++a) D[static_cast<Eigen::Index>(a)] = std::pow(sc.coord, rows.degree(a));
      C = D.asDiagonal() * C * D.asDiagonal();
      rel = build_flat_search_rn(ys, k, C / C.cwiseAbs().maxCoeff());
    } else {
      Eigen::VectorXd c = objective_vector(objective, n, k);
      const MonomialBasis all(n, 2 * k);
      for (std::size_t a = 0; a < all.size(); ++a) c[static_cast<Eigen::Index>(a)] *= std::pow(sc.coord, all.degree(a));
      const double cm = c.cwiseAbs().maxCoeff();
      rel = build_flat_search(ys, Ks, k, cm > 0 ? Eigen::VectorXd(c / cm) : c);
    }
    const SdpSolution sol = solve(rel.sdp, opt.sdp);
    FlatSearchStep step;
    step.k = k;
    step.status = sol.status;
    step.kkt = sol.kkt_residuals;
    step.iterations = sol.iterations;
    if (sol.status == SdpStatus::primal_infeasible) {
      // a floating-point ray only excludes a ball; it proves infeasibility
      // when every feasible point lies inside that ball
      step.seconds = seconds_since(t0);
      const double radius = ray_exclusion_radius(rel.sdp, sol.dual_matrices);
      std::ostringstream why;
      bool certified = false;
      if (rn) {
        const int h = d / 2;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(moment_matrix(truncate(ys, 2 * h), h).entries);
        const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
        certified = lo < -1e-9 * std::max(1.0, hi);
        why << "moment matrix of order " << h << " has eigenvalue " << lo;
      } else {
        const double bound = flat_search_norm_bound(ys.mass(), *Ks.radius(), k);
        certified = radius > bound;
        why << "ray excludes |w| < " << radius << ", feasible points satisfy |w| <= " << bound;
      }
      if (certified) {
        res.history.push_back(step);
        res.kind = FlatSearchKind::infeasible;
        res.k = k;
        res.notes.push_back("infeasible at k=" + std::to_string(k) + ": " + why.str());
        return res;
      }
      step.note = "approximate infeasibility ray not conclusive (" + why.str() + ")";
      res.history.push_back(step);
      continue;
    }
    if (!usable(sol, opt)) {
      step.note = std::string("solver returned ") + to_string(sol.status);
      step.seconds = seconds_since(t0);
      res.history.push_back(step);
      continue;
    }
    if (sol.status != SdpStatus::optimal) {
      step.note = std::string("accepted ") + to_string(sol.status) + " with residual " + std::to_string(sol.kkt_residuals.max());
    }
    DecodedMoments dm = decode(rel, sol.x);
    dm.w = impose_kernel_relations(dm.w, kernel_s, d);
    for (int t = 0; t <= k; ++t) {
      step.ranks.push_back(numerical_rank(moment_matrix(truncate(dm.w, 2 * t), t).entries, opt.rank).rank);
    }
    auto ft = find_flat_truncation(dm.w, d, d_g, Ks, opt.rank);
    if (ft) {
      step.flat_t = ft->t;
      try {
        const AtomicMeasure mu_s = extract_atoms(truncate(dm.w, ft->t), d_g, opt.extraction);
        const MeasureCheck chk = verify_measure(ys, mu_s, Ks, opt.verify_tol);
        if (chk.pass) {
          res.kind = FlatSearchKind::measure_found;
          res.k = k;
          res.t = ft->t;
          res.measure = unscale_measure(mu_s, sc);
          res.check = chk;
          res.objective_value = flat_objective(rel, dm.w);
          for (const auto& w : mu_s.warnings) res.notes.push_back(w);
          step.seconds = seconds_since(t0);
          res.history.push_back(step);
          return res;
        }
        step.note = "extracted measure failed verification (residual " + std::to_string(chk.moment_residual) +
                    ", min generator " + std::to_string(chk.min_generator) + ")";
      } catch (const ExtractionFailure& e) {
        step.note = std::string("extraction failed: ") + e.what();
      }
    }
    step.seconds = seconds_since(t0);
    res.history.push_back(step);
  }
  res.kind = FlatSearchKind::exhausted;
  res.k = k1;
  return res;
}

BenchInstance make_bench_instance(int n, int d, BenchKind kind, std::uint64_t seed, int instance) {
  BenchInstance b;
  NormalStream z(seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(instance) + 1);
  const auto N = monomial_count(n, d);
  double total = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) u[i] = kind == BenchKind::box ? 2.0 * z.uniform() - 1.0 : z();
    b.points.push_back(u);
    b.weights.push_back(z.uniform());
    total += b.weights.back();
  }
  for (auto& w : b.weights) w /= total;
  b.y = tms_from_atoms(b.points, b.weights, d);
  b.K = SemialgebraicSet(n);
  if (kind == BenchKind::box) {
    for (int i = 0; i < n; ++i) b.K.add_inequality(Polynomial::constant(n, 1.0) - Polynomial::variable(n, i).pow(2));
    b.K.set_radius(std::sqrt(static_cast<double>(n)));
  }
  return b;
}

std::vector<BenchRow> random_benchmark(int n, int d, BenchKind kind, int instances, std::uint64_t seed,
                                       const FlatSearchOptions& options) {
  std::vector<BenchRow> rows;
  for (int i = 0; i < instances; ++i) {
    const BenchInstance inst = make_bench_instance(n, d, kind, seed, i);
    ObjectiveSpec obj;
    obj.kind = kind == BenchKind::box ? ObjectiveKind::seeded_random : ObjectiveKind::trace;
    obj.seed = seed * 1000003ull + static_cast<std::uint64_t>(i);
    const auto t0 = Clock::now();
    BenchRow row;
    row.instance = i;
    try {
      const FlatSearchResult r = find_measure(inst.y, inst.K, kind == BenchKind::gaussian_rn, obj, options);
      row.k = r.k;
      row.outcome = to_string(r.kind);
      if (r.kind == FlatSearchKind::measure_found) {
        const MeasureRecordCheck chk = verify_measure_record(inst.y, r.measure, 0.0, nullptr, inst.K, options.pipeline.verify_tol);
        row.success = chk.pass;
        row.atoms = static_cast<int>(r.measure.size());
        if (!chk.pass) row.outcome = "VerifyFailed";
      }
    } catch (const Error& e) {
      row.outcome = std::string("error: ") + e.what();
    }
    row.seconds = seconds_since(t0);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tkmp
