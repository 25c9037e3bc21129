#include <doctest.h>

#include <string>

#include "support/matching.hpp"
#include "tkmp/certify.hpp"
#include "tkmp/errors.hpp"
#include "tkmp/expr.hpp"
#include "tkmp/io.hpp"
#include "tkmp/pipeline.hpp"
#include "tkmp/refmeasures.hpp"

using namespace tkmp;

namespace {

Instance fixture(const std::string& name) { return load_instance(std::string(TKMP_DATA_DIR) + "/" + name + ".json"); }

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

MembershipVerdict check(const Instance& in, int k_max, std::optional<int> k_min = std::nullopt,
                        FamilyMode mode = FamilyMode::quadratic_module) {
  return check_membership(in.y, in.K, in.reference, mode, k_max, {}, k_min);
}

}  // namespace

TEST_CASE("disk of radius 25: no measure at k = 5 with a verified certificate") {
  const Instance in = fixture("disk25");
  const MembershipVerdict v = check(in, 5);
  REQUIRE(v.kind == VerdictKind::no_measure);
  CHECK(v.k == 5);
  REQUIRE(v.history.size() == 3);
  CHECK(v.history[0].lambda == doctest::Approx(0.3702).epsilon(1e-3));
  CHECK(v.history[1].lambda == doctest::Approx(0.0993).epsilon(1e-2));
  CHECK(v.history[2].lambda == doctest::Approx(-0.2370).epsilon(1e-3));
  REQUIRE(v.certificate);
  const NonexistenceCertificate& c = *v.certificate;
  CHECK(c.p.degree() <= 6);
  CHECK(c.value_y <= -1e-8);
  CHECK(c.value_xi == doctest::Approx(1.0).epsilon(1e-6));
  const CertificateCheck chk = verify_certificate(c, in.y, v.xi, in.K);
  CHECK(chk.pass);
  CHECK(chk.identity_residual <= 1e-6 * (1.0 + c.p.max_abs_coefficient()));
  CHECK(chk.min_gram_eigenvalue >= -1e-8);

  // one generator: the preordering is the quadratic module
  const MembershipVerdict pre = check(in, 5, std::nullopt, FamilyMode::preordering);
  REQUIRE(pre.kind == VerdictKind::no_measure);
  CHECK(pre.history.back().lambda == doctest::Approx(v.history.back().lambda).epsilon(1e-5));
}

TEST_CASE("ten points on the unit disk: measure found") {
  const Instance in = fixture("ten_points");
  const MembershipVerdict v = check(in, 5);
  REQUIRE(v.kind == VerdictKind::measure_found);
  CHECK(v.measure.size() == 10);
  CHECK(verify_measure_record(in.y, v.measure, v.lambda, &v.xi, in.K, 1e-5).pass);

  const MembershipVerdict v5 = check(in, 5, 5);
  REQUIRE(v5.kind == VerdictKind::measure_found);
  CHECK(v5.k == 5);
  CHECK(std::abs(v5.lambda) <= 1e-4);
  CHECK(v5.measure.size() == 10);
  const std::vector<Eigen::VectorXd> expected{vec({1, 0}),       vec({-1, 0}),      vec({0, 1}),
                                              vec({0, -1}),      vec({0.5, 0.5}),   vec({0.5, -0.5}),
                                              vec({-0.5, 0.5}),  vec({-0.5, -0.5}), vec({0.8, -0.6}),
                                              vec({0.6, 0.8})};
  CHECK(oracle::match_points(expected, v5.measure.points) < 1e-4);
}

TEST_CASE("y equal to the reference gives lambda = 1 and an empty measure") {
  SemialgebraicSet K(2);
  K.add_inequality(parse_polynomial("1 - x1^2 - x2^2", 2));
  K.set_radius(1.0);
  const Tms xi = ball_uniform_moments(2, 4);
  ReferenceSpec ball;
  ball.center = Eigen::VectorXd::Zero(2);
  const MembershipVerdict v = check_membership(xi, K, ball, FamilyMode::quadratic_module, 5);
  REQUIRE(v.kind == VerdictKind::measure_found);
  CHECK(v.k == 2);
  CHECK(v.lambda == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(v.measure.size() == 0);
}

TEST_CASE("certificate for a point mass outside the interval") {
  // y = moments of delta_2 to degree 2, K = [-1, 1], xi uniform on K.
  // At k = 1, p = s0 + t (1 - x^2) with s0 SOS of degree 2: <s0, y> >= 0
  // at a point mass, and <p, xi> = 1 forces t <= 3/2 when s0 = 0, so the
  // minimum of <p, y> is -3/2 * 3 = -4.5 at p = 1.5 (1 - x^2).
  SemialgebraicSet K(1);
  K.add_inequality(parse_polynomial("1 - x1^2", 1));
  K.set_radius(1.0);
  const Tms y(1, 2, vec({1, 2, 4}));
  const Tms xi = box_uniform_moments(1, 2, vec({-1}), vec({1}));
  const Relaxation r = build_lambda(y, xi, K, 1, FamilyMode::quadratic_module);
  const SdpSolution s = solve(r.sdp, PipelineOptions{}.sdp);
  REQUIRE(s.status == SdpStatus::optimal);
  CHECK(s.x[0] == doctest::Approx(-4.5).epsilon(1e-6));
  const NonexistenceCertificate c = extract_certificate(r, s.dual_matrices, y, xi, K, FamilyMode::quadratic_module, Scaling{});
  CHECK(c.p.coefficient(Exponent{0}) == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(std::abs(c.p.coefficient(Exponent{1})) < 1e-5);
  CHECK(c.p.coefficient(Exponent{2}) == doctest::Approx(-1.5).epsilon(1e-5));
  CHECK(c.value_y == doctest::Approx(-4.5).epsilon(1e-6));
  CHECK(verify_certificate(c, y, xi, K).pass);

  // M_1(y) is singular, so the pipeline certifies through the extension problem
  const MembershipVerdict v = check_membership(y, K, std::nullopt, FamilyMode::quadratic_module, 1, {}, 1);
  REQUIRE(v.kind == VerdictKind::no_measure);
  CHECK(v.kernel.nontrivial());
  CHECK(v.certificate->value_y < 0.0);
  CHECK(verify_certificate(*v.certificate, y, v.xi, K).pass);
}

TEST_CASE("certificate extraction preconditions") {
  SemialgebraicSet K(2);
  K.add_inequality(parse_polynomial("1 - x1^2 - x2^2", 2));
  const Tms xi = ball_uniform_moments(2, 4);
  const Relaxation r = build_lambda(xi, xi, K, 3, FamilyMode::quadratic_module);
  const SdpSolution s = solve(r.sdp);
  REQUIRE(s.status == SdpStatus::optimal);
  CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(extract_certificate(r, s.dual_matrices, xi, xi, K, FamilyMode::quadratic_module, Scaling{}),
                  PreconditionError);
  const Relaxation shift = build_shift_rn(xi, gaussian_moments(2, 4), 3);
  CHECK_THROWS_AS(extract_certificate(shift, {}, xi, xi, K, FamilyMode::quadratic_module, Scaling{}),
                  PreconditionError);
}

TEST_CASE("no measure is consistent with infeasibility of the plain extension problem") {
  const Instance in = fixture("disk25");
  const MembershipVerdict v = check(in, 5);
  REQUIRE(v.kind == VerdictKind::no_measure);
  const Tms ys = scale_tms(in.y, v.scaling);
  const Relaxation f = build_feasibility(ys, scale_set(in.K, v.scaling.coord), v.k, FamilyMode::quadratic_module);
  const SdpSolution s = solve(f.sdp, PipelineOptions{}.sdp);
  CHECK(s.status == SdpStatus::primal_infeasible);
}

TEST_CASE("flat search on the simplex with the all-ones objective") {
  const Instance in = fixture("simplex");
  FlatSearchOptions opt;
  opt.k_min = opt.k_max = 4;
  const FlatSearchResult r = find_measure(in.y, in.K, false, {ObjectiveKind::all_ones}, opt);
  REQUIRE(r.kind == FlatSearchKind::measure_found);
  CHECK(r.k == 4);
  const std::vector<Eigen::VectorXd> expected{vec({0.5, 0, 0, 0}), vec({0, 0, 0, 0.5}), vec({0, 0.5, 0.5, 0}),
                                              vec({0, 0, 0.5, 0.5}), vec({0.5, 0.5, 0, 0})};
  CHECK(oracle::match_points(expected, r.measure.points) < 1e-4);
  for (double w : r.measure.weights) CHECK(w == doctest::Approx(0.2).epsilon(1e-4));
  CHECK(r.check.pass);
}

TEST_CASE("flat search on the plane with the trace objective") {
  const Instance in = fixture("plane7");
  FlatSearchOptions opt;
  opt.k_min = opt.k_max = 4;
  const FlatSearchResult r = find_measure(in.y, in.K, true, {ObjectiveKind::trace}, opt);
  REQUIRE(r.kind == FlatSearchKind::measure_found);
  const std::vector<Eigen::VectorXd> listed{vec({-1.1902, -1.4545}), vec({-0.2725, -1.4977}), vec({1.4406, -0.9396}),
                                            vec({0.2150, -0.4613}),  vec({-1.7147, 0.1952}),  vec({-1.6942, 1.1593}),
                                            vec({0.9645, 1.7098})};
  CHECK(oracle::match_points(listed, r.measure.points) < 1e-2);
  CHECK(verify_measure(in.y, r.measure, in.K, 1e-5).pass);
  CHECK(r.check.moment_residual <= 1e-5);
}

TEST_CASE("the weakly infeasible line sequence exhausts the search") {
  const Instance in = fixture("counterexample");
  FlatSearchOptions opt;
  opt.k_max = 6;
  const FlatSearchResult r = find_measure(in.y, in.K, true, {ObjectiveKind::trace}, opt);
  CHECK(r.kind == FlatSearchKind::exhausted);
  CHECK(r.k == 6);
  for (const auto& step : r.history) CHECK_FALSE(step.flat_t);
}

TEST_CASE("random benchmark") {
  CHECK(random_benchmark(2, 4, BenchKind::box, 0, 0).empty());
  const auto rows = random_benchmark(2, 4, BenchKind::box, 3, 7);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row.success);
    CHECK(row.k <= 4 + 3);
  }
  const BenchInstance a = make_bench_instance(2, 4, BenchKind::box, 7, 1);
  const BenchInstance b = make_bench_instance(2, 4, BenchKind::box, 7, 1);
  CHECK(a.y.values() == b.y.values());
  CHECK(a.points.size() == monomial_count(2, 4));
}

TEST_CASE("verdict records are byte-identical across runs") {
  const Instance in = fixture("disk25");
  const std::string a = verdict_to_json(check(in, 5)).dump(2);
  const std::string b = verdict_to_json(check(in, 5)).dump(2);
  CHECK(a == b);
  const Instance flat = fixture("simplex");
  FlatSearchOptions opt;
  opt.k_min = opt.k_max = 4;
  const ObjectiveSpec obj{ObjectiveKind::seeded_random, 11, {}};
  CHECK(flat_search_to_json(find_measure(flat.y, flat.K, false, obj, opt)).dump() ==
        flat_search_to_json(find_measure(flat.y, flat.K, false, obj, opt)).dump());
}
