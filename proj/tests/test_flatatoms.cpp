#include <doctest.h>

#include <random>

#include "support/matching.hpp"
#include "tkmp/errors.hpp"
#include "tkmp/expr.hpp"
#include "tkmp/flatatoms.hpp"
#include "tkmp/pipeline.hpp"
#include "tkmp/refmeasures.hpp"
#include "tkmp/relax.hpp"

using namespace tkmp;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

SdpOptions tight() {
  SdpOptions o;
  o.tol_gap = o.tol_feas = 1e-9;
  return o;
}

std::vector<Eigen::VectorXd> ten_points() {
  return {vec({1, 0}),      vec({-1, 0}),    vec({0, 1}),      vec({0, -1}),   vec({0.5, 0.5}),
          vec({0.5, -0.5}), vec({-0.5, 0.5}), vec({-0.5, -0.5}), vec({0.8, -0.6}), vec({0.6, 0.8})};
}

SemialgebraicSet unit_disk() {
  SemialgebraicSet K(2);
  K.add_inequality(parse_polynomial("1 - x1^2 - x2^2", 2));
  return K;
}

// Degree-8 solution of the plane feasibility problem for the four corners.
Tms corner_solution() {
  const Tms y(2, 4, vec({1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 1, 0, 1, 0, 1}));
  const Relaxation r = build_feasibility(y, SemialgebraicSet(2), 4, FamilyMode::quadratic_module);
  const SdpSolution s = solve(r.sdp, tight());
  REQUIRE(s.status == SdpStatus::optimal);
  return impose_kernel_relations(decode(r, s.x).w, kernel_report(y).kernel, 4);
}

}  // namespace

TEST_CASE("numerical rank") {
  Eigen::MatrixXd M(3, 3);
  M << 1, 1, 1, 1, 1, 1, 1, 1, 2;
  CHECK(numerical_rank(M).rank == 2);
  CHECK(numerical_rank(Eigen::MatrixXd::Zero(4, 4)).rank == 0);
  CHECK(numerical_rank(Eigen::MatrixXd::Identity(10, 10)).rank == 10);
  CHECK(numerical_rank(1e-9 * Eigen::MatrixXd::Identity(3, 3)).rank == 0);
  const Eigen::MatrixXd D = Eigen::Vector2d(1e4, 1e-3).asDiagonal();
  CHECK(numerical_rank(D).rank == 2);
  RankOptions rel;
  rel.relative = true;
  const RankReport r = numerical_rank(D, rel);
  CHECK(r.rank == 1);
  CHECK(r.threshold == doctest::Approx(1e-2));
}

TEST_CASE("flatness") {
  const Tms du = tms_from_atoms(std::vector<Eigen::VectorXd>{vec({0.4, 0.7})}, std::vector<double>{1.0}, 6);
  const FlatnessReport f = flatness(du, 1);
  CHECK(f.flat);
  CHECK(f.lower.rank == 1);
  CHECK(f.upper.rank == 1);
  CHECK_THROWS_AS(is_flat(truncate(du, 5), 1), ValidationError);
  CHECK_THROWS_AS(is_flat(truncate(du, 2), 2), ValidationError);

  const Tms w = corner_solution();
  CHECK_FALSE(is_flat(w, 1));
  CHECK(is_flat(truncate(w, 6), 1));
  const auto ft = find_flat_truncation(w, 4, 1, SemialgebraicSet(2));
  REQUIRE(ft);
  CHECK(ft->t == 6);
}

TEST_CASE("flat truncations of atomic data and of a continuous measure") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  std::vector<Eigen::VectorXd> pts;
  for (int j = 0; j < 4; ++j) pts.push_back(vec({u(rng), u(rng)}));
  const Tms w = tms_from_atoms(pts, std::vector<double>(4, 0.25), 10);
  const auto ft = find_flat_truncation(w, 4, 1, SemialgebraicSet(2));
  REQUIRE(ft);
  CHECK(ft->report.upper.rank == 4);
  CHECK(ft->report.lower.rank == 4);

  const Tms ball = ball_uniform_moments(2, 10);
  CHECK_FALSE(find_flat_truncation(ball, 4, 1, unit_disk()));
}

TEST_CASE("rank monotonicity on PSD moment matrix pairs") {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Eigen::VectorXd> pts;
    const int r = 1 + trial % 9;
    for (int j = 0; j < r; ++j) pts.push_back(vec({g(rng), g(rng)}));
    const Tms w = tms_from_atoms(pts, std::vector<double>(static_cast<std::size_t>(r), 1.0 / r), 8);
    for (int s = 1; s <= 4; ++s) {
      CHECK(numerical_rank(moment_matrix(w, s - 1).entries).rank <= numerical_rank(moment_matrix(w, s).entries).rank);
    }
  }
}

TEST_CASE("extraction of a single atom") {
  const Eigen::VectorXd u = vec({-0.3, 1.2, 0.5});
  const Tms du = tms_from_atoms(std::vector<Eigen::VectorXd>{u}, std::vector<double>{2.5}, 4);
  const AtomicMeasure mu = extract_atoms(du);
  REQUIRE(mu.size() == 1);
  CHECK((mu.points[0] - u).norm() < 1e-9);
  CHECK(mu.weights[0] == doctest::Approx(2.5));
}

TEST_CASE("extraction of the ten-point disk measure from its lambda optimizer") {
  const Tms y = tms_from_atoms(ten_points(), std::vector<double>(10, 0.1), 6);
  const Tms xi = ball_uniform_moments(2, 6);
  const Relaxation r = build_lambda(y, xi, unit_disk(), 5, FamilyMode::quadratic_module);
  const SdpSolution s = solve(r.sdp, tight());
  REQUIRE(s.status == SdpStatus::optimal);
  const DecodedMoments dm = decode(r, s.x);
  CHECK(std::abs(*dm.lambda) < 1e-4);
  CHECK(numerical_rank(moment_matrix(dm.w, 4).entries).rank == 10);
  CHECK(numerical_rank(moment_matrix(dm.w, 5).entries).rank == 10);
  const auto ft = find_flat_truncation(dm.w, 6, 1, unit_disk());
  REQUIRE(ft);
  const AtomicMeasure mu = extract_atoms(truncate(dm.w, ft->t));
  CHECK(oracle::match_points(ten_points(), mu.points) < 1e-4);
}

TEST_CASE("extraction of the four corners") {
  const AtomicMeasure mu = extract_atoms(truncate(corner_solution(), 6));
  const std::vector<Eigen::VectorXd> corners{vec({1, 1}), vec({1, -1}), vec({-1, 1}), vec({-1, -1})};
  std::vector<int> perm;
  CHECK(oracle::match_points(corners, mu.points, &perm) < 1e-6);
  for (double w : mu.weights) CHECK(w == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("extraction refuses data that is not flat") {
  const Tms ball = ball_uniform_moments(2, 4);
  CHECK_THROWS_AS(extract_atoms(ball), ExtractionFailure);
}

TEST_CASE("verify_measure") {
  SemialgebraicSet simplex(4);
  for (const char* g : {"x1", "x2", "x3", "x4", "1 - x1 - x2 - x3 - x4"}) simplex.add_inequality(parse_polynomial(g, 4));
  const std::vector<Eigen::VectorXd> pts{vec({0.5, 0, 0, 0}), vec({0, 0, 0, 0.5}), vec({0, 0.5, 0.5, 0}),
                                         vec({0, 0, 0.5, 0.5}), vec({0.5, 0.5, 0, 0})};
  AtomicMeasure mu;
  mu.points = pts;
  mu.weights.assign(5, 0.2);
  const Eigen::VectorXd listed = vec({1, 0.2, 0.2, 0.2, 0.2, 0.1, 0.05, 0, 0, 0.1, 0.05, 0, 0.1, 0.05, 0.1});
  const Tms y(4, 2, listed);
  CHECK(verify_measure(y, mu, simplex, 1e-5).pass);

  AtomicMeasure moved = mu;
  moved.points[2][1] += 0.01;
  const MeasureCheck c = verify_measure(y, moved, simplex, 1e-5);
  CHECK_FALSE(c.pass);
  CHECK(c.moment_residual == doctest::Approx(0.2 * 0.01).epsilon(0.5));

  AtomicMeasure outside = mu;
  outside.points[0] = vec({-0.1, 0, 0, 0});
  const MeasureCheck o = verify_measure(tms_from_atoms(outside.points, outside.weights, 2), outside, simplex, 1e-5);
  CHECK_FALSE(o.pass);
  CHECK(o.min_generator == doctest::Approx(-0.1));
}
