#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "tkmp/errors.hpp"
#include "tkmp/sdp.hpp"

using namespace tkmp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// blocks[j][i] is A_i of block j (i = 0 constant)
SdpProblem dense_problem(const VectorXd& c, const std::vector<std::vector<MatrixXd>>& blocks) {
  SdpProblem p;
  p.num_vars = static_cast<int>(c.size());
  p.objective = c;
  for (const auto& mats : blocks) {
    SdpBlock b;
    b.size = static_cast<int>(mats[0].rows());
    for (std::size_t i = 0; i < mats.size(); ++i) {
      for (int r = 0; r < b.size; ++r) {
        for (int s = r; s < b.size; ++s) {
          if (mats[i](r, s) != 0.0) b.add(static_cast<int>(i), r, s, mats[i](r, s));
        }
      }
    }
    p.blocks.push_back(b);
  }
  return p;
}

MatrixXd m1(double a) { return MatrixXd::Constant(1, 1, a); }

MatrixXd m2(double a, double b, double c) {
  MatrixXd m(2, 2);
  m << a, b, b, c;
  return m;
}

double min_eig(const MatrixXd& M) { return Eigen::SelfAdjointEigenSolver<MatrixXd>(M).eigenvalues().minCoeff(); }

// Largest r with A(r u) >= 0, given A(0) > 0; +inf when unbounded.
double radial_extent(const SdpProblem& p, const VectorXd& u) {
  double r = std::numeric_limits<double>::infinity();
  const VectorXd zero = VectorXd::Zero(u.size());
  for (std::size_t j = 0; j < p.blocks.size(); ++j) {
    const MatrixXd A0 = p.block_matrix(j, zero);
    const MatrixXd B = p.block_matrix(j, u) - A0;
    const Eigen::LLT<MatrixXd> llt(A0);
    const MatrixXd Li = llt.matrixL().solve(MatrixXd::Identity(A0.rows(), A0.cols()));
    const double top = Eigen::SelfAdjointEigenSolver<MatrixXd>(-Li * B * Li.transpose()).eigenvalues().maxCoeff();
    if (top > 0.0) r = std::min(r, 1.0 / top);
  }
  return r;
}

VectorXd direction(int n, double a, double b) {
  VectorXd u(n);
  if (n == 1) u << (a < 0.0 ? -1.0 : 1.0);
  if (n == 2) u << std::cos(a), std::sin(a);
  if (n == 3) u << std::cos(a) * std::cos(b), std::sin(a) * std::cos(b), std::sin(b);
  return u;
}

// Maximise c.x over a bounded feasible set with A(0) > 0 and n <= 3 by
// writing boundary points as r(u) u and zooming a grid over the angles of
// u. The angle objective is smooth, so no boundary is ever approached.
double grid_optimum(const SdpProblem& p) {
  const int n = p.num_vars;
  auto value = [&](double a, double b) {
    const VectorXd u = direction(n, a, b);
    return radial_extent(p, u) * p.objective.dot(u);
  };
  if (n == 1) return std::max(value(1.0, 0.0), value(-1.0, 0.0));
  const int steps = 64;
  double ca = 0.0, cb = 0.0, ha = std::numbers::pi, hb = n == 3 ? std::numbers::pi / 2 : 0.0;
  double best = value(ca, cb);
  for (int level = 0; level < 80; ++level) {
    double ba = ca, bb = cb;
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; j <= (n == 3 ? steps : 0); ++j) {
        const double a = ca - ha + 2.0 * ha * i / steps;
        const double b = n == 3 ? cb - hb + 2.0 * hb * j / steps : 0.0;
        const double v = value(a, b);
        if (v > best) {
          best = v;
          ba = a;
          bb = b;
        }
      }
    }
    ca = ba;
    cb = bb;
    ha *= 0.6;
    hb *= 0.6;
  }
  return best;
}

// Traceless symmetric matrices keep the feasible set of A0 + sum x_i A_i
// bounded.
MatrixXd random_traceless(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXd A(3, 3);
  for (int r = 0; r < 3; ++r) {
    for (int s = r; s < 3; ++s) A(r, s) = A(s, r) = g(rng);
  }
  A -= (A.trace() / 3.0) * MatrixXd::Identity(3, 3);
  return A;
}

struct Case {
  std::string name;
  SdpProblem problem;
  SdpStatus status;
  double value;  // optimal objective when status is optimal
};

std::vector<Case> engine_suite() {
  std::vector<Case> cases;
  auto add = [&](std::string name, SdpProblem p, SdpStatus s, double v) {
    cases.push_back({std::move(name), std::move(p), s, v});
  };
  const VectorXd one = VectorXd::Ones(1);
  add("scalar upper bound", dense_problem(one, {{m1(1), m1(-1)}}), SdpStatus::optimal, 1.0);
  add("two diagonal entries",
      dense_problem(one, {{m2(1, 0, 1), m2(-1, 0, 1)}}), SdpStatus::optimal, 1.0);
  add("off-diagonal bound", dense_problem(one, {{m2(1, 0, 1), m2(0, 1, 0)}}), SdpStatus::optimal, 1.0);
  add("off-diagonal lower bound", dense_problem(-one, {{m2(1, 0, 1), m2(0, 1, 0)}}), SdpStatus::optimal, 1.0);
  add("off-diagonal with unequal diagonal", dense_problem(one, {{m2(1, 0, 4), m2(0, 1, 0)}}), SdpStatus::optimal, 2.0);
  add("two blocks", dense_problem(VectorXd::Ones(2), {{m1(1), m1(-1), m1(0)}, {m1(1), m1(0), m1(-1)}}),
      SdpStatus::optimal, 2.0);
  {
    // min x + y with [[x, 1], [1, y]] >= 0
    add("hyperbola", dense_problem(-VectorXd::Ones(2), {{m2(0, 1, 0), m2(1, 0, 0), m2(0, 0, 1)}}),
        SdpStatus::optimal, -2.0);
  }
  {
    // max 2 x1 + x2 on the unit disk through a Schur complement
    MatrixXd A0 = MatrixXd::Identity(3, 3), A1 = MatrixXd::Zero(3, 3), A2 = MatrixXd::Zero(3, 3);
    A1(0, 1) = A1(1, 0) = 1;
    A2(0, 2) = A2(2, 0) = 1;
    VectorXd c(2);
    c << 2, 1;
    add("disk via Schur complement", dense_problem(c, {{A0, A1, A2}}), SdpStatus::optimal, std::sqrt(5.0));
  }
  {
    MatrixXd A(3, 3);
    A << 2, -1, 0, -1, 2, -1, 0, -1, 2;
    const auto ev = Eigen::SelfAdjointEigenSolver<MatrixXd>(A).eigenvalues();
    // min t with t I - A >= 0, i.e. max -t
    add("largest eigenvalue", dense_problem(-one, {{-A, MatrixXd::Identity(3, 3)}}), SdpStatus::optimal, -ev.maxCoeff());
    // max t with A - t I >= 0
    add("smallest eigenvalue", dense_problem(one, {{A, -MatrixXd::Identity(3, 3)}}), SdpStatus::optimal, ev.minCoeff());
  }
  add("linear bounds", dense_problem(one, {{m1(3), m1(1)}, {m1(5), m1(-2)}}), SdpStatus::optimal, 2.5);
  {
    // LP: x >= 0, x1 + 2 x2 <= 4, 3 x1 + x2 <= 6, max x1 + x2 = 14/5
    MatrixXd A0 = MatrixXd::Zero(4, 4), A1 = MatrixXd::Zero(4, 4), A2 = MatrixXd::Zero(4, 4);
    A1(0, 0) = 1;
    A2(1, 1) = 1;
    A0(2, 2) = 4, A1(2, 2) = -1, A2(2, 2) = -2;
    A0(3, 3) = 6, A1(3, 3) = -3, A2(3, 3) = -1;
    add("diagonal LP", dense_problem(VectorXd::Ones(2), {{A0, A1, A2}}), SdpStatus::optimal, 14.0 / 5.0);
  }
  {
    MatrixXd A0(3, 3), A1 = MatrixXd::Zero(3, 3);
    A0 << 2, 1, 0, 1, 2, 1, 0, 1, 2;
    A1.diagonal() << 1, 0, -1;
    SdpProblem p = dense_problem(one, {{A0, A1}});
    add("gridded 3x3, one variable", p, SdpStatus::optimal, grid_optimum(p));
  }
  {
    MatrixXd A0 = 3 * MatrixXd::Identity(3, 3), A1 = MatrixXd::Zero(3, 3), A2 = MatrixXd::Zero(3, 3);
    A1(0, 1) = A1(1, 0) = A1(1, 2) = A1(2, 1) = 1;
    A2(0, 0) = 1, A2(1, 1) = -1;
    VectorXd c(2);
    c << 1, 0.5;
    SdpProblem p = dense_problem(c, {{A0, A1, A2}});
    add("gridded 3x3, tridiagonal", p, SdpStatus::optimal, grid_optimum(p));
  }
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  for (int t = 0; t < 4; ++t) {
    const int nv = t < 2 ? 2 : 3;
    std::vector<MatrixXd> mats{2.0 * MatrixXd::Identity(3, 3)};
    VectorXd c(nv);
    for (int i = 0; i < nv; ++i) {
      mats.push_back(random_traceless(rng));
      c[i] = g(rng);
    }
    SdpProblem p = dense_problem(c, {mats});
    add("gridded 3x3, random " + std::to_string(t), p, SdpStatus::optimal, grid_optimum(p));
  }
  add("constant infeasible block", dense_problem(VectorXd::Zero(1), {{m1(-1), m1(0)}}), SdpStatus::primal_infeasible, 0);
  add("contradictory bounds", dense_problem(VectorXd::Zero(1), {{m2(-1, 0, -1), m2(1, 0, -1)}}),
      SdpStatus::primal_infeasible, 0);
  add("indefinite for every x", dense_problem(one, {{m2(0, 1, 0), m2(1, 0, -1)}}), SdpStatus::primal_infeasible, 0);
  add("unbounded objective", dense_problem(one, {{m1(0), m1(1)}}), SdpStatus::dual_infeasible, 0);
  return cases;
}

}  // namespace

TEST_CASE("engine suite: known optima and infeasibility rays") {
  const auto cases = engine_suite();
  CHECK(cases.size() >= 20);
  for (const auto& c : cases) {
    CAPTURE(c.name);
    const SdpSolution s = solve(c.problem);
    REQUIRE(s.status == c.status);
    if (c.status == SdpStatus::optimal) {
      CHECK(std::abs(s.objective_value - c.value) <= 1e-7 * (1.0 + std::abs(c.value)));
      CHECK(s.kkt_residuals.max() <= 1e-7);
    } else if (c.status == SdpStatus::primal_infeasible) {
      // Y >= 0, <A0,Y> = -1, <Ai,Y> = 0: no x can make the LMI PSD
      const VectorXd ip = c.problem.inner_products(s.dual_matrices);
      CHECK(ip[0] == doctest::Approx(-1.0).epsilon(1e-8));
      CHECK(ip.tail(ip.size() - 1).norm() <= 1e-7);
      for (const auto& Y : s.dual_matrices) CHECK(min_eig(Y) >= -1e-9);
    } else {
      // improving direction: c.x > 0 and sum x_i Ai >= 0
      CHECK(c.problem.objective.dot(s.x) > 0.0);
      for (std::size_t j = 0; j < c.problem.blocks.size(); ++j) {
        const MatrixXd D = c.problem.block_matrix(j, s.x) - c.problem.block_matrix(j, VectorXd::Zero(s.x.size()));
        CHECK(min_eig(D) >= -1e-8);
      }
    }
  }
}

TEST_CASE("grid oracle agrees with the analytic disk optimum") {
  MatrixXd A0 = MatrixXd::Identity(3, 3), A1 = MatrixXd::Zero(3, 3), A2 = MatrixXd::Zero(3, 3);
  A1(0, 1) = A1(1, 0) = 1;
  A2(0, 2) = A2(2, 0) = 1;
  VectorXd c(2);
  c << 2, 1;
  CHECK(grid_optimum(dense_problem(c, {{A0, A1, A2}})) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-9));
}

TEST_CASE("weak duality and residual recomputation") {
  for (const auto& c : engine_suite()) {
    if (c.status != SdpStatus::optimal) continue;
    CAPTURE(c.name);
    const SdpSolution s = solve(c.problem);
    CHECK(s.objective_value <= s.dual_objective + 1e-7 * (1 + std::abs(s.dual_objective)));
    const KktResiduals r = residuals(c.problem, s);
    CHECK(r.primal == doctest::Approx(s.kkt_residuals.primal));
    CHECK(r.max() <= 1e-7);
  }
}

TEST_CASE("residuals grow with a perturbation of x") {
  const auto cases = engine_suite();
  const SdpProblem& p = cases[0].problem;  // 1 - x >= 0
  SdpSolution s = solve(p);
  const double base = residuals(p, s).primal;
  s.x[0] += 1e-3;
  const double bumped = residuals(p, s).primal;
  CHECK(bumped > base);
  CHECK(bumped == doctest::Approx(1e-3 / 2.0).epsilon(1e-2));

  SdpProblem zero;
  zero.num_vars = 0;
  zero.objective = VectorXd(0);
  SdpSolution z;
  z.x = VectorXd(0);
  const KktResiduals r = residuals(zero, z);
  CHECK(r.primal == 0.0);
  CHECK(r.dual == 0.0);
  CHECK(r.gap == 0.0);
}

TEST_CASE("invariance under block permutation and variable reordering") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  std::vector<MatrixXd> mats{2.0 * MatrixXd::Identity(3, 3), random_traceless(rng), random_traceless(rng)};
  VectorXd c(2);
  c << g(rng), g(rng);
  const SdpProblem p = dense_problem(c, {mats, {m1(1), m1(-0.3), m1(0.2)}});
  const double v = solve(p).objective_value;

  VectorXd c2(2);
  c2 << c[1], c[0];
  const SdpProblem q = dense_problem(c2, {{m1(1), m1(0.2), m1(-0.3)}, {mats[0], mats[2], mats[1]}});
  CHECK(solve(q).objective_value == doctest::Approx(v).epsilon(1e-6));

  Eigen::PermutationMatrix<3> P;
  P.indices() << 2, 0, 1;
  std::vector<MatrixXd> perm;
  for (const auto& M : mats) perm.push_back(P * M * P.transpose());
  const SdpProblem r = dense_problem(c, {perm, {m1(1), m1(-0.3), m1(0.2)}});
  CHECK(solve(r).objective_value == doctest::Approx(v).epsilon(1e-6));
}

TEST_CASE("central optimizer on a degenerate face") {
  // max x1 + x2 with x >= 0, x1 + x2 <= 1: the optimal face is a segment and
  // the path-following solution lands near its middle
  MatrixXd A0 = MatrixXd::Zero(3, 3), A1 = MatrixXd::Zero(3, 3), A2 = MatrixXd::Zero(3, 3);
  A1(0, 0) = 1;
  A2(1, 1) = 1;
  A0(2, 2) = 1, A1(2, 2) = -1, A2(2, 2) = -1;
  const SdpSolution s = solve(dense_problem(VectorXd::Ones(2), {{A0, A1, A2}}));
  REQUIRE(s.status == SdpStatus::optimal);
  CHECK(s.x[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(s.x[1] == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("validation and text round trip") {
  SdpProblem bad;
  bad.num_vars = 1;
  bad.objective = VectorXd::Ones(1);
  bad.blocks.push_back(SdpBlock{});
  CHECK_THROWS_AS(solve(bad), ValidationError);

  const auto cases = engine_suite();
  for (const auto& c : cases) {
    std::stringstream ss;
    write_sdp(ss, c.problem);
    const SdpProblem back = read_sdp(ss);
    REQUIRE(back.num_vars == c.problem.num_vars);
    CHECK((back.objective - c.problem.objective).norm() == 0.0);
    REQUIRE(back.blocks.size() == c.problem.blocks.size());
    const VectorXd x = VectorXd::LinSpaced(c.problem.num_vars, 0.3, 1.7);
    for (std::size_t j = 0; j < back.blocks.size(); ++j) {
      CHECK((back.block_matrix(j, x) - c.problem.block_matrix(j, x)).norm() == 0.0);
    }
  }
  std::stringstream junk("vars two\n");
  CHECK_THROWS(read_sdp(junk));
}

TEST_CASE("iteration limit is reported, not thrown") {
  SdpOptions o;
  o.max_iter = 2;
  const auto cases = engine_suite();
  const SdpSolution s = solve(cases[7].problem, o);
  CHECK((s.status == SdpStatus::max_iterations || s.status == SdpStatus::numerical_failure));
  CHECK(s.x.size() == 2);
}
