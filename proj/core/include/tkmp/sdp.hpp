#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace tkmp {

// One nonzero of a block: value * (x_var if var > 0, else 1) at (row, col),
// mirrored to (col, row). Indices are zero-based with row <= col.
struct SdpEntry {
  int var;
  int row;
  int col;
  double value;
};

struct SdpBlock {
  int size = 0;
  std::vector<SdpEntry> entries;

  // Adds value at (row, col) and its mirror; order of row/col is irrelevant.
  void add(int var, int row, int col, double value);
};

// maximize c^T x  subject to  A0_j + sum_i x_i Ai_j >= 0 for every block j.
struct SdpProblem {
  int num_vars = 0;
  Eigen::VectorXd objective;
  std::vector<SdpBlock> blocks;

  void validate() const;
  // Dense A0_j + sum_i x_i Ai_j.
  Eigen::MatrixXd block_matrix(std::size_t j, const Eigen::VectorXd& x) const;
  // <Ai_j, X_j> summed over blocks, for i = 0..N (index 0 is the constant).
  Eigen::VectorXd inner_products(const std::vector<Eigen::MatrixXd>& X) const;
};

enum class SdpStatus { optimal, primal_infeasible, dual_infeasible, max_iterations, numerical_failure };

const char* to_string(SdpStatus s);

struct KktResiduals {
  double primal = 0.0;  // LMI violation of x
  double dual = 0.0;    // equality and PSD violation of the dual matrices
  double gap = 0.0;     // relative duality gap
  double max() const { return std::max(primal, std::max(dual, gap)); }
};

struct SdpOptions {
  double tol_gap = 1e-8;
  double tol_feas = 1e-8;
  int max_iter = 200;
  double step_fraction = 0.98;
  bool verbose = false;
};

struct SdpSolution {
  Eigen::VectorXd x;
  // Optimal dual matrices; for primal_infeasible the certificate Y with
  // <A0, Y> = -1 and <Ai, Y> ~ 0, Y >= 0.
  std::vector<Eigen::MatrixXd> dual_matrices;
  double objective_value = 0.0;  // c^T x
  double dual_objective = 0.0;   // <A0, X>
  SdpStatus status = SdpStatus::numerical_failure;
  KktResiduals kkt_residuals;
  int iterations = 0;
  double solve_seconds = 0.0;
};

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

// Recomputed from the problem data and (x, dual_matrices) alone.
KktResiduals residuals(const SdpProblem& problem, const SdpSolution& solution);

// Sparse text dump, one nonzero per line: "block row col var value"
// (zero-based block/row/col, var 0 = constant). Header lines start with '#';
// the objective is written as lines "c var value".
void write_sdp(std::ostream& os, const SdpProblem& problem);
SdpProblem read_sdp(std::istream& is);

}  // namespace tkmp
