#include "tkmp/sdp.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "tkmp/errors.hpp"

namespace tkmp {

void SdpBlock::add(int var, int row, int col, double value) {
  if (value == 0.0) return;
  if (row > col) std::swap(row, col);
  entries.push_back({var, row, col, value});
}

void SdpProblem::validate() const {
  if (num_vars < 0) throw ValidationError("negative variable count");
  if (objective.size() != num_vars) throw ValidationError("objective length differs from num_vars");
  if (!objective.allFinite()) throw ValidationError("objective has non-finite entries");
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const auto& b = blocks[j];
    if (b.size <= 0) throw ValidationError("block " + std::to_string(j) + " has size 0");
    for (const auto& e : b.entries) {
      if (e.var < 0 || e.var > num_vars) throw ValidationError("entry variable out of range");
      if (e.row < 0 || e.col < e.row || e.col >= b.size) throw ValidationError("entry index out of range");
      if (!std::isfinite(e.value)) throw ValidationError("entry value is not finite");
    }
  }
}

Eigen::MatrixXd SdpProblem::block_matrix(std::size_t j, const Eigen::VectorXd& x) const {
  const auto& b = blocks[j];
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(b.size, b.size);
  for (const auto& e : b.entries) {
    const double v = e.var == 0 ? e.value : e.value * x[e.var - 1];
    m(e.row, e.col) += v;
    if (e.row != e.col) m(e.col, e.row) += v;
  }
  return m;
}

Eigen::VectorXd SdpProblem::inner_products(const std::vector<Eigen::MatrixXd>& X) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(num_vars + 1);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    for (const auto& e : blocks[j].entries) {
      out[e.var] += (e.row == e.col ? 1.0 : 2.0) * e.value * X[j](e.row, e.col);
    }
  }
  return out;
}

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::primal_infeasible: return "primal_infeasible";
    case SdpStatus::dual_infeasible: return "dual_infeasible";
    case SdpStatus::max_iterations: return "max_iterations";
    case SdpStatus::numerical_failure: return "numerical_failure";
  }
  return "?";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double min_eigenvalue(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

MatrixXd sym(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Internal standard form:  min <C,X>  s.t. <A_i,X> = b_i, X >= 0, with the
// dual  max b^T y  s.t. C - sum y_i A_i = S >= 0. The user LMI maps to it by
// C = A0, A_i = -Ai, b = c.
struct Term {
  int row;
  int col;
  double value;
};

struct BlockData {
  int s = 0;
  MatrixXd C;
  std::vector<int> vars;                 // zero-based variable ids present
  std::vector<std::vector<Term>> terms;  // per entry of vars, both triangles
  std::vector<std::vector<int>> rows;    // distinct rows touched, per var
};

struct Model {
  int N = 0;
  int nu = 0;
  VectorXd b;
  std::vector<BlockData> blocks;
  double norm_b = 0.0;
  double norm_C = 0.0;
  std::vector<bool> present;  // variable appears in some block
};

Model build_model(const SdpProblem& p) {
  Model m;
  m.N = p.num_vars;
  m.b = p.objective;
  m.norm_b = m.b.norm();
  m.present.assign(static_cast<std::size_t>(p.num_vars), false);
  double c2 = 0.0;
  for (const auto& blk : p.blocks) {
    BlockData bd;
    bd.s = blk.size;
    m.nu += blk.size;
    bd.C = MatrixXd::Zero(blk.size, blk.size);
    std::vector<int> slot(static_cast<std::size_t>(p.num_vars), -1);
    for (const auto& e : blk.entries) {
      if (e.var == 0) {
        bd.C(e.row, e.col) += e.value;
        if (e.row != e.col) bd.C(e.col, e.row) += e.value;
        continue;
      }
      const int v = e.var - 1;
      if (slot[static_cast<std::size_t>(v)] < 0) {
        slot[static_cast<std::size_t>(v)] = static_cast<int>(bd.vars.size());
        bd.vars.push_back(v);
        bd.terms.emplace_back();
        m.present[static_cast<std::size_t>(v)] = true;
      }
      auto& t = bd.terms[static_cast<std::size_t>(slot[static_cast<std::size_t>(v)])];
      t.push_back({e.row, e.col, -e.value});
      if (e.row != e.col) t.push_back({e.col, e.row, -e.value});
    }
    for (auto& t : bd.terms) {
      // merge duplicates so row sets stay small
      std::sort(t.begin(), t.end(), [](const Term& a, const Term& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
      });
      std::vector<Term> merged;
      for (const auto& x : t) {
        if (!merged.empty() && merged.back().row == x.row && merged.back().col == x.col) {
          merged.back().value += x.value;
        } else {
          merged.push_back(x);
        }
      }
      t = std::move(merged);
      std::vector<int> r;
      for (const auto& x : t) {
        if (r.empty() || r.back() != x.row) r.push_back(x.row);
      }
      bd.rows.push_back(std::move(r));
    }
    c2 += bd.C.squaredNorm();
    m.blocks.push_back(std::move(bd));
  }
  m.norm_C = std::sqrt(c2);
  return m;
}

using Blocks = std::vector<MatrixXd>;

// A(X)_i = <A_i, X>
VectorXd apply_A(const Model& m, const Blocks& X) {
  VectorXd out = VectorXd::Zero(m.N);
  for (std::size_t j = 0; j < m.blocks.size(); ++j) {
    const auto& bd = m.blocks[j];
    for (std::size_t k = 0; k < bd.vars.size(); ++k) {
      double s = 0.0;
      for (const auto& t : bd.terms[k]) s += t.value * X[j](t.row, t.col);
      out[bd.vars[k]] += s;
    }
  }
  return out;
}

// A*(y) = sum_i y_i A_i
Blocks apply_At(const Model& m, const VectorXd& y) {
  Blocks out;
  out.reserve(m.blocks.size());
  for (const auto& bd : m.blocks) {
    MatrixXd z = MatrixXd::Zero(bd.s, bd.s);
    for (std::size_t k = 0; k < bd.vars.size(); ++k) {
      const double yk = y[bd.vars[k]];
      if (yk == 0.0) continue;
      for (const auto& t : bd.terms[k]) z(t.row, t.col) += yk * t.value;
    }
    out.push_back(std::move(z));
  }
  return out;
}

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j].cwiseProduct(b[j]).sum();
  return s;
}

double inner_C(const Model& m, const Blocks& X) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.blocks.size(); ++j) s += m.blocks[j].C.cwiseProduct(X[j]).sum();
  return s;
}

double frob(const Blocks& a) {
  double s = 0.0;
  for (const auto& x : a) s += x.squaredNorm();
  return std::sqrt(s);
}

// Largest alpha in (0, cap] with X + alpha dX >= 0, given the Cholesky
// factor of X.
double max_step(const std::vector<Eigen::LLT<MatrixXd>>& chol, const Blocks& dX, double cap) {
  double alpha = cap;
  for (std::size_t j = 0; j < dX.size(); ++j) {
    const auto& L = chol[j].matrixL();
    MatrixXd w = L.solve(dX[j]);
    w = L.solve(w.transpose().eval());
    const double lmin = min_eigenvalue(sym(w));
    if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

struct Direction {
  Blocks dX, dS;
  VectorXd dy;
  double dtau = 0.0;
  double dkappa = 0.0;
};

struct Iterate {
  Blocks X, S;
  VectorXd y;
  double tau = 1.0;
  double kappa = 1.0;
};

bool all_finite(const Iterate& it) {
  if (!it.y.allFinite() || !std::isfinite(it.tau) || !std::isfinite(it.kappa)) return false;
  for (const auto& x : it.X) if (!x.allFinite()) return false;
  for (const auto& s : it.S) if (!s.allFinite()) return false;
  return true;
}

class Engine {
 public:
  Engine(const Model& m, const SdpOptions& o) : m_(m), opt_(o) {}

  SdpSolution run(const SdpProblem& problem);

 private:
  bool factor_schur(const Iterate& it);
  Direction direction(const Iterate& it, double sigma, double eta, double mu,
                      const Direction* predictor) const;

  const Model& m_;
  const SdpOptions& opt_;
  // per-iteration state
  Blocks Sinv_;
  VectorXd u_;
  double w_ = 0.0;
  Eigen::LDLT<MatrixXd> schur_;
  VectorXd rp_;
  Blocks Rd_;
  double Rg_ = 0.0;
};

// Schur complement M_ij = tr(A_i X A_j S^-1) plus the column for C.
bool Engine::factor_schur(const Iterate& it) {
  const int N = m_.N;
  MatrixXd M = MatrixXd::Zero(N, N);
  u_ = VectorXd::Zero(N);
  w_ = 0.0;
  Sinv_.resize(m_.blocks.size());
  for (std::size_t j = 0; j < m_.blocks.size(); ++j) {
    const auto& bd = m_.blocks[j];
    Eigen::LLT<MatrixXd> llt(it.S[j]);
    if (llt.info() != Eigen::Success) return false;
    Sinv_[j] = llt.solve(MatrixXd::Identity(bd.s, bd.s));
    Sinv_[j] = sym(Sinv_[j]);
    const MatrixXd& X = it.X[j];
    const MatrixXd& Si = Sinv_[j];

    // T = X A_k S^-1; only the rows of A_k in P_k matter for the product.
    auto column = [&](const std::vector<Term>& terms, const std::vector<int>& rows, MatrixXd& T) {
      const int p = static_cast<int>(rows.size());
      // R = (A_k S^-1)[P, :]
      MatrixXd R = MatrixXd::Zero(p, bd.s);
      int ri = 0;
      for (const auto& t : terms) {
        while (rows[static_cast<std::size_t>(ri)] != t.row) ++ri;
        R.row(ri) += t.value * Si.row(t.col);
      }
      MatrixXd Xp(bd.s, p);
      for (int c = 0; c < p; ++c) Xp.col(c) = X.col(rows[static_cast<std::size_t>(c)]);
      T.noalias() = Xp * R;
    };

    MatrixXd T(bd.s, bd.s);
    for (std::size_t k = 0; k < bd.vars.size(); ++k) {
      column(bd.terms[k], bd.rows[k], T);
      const int vk = bd.vars[k];
      for (std::size_t i = 0; i <= k; ++i) {
        double s = 0.0;
        for (const auto& t : bd.terms[i]) s += t.value * T(t.col, t.row);
        M(bd.vars[i], vk) += s;
        if (i != k) M(vk, bd.vars[i]) += s;
      }
    }
    // column for C (dense): T = X C S^-1
    if (bd.C.squaredNorm() > 0) {
      T.noalias() = X * bd.C * Si;
      for (std::size_t i = 0; i < bd.vars.size(); ++i) {
        double s = 0.0;
        for (const auto& t : bd.terms[i]) s += t.value * T(t.col, t.row);
        u_[bd.vars[i]] += s;
      }
      w_ += (bd.C.cwiseProduct(T.transpose())).sum();
    }
  }
  // variables absent from every block get a unit pivot; their right-hand
  // side is b_i tau, which the ray tests pick up
  const double dmax = N ? M.diagonal().cwiseAbs().maxCoeff() : 0.0;
  for (int i = 0; i < N; ++i) {
    if (!m_.present[static_cast<std::size_t>(i)]) M(i, i) = std::max(1.0, dmax);
  }
  schur_.compute(M);
  return schur_.info() == Eigen::Success;
}

Direction Engine::direction(const Iterate& it, double sigma, double eta, double mu,
                            const Direction* pred) const {
  const std::size_t nb = m_.blocks.size();
  Blocks Rc(nb), Xc(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    const int s = m_.blocks[j].s;
    Rc[j] = sigma * mu * MatrixXd::Identity(s, s) - it.X[j] * it.S[j];
    if (pred) Rc[j].noalias() -= pred->dX[j] * pred->dS[j];
    MatrixXd t = Rc[j] * Sinv_[j];
    if (eta != 0.0) t.noalias() += eta * (it.X[j] * Rd_[j] * Sinv_[j]);
    Xc[j] = sym(t);
  }
  const VectorXd rhs1 = eta * rp_ - apply_A(m_, Xc);
  double rtk = sigma * mu - it.tau * it.kappa;
  if (pred) rtk -= pred->dtau * pred->dkappa;
  const double rhs2 = -eta * Rg_ - inner_C(m_, Xc) - rtk / it.tau;

  const VectorXd p = schur_.solve(rhs1);
  const VectorXd q = schur_.solve(u_ + m_.b);
  const VectorXd umb = u_ - m_.b;
  Direction d;
  const double denom = umb.dot(q) - (w_ + it.kappa / it.tau);
  d.dtau = (rhs2 - umb.dot(p)) / denom;
  d.dy = p + q * d.dtau;
  const Blocks Aty = apply_At(m_, d.dy);
  d.dS.resize(nb);
  d.dX.resize(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    d.dS[j] = -eta * Rd_[j] - Aty[j] + m_.blocks[j].C * d.dtau;
    d.dS[j] = sym(d.dS[j]);
    d.dX[j] = sym((Rc[j] - it.X[j] * d.dS[j]) * Sinv_[j]);
  }
  d.dkappa = (rtk - it.kappa * d.dtau) / it.tau;

  // Refine against the unreduced equations: the Schur complement loses
  // accuracy as X and S become ill-conditioned near the optimum.
  for (int round = 0; round < 2; ++round) {
    const VectorXd r1 = eta * rp_ - (apply_A(m_, d.dX) - m_.b * d.dtau);
    const double r2 = -eta * Rg_ - (inner_C(m_, d.dX) - m_.b.dot(d.dy) + d.dkappa);
    const VectorXd pp = schur_.solve(r1);
    const double ddt = (r2 - umb.dot(pp)) / denom;
    const VectorXd ddy = pp + q * ddt;
    const Blocks Atd = apply_At(m_, ddy);
    for (std::size_t j = 0; j < nb; ++j) {
      MatrixXd dS = sym(-Atd[j] + m_.blocks[j].C * ddt);
      d.dX[j] -= sym(it.X[j] * dS * Sinv_[j]);
      d.dS[j] += dS;
    }
    d.dy += ddy;
    d.dtau += ddt;
    d.dkappa -= it.kappa * ddt / it.tau;
  }
  return d;
}

SdpSolution Engine::run(const SdpProblem& problem) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t nb = m_.blocks.size();
  Iterate it;
  it.y = VectorXd::Zero(m_.N);
  for (const auto& bd : m_.blocks) {
    it.X.push_back(MatrixXd::Identity(bd.s, bd.s));
    it.S.push_back(MatrixXd::Identity(bd.s, bd.s));
  }
  SdpSolution sol;
  sol.status = SdpStatus::max_iterations;
  Iterate best = it;
  double best_err = std::numeric_limits<double>::infinity();
  int stall = 0;
  int last_progress = 0;

  for (int iter = 0;; ++iter) {
    sol.iterations = iter;
    if (!all_finite(it)) {
      sol.status = SdpStatus::numerical_failure;
      it = best;
      break;
    }
    // residuals
    rp_ = m_.b * it.tau - apply_A(m_, it.X);
    const Blocks Aty = apply_At(m_, it.y);
    Rd_.resize(nb);
    for (std::size_t j = 0; j < nb; ++j) Rd_[j] = Aty[j] + it.S[j] - m_.blocks[j].C * it.tau;
    const double cx = inner_C(m_, it.X);
    const double by = m_.b.dot(it.y);
    Rg_ = cx - by + it.kappa;
    const double mu = (inner(it.X, it.S) + it.tau * it.kappa) / (m_.nu + 1);

    const double pinf = rp_.norm() / it.tau / (1.0 + m_.norm_b);
    const double dinf = frob(Rd_) / it.tau / (1.0 + m_.norm_C);
    const double pobj = cx / it.tau, dobj = by / it.tau;
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (opt_.verbose) {
      std::cerr << "it " << iter << " pobj " << pobj << " dobj " << dobj << " pinf " << pinf
                << " dinf " << dinf << " gap " << gap << " tau " << it.tau << " kappa " << it.kappa
                << " mu " << mu << "\n";
    }
    const double err = std::max({pinf / opt_.tol_feas, dinf / opt_.tol_feas, gap / opt_.tol_gap});
    if (err < 0.9 * best_err) last_progress = iter;
    if (err < best_err) {
      best_err = err;
      best = it;
    }
    if (err <= 1.0) {
      sol.status = SdpStatus::optimal;
      break;
    }
    // infeasibility rays
    if (cx < 0) {
      const VectorXd ax = apply_A(m_, it.X);
      if (ax.norm() / -cx <= opt_.tol_feas && it.kappa > it.tau) {
        sol.status = SdpStatus::primal_infeasible;
        break;
      }
    }
    if (by > 0) {
      double r = 0.0;
      for (std::size_t j = 0; j < nb; ++j) r += (Aty[j] + it.S[j]).squaredNorm();
      if (std::sqrt(r) / by <= opt_.tol_feas && it.kappa > it.tau) {
        sol.status = SdpStatus::dual_infeasible;
        break;
      }
    }
    if (iter - last_progress >= 15) {
      // no progress toward the tolerances: accuracy floor reached
      sol.status = SdpStatus::numerical_failure;
      it = best;
      break;
    }
    if (iter >= opt_.max_iter) {
      sol.status = SdpStatus::max_iterations;
      it = best;
      break;
    }

    if (!factor_schur(it)) {
      sol.status = SdpStatus::numerical_failure;
      it = best;
      break;
    }
    std::vector<Eigen::LLT<MatrixXd>> cx_chol, cs_chol;
    for (std::size_t j = 0; j < nb; ++j) {
      cx_chol.emplace_back(it.X[j]);
      cs_chol.emplace_back(it.S[j]);
      if (cx_chol.back().info() != Eigen::Success || cs_chol.back().info() != Eigen::Success) {
        sol.status = SdpStatus::numerical_failure;
        break;
      }
    }
    if (sol.status == SdpStatus::numerical_failure) {
      it = best;
      break;
    }

    auto step_len = [&](const Direction& d, double cap) {
      double a = std::min(max_step(cx_chol, d.dX, cap), max_step(cs_chol, d.dS, cap));
      if (d.dtau < 0) a = std::min(a, -it.tau / d.dtau);
      if (d.dkappa < 0) a = std::min(a, -it.kappa / d.dkappa);
      return a;
    };

    const Direction pred = direction(it, 0.0, 1.0, mu, nullptr);
    const double ap = std::min(1.0, step_len(pred, 1.0));
    double mu_a = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      mu_a += (it.X[j] + ap * pred.dX[j]).cwiseProduct(it.S[j] + ap * pred.dS[j]).sum();
    }
    mu_a += (it.tau + ap * pred.dtau) * (it.kappa + ap * pred.dkappa);
    mu_a /= (m_.nu + 1);
    double sigma = std::clamp(mu_a / mu, 0.0, 1.0);
    sigma = sigma * sigma * sigma;
    const Direction corr = direction(it, sigma, 1.0 - sigma, mu, &pred);
    const double alpha = std::min(1.0, opt_.step_fraction * step_len(corr, 1.0 / opt_.step_fraction));

    for (std::size_t j = 0; j < nb; ++j) {
      it.X[j] += alpha * corr.dX[j];
      it.S[j] += alpha * corr.dS[j];
    }
    it.y += alpha * corr.dy;
    it.tau += alpha * corr.dtau;
    it.kappa += alpha * corr.dkappa;

    // keep the embedding homogeneous scale bounded
    const double scale = std::max(it.tau, it.kappa);
    if (scale > 1e8 || scale < 1e-8) {
      for (auto& x : it.X) x /= scale;
      for (auto& s : it.S) s /= scale;
      it.y /= scale;
      it.tau /= scale;
      it.kappa /= scale;
    }
    stall = alpha < 1e-10 ? stall + 1 : 0;
    if (stall >= 5) {
      sol.status = SdpStatus::numerical_failure;
      it = best;
      break;
    }
  }

  // map back to user space
  sol.dual_matrices.resize(nb);
  if (sol.status == SdpStatus::primal_infeasible) {
    const double cx = inner_C(m_, it.X);
    for (std::size_t j = 0; j < nb; ++j) sol.dual_matrices[j] = it.X[j] / -cx;
    sol.x = VectorXd::Zero(m_.N);
  } else if (sol.status == SdpStatus::dual_infeasible) {
    const double by = m_.b.dot(it.y);
    sol.x = it.y / by;
    for (std::size_t j = 0; j < nb; ++j) sol.dual_matrices[j] = MatrixXd::Zero(m_.blocks[j].s, m_.blocks[j].s);
  } else {
    sol.x = it.y / it.tau;
    for (std::size_t j = 0; j < nb; ++j) sol.dual_matrices[j] = it.X[j] / it.tau;
  }
  sol.objective_value = problem.objective.dot(sol.x);
  sol.dual_objective = inner_C(m_, sol.dual_matrices);
  sol.kkt_residuals = residuals(problem, sol);
  sol.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
  problem.validate();
  const Model m = build_model(problem);
  if (m.blocks.empty()) {
    // no constraints: optimal iff the objective is zero
    SdpSolution sol;
    sol.x = Eigen::VectorXd::Zero(problem.num_vars);
    sol.status = problem.objective.isZero(0.0) ? SdpStatus::optimal : SdpStatus::dual_infeasible;
    if (sol.status == SdpStatus::dual_infeasible) sol.x = problem.objective / problem.objective.norm();
    sol.objective_value = problem.objective.dot(sol.x);
    return sol;
  }
  Engine e(m, options);
  return e.run(problem);
}

KktResiduals residuals(const SdpProblem& problem, const SdpSolution& solution) {
  KktResiduals r;
  if (problem.blocks.empty() || solution.x.size() != problem.num_vars ||
      solution.dual_matrices.size() != problem.blocks.size()) {
    return r;
  }
  double a0_norm2 = 0.0, viol_p = 0.0, viol_x = 0.0, xnorm2 = 0.0;
  for (std::size_t j = 0; j < problem.blocks.size(); ++j) {
    const Eigen::MatrixXd s = problem.block_matrix(j, solution.x);
    const Eigen::MatrixXd a0 = problem.block_matrix(j, Eigen::VectorXd::Zero(problem.num_vars));
    a0_norm2 += a0.squaredNorm();
    viol_p = std::max(viol_p, -min_eigenvalue(s));
    viol_x = std::max(viol_x, -min_eigenvalue(sym(solution.dual_matrices[j])));
    xnorm2 += solution.dual_matrices[j].squaredNorm();
  }
  const Eigen::VectorXd ip = problem.inner_products(solution.dual_matrices);
  const double c_norm = problem.objective.norm();
  r.primal = std::max(0.0, viol_p) / (1.0 + std::sqrt(a0_norm2));
  r.dual = (ip.tail(problem.num_vars) + problem.objective).norm() / (1.0 + c_norm) +
           std::max(0.0, viol_x) / (1.0 + std::sqrt(xnorm2));
  const double pobj = problem.objective.dot(solution.x);
  const double dobj = ip[0];
  r.gap = std::abs(dobj - pobj) / (1.0 + std::abs(dobj) + std::abs(pobj));
  return r;
}

}  // namespace tkmp
