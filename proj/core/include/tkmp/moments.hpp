#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "tkmp/monomials.hpp"
#include "tkmp/polynomial.hpp"

namespace tkmp {

// Truncated moment sequence: y_alpha for |alpha| <= d, dense in graded lex
// order.
class Tms {
 public:
  Tms() = default;
  Tms(int n, int d);  // all zeros
  Tms(int n, int d, Eigen::VectorXd values);

  int num_vars() const noexcept { return n_; }
  int degree() const noexcept { return d_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::VectorXd& values() noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  double& operator[](std::size_t i) { return values_[static_cast<Eigen::Index>(i)]; }
  double at(const Exponent& alpha) const;
  double mass() const { return values_.size() ? values_[0] : 0.0; }

  Tms operator+(const Tms& o) const;
  Tms operator-(const Tms& o) const;
  Tms operator*(double s) const;

 private:
  int n_ = 0;
  int d_ = 0;
  Eigen::VectorXd values_;
};

inline Tms operator*(double s, const Tms& y) { return y * s; }

// One contribution coef * y[source] to cell (row, col) of a moment-structured
// matrix; only row <= col is listed.
struct CellTerm {
  int row;
  int col;
  int source;
  double coef;
};

// The linear map y -> M_order(g * y): every upper-triangle cell lists the
// source moments feeding it. Sources index the graded lex basis of degree
// 2*order + deg(g).
struct LocalizingStructure {
  int n = 0;
  int order = 0;
  int size = 0;  // C(n + order, order)
  int source_degree = 0;
  std::vector<CellTerm> terms;
};

LocalizingStructure localizing_structure(const Polynomial& g, int order);

struct MomentMatrix {
  int order = 0;
  Eigen::MatrixXd entries;
  LocalizingStructure entry_map;
};

// Assemble the matrix described by `structure` from `y` (upper triangle,
// mirrored).
Eigen::MatrixXd assemble(const LocalizingStructure& structure, const Tms& y);

double riesz(const Tms& y, const Polynomial& p);

// z_beta = sum_gamma h_gamma y_{beta+gamma}, of degree y.d - deg h.
Tms shift(const Polynomial& h, const Tms& y);

MomentMatrix moment_matrix(const Tms& y, int k);

// M_{k - ceil(deg g / 2)}(g * y).
MomentMatrix localizing_matrix(const Polynomial& g, const Tms& y, int k);

Tms truncate(const Tms& w, int t);

// y_alpha = sum_j a_j u_j^alpha.
Tms tms_from_atoms(std::span<const Eigen::VectorXd> points, std::span<const double> weights,
                   int d);

// Monomial vector [u]_d in graded lex order.
Eigen::VectorXd monomial_vector(const MonomialBasis& basis, const Eigen::VectorXd& u);

}  // namespace tkmp
