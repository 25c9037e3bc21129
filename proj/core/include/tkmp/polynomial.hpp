#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tkmp/monomials.hpp"

namespace tkmp {

// Sparse real polynomial in x1..xn. Terms are kept in graded lex order and
// zero coefficients are never stored.
class Polynomial {
 public:
  using TermMap = std::map<Exponent, double>;

  Polynomial() = default;
  explicit Polynomial(int n) : n_(n) {}

  static Polynomial constant(int n, double c);
  static Polynomial variable(int n, int i);  // x_{i+1}, zero-based i
  static Polynomial monomial(const Exponent& alpha, double c = 1.0);
  // Coefficients listed against `basis` (graded lex).
  static Polynomial from_coefficients(const MonomialBasis& basis, std::span<const double> coef);

  int num_vars() const noexcept { return n_; }
  int degree() const;  // 0 for the zero polynomial
  bool is_zero() const noexcept { return terms_.empty(); }
  const TermMap& terms() const noexcept { return terms_; }
  double coefficient(const Exponent& alpha) const;

  void add_term(const Exponent& alpha, double c);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;
  Polynomial operator-() const { return *this * -1.0; }
  Polynomial pow(int e) const;
  bool operator==(const Polynomial& o) const { return n_ == o.n_ && terms_ == o.terms_; }

  double evaluate(std::span<const double> x) const;
  double evaluate(const Eigen::VectorXd& x) const;

  // Dense coefficient vector in `basis`; throws DegreeExceeded if a term
  // does not fit.
  Eigen::VectorXd coefficients(const MonomialBasis& basis) const;
  double max_abs_coefficient() const;

  // Human-readable form such as "25 - x1^2 - x2^2"; coefficients are printed
  // with round-trip precision so the text reparses to the same map.
  std::string to_string() const;

 private:
  int n_ = 0;
  TermMap terms_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

// ceil(deg(g) / 2)
int half_degree(const Polynomial& g);

}  // namespace tkmp
