#include "tkmp/polynomial.hpp"

#include <charconv>
#include <cmath>

#include "tkmp/errors.hpp"

namespace tkmp {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void require_same_vars(int a, int b) {
  if (a != b) throw ValidationError("polynomials have different variable counts");
}

}  // namespace

Polynomial Polynomial::constant(int n, double c) {
  Polynomial p(n);
  p.add_term(Exponent(n), c);
  return p;
}

Polynomial Polynomial::variable(int n, int i) {
  if (i < 0 || i >= n) throw ValidationError("variable index out of range");
  Exponent e(n);
  e.set(i, 1);
  return monomial(e);
}

Polynomial Polynomial::monomial(const Exponent& alpha, double c) {
  Polynomial p(alpha.size());
  p.add_term(alpha, c);
  return p;
}

Polynomial Polynomial::from_coefficients(const MonomialBasis& basis,
                                         std::span<const double> coef) {
  if (coef.size() > basis.size()) throw DegreeExceeded("coefficient vector longer than basis");
  Polynomial p(basis.num_vars());
  for (std::size_t i = 0; i < coef.size(); ++i) p.add_term(basis[i], coef[i]);
  return p;
}

int Polynomial::degree() const {
  return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

double Polynomial::coefficient(const Exponent& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Exponent& alpha, double c) {
  if (alpha.size() != n_) throw ValidationError("term has wrong variable count");
  if (!std::isfinite(c)) throw ValidationError("non-finite polynomial coefficient");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(alpha, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  require_same_vars(n_, o.n_);
  Polynomial out(*this);
  for (const auto& [e, c] : o.terms_) out.add_term(e, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  require_same_vars(n_, o.n_);
  Polynomial out(*this);
  for (const auto& [e, c] : o.terms_) out.add_term(e, -c);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  require_same_vars(n_, o.n_);
  Polynomial out(n_);
  for (const auto& [a, ca] : terms_) {
    for (const auto& [b, cb] : o.terms_) out.add_term(a + b, ca * cb);
  }
  return out;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial out(n_);
  if (s == 0.0) return out;
  for (const auto& [e, c] : terms_) out.terms_.emplace(e, c * s);
  return out;
}

Polynomial Polynomial::pow(int e) const {
  if (e < 0) throw ValidationError("negative polynomial power");
  Polynomial out = constant(n_, 1.0);
  for (int i = 0; i < e; ++i) out = out * *this;
  return out;
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw ValidationError("point has wrong dimension");
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = c;
    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k < e[i]; ++k) term *= x[static_cast<std::size_t>(i)];
    }
    sum += term;
  }
  return sum;
}

double Polynomial::evaluate(const Eigen::VectorXd& x) const {
  return evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

Eigen::VectorXd Polynomial::coefficients(const MonomialBasis& basis) const {
  if (basis.num_vars() != n_) throw ValidationError("basis has wrong variable count");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (const auto& [e, c] : terms_) out[static_cast<Eigen::Index>(basis.index_of(e))] = c;
  return out;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  // Highest degree first reads most naturally.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    double mag = c;
    if (first) {
      if (c < 0) {
        out += "-";
        mag = -c;
      }
    } else {
      out += c < 0 ? " - " : " + ";
      mag = std::abs(c);
    }
    first = false;
    std::string factors;
    for (int i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!factors.empty()) factors += "*";
      factors += "x" + std::to_string(i + 1);
      if (e[i] > 1) factors += "^" + std::to_string(e[i]);
    }
    if (factors.empty()) {
      out += format_double(mag);
    } else if (mag == 1.0) {
      out += factors;
    } else {
      out += format_double(mag) + "*" + factors;
    }
  }
  return out;
}

int half_degree(const Polynomial& g) { return (g.degree() + 1) / 2; }

}  // namespace tkmp
