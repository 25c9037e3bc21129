#include "tkmp/moments.hpp"

#include <cmath>

#include "tkmp/errors.hpp"

namespace tkmp {

Tms::Tms(int n, int d)
    : n_(n), d_(d), values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(monomial_count(n, d)))) {}

Tms::Tms(int n, int d, Eigen::VectorXd values) : n_(n), d_(d), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != monomial_count(n, d)) {
    throw ValidationError("tms length " + std::to_string(values_.size()) + " does not match C(" +
                          std::to_string(n + d) + ", " + std::to_string(d) + ")");
  }
  if (!values_.allFinite()) throw ValidationError("tms has non-finite entries");
}

double Tms::at(const Exponent& alpha) const {
  if (alpha.degree() > d_) throw DegreeExceeded("moment index exceeds tms degree");
  return values_[static_cast<Eigen::Index>(graded_lex_rank(alpha))];
}

Tms Tms::operator+(const Tms& o) const {
  if (n_ != o.n_ || d_ != o.d_) throw ValidationError("tms shapes differ");
  return Tms(n_, d_, values_ + o.values_);
}

Tms Tms::operator-(const Tms& o) const {
  if (n_ != o.n_ || d_ != o.d_) throw ValidationError("tms shapes differ");
  return Tms(n_, d_, values_ - o.values_);
}

Tms Tms::operator*(double s) const { return Tms(n_, d_, values_ * s); }

LocalizingStructure localizing_structure(const Polynomial& g, int order) {
  if (order < 0) throw DegreeExceeded("negative localizing order");
  const int n = g.num_vars();
  const MonomialBasis rows(n, order);
  LocalizingStructure s;
  s.n = n;
  s.order = order;
  s.size = static_cast<int>(rows.size());
  s.source_degree = 2 * order + g.degree();
  s.terms.reserve(rows.size() * (rows.size() + 1) / 2 * g.terms().size());
  for (int i = 0; i < s.size; ++i) {
    for (int j = i; j < s.size; ++j) {
      const Exponent ab = rows[static_cast<std::size_t>(i)] + rows[static_cast<std::size_t>(j)];
      for (const auto& [gamma, c] : g.terms()) {
        s.terms.push_back({i, j, static_cast<int>(graded_lex_rank(ab + gamma)), c});
      }
    }
  }
  return s;
}

Eigen::MatrixXd assemble(const LocalizingStructure& structure, const Tms& y) {
  if (y.degree() < structure.source_degree) {
    throw DegreeExceeded("tms degree " + std::to_string(y.degree()) + " below required " +
                         std::to_string(structure.source_degree));
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(structure.size, structure.size);
  for (const auto& t : structure.terms) m(t.row, t.col) += t.coef * y[static_cast<std::size_t>(t.source)];
  for (int i = 0; i < structure.size; ++i) {
    for (int j = i + 1; j < structure.size; ++j) m(j, i) = m(i, j);
  }
  return m;
}

double riesz(const Tms& y, const Polynomial& p) {
  if (p.num_vars() != y.num_vars()) throw ValidationError("riesz: variable count mismatch");
  if (p.degree() > y.degree()) throw DegreeExceeded("riesz: polynomial degree exceeds tms degree");
  double sum = 0.0;
  for (const auto& [alpha, c] : p.terms()) sum += c * y[graded_lex_rank(alpha)];
  return sum;
}

Tms shift(const Polynomial& h, const Tms& y) {
  if (h.num_vars() != y.num_vars()) throw ValidationError("shift: variable count mismatch");
  if (h.degree() > y.degree()) throw DegreeExceeded("shift: generator degree exceeds tms degree");
  const int out_degree = y.degree() - h.degree();
  const MonomialBasis basis(y.num_vars(), out_degree);
  Tms z(y.num_vars(), out_degree);
  for (std::size_t b = 0; b < basis.size(); ++b) {
    double sum = 0.0;
    for (const auto& [gamma, c] : h.terms()) sum += c * y[graded_lex_rank(basis[b] + gamma)];
    z[b] = sum;
  }
  return z;
}

MomentMatrix moment_matrix(const Tms& y, int k) {
  if (2 * k > y.degree()) throw DegreeExceeded("moment_matrix: 2k exceeds tms degree");
  MomentMatrix m;
  m.order = k;
  m.entry_map = localizing_structure(Polynomial::constant(y.num_vars(), 1.0), k);
  m.entries = assemble(m.entry_map, y);
  return m;
}

MomentMatrix localizing_matrix(const Polynomial& g, const Tms& y, int k) {
  if (2 * k > y.degree()) throw DegreeExceeded("localizing_matrix: 2k exceeds tms degree");
  const int order = k - half_degree(g);
  if (order < 0) throw DegreeExceeded("localizing_matrix: generator degree exceeds 2k");
  MomentMatrix m;
  m.order = order;
  m.entry_map = localizing_structure(g, order);
  m.entries = assemble(m.entry_map, y);
  return m;
}

Tms truncate(const Tms& w, int t) {
  if (t > w.degree()) throw DegreeExceeded("truncate: target degree exceeds tms degree");
  if (t < 0) throw DegreeExceeded("truncate: negative degree");
  const auto len = static_cast<Eigen::Index>(monomial_count(w.num_vars(), t));
  return Tms(w.num_vars(), t, w.values().head(len));
}

Eigen::VectorXd monomial_vector(const MonomialBasis& basis, const Eigen::VectorXd& u) {
  const int n = basis.num_vars();
  if (u.size() != n) throw ValidationError("point has wrong dimension");
  Eigen::VectorXd v(static_cast<Eigen::Index>(basis.size()));
  v[0] = 1.0;
  // Each monomial of positive degree is x_i times an earlier one: divide out
  // the first variable with a positive exponent.
  for (std::size_t j = 1; j < basis.size(); ++j) {
    const Exponent& e = basis[j];
    int i = 0;
    while (e[i] == 0) ++i;
    Exponent parent = e;
    parent.set(i, e[i] - 1);
    v[static_cast<Eigen::Index>(j)] = u[i] * v[static_cast<Eigen::Index>(graded_lex_rank(parent))];
  }
  return v;
}

Tms tms_from_atoms(std::span<const Eigen::VectorXd> points, std::span<const double> weights, int d) {
  if (points.size() != weights.size()) throw ValidationError("points and weights differ in length");
  if (points.empty()) throw ValidationError("tms_from_atoms needs at least one atom");
  const int n = static_cast<int>(points.front().size());
  if (n < 1) throw ValidationError("atoms must have dimension >= 1");
  const MonomialBasis basis(n, d);
  Tms y(n, d);
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (points[j].size() != n) throw ValidationError("atoms differ in dimension");
    if (!(weights[j] > 0.0)) throw ValidationError("atom weights must be positive");
    y.values() += weights[j] * monomial_vector(basis, points[j]);
  }
  return y;
}

}  // namespace tkmp
