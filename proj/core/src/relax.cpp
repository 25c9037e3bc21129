#include "tkmp/relax.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "tkmp/errors.hpp"

namespace tkmp {

const char* to_string(RelaxationKind kind) {
  switch (kind) {
    case RelaxationKind::lambda_preordering: return "lambda_preordering";
    case RelaxationKind::lambda_quadratic_module: return "lambda_quadratic_module";
    case RelaxationKind::feasibility: return "feasibility";
    case RelaxationKind::shift_rn: return "shift_rn";
    case RelaxationKind::flat_search_compact: return "flat_search_compact";
    case RelaxationKind::flat_search_rn: return "flat_search_rn";
  }
  return "?";
}

int MomentLmi::var_of(int source) const {
  const int np = num_pinned();
  if (source < np) return 0;
  return source - np + 1 + (has_lambda ? 1 : 0);
}

namespace {

void check_order(const Tms& y, int k) {
  if (2 * k < y.degree()) {
    throw DegreeExceeded("relaxation order " + std::to_string(k) + " needs 2k >= " +
                         std::to_string(y.degree()));
  }
}

// Appends the block M_order(g * w) to r.sdp, with pinned entries folded into
// the constant (and lambda) parts.
void add_block(Relaxation& r, const Polynomial& g, int order) {
  const MomentLmi& L = r.layout;
  const LocalizingStructure st = localizing_structure(g, order);
  SdpBlock b;
  b.size = st.size;
  const int np = L.num_pinned();
  for (const auto& t : st.terms) {
    if (t.source < np) {
      b.add(0, t.row, t.col, t.coef * L.y[static_cast<std::size_t>(t.source)]);
      if (L.has_lambda) b.add(1, t.row, t.col, -t.coef * L.xi[static_cast<std::size_t>(t.source)]);
    } else {
      b.add(L.var_of(t.source), t.row, t.col, t.coef);
    }
  }
  // merge duplicate cells so the stored problem stays compact
  std::sort(b.entries.begin(), b.entries.end(), [](const SdpEntry& a, const SdpEntry& c) {
    if (a.var != c.var) return a.var < c.var;
    if (a.row != c.row) return a.row < c.row;
    return a.col < c.col;
  });
  std::vector<SdpEntry> merged;
  for (const auto& e : b.entries) {
    if (!merged.empty() && merged.back().var == e.var && merged.back().row == e.row &&
        merged.back().col == e.col) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const SdpEntry& e) { return e.value == 0.0; });
  b.entries = std::move(merged);
  r.sdp.blocks.push_back(std::move(b));
  r.block_generator.push_back(g);
  r.block_order.push_back(order);
}

Relaxation start(RelaxationKind kind, const Tms& y, const Tms* xi, int k) {
  check_order(y, k);
  Relaxation r;
  r.kind = kind;
  r.layout.n = y.num_vars();
  r.layout.d = y.degree();
  r.layout.k = k;
  r.layout.y = y;
  if (xi) {
    if (xi->num_vars() != y.num_vars()) throw ValidationError("reference has the wrong dimension");
    if (xi->degree() < y.degree()) throw DegreeExceeded("reference degree below tms degree");
    r.layout.has_lambda = true;
    r.layout.xi = truncate(*xi, y.degree());
  }
  r.sdp.num_vars = r.layout.num_vars();
  r.sdp.objective = Eigen::VectorXd::Zero(r.sdp.num_vars);
  if (xi) r.sdp.objective[0] = 1.0;
  return r;
}

void add_family(Relaxation& r, const GeneratorFamily& fam) {
  for (const auto& m : fam.members) {
    const int order = r.layout.k - m.half_degree;
    if (order < 0) continue;
    add_block(r, m.g, order);
  }
}

Eigen::MatrixXd checked_reference_matrix(const Tms& xi, int d0) {
  const Eigen::MatrixXd mx = moment_matrix(truncate(xi, 2 * d0), d0).entries;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mx, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues()[0] > 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()))) {
    throw ValidationError("reference moment matrix is not positive definite");
  }
  return mx;
}

}  // namespace

Relaxation build_lambda(const Tms& y, const Tms& xi, const SemialgebraicSet& K, int k,
                        FamilyMode mode, int cap) {
  if (K.num_vars() != y.num_vars()) throw ValidationError("set and tms differ in dimension");
  const GeneratorFamily fam = generator_family(K, mode, cap);
  Relaxation r = start(mode == FamilyMode::preordering ? RelaxationKind::lambda_preordering
                                                       : RelaxationKind::lambda_quadratic_module,
                       y, &xi, k);
  add_family(r, fam);
  return r;
}

Relaxation build_feasibility(const Tms& y, const SemialgebraicSet& K, int k, FamilyMode mode,
                             int cap) {
  if (K.num_vars() != y.num_vars()) throw ValidationError("set and tms differ in dimension");
  const GeneratorFamily fam = generator_family(K, mode, cap);
  Relaxation r = start(RelaxationKind::feasibility, y, nullptr, k);
  add_family(r, fam);
  return r;
}

Relaxation build_shift_rn(const Tms& y, const Tms& xi, int k) {
  checked_reference_matrix(xi, y.degree() / 2);
  Relaxation r = start(RelaxationKind::shift_rn, y, &xi, k);
  add_block(r, Polynomial::constant(y.num_vars(), 1.0), k);
  return r;
}

double eta_star_direct(const Tms& y, const Tms& xi) {
  const int d0 = y.degree() / 2;
  if (xi.degree() < 2 * d0) throw DegreeExceeded("reference degree below tms degree");
  const Eigen::MatrixXd mx = checked_reference_matrix(xi, d0);
  const Eigen::MatrixXd my = moment_matrix(truncate(y, 2 * d0), d0).entries;
  // M_xi^{-1/2} M_y M_xi^{-1/2}, via the symmetric square root
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(mx);
  const Eigen::VectorXd isq = ex.eigenvalues().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd w = ex.eigenvectors() * isq.asDiagonal() * ex.eigenvectors().transpose();
  const Eigen::MatrixXd t = w * my * w;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> et(0.5 * (t + t.transpose()), Eigen::EigenvaluesOnly);
  return et.eigenvalues()[0];
}

Relaxation build_flat_search(const Tms& y, const SemialgebraicSet& K, int k, const Eigen::VectorXd& c) {
  if (!K.radius()) throw ValidationError("flat search on a compact set needs a radius");
  if (K.num_vars() != y.num_vars()) throw ValidationError("set and tms differ in dimension");
  const int n = y.num_vars();
  if (static_cast<std::size_t>(c.size()) != monomial_count(n, 2 * k)) {
    throw ValidationError("objective length differs from C(n+2k, 2k)");
  }
  Relaxation r = start(RelaxationKind::flat_search_compact, y, nullptr, k);
  add_family(r, quadratic_module_family(K));
  Polynomial rho = Polynomial::constant(n, *K.radius() * *K.radius());
  for (int i = 0; i < n; ++i) rho = rho - Polynomial::variable(n, i).pow(2);
  add_block(r, rho, k - 1);
  r.objective_tms = c;
  const int np = r.layout.num_pinned();
  for (int j = 0; j < c.size(); ++j) {
    if (j < np) r.objective_offset += c[j] * y[static_cast<std::size_t>(j)];
    else r.sdp.objective[r.layout.var_of(j) - 1] = -c[j];
  }
  return r;
}

Relaxation build_flat_search_rn(const Tms& y, int k, const Eigen::MatrixXd& C) {
  const int n = y.num_vars();
  const auto size = static_cast<Eigen::Index>(monomial_count(n, k));
  if (C.rows() != size || C.cols() != size) throw ValidationError("objective matrix has the wrong size");
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, C.cwiseAbs().maxCoeff())) {
    throw ValidationError("objective matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()[0] < -1e-10) throw ValidationError("objective matrix is not positive semidefinite");
  const MonomialBasis rows(n, k);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(monomial_count(n, 2 * k)));
  for (Eigen::Index a = 0; a < size; ++a) {
    for (Eigen::Index b = 0; b < size; ++b) {
      c[static_cast<Eigen::Index>(graded_lex_rank(rows[static_cast<std::size_t>(a)] +
                                                  rows[static_cast<std::size_t>(b)]))] += C(a, b);
    }
  }
  Relaxation r = start(RelaxationKind::flat_search_rn, y, nullptr, k);
  add_block(r, Polynomial::constant(n, 1.0), k);
  r.objective_tms = c;
  const int np = r.layout.num_pinned();
  for (int j = 0; j < c.size(); ++j) {
    if (j < np) r.objective_offset += c[j] * y[static_cast<std::size_t>(j)];
    else r.sdp.objective[r.layout.var_of(j) - 1] = -c[j];
  }
  return r;
}

DecodedMoments decode(const Relaxation& r, const Eigen::VectorXd& x) {
  const MomentLmi& L = r.layout;
  if (x.size() != L.num_vars()) throw ValidationError("solution length differs from the layout");
  DecodedMoments out;
  out.w = Tms(L.n, 2 * L.k);
  const int np = L.num_pinned();
  double lambda = 0.0;
  if (L.has_lambda) {
    lambda = x[0];
    out.lambda = lambda;
  }
  for (int j = 0; j < np; ++j) {
    out.w[static_cast<std::size_t>(j)] =
        L.y[static_cast<std::size_t>(j)] - (L.has_lambda ? lambda * L.xi[static_cast<std::size_t>(j)] : 0.0);
  }
  for (int j = np; j < static_cast<int>(out.w.size()); ++j) out.w[static_cast<std::size_t>(j)] = x[L.var_of(j) - 1];
  return out;
}

Eigen::VectorXd encode(const Relaxation& r, std::optional<double> lambda, const Tms& w) {
  const MomentLmi& L = r.layout;
  if (w.degree() < 2 * L.k || w.num_vars() != L.n) throw ValidationError("tms does not fit the layout");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(L.num_vars());
  if (L.has_lambda) x[0] = lambda.value_or(0.0);
  const int total = static_cast<int>(monomial_count(L.n, 2 * L.k));
  for (int j = L.num_pinned(); j < total; ++j) x[L.var_of(j) - 1] = w[static_cast<std::size_t>(j)];
  return x;
}

Tms impose_kernel_relations(const Tms& w, const std::vector<Polynomial>& kernel, int d) {
  const int k = w.degree() / 2;
  const int n = w.num_vars();
  const auto np = static_cast<Eigen::Index>(monomial_count(n, d));
  const auto total = static_cast<Eigen::Index>(w.size());
  if (kernel.empty() || total <= np) return w;

  std::vector<Eigen::VectorXd> rows;
  for (const Polynomial& p : kernel) {
    if (p.is_zero()) continue;
    const int dp = p.degree();
    if (dp > k) throw ValidationError("kernel polynomial degree exceeds the extension order");
    const int reach = std::min(w.degree() - dp, k + std::max(0, k - 1 - dp));
    const MonomialBasis shifts(n, reach);
    for (std::size_t s = 0; s < shifts.size(); ++s) {
      if (shifts[s].degree() + dp <= d) continue;  // only pinned moments involved
      Eigen::VectorXd row = Eigen::VectorXd::Zero(total);
      for (const auto& [alpha, c] : p.terms()) row[static_cast<Eigen::Index>(graded_lex_rank(alpha + shifts[s]))] += c;
      rows.push_back(std::move(row));
    }
  }
  if (rows.empty()) return w;

  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), total);
  for (std::size_t i = 0; i < rows.size(); ++i) A.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  const Eigen::VectorXd residual = A * w.values();
  const Eigen::MatrixXd Af = A.rightCols(total - np);
  const Eigen::VectorXd delta = Af.completeOrthogonalDecomposition().solve(residual);
  Tms out = w;
  out.values().tail(total - np) -= delta;
  return out;
}

double flat_objective(const Relaxation& r, const Tms& w) {
  const auto len = r.objective_tms.size();
  return r.objective_tms.dot(w.values().head(len));
}

Scaling choose_scaling(const Tms& y) {
  Scaling s;
  const double y0 = y.mass();
  if (!(y0 > 0.0)) return s;
  s.mass = y0;
  const MonomialBasis basis(y.num_vars(), y.degree());
  double data_scale = 0.0;
  std::vector<double> max_abs(static_cast<std::size_t>(y.degree() + 1), 0.0);
  for (std::size_t j = 1; j < basis.size(); ++j) {
    auto& m = max_abs[static_cast<std::size_t>(basis.degree(j))];
    m = std::max(m, std::abs(y[j]) / y0);
  }
  for (int t = 1; t <= y.degree(); ++t) {
    if (max_abs[static_cast<std::size_t>(t)] > 0) {
      data_scale = std::max(data_scale, std::pow(max_abs[static_cast<std::size_t>(t)], 1.0 / t));
    }
  }
  s.coord = std::max(1.0, data_scale);
  return s;
}

namespace {
Tms rescale(const Tms& y, double coord_factor, double mass_factor) {
  const MonomialBasis basis(y.num_vars(), y.degree());
  Tms z = y;
  for (std::size_t j = 0; j < basis.size(); ++j) z[j] = y[j] * mass_factor * std::pow(coord_factor, basis.degree(j));
  return z;
}
}  // namespace

Tms scale_tms(const Tms& y, const Scaling& s, bool with_mass) {
  return rescale(y, 1.0 / s.coord, with_mass ? 1.0 / s.mass : 1.0);
}

Tms unscale_tms(const Tms& y, const Scaling& s, bool with_mass) {
  return rescale(y, s.coord, with_mass ? s.mass : 1.0);
}

Polynomial scale_polynomial(const Polynomial& g, double coord) {
  Polynomial out(g.num_vars());
  for (const auto& [e, c] : g.terms()) out.add_term(e, c * std::pow(coord, e.degree()));
  const double m = out.max_abs_coefficient();
  return m > 0 ? out * (1.0 / m) : out;
}

SemialgebraicSet scale_set(const SemialgebraicSet& K, double coord) {
  SemialgebraicSet out(K.num_vars());
  for (std::size_t i = 0; i < K.generators().size(); ++i) {
    out.add_inequality(scale_polynomial(K.generators()[i], coord), K.labels()[i]);
  }
  if (K.radius()) out.set_radius(*K.radius() / coord);
  if (K.interior_witness()) {
    out.set_interior_witness({K.interior_witness()->center / coord, K.interior_witness()->radius / coord});
  }
  return out;
}

double flat_search_norm_bound(double mass, double radius, int k) {
  if (radius < 1.0) return mass / (1.0 - radius * radius);
  const double c = radius / 0.9;
  return std::pow(c, 2 * k) * mass / (1.0 - 0.81);
}

}  // namespace tkmp
