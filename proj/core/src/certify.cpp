#include "tkmp/certify.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace tkmp {

namespace {

Polynomial gram_polynomial(const Eigen::MatrixXd& G, int n, int order) {
  const MonomialBasis basis(n, order);
  Polynomial s(n);
  for (std::size_t a = 0; a < basis.size(); ++a) {
    for (std::size_t b = 0; b < basis.size(); ++b) {
      s.add_term(basis[a] + basis[b], G(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
    }
  }
  return s;
}

double value_on(const Polynomial& p, const Tms& y) {
  double v = 0.0;
  for (const auto& [e, c] : p.terms()) {
    if (e.degree() > y.degree()) return std::numeric_limits<double>::quiet_NaN();
    v += c * y.at(e);
  }
  return v;
}

}  // namespace

CertificateCheck verify_certificate(const NonexistenceCertificate& cert, const Tms& y,
                                    const Tms& xi, const SemialgebraicSet& K,
                                    const CertificateTolerances& tol) {
  CertificateCheck c;
  const int n = y.num_vars();
  if (cert.p.num_vars() != n) c.failures.push_back("p has the wrong number of variables");
  if (cert.p.degree() > y.degree()) c.failures.push_back("p has degree above d");
  if (cert.grams.size() != cert.multipliers.size() || cert.grams.size() != cert.orders.size() ||
      cert.grams.size() != cert.labels.size()) {
    c.failures.push_back("gram, multiplier, order and label lists differ in length");
    return c;
  }
  Polynomial sum(n);
  c.min_gram_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cert.grams.size(); ++j) {
    const auto& G = cert.grams[j];
    const auto expect = static_cast<Eigen::Index>(monomial_count(n, cert.orders[j]));
    if (G.rows() != expect || G.cols() != expect) {
      c.failures.push_back("gram " + std::to_string(j) + " has the wrong size");
      continue;
    }
    if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + G.cwiseAbs().maxCoeff())) {
      c.failures.push_back("gram " + std::to_string(j) + " is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()[0];
    c.min_gram_eigenvalue = std::min(c.min_gram_eigenvalue, lmin);
    if (lmin < -tol.gram_psd * (1.0 + G.norm())) {
      c.failures.push_back("gram " + std::to_string(j) + " is not positive semidefinite (min eig " +
                           std::to_string(lmin) + ")");
    }
    // multiplier must be the product of the labelled generators
    const auto& nu = cert.labels[j];
    if (nu.size() != K.generators().size()) {
      c.failures.push_back("label " + std::to_string(j) + " does not match the generator count");
      continue;
    }
    Polynomial g = Polynomial::constant(n, 1.0);
    for (std::size_t i = 0; i < nu.size(); ++i) {
      if (nu[i]) g = g * K.generators()[i];
    }
    const Polynomial diff = g - cert.multipliers[j];
    const double gs = std::max(1.0, g.max_abs_coefficient());
    // multipliers may be stored normalised; compare up to a positive factor
    bool same = diff.max_abs_coefficient() <= 1e-9 * gs;
    if (!same && !cert.multipliers[j].is_zero()) {
      const auto& [e0, c0] = *g.terms().rbegin();
      const double m0 = cert.multipliers[j].coefficient(e0);
      if (m0 != 0.0 && c0 / m0 > 0) {
        same = (g - cert.multipliers[j] * (c0 / m0)).max_abs_coefficient() <= 1e-9 * gs;
      }
    }
    if (!same) c.failures.push_back("multiplier " + std::to_string(j) + " is not the labelled product");
    sum = sum + gram_polynomial(G, n, cert.orders[j]) * cert.multipliers[j];
  }
  c.identity_residual = (cert.p - sum).max_abs_coefficient();
  if (c.identity_residual > tol.identity * (1.0 + cert.p.max_abs_coefficient())) {
    c.failures.push_back("identity residual " + std::to_string(c.identity_residual) + " too large");
  }
  c.value_y = value_on(cert.p, y);
  c.value_xi = value_on(cert.p, xi);
  if (!(c.value_y <= -tol.value)) c.failures.push_back("<p, y> is not negative");
  if (!(std::abs(c.value_xi - 1.0) <= tol.normalization)) c.failures.push_back("<p, xi> differs from 1");
  c.pass = c.failures.empty();
  return c;
}

MeasureRecordCheck verify_measure_record(const Tms& y, const AtomicMeasure& mu, double lambda,
                                         const Tms* xi, const SemialgebraicSet& K, double tol) {
  MeasureRecordCheck c;
  const int n = y.num_vars();
  const MonomialBasis basis(n, y.degree());
  Eigen::VectorXd rec = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  c.min_weight = std::numeric_limits<double>::infinity();
  c.min_generator = std::numeric_limits<double>::infinity();
  if (mu.points.size() != mu.weights.size()) {
    c.failures.push_back("points and weights differ in length");
    return c;
  }
  for (std::size_t j = 0; j < mu.points.size(); ++j) {
    const auto& u = mu.points[j];
    if (u.size() != n) {
      c.failures.push_back("atom " + std::to_string(j) + " has the wrong dimension");
      return c;
    }
    // direct power products, no shared evaluation tables
    for (std::size_t a = 0; a < basis.size(); ++a) {
      double v = mu.weights[j];
      for (int i = 0; i < n; ++i) v *= std::pow(u[i], basis[a][i]);
      rec[static_cast<Eigen::Index>(a)] += v;
    }
    c.min_weight = std::min(c.min_weight, mu.weights[j]);
    for (const auto& g : K.generators()) c.min_generator = std::min(c.min_generator, g.evaluate(u));
  }
  if (xi && lambda != 0.0) {
    if (xi->degree() < y.degree()) {
      c.failures.push_back("reference moments have too low a degree");
      return c;
    }
    rec += lambda * xi->values().head(rec.size());
  }
  c.moment_residual = (rec - y.values()).cwiseAbs().maxCoeff();
  c.relative_residual = c.moment_residual / (1.0 + y.values().cwiseAbs().maxCoeff());
  if (!(c.relative_residual <= tol)) c.failures.push_back("moment residual " + std::to_string(c.relative_residual) + " too large");
  if (!K.generators().empty() && !mu.points.empty()) {
    double gs = 1.0;
    for (const auto& g : K.generators()) gs = std::max(gs, g.max_abs_coefficient());
    if (c.min_generator < -tol * gs) c.failures.push_back("an atom lies outside K");
  }
  if (!mu.points.empty() && !(c.min_weight > 0)) c.failures.push_back("non-positive weight");
  if (lambda < -tol) c.failures.push_back("negative lambda");
  c.pass = c.failures.empty();
  return c;
}

}  // namespace tkmp
