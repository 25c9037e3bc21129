#include "tkmp/flatatoms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "tkmp/errors.hpp"

namespace tkmp {

RankReport numerical_rank(const Eigen::MatrixXd& M, const RankOptions& opt, std::string label) {
  RankReport r;
  r.label = std::move(label);
  if (M.size() == 0) return r;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  Eigen::VectorXd sv = es.eigenvalues().cwiseAbs();
  std::sort(sv.data(), sv.data() + sv.size(), std::greater<>());
  r.singular_values = sv;
  r.threshold = opt.relative ? opt.tau * std::max(1.0, sv[0]) : opt.tau;
  r.rank = static_cast<int>((sv.array() > r.threshold).count());
  return r;
}

FlatnessReport flatness(const Tms& w, int d_g, const RankOptions& opt) {
  if (w.degree() % 2) throw ValidationError("flatness needs a tms of even degree");
  const int s = w.degree() / 2;
  if (s < d_g) throw ValidationError("flatness needs s >= d_g");
  FlatnessReport f;
  f.upper = numerical_rank(moment_matrix(w, s).entries, opt, "M_" + std::to_string(s));
  f.lower = numerical_rank(moment_matrix(truncate(w, 2 * (s - d_g)), s - d_g).entries, opt,
                           "M_" + std::to_string(s - d_g));
  f.flat = f.lower.rank == f.upper.rank;
  return f;
}

bool is_flat(const Tms& w, int d_g, const RankOptions& opt) { return flatness(w, d_g, opt).flat; }

namespace {

bool psd_tol(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0] >= -kLocalizingPsdTol * (1.0 + m.norm());
}

}  // namespace

std::optional<FlatTruncation> find_flat_truncation(const Tms& w, int d, int d_g,
                                                   const SemialgebraicSet& K, const RankOptions& opt) {
  int t = std::max(d, 2 * d_g);
  if (t % 2) ++t;
  const HalfDegrees hd = half_degrees(K);
  for (; t <= w.degree(); t += 2) {
    const Tms wt = truncate(w, t);
    FlatnessReport f = flatness(wt, d_g, opt);
    if (!f.flat) continue;
    const int s = t / 2;
    bool ok = psd_tol(moment_matrix(wt, s).entries);
    for (std::size_t i = 0; ok && i < K.generators().size(); ++i) {
      if (s - hd.d_i[i] < 0) continue;
      ok = psd_tol(localizing_matrix(K.generators()[i], wt, s).entries);
    }
    if (ok) return FlatTruncation{t, std::move(f)};
  }
  return std::nullopt;
}

Tms AtomicMeasure::moments(int d) const {
  if (points.empty()) throw ValidationError("empty measure has no dimension");
  return tms_from_atoms(points, weights, d);
}

AtomicMeasure extract_atoms(const Tms& w, int d_g, const ExtractionOptions& opt) {
  if (w.degree() % 2) throw ValidationError("extraction needs a tms of even degree");
  const int n = w.num_vars();
  const int s = w.degree() / 2;
  const MonomialBasis basis(n, s);
  const Eigen::MatrixXd M = moment_matrix(w, s).entries;
  AtomicMeasure mu;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const RankReport rank = numerical_rank(M, opt.rank, "M_s");
  const int r = rank.rank;
  if (r == 0) {
    mu.residual = w.values().cwiseAbs().maxCoeff();
    return mu;
  }
  // V = U_r Lambda_r^{1/2}, largest eigenvalues last in Eigen's ordering
  const auto N = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd V(N, r);
  for (int c = 0; c < r; ++c) {
    const Eigen::Index src = N - 1 - c;
    const double lam = es.eigenvalues()[src];
    if (lam <= 0) throw ExtractionFailure("moment matrix has a negative eigenvalue inside the rank");
    V.col(c) = es.eigenvectors().col(src) * std::sqrt(lam);
  }

  // Echelon basis: pick rows degree by degree, as many per degree as the
  // rank of M_t grows, each time the row least explained by the chosen ones.
  std::vector<int> chosen;
  Eigen::MatrixXd Q(r, 0);
  const double row_scale = std::max(1.0, V.rowwise().norm().maxCoeff());
  int prev_rank = 0;
  for (int t = 0; t < s && static_cast<int>(chosen.size()) < r; ++t) {
    const int rt = numerical_rank(M.topLeftCorner(static_cast<Eigen::Index>(monomial_count(n, t)),
                                                  static_cast<Eigen::Index>(monomial_count(n, t))),
                                  opt.rank)
                       .rank;
    int want = std::min(std::max(rt, prev_rank), r) - prev_rank;
    const auto lo = t == 0 ? 0 : static_cast<int>(monomial_count(n, t - 1));
    const auto hi = static_cast<int>(monomial_count(n, t));
    for (; want > 0; --want) {
      int best = -1;
      double best_norm = 0.0;
      for (int row = lo; row < hi; ++row) {
        if (std::find(chosen.begin(), chosen.end(), row) != chosen.end()) continue;
        Eigen::VectorXd v = V.row(row).transpose();
        if (Q.cols()) v -= Q * (Q.transpose() * v);
        if (v.norm() > best_norm) {
          best_norm = v.norm();
          best = row;
        }
      }
      if (best < 0 || best_norm <= opt.pivot_tol * row_scale) {
        throw ExtractionFailure("echelon pivot below tolerance at degree " + std::to_string(t));
      }
      Eigen::VectorXd v = V.row(best).transpose();
      if (Q.cols()) v -= Q * (Q.transpose() * v);
      Q.conservativeResize(Eigen::NoChange, Q.cols() + 1);
      Q.col(Q.cols() - 1) = v / v.norm();
      chosen.push_back(best);
    }
    prev_rank = static_cast<int>(chosen.size());
  }
  if (static_cast<int>(chosen.size()) < r) {
    throw ExtractionFailure("echelon basis needs monomials of top degree; tms is not flat (rank " +
                            std::to_string(r) + ", found " + std::to_string(chosen.size()) + ")");
  }

  Eigen::MatrixXd VB(r, r);
  for (int j = 0; j < r; ++j) VB.row(j) = V.row(chosen[static_cast<std::size_t>(j)]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(VB);
  if (!lu.isInvertible()) throw ExtractionFailure("echelon basis matrix is singular");
  const Eigen::MatrixXd W = V * lu.inverse();  // W[chosen] = I

  std::vector<Eigen::MatrixXd> Ni(static_cast<std::size_t>(n), Eigen::MatrixXd(r, r));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < r; ++j) {
      Exponent e = basis[static_cast<std::size_t>(chosen[static_cast<std::size_t>(j)])];
      e.set(i, e[i] + 1);
      Ni[static_cast<std::size_t>(i)].row(j) = W.row(static_cast<Eigen::Index>(graded_lex_rank(e)));
    }
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  std::vector<double> coef(static_cast<std::size_t>(n));
  double csum = 0.0;
  for (auto& c : coef) csum += (c = unif(rng));
  Eigen::MatrixXd Ncomb = Eigen::MatrixXd::Zero(r, r);
  for (int i = 0; i < n; ++i) Ncomb += coef[static_cast<std::size_t>(i)] / csum * Ni[static_cast<std::size_t>(i)];

  Eigen::EigenSolver<Eigen::MatrixXd> eig(Ncomb);
  if (eig.info() != Eigen::Success) throw ExtractionFailure("eigendecomposition of the multiplication matrix failed");
  struct Candidate {
    double lambda;
    Eigen::VectorXd u;
  };
  std::vector<Candidate> cand;
  for (int j = 0; j < r; ++j) {
    const std::complex<double> lam = eig.eigenvalues()[j];
    if (std::abs(lam.imag()) > opt.imag_tol * (1.0 + std::abs(lam))) {
      throw ExtractionFailure("complex eigenvalue " + std::to_string(lam.real()) + " + " +
                              std::to_string(lam.imag()) + "i in the multiplication matrix");
    }
    Eigen::VectorXcd vc = eig.eigenvectors().col(j);
    Eigen::Index l = 0;
    vc.cwiseAbs().maxCoeff(&l);
    vc *= std::conj(vc[l]) / std::abs(vc[l]);
    const Eigen::VectorXd v = vc.real();
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) u[i] = (Ni[static_cast<std::size_t>(i)] * v)[l] / v[l];
    cand.push_back({lam.real(), u});
  }
  std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) { return a.lambda < b.lambda; });
  std::vector<Eigen::VectorXd> pts;
  for (std::size_t j = 0; j < cand.size(); ++j) {
    if (!pts.empty() && std::abs(cand[j].lambda - cand[j - 1].lambda) < opt.cluster_tol) {
      if ((cand[j].u - cand[j - 1].u).cwiseAbs().maxCoeff() > opt.coordinate_tol) {
        throw ExtractionFailure("clustered eigenvalues with distinct atoms");
      }
      mu.warnings.push_back("merged two atoms with clustered eigenvalues");
      continue;
    }
    pts.push_back(cand[j].u);
  }

  // weights: least squares over all moments of degree <= s
  auto fit = [&](const std::vector<Eigen::VectorXd>& p) {
    Eigen::MatrixXd A(N, static_cast<Eigen::Index>(p.size()));
    for (std::size_t j = 0; j < p.size(); ++j) A.col(static_cast<Eigen::Index>(j)) = monomial_vector(basis, p[j]);
    return Eigen::VectorXd(A.colPivHouseholderQr().solve(w.values().head(N)));
  };
  Eigen::VectorXd a = fit(pts);
  std::vector<Eigen::VectorXd> kept;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double aj = a[static_cast<Eigen::Index>(j)];
    if (aj < -opt.weight_tol) {
      throw ExtractionFailure("negative weight " + std::to_string(aj) + " at atom " + std::to_string(j));
    }
    if (aj <= opt.weight_tol) {
      mu.warnings.push_back("dropped atom with weight " + std::to_string(aj));
      continue;
    }
    kept.push_back(pts[j]);
  }
  if (kept.size() != pts.size()) a = fit(kept);
  mu.points = kept;
  mu.weights.assign(a.data(), a.data() + a.size());
  if (mu.points.empty()) throw ExtractionFailure("no atoms with positive weight");

  const int rd = 2 * s - 2 * d_g;
  const Tms rec = tms_from_atoms(mu.points, mu.weights, rd);
  mu.residual = (rec.values() - w.values().head(static_cast<Eigen::Index>(rec.size()))).cwiseAbs().maxCoeff();
  const double limit = opt.residual_tol * (1.0 + w.values().cwiseAbs().maxCoeff());
  if (!(mu.residual <= limit)) {
    throw ExtractionFailure("reconstruction residual " + std::to_string(mu.residual) +
                            " exceeds " + std::to_string(limit));
  }
  return mu;
}

MeasureCheck verify_measure(const Tms& y, const AtomicMeasure& mu, const SemialgebraicSet& K,
                            double tol) {
  MeasureCheck c;
  c.min_generator = std::numeric_limits<double>::infinity();
  if (mu.points.empty()) {
    c.moment_residual = y.values().cwiseAbs().maxCoeff();
  } else {
    const Tms rec = tms_from_atoms(mu.points, mu.weights, y.degree());
    c.moment_residual = (rec.values() - y.values()).cwiseAbs().maxCoeff();
    for (const auto& p : mu.points) c.min_generator = std::min(c.min_generator, K.min_generator_value(p));
  }
  c.pass = c.moment_residual <= tol && c.min_generator >= -tol;
  return c;
}

}  // namespace tkmp
