#include "tkmp/refmeasures.hpp"

#include <cmath>
#include <numbers>

#include "tkmp/errors.hpp"

namespace tkmp {

const char* to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::ball_uniform: return "ball_uniform";
    case ReferenceKind::box_uniform: return "box_uniform";
    case ReferenceKind::gaussian: return "gaussian";
    case ReferenceKind::monte_carlo: return "monte_carlo";
    case ReferenceKind::explicit_tms: return "explicit";
  }
  return "?";
}

ReferenceKind reference_kind_from_string(const std::string& s) {
  if (s == "ball" || s == "ball_uniform") return ReferenceKind::ball_uniform;
  if (s == "box" || s == "box_uniform") return ReferenceKind::box_uniform;
  if (s == "gaussian") return ReferenceKind::gaussian;
  if (s == "mc" || s == "monte_carlo") return ReferenceKind::monte_carlo;
  if (s == "file" || s == "explicit") return ReferenceKind::explicit_tms;
  throw ValidationError("unknown reference kind '" + s + "'");
}

Tms ball_uniform_moments(int n, int d) {
  const MonomialBasis basis(n, d);
  Tms y(n, d);
  const double log_norm = std::log(static_cast<double>(n)) + std::lgamma(n / 2.0) -
                          (n / 2.0) * std::log(std::numbers::pi);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const Exponent& a = basis[j];
    bool even = true;
    double lg = 0.0, beta_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (a[i] % 2) {
        even = false;
        break;
      }
      const double b = (a[i] + 1) / 2.0;
      lg += std::lgamma(b);
      beta_sum += b;
    }
    if (!even) continue;
    y[j] = std::exp(lg - std::lgamma(beta_sum) + log_norm) / (a.degree() + n);
  }
  y[0] = 1.0;
  return y;
}

Tms affine_pushforward(const Tms& z, const Eigen::VectorXd& center, double scale) {
  const int n = z.num_vars(), d = z.degree();
  if (center.size() != n) throw ValidationError("center has the wrong dimension");
  const MonomialBasis basis(n, d);
  const bool centered = center.isZero(0.0);
  Tms x(n, d);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const Exponent& a = basis[j];
    if (centered) {
      x[j] = std::pow(scale, a.degree()) * z[j];
      continue;
    }
    // sum over gamma <= alpha of prod C(a_i, g_i) c_i^(a_i - g_i) scale^|g| z_g
    double sum = 0.0;
    for (std::size_t k = 0; k <= j; ++k) {
      const Exponent& g = basis[k];
      if (!a.divisible_by(g)) continue;
      double coef = std::pow(scale, g.degree());
      for (int i = 0; i < n; ++i) {
        coef *= std::tgamma(a[i] + 1.0) / (std::tgamma(g[i] + 1.0) * std::tgamma(a[i] - g[i] + 1.0));
        coef *= std::pow(center[i], a[i] - g[i]);
      }
      sum += coef * z[k];
    }
    x[j] = sum;
  }
  return x;
}

Tms ball_uniform_moments(int n, int d, const Eigen::VectorXd& center, double radius) {
  if (!(radius > 0.0)) throw ValidationError("ball radius must be positive");
  return affine_pushforward(ball_uniform_moments(n, d), center, radius);
}

Tms gaussian_moments(int n, int d) {
  const MonomialBasis basis(n, d);
  Tms y(n, d);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    double v = 1.0;
    for (int i = 0; i < n && v != 0.0; ++i) {
      const int a = basis[j][i];
      if (a % 2) v = 0.0;
      for (int t = a - 1; t > 1; t -= 2) v *= t;
    }
    y[j] = v;
  }
  return y;
}

Tms box_uniform_moments(int n, int d, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  if (lo.size() != n || hi.size() != n) throw ValidationError("box bounds have the wrong dimension");
  for (int i = 0; i < n; ++i) {
    if (!(lo[i] < hi[i])) throw ValidationError("box needs lo < hi in every coordinate");
  }
  // univariate moments per coordinate
  Eigen::MatrixXd uni(n, d + 1);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a <= d; ++a) {
      uni(i, a) = (std::pow(hi[i], a + 1) - std::pow(lo[i], a + 1)) / ((a + 1) * (hi[i] - lo[i]));
    }
  }
  const MonomialBasis basis(n, d);
  Tms y(n, d);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    double v = 1.0;
    for (int i = 0; i < n; ++i) v *= uni(i, basis[j][i]);
    y[j] = v;
  }
  return y;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double unit_double(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace

Tms monte_carlo_moments(const SemialgebraicSet& K, int d, std::int64_t sample_count,
                        std::uint64_t seed) {
  if (sample_count < kMinMonteCarloSamples) {
    throw ValidationError("monte carlo needs at least " + std::to_string(kMinMonteCarloSamples) +
                          " samples");
  }
  const int n = K.num_vars();
  Eigen::VectorXd lo(n), hi(n);
  if (auto box = K.as_box()) {
    lo = box->first;
    hi = box->second;
  } else if (K.radius()) {
    lo.setConstant(-*K.radius());
    hi.setConstant(*K.radius());
  } else {
    throw ValidationError("monte carlo sampling needs a radius for K");
  }

  const MonomialBasis basis(n, d);
  // parent[j] = (variable, index of x^alpha / x_var)
  std::vector<std::pair<int, std::size_t>> parent(basis.size());
  for (std::size_t j = 1; j < basis.size(); ++j) {
    Exponent e = basis[j];
    int i = 0;
    while (e[i] == 0) ++i;
    e.set(i, e[i] - 1);
    parent[j] = {i, graded_lex_rank(e)};
  }

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd mono(static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd x(n);
  std::int64_t accepted = 0;
  std::uint64_t attempts = 0;
  while (accepted < sample_count) {
    std::uint64_t state = seed ^ (attempts * 0xD1B54A32D192ED03ull);
    splitmix64(state);
    ++attempts;
    for (int i = 0; i < n; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unit_double(state);
    if (K.contains(x)) {
      mono[0] = 1.0;
      for (std::size_t j = 1; j < basis.size(); ++j) {
        mono[static_cast<Eigen::Index>(j)] =
            x[parent[j].first] * mono[static_cast<Eigen::Index>(parent[j].second)];
      }
      sum += mono;
      ++accepted;
    }
    if (attempts >= 100000 && static_cast<double>(accepted) < 1e-4 * static_cast<double>(attempts)) {
      throw SamplingFailure("rejection sampling acceptance rate below 1e-4 (" +
                            std::to_string(accepted) + " of " + std::to_string(attempts) + ")");
    }
  }
  return Tms(n, d, sum / static_cast<double>(accepted));
}

ReferenceSpec default_reference(const SemialgebraicSet& K) {
  ReferenceSpec spec;
  if (K.num_generators() == 0) {
    spec.kind = ReferenceKind::gaussian;
  } else if (K.interior_witness()) {
    spec.kind = ReferenceKind::ball_uniform;
    spec.center = K.interior_witness()->center;
    spec.radius = K.interior_witness()->radius;
  } else if (auto box = K.as_box()) {
    spec.kind = ReferenceKind::box_uniform;
    spec.lo = box->first;
    spec.hi = box->second;
  } else {
    spec.kind = ReferenceKind::monte_carlo;
  }
  return spec;
}

Tms reference_moments(const ReferenceSpec& spec, const SemialgebraicSet& K, int d) {
  const int n = K.num_vars();
  switch (spec.kind) {
    case ReferenceKind::ball_uniform: {
      const Eigen::VectorXd c = spec.center.size() ? spec.center : Eigen::VectorXd::Zero(n);
      return ball_uniform_moments(n, d, c, spec.radius);
    }
    case ReferenceKind::box_uniform: return box_uniform_moments(n, d, spec.lo, spec.hi);
    case ReferenceKind::gaussian: return gaussian_moments(n, d);
    case ReferenceKind::monte_carlo:
      if (spec.moments && spec.moments->degree() >= d) return truncate(*spec.moments, d);
      return monte_carlo_moments(K, d, spec.sample_count, spec.seed);
    case ReferenceKind::explicit_tms:
      if (!spec.moments) throw ValidationError("explicit reference without moments");
      if (spec.moments->num_vars() != n) throw ValidationError("reference has the wrong dimension");
      return truncate(*spec.moments, d);
  }
  throw ValidationError("bad reference kind");
}

}  // namespace tkmp
