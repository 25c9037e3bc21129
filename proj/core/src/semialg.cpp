#include "tkmp/semialg.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "tkmp/errors.hpp"

namespace tkmp {

SemialgebraicSet::SemialgebraicSet(int n, std::vector<Polynomial> generators) : n_(n) {
  for (auto& g : generators) add_inequality(std::move(g));
}

void SemialgebraicSet::add_inequality(Polynomial g, std::string label) {
  if (g.num_vars() != n_) throw ValidationError("generator has the wrong number of variables");
  if (label.empty()) label = g.to_string() + " >= 0";
  generators_.push_back(std::move(g));
  labels_.push_back(std::move(label));
}

void SemialgebraicSet::add_equality(const Polynomial& h, const std::string& label) {
  const std::string base = label.empty() ? h.to_string() + " = 0" : label;
  add_inequality(h, base + " (+)");
  add_inequality(-h, base + " (-)");
}

void SemialgebraicSet::set_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("radius must be positive and finite");
  radius_ = r;
}

void SemialgebraicSet::set_interior_witness(Ball b) {
  if (b.center.size() != n_) throw ValidationError("witness center has the wrong dimension");
  if (!(b.radius > 0.0)) throw ValidationError("witness radius must be positive");
  witness_ = std::move(b);
}

double SemialgebraicSet::min_generator_value(const Eigen::VectorXd& x) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& g : generators_) m = std::min(m, g.evaluate(x));
  return m;
}

bool SemialgebraicSet::contains(const Eigen::VectorXd& x, double tol) const {
  return min_generator_value(x) >= -tol;
}

std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> SemialgebraicSet::as_box() const {
  if (generators_.size() != static_cast<std::size_t>(n_) || n_ == 0) return std::nullopt;
  Eigen::VectorXd lo(n_), hi(n_);
  std::vector<bool> seen(static_cast<std::size_t>(n_), false);
  for (const auto& g : generators_) {
    // (hi - x)(x - lo) = -x^2 + (lo + hi) x - lo hi
    if (g.degree() != 2) return std::nullopt;
    int var = -1;
    double a = 0, b = 0, c = 0;
    for (const auto& [e, coef] : g.terms()) {
      if (e.degree() == 0) {
        c = coef;
        continue;
      }
      int v = -1;
      for (int i = 0; i < n_; ++i) {
        if (e[i] != 0) {
          if (v >= 0) return std::nullopt;
          v = i;
        }
      }
      if (var >= 0 && v != var) return std::nullopt;
      var = v;
      if (e.degree() == 2) a = coef;
      else b = coef;
    }
    if (var < 0 || seen[static_cast<std::size_t>(var)] || !(a < 0)) return std::nullopt;
    // normalise to -x^2 + s x - p
    const double s = b / -a, p = c / a;
    const double disc = s * s - 4 * p;
    if (!(disc > 0)) return std::nullopt;
    lo[var] = (s - std::sqrt(disc)) / 2;
    hi[var] = (s + std::sqrt(disc)) / 2;
    seen[static_cast<std::size_t>(var)] = true;
  }
  return std::make_pair(lo, hi);
}

HalfDegrees half_degrees(const SemialgebraicSet& K) {
  HalfDegrees h;
  for (const auto& g : K.generators()) {
    h.d_i.push_back(half_degree(g));
    h.d_g = std::max(h.d_g, h.d_i.back());
  }
  return h;
}

GeneratorFamily quadratic_module_family(const SemialgebraicSet& K) {
  GeneratorFamily f;
  const int m = K.num_generators();
  f.members.push_back({std::vector<int>(static_cast<std::size_t>(m), 0),
                       Polynomial::constant(K.num_vars(), 1.0), 0});
  for (int i = 0; i < m; ++i) {
    std::vector<int> nu(static_cast<std::size_t>(m), 0);
    nu[static_cast<std::size_t>(i)] = 1;
    const auto& g = K.generators()[static_cast<std::size_t>(i)];
    f.members.push_back({nu, g, half_degree(g)});
  }
  return f;
}

GeneratorFamily preordering_family(const SemialgebraicSet& K, int cap) {
  const int m = K.num_generators();
  if (m > cap) {
    throw CombinatorialBlowup("preordering with " + std::to_string(m) + " generators needs 2^" +
                              std::to_string(m) + " blocks (cap " + std::to_string(cap) +
                              "); use quadratic-module mode");
  }
  GeneratorFamily f;
  const std::uint32_t count = 1u << m;
  // Order by popcount so g_0 and the single generators come first, matching
  // the quadratic-module family.
  for (int pc = 0; pc <= m; ++pc) {
    for (std::uint32_t mask = 0; mask < count; ++mask) {
      if (std::popcount(mask) != pc) continue;
      std::vector<int> nu(static_cast<std::size_t>(m), 0);
      Polynomial g = Polynomial::constant(K.num_vars(), 1.0);
      for (int i = 0; i < m; ++i) {
        if (mask & (1u << i)) {
          nu[static_cast<std::size_t>(i)] = 1;
          g = g * K.generators()[static_cast<std::size_t>(i)];
        }
      }
      const int hd = half_degree(g);
      f.members.push_back({std::move(nu), std::move(g), hd});
    }
  }
  return f;
}

GeneratorFamily generator_family(const SemialgebraicSet& K, FamilyMode mode, int cap) {
  return mode == FamilyMode::preordering ? preordering_family(K, cap) : quadratic_module_family(K);
}

const char* to_string(FamilyMode mode) {
  return mode == FamilyMode::preordering ? "preordering" : "quadratic_module";
}

FamilyMode family_mode_from_string(const std::string& s) {
  if (s == "qm" || s == "quadratic_module") return FamilyMode::quadratic_module;
  if (s == "pre" || s == "preordering") return FamilyMode::preordering;
  throw ValidationError("unknown mode '" + s + "'");
}

WitnessCheck spot_check_witness(const SemialgebraicSet& K, int count, double tol, std::uint64_t seed) {
  WitnessCheck r;
  if (!K.interior_witness()) return r;
  const Ball& b = *K.interior_witness();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  r.min_value = std::numeric_limits<double>::infinity();
  const int n = K.num_vars();
  for (int s = 0; s < count; ++s) {
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = normal(rng);
    const double nz = z.norm();
    if (nz == 0) continue;
    const Eigen::VectorXd x = b.center + b.radius * z / nz;
    r.min_value = std::min(r.min_value, K.min_generator_value(x));
  }
  r.ok = r.min_value >= -tol;
  return r;
}

}  // namespace tkmp
