#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "tkmp/moments.hpp"
#include "tkmp/semialg.hpp"

namespace tkmp {

enum class ReferenceKind { ball_uniform, box_uniform, gaussian, monte_carlo, explicit_tms };

struct ReferenceSpec {
  ReferenceKind kind = ReferenceKind::ball_uniform;
  Eigen::VectorXd center;  // ball
  double radius = 1.0;     // ball
  Eigen::VectorXd lo, hi;  // box
  std::int64_t sample_count = 1000000;
  std::uint64_t seed = 0;
  std::optional<Tms> moments;  // explicit_tms, or frozen Monte Carlo output
};

const char* to_string(ReferenceKind kind);
ReferenceKind reference_kind_from_string(const std::string& s);

// Uniform probability measure on B(center, radius).
Tms ball_uniform_moments(int n, int d, const Eigen::VectorXd& center, double radius);
Tms ball_uniform_moments(int n, int d);  // unit ball at the origin

// Standard Gaussian with identity covariance.
Tms gaussian_moments(int n, int d);

// Uniform probability measure on the box [lo, hi].
Tms box_uniform_moments(int n, int d, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

inline constexpr std::int64_t kMinMonteCarloSamples = 100000;

// Empirical moments of `sample_count` points drawn uniformly from K by
// rejection from its bounding box (K.radius() required). Sample j uses its
// own splitmix64 stream keyed by (seed, j), so the result does not depend on
// evaluation order.
Tms monte_carlo_moments(const SemialgebraicSet& K, int d, std::int64_t sample_count,
                        std::uint64_t seed);

// Moments of x = center + scale * z given the moments of z.
Tms affine_pushforward(const Tms& z, const Eigen::VectorXd& center, double scale);

// Witness ball first, then an exact box, then Monte Carlo; for K = R^n the
// standard Gaussian.
ReferenceSpec default_reference(const SemialgebraicSet& K);

Tms reference_moments(const ReferenceSpec& spec, const SemialgebraicSet& K, int d);

}  // namespace tkmp
