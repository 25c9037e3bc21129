#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tkmp/moments.hpp"
#include "tkmp/semialg.hpp"

namespace tkmp {

inline constexpr double kDefaultRankThreshold = 1e-6;

struct RankOptions {
  double tau = kDefaultRankThreshold;
  bool relative = false;  // threshold tau * max(1, sigma_max)
};

struct RankReport {
  std::string label;
  Eigen::VectorXd singular_values;  // descending
  int rank = 0;
  double threshold = 0.0;
};

RankReport numerical_rank(const Eigen::MatrixXd& M, const RankOptions& opt = {},
                          std::string label = {});

struct FlatnessReport {
  bool flat = false;
  RankReport lower;  // M_{s - d_g}
  RankReport upper;  // M_s
};

// rank M_{s-d_g}(w) == rank M_s(w) for w of degree 2s.
FlatnessReport flatness(const Tms& w, int d_g, const RankOptions& opt = {});
bool is_flat(const Tms& w, int d_g, const RankOptions& opt = {});

struct FlatTruncation {
  int t = 0;
  FlatnessReport report;
};

inline constexpr double kLocalizingPsdTol = 1e-7;

// First even t >= max(d, 2 d_g) with w|_t flat and every localizing matrix of
// w|_t positive semidefinite to -1e-7 (1 + |M|).
std::optional<FlatTruncation> find_flat_truncation(const Tms& w, int d, int d_g,
                                                   const SemialgebraicSet& K,
                                                   const RankOptions& opt = {});

struct AtomicMeasure {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> weights;
  double residual = 0.0;  // max |sum a_j u_j^alpha - w_alpha|
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return points.size(); }
  Tms moments(int d) const;
};

struct ExtractionOptions {
  RankOptions rank{};
  double pivot_tol = 1e-8;
  double cluster_tol = 1e-7;
  double coordinate_tol = 1e-6;
  double imag_tol = 1e-6;
  double weight_tol = 1e-8;
  double residual_tol = 1e-6;  // relative to 1 + |w|_inf
  std::uint64_t seed = 0x5eed;
};

// Atoms of the unique measure of a flat w (degree 2s) through multiplication
// matrices in an echelon basis. Throws ExtractionFailure on any degeneracy.
AtomicMeasure extract_atoms(const Tms& w, int d_g = 1, const ExtractionOptions& opt = {});

struct MeasureCheck {
  double moment_residual = 0.0;
  double min_generator = 0.0;  // +inf when K has no generators or mu is empty
  bool pass = false;
};

MeasureCheck verify_measure(const Tms& y, const AtomicMeasure& mu, const SemialgebraicSet& K,
                            double tol);

}  // namespace tkmp
