#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tkmp/polynomial.hpp"

namespace tkmp {

struct Ball {
  Eigen::VectorXd center;
  double radius = 0.0;
};

// K = {x : g_i(x) >= 0}. The presentation, not the set, is the input: two
// presentations of one set give different hierarchies.
class SemialgebraicSet {
 public:
  SemialgebraicSet() = default;
  explicit SemialgebraicSet(int n) : n_(n) {}
  SemialgebraicSet(int n, std::vector<Polynomial> generators);

  static SemialgebraicSet whole_space(int n) { return SemialgebraicSet(n); }

  int num_vars() const noexcept { return n_; }
  int num_generators() const noexcept { return static_cast<int>(generators_.size()); }
  const std::vector<Polynomial>& generators() const noexcept { return generators_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  void add_inequality(Polynomial g, std::string label = {});
  // h = 0 becomes the pair h >= 0, -h >= 0.
  void add_equality(const Polynomial& h, const std::string& label = {});

  const std::optional<double>& radius() const noexcept { return radius_; }
  void set_radius(double r);
  const std::optional<Ball>& interior_witness() const noexcept { return witness_; }
  void set_interior_witness(Ball b);

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  double min_generator_value(const Eigen::VectorXd& x) const;  // +inf when m = 0

  // Box detection: every generator is 1 - x_i^2 style (hi - x_i)(x_i - lo);
  // returns per-coordinate bounds when K is exactly such a box.
  std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> as_box() const;

 private:
  int n_ = 0;
  std::vector<Polynomial> generators_;
  std::vector<std::string> labels_;
  std::optional<double> radius_;
  std::optional<Ball> witness_;
};

struct HalfDegrees {
  std::vector<int> d_i;  // ceil(deg g_i / 2)
  int d_g = 1;           // max(1, max_i d_i)
};

HalfDegrees half_degrees(const SemialgebraicSet& K);

struct FamilyMember {
  std::vector<int> label;  // nu in {0,1}^m; all zeros for g_0 = 1
  Polynomial g;
  int half_degree = 0;
};

struct GeneratorFamily {
  std::vector<FamilyMember> members;
  std::size_t size() const noexcept { return members.size(); }
};

enum class FamilyMode { quadratic_module, preordering };

inline constexpr int kDefaultPreorderingCap = 12;

GeneratorFamily quadratic_module_family(const SemialgebraicSet& K);
GeneratorFamily preordering_family(const SemialgebraicSet& K, int cap = kDefaultPreorderingCap);
GeneratorFamily generator_family(const SemialgebraicSet& K, FamilyMode mode,
                                 int cap = kDefaultPreorderingCap);

const char* to_string(FamilyMode mode);
FamilyMode family_mode_from_string(const std::string& s);

// Samples `count` points on the boundary of the witness ball and checks
// g_i >= -tol at each. Returns the smallest generator value seen.
struct WitnessCheck {
  bool ok = true;
  double min_value = 0.0;
};
WitnessCheck spot_check_witness(const SemialgebraicSet& K, int count = 1000, double tol = 1e-9,
                                std::uint64_t seed = 0);

}  // namespace tkmp
