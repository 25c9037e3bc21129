#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tkmp/flatatoms.hpp"
#include "tkmp/moments.hpp"
#include "tkmp/refmeasures.hpp"
#include "tkmp/relax.hpp"
#include "tkmp/sdp.hpp"
#include "tkmp/semialg.hpp"

namespace tkmp {

struct PipelineOptions {
  SdpOptions sdp{1e-9, 1e-9, 200, 0.98, false};
  RankOptions rank{};
  ExtractionOptions extraction{};
  // |lambda| <= lambda_tol (1 + |y|_inf) counts as zero
  double lambda_tol = 1e-6;
  // accept a stalled solve whose recomputed residuals are below this
  double inaccurate_tol = 1e-7;
  double verify_tol = 1e-5;
  bool scale = true;
  int preordering_cap = kDefaultPreorderingCap;
};

struct LambdaStep {
  int k = 0;
  double lambda = 0.0;  // in the units of y
  SdpStatus status = SdpStatus::numerical_failure;
  KktResiduals kkt;
  int iterations = 0;
  double seconds = 0.0;
  std::optional<int> flat_t;
  std::string note;
};

// sum_nu sigma_nu g_nu with sigma_nu = [x]^T G_nu [x].
struct NonexistenceCertificate {
  int k = 0;
  FamilyMode mode = FamilyMode::quadratic_module;
  Polynomial p;  // degree <= d
  std::vector<std::vector<int>> labels;
  std::vector<Polynomial> multipliers;  // g_nu
  std::vector<int> orders;              // size of [x] is C(n + order, order)
  std::vector<Eigen::MatrixXd> grams;
  double value_y = 0.0;   // <p, y>
  double value_xi = 0.0;  // <p, xi>
  double identity_residual = 0.0;
  double min_gram_eigenvalue = 0.0;
};

// Kernel of M_{d0}(y) and the polynomials it spans.
struct KernelReport {
  int d0 = 0;
  int rank = 0;
  int size = 0;
  std::vector<Polynomial> kernel;
  bool nontrivial() const { return !kernel.empty(); }
};

enum class VerdictKind { measure_found, no_measure, inconclusive };
const char* to_string(VerdictKind k);

struct MembershipVerdict {
  VerdictKind kind = VerdictKind::inconclusive;
  int k = 0;
  FamilyMode mode = FamilyMode::quadratic_module;
  // measure_found: y = measure + lambda * xi on degrees <= d
  AtomicMeasure measure;
  double lambda = 0.0;
  int t = 0;
  MeasureCheck check;
  ReferenceSpec reference;
  Tms xi;  // reference moments of degree d
  std::optional<NonexistenceCertificate> certificate;
  std::string trend;
  std::vector<LambdaStep> history;
  KernelReport kernel;
  Scaling scaling;
  std::vector<std::string> notes;
};

MembershipVerdict check_membership(const Tms& y, const SemialgebraicSet& K,
                                   const std::optional<ReferenceSpec>& xi_spec, FamilyMode mode,
                                   int k_max, const PipelineOptions& options = {},
                                   std::optional<int> k_min = std::nullopt);

// From the dual matrices of a lambda (or feasibility) relaxation built on
// scaled data; the result is in the original coordinates.
NonexistenceCertificate extract_certificate(const Relaxation& relaxation,
                                            const std::vector<Eigen::MatrixXd>& duals,
                                            const Tms& y, const Tms& xi,
                                            const SemialgebraicSet& K_original, FamilyMode mode,
                                            const Scaling& scaling);

KernelReport kernel_report(const Tms& y, const RankOptions& opt = {});

enum class ObjectiveKind { seeded_random, all_ones, trace, user_vector };
const char* to_string(ObjectiveKind k);
ObjectiveKind objective_kind_from_string(const std::string& s);

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::seeded_random;
  std::uint64_t seed = 0;
  Eigen::VectorXd vector;  // user_vector, graded lex over degrees <= 2k
};

// c over M_{n,2k}; the seeded stream is drawn in graded lex order, so the
// vector for k is a prefix of the vector for k + 1.
Eigen::VectorXd objective_vector(const ObjectiveSpec& spec, int n, int k);
// PSD C_k for the R^n search; trace gives I, the others a consistent
// lower-triangular factorisation I + G G^T.
Eigen::MatrixXd objective_matrix(const ObjectiveSpec& spec, int n, int k);

enum class FlatSearchKind { measure_found, infeasible, exhausted };
const char* to_string(FlatSearchKind k);

struct FlatSearchStep {
  int k = 0;
  SdpStatus status = SdpStatus::numerical_failure;
  KktResiduals kkt;
  int iterations = 0;
  double seconds = 0.0;
  std::vector<int> ranks;  // rank M_t(w) for t = 0..k
  std::optional<int> flat_t;
  std::string note;
};

struct FlatSearchResult {
  FlatSearchKind kind = FlatSearchKind::exhausted;
  int k = 0;
  int t = 0;
  AtomicMeasure measure;
  MeasureCheck check;
  ObjectiveSpec objective;
  double objective_value = 0.0;
  bool rn = false;
  std::vector<FlatSearchStep> history;
  Scaling scaling;
  std::vector<std::string> notes;
};

struct FlatSearchOptions {
  PipelineOptions pipeline{};
  std::optional<int> k_min;  // default d
  std::optional<int> k_max;  // default d + 3
};

// K with no generators and rn = true selects the R^n problem.
FlatSearchResult find_measure(const Tms& y, const SemialgebraicSet& K, bool rn,
                              const ObjectiveSpec& objective, const FlatSearchOptions& options = {});

enum class BenchKind { box, gaussian_rn };
BenchKind bench_kind_from_string(const std::string& s);

struct BenchRow {
  int instance = 0;
  bool success = false;
  int k = 0;
  int atoms = 0;
  double seconds = 0.0;
  std::string outcome;
};

struct BenchInstance {
  Tms y;
  SemialgebraicSet K;
  std::vector<Eigen::VectorXd> points;
  std::vector<double> weights;
};

BenchInstance make_bench_instance(int n, int d, BenchKind kind, std::uint64_t seed, int instance);

std::vector<BenchRow> random_benchmark(int n, int d, BenchKind kind, int instances,
                                       std::uint64_t seed, const FlatSearchOptions& options = {});

}  // namespace tkmp
