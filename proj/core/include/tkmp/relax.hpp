#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tkmp/moments.hpp"
#include "tkmp/sdp.hpp"
#include "tkmp/semialg.hpp"

namespace tkmp {

enum class RelaxationKind {
  lambda_preordering,
  lambda_quadratic_module,
  feasibility,
  shift_rn,
  flat_search_compact,
  flat_search_rn,
};

const char* to_string(RelaxationKind kind);

// Variable layout of a relaxation of order k: x_1 = lambda (or eta) when
// present, then the free moments w_alpha with d < |alpha| <= 2k in graded lex
// order. Moments with |alpha| <= d are pinned to y - lambda xi (or y).
struct MomentLmi {
  int n = 0;
  int d = 0;
  int k = 0;
  bool has_lambda = false;
  Tms y;
  Tms xi;  // degree d, only when has_lambda

  int num_pinned() const { return static_cast<int>(monomial_count(n, d)); }
  int num_free() const { return static_cast<int>(monomial_count(n, 2 * k)) - num_pinned(); }
  int num_vars() const { return num_free() + (has_lambda ? 1 : 0); }
  // SDP variable (1-based) of the moment at graded lex position `source`;
  // 0 when pinned.
  int var_of(int source) const;
};

struct Relaxation {
  RelaxationKind kind{};
  MomentLmi layout;
  SdpProblem sdp;
  // Family polynomial behind each block, with its order k - d_nu. The flat
  // search appends rho as the last block.
  std::vector<Polynomial> block_generator;
  std::vector<int> block_order;
  // Only for flat searches: constant part of c^T w from pinned moments, so
  // that c^T w = block objective + offset.
  double objective_offset = 0.0;
  Eigen::VectorXd objective_tms;  // c over M_{n,2k}, when applicable
};

struct DecodedMoments {
  std::optional<double> lambda;
  Tms w;  // degree 2k
};

Relaxation build_lambda(const Tms& y, const Tms& xi, const SemialgebraicSet& K, int k,
                        FamilyMode mode, int preordering_cap = kDefaultPreorderingCap);
Relaxation build_feasibility(const Tms& y, const SemialgebraicSet& K, int k, FamilyMode mode,
                             int preordering_cap = kDefaultPreorderingCap);
Relaxation build_shift_rn(const Tms& y, const Tms& xi, int k);
double eta_star_direct(const Tms& y, const Tms& xi);

// minimize c^T w over the quadratic-module blocks plus M_{k-1}(rho * w),
// rho = R^2 - |x|^2. c is indexed by M_{n,2k} in graded lex order.
Relaxation build_flat_search(const Tms& y, const SemialgebraicSet& K, int k,
                             const Eigen::VectorXd& c);
// minimize <C, M_k(w)> subject to M_k(w) >= 0.
Relaxation build_flat_search_rn(const Tms& y, int k, const Eigen::MatrixXd& C);

DecodedMoments decode(const Relaxation& r, const Eigen::VectorXd& x);
Eigen::VectorXd encode(const Relaxation& r, std::optional<double> lambda, const Tms& w);

// Every PSD extension w of degree 2k whose M_{floor(d/2)} has p in its kernel
// also satisfies L_w(x^mu p) = 0 for |mu| <= k + max(0, k - 1 - deg p). The
// free moments (degree > d) of a numerical w are moved by the least-norm
// correction onto those relations; interior-point solutions only approach
// them at rate sqrt(mu).
Tms impose_kernel_relations(const Tms& w, const std::vector<Polynomial>& kernel, int d);

// c^T w for a flat search (including the pinned part).
double flat_objective(const Relaxation& r, const Tms& w);

// Upper bound on |w|_2 over feasible points of the compact flat search of
// order k with ball radius R: mass / (1 - R^2) for R < 1, otherwise via the
// pushforward onto radius 0.9.
double flat_search_norm_bound(double mass, double radius, int k);

// Coordinate and mass scaling: y_s(alpha) = y(alpha) / (mass * coord^|alpha|).
// A generator g becomes g(coord * z) normalised to unit max coefficient.
struct Scaling {
  double coord = 1.0;
  double mass = 1.0;
};

Scaling choose_scaling(const Tms& y);
Tms scale_tms(const Tms& y, const Scaling& s, bool with_mass = true);
Tms unscale_tms(const Tms& y, const Scaling& s, bool with_mass = true);
Polynomial scale_polynomial(const Polynomial& g, double coord);
SemialgebraicSet scale_set(const SemialgebraicSet& K, double coord);

}  // namespace tkmp
