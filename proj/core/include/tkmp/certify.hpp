#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "tkmp/flatatoms.hpp"
#include "tkmp/moments.hpp"
#include "tkmp/pipeline.hpp"
#include "tkmp/semialg.hpp"

namespace tkmp {

// Offline checks that use only the records and polynomial arithmetic; none of
// the relaxation or solver code is involved.
struct CertificateCheck {
  bool pass = false;
  double value_y = 0.0;
  double value_xi = 0.0;
  double identity_residual = 0.0;  // |p - sum sigma_nu g_nu|_inf
  double min_gram_eigenvalue = 0.0;
  std::vector<std::string> failures;
};

struct CertificateTolerances {
  double gram_psd = 1e-8;      // min eig >= -gram_psd (1 + |G|)
  double identity = 1e-6;      // residual <= identity (1 + |p|_inf)
  double value = 1e-8;         // <p, y> <= -value
  double normalization = 1e-6; // |<p, xi> - 1|
};

// Multipliers are checked against products of K's generators by label.
CertificateCheck verify_certificate(const NonexistenceCertificate& cert, const Tms& y,
                                    const Tms& xi, const SemialgebraicSet& K,
                                    const CertificateTolerances& tol = {});

struct MeasureRecordCheck {
  bool pass = false;
  double moment_residual = 0.0;  // max |sum a_j u_j^alpha + lambda xi_alpha - y_alpha|
  double relative_residual = 0.0;  // moment_residual / (1 + |y|_inf)
  double min_generator = 0.0;
  double min_weight = 0.0;
  std::vector<std::string> failures;
};

// y = sum a_j [u_j]_d + lambda xi (relative tolerance), u_j in K, a_j > 0,
// lambda >= -tol.
MeasureRecordCheck verify_measure_record(const Tms& y, const AtomicMeasure& mu, double lambda,
                                         const Tms* xi, const SemialgebraicSet& K, double tol);

}  // namespace tkmp
