#pragma once

namespace cpn {

// Every numerical threshold used by the checks lives here.
struct Tolerances {
  double relative = 1e-9;            // global relative tolerance (series consistency)
  double degeneracy = 1e-12;         // |S| below this times sum |w̄_l w_l| is degenerate
  double exponent_residual = 1e-11;  // linear-solve residual of the exponent system
  double determinant_match = 1e-10;  // generic vs closed-form determinant
  double interpolation_holdout = 1e-8;
  double polynomial_match = 1e-8;    // interpolated vs closed-form coefficients
  double root_snap = 1e-6;           // cluster centroid to nearest integer
  double root_cluster_link = 0.25;   // single-linkage distance for eigenvalue clusters
  double rank_threshold = 1e-10;     // relative pivot threshold of the rank-revealing QR
  double matrix_identity = 1e-10;    // assembled order-k matrix vs resonance matrix
  double k0_rhs = 1e-12;             // relative size of the k = 0 right-hand side
  double saturation = 1e-14;         // residuals below this everywhere cannot be fitted
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

} // namespace cpn
