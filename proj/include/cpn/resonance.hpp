#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpn/leading_order.hpp"
#include "cpn/precision.hpp"
#include "cpn/tolerances.hpp"

namespace cpn {

/// Order-k operator on (w^k, wbar^k): L(k) (+) Lbar(k) with
///   L_ij    = phi' k [(k-1) delta_ij S + 2 w_i^0 wbar_j^0]
///   Lbar_ij = phi' k [(k-1) delta_ij S + 2 wbar_i^0 w_j^0].
/// The substituted residual at order Phi^(k-5) equals -(L (+) Lbar) applied to the unknowns.
Eigen::MatrixXcd build_resonance_matrix(cplx k, const LeadingData& data, cplx phi_prime);

/// Same operator recovered by a finite-eps variation of the residual series about the pure
/// leading term w_i = w_i^0 / Phi (constant data, phi' constant).  Integer k only.
Eigen::MatrixXcd perturbation_operator(int k, const LeadingData& data, cplx phi_prime,
                                       double eps = 1e-6);

/// Determinant of the direct sum as a polynomial in k, from samples at integer nodes.
struct ResonancePolynomial {
  int n = 2;
  std::vector<int> nodes;
  std::vector<cplx> samples;
  std::vector<cplx> coeffs;   // monic, ascending powers of k
  cplx leading;               // leading coefficient removed by the normalisation
  int holdout_node = 0;
  double holdout_error = 0.0; // relative
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  cplx evaluate(cplx k) const;  // includes the leading coefficient
};

/// Samples det at k = -2..4N-6, interpolates (Newton form), checks k = 4N-5.
/// Throws ConditioningError if the held-out sample disagrees beyond tolerance.
ResonancePolynomial resonance_polynomial(const LeadingData& data, cplx phi_prime,
                                         const Tolerances& tol = default_tolerances());

/// Ascending coefficients of [phi'^(N-1) S^(N-1) k^(N-1) (k-1)^(N-2) (k+1)]^2.
std::vector<cplx> closed_form_resonance_coefficients(const LeadingData& data, cplx phi_prime);

struct RootCluster {
  cplx centroid;
  int multiplicity = 0;
  double spread = 0.0;            // max distance of a member eigenvalue from the centroid
  std::optional<int> integer;     // set when the centroid snaps to an integer
  double snap_residual = 0.0;     // |centroid - nearest integer|
};

struct ResonanceReport {
  int n = 2;
  std::vector<int> sample_nodes;
  std::vector<cplx> det_samples;
  std::vector<cplx> poly_coeffs;
  cplx leading;
  std::vector<RootCluster> roots;
  std::map<int, int> observed;  // integer root -> multiplicity
  std::map<int, int> expected;  // {-1: 2, 0: 2(N-1), 1: 2(N-2)}
  int total_multiplicity = 0;
  double max_snap_residual = 0.0;
  bool match = false;
  std::vector<std::string> notes;
};

std::map<int, int> expected_resonances(int n);

/// Companion-matrix roots, clustered and snapped to integers, compared with the expected
/// pattern.  A root that fails to snap produces a mismatch, not an exception.
ResonanceReport find_resonances(const ResonancePolynomial& poly,
                                const Tolerances& tol = default_tolerances());

/// Monic ascending coefficients -> eigenvalues of the companion matrix.
std::vector<cplx> polynomial_roots(const std::vector<cplx>& monic_ascending);

} // namespace cpn
