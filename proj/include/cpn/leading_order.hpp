#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cpn/precision.hpp"
#include "cpn/random.hpp"
#include "cpn/tolerances.hpp"

namespace cpn {

/// Leading Laurent coefficients w_i^0, wbar_i^0 at the base point.
struct LeadingData {
  int n = 2;
  std::vector<cplx> w0;
  std::vector<cplx> wbar0;

  /// Checks sizes and that every leading coefficient is nonzero.
  void validate() const;

  /// S = sum_l wbar_l^0 w_l^0.
  cplx sum() const;

  /// sum_l |wbar_l^0 w_l^0|, the scale for degeneracy tests.
  double sum_abs() const;
};

/// Random leading data: every w_i^0, wbar_i^0 uniform in the annulus 0.2 <= |z| <= 1.
LeadingData random_leading_data(int n, Rng& rng);

struct ExponentSystem {
  Eigen::MatrixXcd matrix;  // B_ij = 2 wbar_j^0 w_j^0 - delta_ij S
  Eigen::VectorXcd rhs;     // c_i = S
};

ExponentSystem build_exponent_system(const LeadingData& data);

struct ExponentSolution {
  Eigen::VectorXcd alpha;
  Eigen::VectorXcd beta;
  bool unique = false;
  double residual = 0.0;  // max relative residual of both linear solves
  cplx determinant;
};

/// Solves both lowest-order exponent systems.  Throws DegeneracyError when S vanishes
/// relative to sum |wbar_l^0 w_l^0|.
ExponentSolution solve_exponents(const LeadingData& data,
                                 const Tolerances& tol = default_tolerances());

struct DeterminantCheck {
  cplx generic;          // LU determinant of B
  cplx formula;          // (-1)^N S^(N-1)
  cplx printed;          // -S^(N-1)
  double relative_error = 0.0;  // |generic - formula| / |formula|
  bool match = false;
  bool printed_matches = false;  // only for odd N
};

DeterminantCheck det_closed_form_check(const LeadingData& data,
                                       const Tolerances& tol = default_tolerances());

} // namespace cpn
