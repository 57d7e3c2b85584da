#include "cpn/leading_order.hpp"

#include <cmath>
#include <string>

#include "cpn/errors.hpp"

namespace cpn {

void LeadingData::validate() const {
  if (n < 2) throw ConfigError("N must be at least 2");
  const auto count = static_cast<std::size_t>(n - 1);
  if (w0.size() != count || wbar0.size() != count) {
    throw ConfigError("leading data needs N-1 values of w0 and of wbar0");
  }
  for (std::size_t l = 0; l < count; ++l) {
    if (w0[l] == cplx{} || wbar0[l] == cplx{}) {
      throw ConfigError("leading coefficient " + std::to_string(l + 1) + " vanishes");
    }
  }
}

cplx LeadingData::sum() const {
  cplx s{};
  for (std::size_t l = 0; l < w0.size(); ++l) s += wbar0[l] * w0[l];
  return s;
}

double LeadingData::sum_abs() const {
  double s = 0.0;
  for (std::size_t l = 0; l < w0.size(); ++l) s += std::abs(wbar0[l] * w0[l]);
  return s;
}

LeadingData random_leading_data(int n, Rng& rng) {
  if (n < 2) throw ConfigError("N must be at least 2");
  LeadingData d{n, {}, {}};
  for (int i = 0; i < n - 1; ++i) d.w0.push_back(random_in_annulus(rng, 0.2, 1.0));
  for (int i = 0; i < n - 1; ++i) d.wbar0.push_back(random_in_annulus(rng, 0.2, 1.0));
  return d;
}

ExponentSystem build_exponent_system(const LeadingData& data) {
  data.validate();
  const int m = data.n - 1;
  const cplx s = data.sum();
  ExponentSystem sys{Eigen::MatrixXcd(m, m), Eigen::VectorXcd::Constant(m, s)};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      sys.matrix(i, j) = 2.0 * data.wbar0[j] * data.w0[j] - (i == j ? s : cplx{});
    }
  }
  return sys;
}

namespace {

double relative_residual(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& x,
                         const Eigen::VectorXcd& b) {
  const double scale = a.norm() * x.norm() + b.norm();
  return scale > 0.0 ? (a * x - b).norm() / scale : 0.0;
}

} // namespace

ExponentSolution solve_exponents(const LeadingData& data, const Tolerances& tol) {
  data.validate();
  const cplx s = data.sum();
  const double scale = data.sum_abs();
  if (std::abs(s) < tol.degeneracy * scale) {
    throw DegeneracyError("sum of wbar_l^0 w_l^0 vanishes; the exponent system is singular");
  }
  // The barred system has the same matrix: wbar_j^0 w_j^0 is symmetric under the exchange.
  const auto sys = build_exponent_system(data);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.matrix);
  ExponentSolution out;
  out.alpha = lu.solve(sys.rhs);
  out.beta = lu.solve(sys.rhs);
  out.determinant = lu.determinant();
  out.residual = std::max(relative_residual(sys.matrix, out.alpha, sys.rhs),
                          relative_residual(sys.matrix, out.beta, sys.rhs));
  out.unique = std::abs(out.determinant) > tol.degeneracy * std::pow(scale, data.n - 1);
  return out;
}

DeterminantCheck det_closed_form_check(const LeadingData& data, const Tolerances& tol) {
  const auto sys = build_exponent_system(data);
  const cplx s = data.sum();
  DeterminantCheck out;
  out.generic = sys.matrix.partialPivLu().determinant();
  const cplx power = std::pow(s, data.n - 1);
  out.formula = (data.n % 2 == 0 ? 1.0 : -1.0) * power;
  out.printed = -power;
  const double denom = std::abs(out.formula);
  out.relative_error = denom > 0.0 ? std::abs(out.generic - out.formula) / denom
                                   : std::abs(out.generic - out.formula);
  out.match = out.relative_error <= tol.determinant_match;
  out.printed_matches = denom > 0.0 && std::abs(out.generic - out.printed) <= tol.determinant_match * denom;
  return out;
}

} // namespace cpn
