#include "cpn/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "cpn/errors.hpp"
#include "cpn/model.hpp"

namespace cpn {

Eigen::MatrixXcd build_resonance_matrix(cplx k, const LeadingData& data, cplx phi_prime) {
  data.validate();
  const int m = data.n - 1;
  const cplx s = data.sum();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const cplx diag = (i == j) ? (k - 1.0) * s : cplx{};
      out(i, j) = phi_prime * k * (diag + 2.0 * data.w0[i] * data.wbar0[j]);
      out(m + i, m + j) = phi_prime * k * (diag + 2.0 * data.wbar0[i] * data.w0[j]);
    }
  }
  return out;
}

Eigen::MatrixXcd perturbation_operator(int k, const LeadingData& data, cplx phi_prime, double eps) {
  data.validate();
  const int m = data.n - 1;
  const cplx xi0{};
  const int jet_order = 2;
  using J = Jet<double>;
  using S = LaurentSeries<double>;
  // phi(xi) = phi' xi: constant derivative, as in the leading-order balance.
  SingularityFunction<double> phi(J::variable(xi0, jet_order) * phi_prime);

  auto leading = [&](const std::vector<cplx>& v) {
    std::vector<S> out;
    for (const auto& c : v) out.push_back(S::monomial(-1, J::constant(xi0, jet_order, c)));
    return out;
  };
  FieldTuple<double> base{data.n, leading(data.w0), leading(data.wbar0)};
  const auto r0 = residual_series(base, phi);

  Eigen::MatrixXcd out(2 * m, 2 * m);
  for (int col = 0; col < 2 * m; ++col) {
    FieldTuple<double> f = base;
    auto& target = col < m ? f.w[col] : f.wbar[col - m];
    target = target + S::monomial(k - 1, J::constant(xi0, jet_order, cplx(eps)));
    const auto r = residual_series(f, phi);
    for (int row = 0; row < 2 * m; ++row) {
      const cplx diff = extract_order(r[row], k - 5)[0] - extract_order(r0[row], k - 5)[0];
      out(row, col) = -diff / eps;
    }
  }
  return out;
}

cplx ResonancePolynomial::evaluate(cplx k) const {
  cplx acc{};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * k + *it;
  return leading * acc;
}

namespace {

// Sampling and interpolation run in extended precision: integer nodes up to 4N-6 make the
// monomial coefficients far more sensitive than the samples themselves.
using QComplex = Complex<Quad>;
using QMatrix = Eigen::Matrix<QComplex, Eigen::Dynamic, Eigen::Dynamic>;

QComplex direct_determinant(int k, const LeadingData& data, cplx phi_prime) {
  const int m = data.n - 1;
  QComplex s{};
  for (int l = 0; l < m; ++l) s += from_double<Quad>(data.wbar0[l]) * from_double<Quad>(data.w0[l]);
  const QComplex q = from_double<Quad>(phi_prime);
  const QComplex kk(Quad(k), Quad(0));
  QMatrix a = QMatrix::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const QComplex diag = (i == j) ? (kk - Quad(1)) * s : QComplex{};
      const QComplex wi = from_double<Quad>(data.w0[i]), wbi = from_double<Quad>(data.wbar0[i]);
      const QComplex wj = from_double<Quad>(data.w0[j]), wbj = from_double<Quad>(data.wbar0[j]);
      a(i, j) = q * kk * (diag + Quad(2) * wi * wbj);
      a(m + i, m + j) = q * kk * (diag + Quad(2) * wbi * wj);
    }
  }
  return a.partialPivLu().determinant();
}

// Newton divided differences on the nodes, expanded to ascending monomial coefficients.
std::vector<QComplex> interpolate(const std::vector<int>& nodes, std::vector<QComplex> values) {
  const std::size_t n = nodes.size();
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = n - 1; i >= j; --i) {
      values[i] = (values[i] - values[i - 1]) / Quad(nodes[i] - nodes[i - j]);
    }
  }
  std::vector<QComplex> coeffs(n, QComplex{});
  coeffs[0] = values[n - 1];
  std::size_t deg = 0;
  for (std::size_t t = n - 1; t-- > 0;) {
    // coeffs <- coeffs * (k - x_t) + values[t]
    ++deg;
    const Quad x(nodes[t]);
    for (std::size_t p = deg; p > 0; --p) coeffs[p] = coeffs[p - 1] - x * coeffs[p];
    coeffs[0] = values[t] - x * coeffs[0];
  }
  return coeffs;
}

std::vector<cplx> poly_mul(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<cplx> out(a.size() + b.size() - 1, cplx{});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

} // namespace

ResonancePolynomial resonance_polynomial(const LeadingData& data, cplx phi_prime, const Tolerances& tol) {
  data.validate();
  const int degree = 4 * (data.n - 1);
  ResonancePolynomial out;
  out.n = data.n;
  std::vector<QComplex> samples;
  for (int k = -2; k <= degree - 2; ++k) {
    out.nodes.push_back(k);
    samples.push_back(direct_determinant(k, data, phi_prime));
    out.samples.push_back(to_double(samples.back()));
  }
  auto coeffs = interpolate(out.nodes, samples);
  const QComplex leading = coeffs.back();
  if (leading == QComplex{}) throw ConditioningError("interpolated determinant has zero leading term");
  out.leading = to_double(leading);
  out.coeffs.reserve(coeffs.size());
  for (const auto& c : coeffs) out.coeffs.push_back(to_double(c / leading));
  out.coeffs.back() = 1.0;

  out.holdout_node = degree - 1;  // 4N-5
  const QComplex direct = direct_determinant(out.holdout_node, data, phi_prime);
  QComplex interp{};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) interp = interp * Quad(out.holdout_node) + *it;
  out.holdout_error = real_to_double(abs(direct - interp) / abs(direct));
  if (!(out.holdout_error <= tol.interpolation_holdout)) {
    throw ConditioningError("interpolated determinant misses the held-out node k = " +
                            std::to_string(out.holdout_node) + " (relative error " +
                            std::to_string(out.holdout_error) + ")");
  }
  return out;
}

std::vector<cplx> closed_form_resonance_coefficients(const LeadingData& data, cplx phi_prime) {
  data.validate();
  const int m = data.n - 1;
  std::vector<cplx> p{std::pow(phi_prime * data.sum(), m)};
  for (int i = 0; i < m; ++i) p = poly_mul(p, {0.0, 1.0});       // k
  for (int i = 0; i < m - 1; ++i) p = poly_mul(p, {-1.0, 1.0});  // k - 1
  p = poly_mul(p, {1.0, 1.0});                                     // k + 1
  return poly_mul(p, p);
}

std::map<int, int> expected_resonances(int n) {
  std::map<int, int> out{{-1, 2}, {0, 2 * (n - 1)}};
  if (n > 2) out[1] = 2 * (n - 2);
  return out;
}

std::vector<cplx> polynomial_roots(const std::vector<cplx>& monic) {
  const int d = static_cast<int>(monic.size()) - 1;
  if (d < 1) return {};
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -monic[static_cast<std::size_t>(i)];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);
  if (es.info() != Eigen::Success) throw ConditioningError("companion eigenvalue iteration failed");
  std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + d);
  // Deterministic order: by real part, then imaginary part.
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

namespace {

// A root of multiplicity m is perturbed by O(eps^(1/m)) in the companion spectrum, but the
// centroid of its cluster is perturbed by O(eps) only; clusters are formed by single
// linkage and the centroid is what gets snapped.
std::vector<RootCluster> cluster_roots(const std::vector<cplx>& roots, const Tolerances& tol) {
  const std::size_t n = roots.size();
  std::vector<std::size_t> label(n);
  std::iota(label.begin(), label.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (label[i] != i) i = label[i] = label[label[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(roots[i] - roots[j]) < tol.root_cluster_link) label[find(i)] = find(j);

  std::map<std::size_t, std::vector<cplx>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(roots[i]);

  std::vector<RootCluster> out;
  for (const auto& [_, members] : groups) {
    RootCluster c;
    c.multiplicity = static_cast<int>(members.size());
    for (const auto& r : members) c.centroid += r;
    c.centroid /= double(members.size());
    for (const auto& r : members) c.spread = std::max(c.spread, std::abs(r - c.centroid));
    const double nearest = std::round(c.centroid.real());
    c.snap_residual = std::abs(c.centroid - cplx(nearest));
    if (c.snap_residual < tol.root_snap) c.integer = static_cast<int>(nearest);
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const RootCluster& a, const RootCluster& b) {
    return a.centroid.real() < b.centroid.real();
  });
  return out;
}

} // namespace

ResonanceReport find_resonances(const ResonancePolynomial& poly, const Tolerances& tol) {
  ResonanceReport rep;
  rep.n = poly.n;
  rep.sample_nodes = poly.nodes;
  rep.det_samples = poly.samples;
  rep.poly_coeffs = poly.coeffs;
  rep.leading = poly.leading;
  rep.expected = expected_resonances(poly.n);
  const int expected_degree = 4 * (poly.n - 1);
  if (poly.degree() != expected_degree) {
    rep.notes.push_back("degree " + std::to_string(poly.degree()) + " differs from 4(N-1) = " +
                        std::to_string(expected_degree));
  }
  rep.roots = cluster_roots(polynomial_roots(poly.coeffs), tol);
  bool all_integer = true;
  for (const auto& c : rep.roots) {
    rep.total_multiplicity += c.multiplicity;
    rep.max_snap_residual = std::max(rep.max_snap_residual, c.snap_residual);
    if (c.integer) {
      rep.observed[*c.integer] += c.multiplicity;
    } else {
      all_integer = false;
      rep.notes.push_back("root cluster near (" + std::to_string(c.centroid.real()) + ", " +
                          std::to_string(c.centroid.imag()) + ") does not snap to an integer");
    }
  }
  rep.match = all_integer && rep.observed == rep.expected && rep.total_multiplicity == expected_degree;
  return rep;
}

} // namespace cpn
