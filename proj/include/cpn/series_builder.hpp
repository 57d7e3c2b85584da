#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cpn/errors.hpp"
#include "cpn/leading_order.hpp"
#include "cpn/model.hpp"
#include "cpn/random.hpp"
#include "cpn/resonance.hpp"
#include "cpn/tolerances.hpp"

namespace cpn {

struct ModelConfig {
  int n = 2;
  int truncation = 8;   // K: highest Laurent order constructed
  int jet_order = 10;   // M: Taylor order of every coefficient, M >= K + 2
  cplx xi0{};
  std::uint64_t seed = 0;
  double tolerance = 1e-9;

  void validate() const {
    if (n < 2) throw ConfigError("N must be at least 2");
    if (truncation < 0) throw ConfigError("truncation order K must be non-negative");
    if (jet_order < truncation + 2) {
      throw ConfigError("jet order M = " + std::to_string(jet_order) +
                        " must be at least K + 2 = " + std::to_string(truncation + 2));
    }
    if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  }
};

enum class SlotKind { singularity_function, field, barred_field };

/// One arbitrary function of xi entering the local solution.
struct FreeSlot {
  SlotKind kind;
  int order;  // Laurent order; -1 for the singularity function
  int index;  // 1-based component, 0 for the singularity function
};

template <class Real>
struct SeriesSolution {
  ModelConfig config;
  // Laurent coefficients [component][order], exponents alpha_i = beta_i = 1.
  std::vector<std::vector<Jet<Real>>> w;
  std::vector<std::vector<Jet<Real>>> wbar;
  SingularityFunction<Real> phi;
  std::vector<FreeSlot> free_slots;
  int filled_order = 0;
  Rng rng;

  int components() const { return config.n - 1; }

  Complex<Real> base_point() const { return from_double<Real>(config.xi0); }

  /// Closed Laurent series built from every determined order.
  FieldTuple<Real> field_tuple() const {
    FieldTuple<Real> f{config.n, {}, {}};
    for (const auto& c : w) f.w.push_back(LaurentSeries<Real>::closed(-1, c));
    for (const auto& c : wbar) f.wbar.push_back(LaurentSeries<Real>::closed(-1, c));
    return f;
  }

  LeadingData leading_data() const {
    LeadingData d{config.n, {}, {}};
    for (const auto& c : w) d.w0.push_back(to_double(c.front()[0]));
    for (const auto& c : wbar) d.wbar0.push_back(to_double(c.front()[0]));
    return d;
  }

  cplx phi_prime_at_base() const { return to_double(phi.phi_prime()[0]); }
};

struct OrderReport {
  int order = 0;
  int size = 0;
  int rank = 0;
  int rank_deficiency = 0;
  int expected_deficiency = 0;
  double consistency_residual = 0.0;     // max over trusted xi-degrees, relative
  double matrix_identity_error = 0.0;    // assembled matrix vs -(L (+) Lbar), relative
  double rhs_proportionality_defect = 0.0;  // k = 1 only: distance of the rhs from span(w^0)
  int injected = 0;
  bool fallback_pivot = false;
};

struct CompatibilityReport {
  int n = 2;
  int truncation = 0;
  double k0_rhs_residual = 0.0;
  std::vector<OrderReport> orders;
  int leading_free = 0;       // 2(N-1)
  int singularity_free = 1;   // phi
  int injected_free = 0;      // 2(N-2) at k = 1
  int first_integrals = 0;
  int expected_first_integrals = 0;  // 4N-5
};

namespace detail {

template <class Real>
Jet<Real> random_jet(Rng& rng, cplx xi0, int order, double rmin_const, double rmax_const) {
  Jet<double> j(xi0, order);
  j[0] = random_in_annulus(rng, rmin_const, rmax_const);
  for (int m = 1; m <= order; ++m) j[m] = random_in_disc(rng);
  return j.template cast<Real>();
}

template <class Real>
using Mat = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using Vec = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

// Ansatz with orders 0..k-1 taken from the solution and order k set to `unknown`.
// The series are open: orders above k are not known yet.
template <class Real>
FieldTuple<Real> trial_fields(const SeriesSolution<Real>& sol, int k,
                              const std::vector<Jet<Real>>& unknown) {
  const int m = sol.components();
  FieldTuple<Real> f{sol.config.n, {}, {}};
  auto make = [&](const std::vector<Jet<Real>>& known, const Jet<Real>& top) {
    std::vector<Jet<Real>> c(known.begin(), known.begin() + k);
    c.push_back(top);
    return LaurentSeries<Real>::open(-1, std::move(c));
  };
  for (int i = 0; i < m; ++i) f.w.push_back(make(sol.w[i], unknown[i]));
  for (int i = 0; i < m; ++i) f.wbar.push_back(make(sol.wbar[i], unknown[m + i]));
  return f;
}

template <class Real>
std::vector<Jet<Real>> order_coefficients(const SeriesSolution<Real>& sol, int k,
                                          const std::vector<Jet<Real>>& unknown) {
  const auto res = residual_series(trial_fields(sol, k, unknown), sol.phi);
  std::vector<Jet<Real>> out;
  out.reserve(res.size());
  for (const auto& s : res) out.push_back(extract_order(s, k - 5));
  return out;
}

template <class Real>
double proportionality_defect(const Vec<Real>& r, const Vec<Real>& direction) {
  const double rn = real_to_double(r.norm());
  if (rn == 0.0) return 0.0;
  const Complex<Real> coef = direction.dot(r) / direction.squaredNorm();  // dot conjugates lhs
  return real_to_double((r - coef * direction).norm()) / rn;
}

} // namespace detail

/// Leading data: alpha_i = beta_i = 1, random w_i^0, wbar_i^0 and phi determined by the seed.
template <class Real>
SeriesSolution<Real> init_leading(const ModelConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const int order = config.jet_order;
  Jet<double> phi_d(config.xi0, order);
  for (int m = 0; m <= order; ++m) phi_d[m] = random_in_disc(rng);
  phi_d[1] = random_in_annulus(rng, 0.5, 1.0);  // |phi'(xi0)| >= 0.5

  SeriesSolution<Real> sol{config, {}, {}, SingularityFunction<Real>(phi_d.template cast<Real>()), {}, 0,
                           Rng{}};
  sol.free_slots.push_back({SlotKind::singularity_function, -1, 0});
  const int m = config.n - 1;
  for (int i = 0; i < m; ++i) {
    sol.w.push_back({detail::random_jet<Real>(rng, config.xi0, order, 0.2, 1.0)});
    sol.free_slots.push_back({SlotKind::field, 0, i + 1});
  }
  for (int i = 0; i < m; ++i) {
    sol.wbar.push_back({detail::random_jet<Real>(rng, config.xi0, order, 0.2, 1.0)});
    sol.free_slots.push_back({SlotKind::barred_field, 0, i + 1});
  }
  sol.rng = rng;
  return sol;
}

/// Relative size of the Phi^-5 coefficient for the leading data alone (zero in exact arithmetic).
template <class Real>
double k0_rhs_residual(const SeriesSolution<Real>& sol) {
  const int m = sol.components();
  std::vector<Jet<Real>> leading;
  for (int i = 0; i < m; ++i) leading.push_back(sol.w[i][0]);
  for (int i = 0; i < m; ++i) leading.push_back(sol.wbar[i][0]);
  // Order 0 plays the role of the unknown block: trial_fields(k = 0) is the leading term alone.
  const auto r = detail::order_coefficients(sol, 0, leading);
  double scale = 0.0, worst = 0.0;
  for (const auto& j : leading) scale = std::max(scale, j.max_abs());
  const double order_factor = double(sol.config.jet_order + 1);
  scale = scale * scale * scale * sol.phi.phi_prime().max_abs() * order_factor * order_factor;
  for (const auto& j : r) worst = std::max(worst, j.max_abs());
  return scale > 0.0 ? worst / scale : worst;
}

/// Determines order k (1 <= k <= K) from the Phi^(k-5) coefficients of every residual.
template <class Real>
OrderReport step_order(SeriesSolution<Real>& sol, int k, const Tolerances& tol = default_tolerances()) {
  using detail::Mat;
  using detail::Vec;
  const auto& cfg = sol.config;
  if (k < 1 || k > cfg.truncation) throw ConfigError("order k out of range 1..K");
  if (sol.filled_order != k - 1) throw ConfigError("orders must be filled in sequence");
  const int m = sol.components();
  const int size = 2 * m;
  const int order = cfg.jet_order;
  const auto xi0 = sol.base_point();
  const Jet<Real> zero(xi0, order);

  // The order-k coefficient is affine in the unknowns and free of their xi-derivatives, and
  // the unknowns only meet the leading terms there.  Unit probes on the leading term alone
  // (intermediate orders zero) therefore recover the jet-valued system matrix exactly.
  std::vector<Jet<Real>> unknown(static_cast<std::size_t>(size), zero);
  const auto rhs = detail::order_coefficients(sol, k, unknown);
  SeriesSolution<Real> bare = sol;
  for (int i = 0; i < m; ++i) {
    for (int n = 1; n < k; ++n) bare.w[i][n] = bare.wbar[i][n] = zero;
  }
  const auto bare_rhs = detail::order_coefficients(bare, k, unknown);
  std::vector<std::vector<Jet<Real>>> a(static_cast<std::size_t>(size));  // a[col][row]
  for (int col = 0; col < size; ++col) {
    unknown[col] = Jet<Real>::constant(xi0, order, Complex<Real>(1));
    auto probe = detail::order_coefficients(bare, k, unknown);
    for (int row = 0; row < size; ++row) probe[row] -= bare_rhs[row];
    a[col] = std::move(probe);
    unknown[col] = zero;
  }
  auto matrix_at_degree = [&](int d) {
    Mat<Real> out(size, size);
    for (int row = 0; row < size; ++row)
      for (int col = 0; col < size; ++col) out(row, col) = a[col][row][d];
    return out;
  };
  const Mat<Real> a0 = matrix_at_degree(0);

  OrderReport rep;
  rep.order = k;
  rep.size = size;
  rep.expected_deficiency = (k == 1) ? 2 * (m - 1) : 0;

  // The assembled matrix must be minus the resonance operator at the base point.
  {
    const Eigen::MatrixXcd l = build_resonance_matrix(cplx(k), sol.leading_data(), sol.phi_prime_at_base());
    double diff = 0.0;
    for (int row = 0; row < size; ++row)
      for (int col = 0; col < size; ++col)
        diff = std::max(diff, std::abs(to_double(a0(row, col)) + l(row, col)));
    rep.matrix_identity_error = diff / l.cwiseAbs().maxCoeff();
    if (rep.matrix_identity_error > tol.matrix_identity) {
      throw InternalConsistencyError("order " + std::to_string(k) +
                                     " system matrix differs from the resonance matrix (relative " +
                                     std::to_string(rep.matrix_identity_error) + ")");
    }
  }

  Eigen::ColPivHouseholderQR<Mat<Real>> full_qr(a0);
  full_qr.setThreshold(Real(tol.rank_threshold));
  rep.rank = static_cast<int>(full_qr.rank());
  rep.rank_deficiency = size - rep.rank;
  if (rep.rank_deficiency != rep.expected_deficiency) {
    throw InternalConsistencyError("order " + std::to_string(k) + " has rank deficiency " +
                                   std::to_string(rep.rank_deficiency) + ", expected " +
                                   std::to_string(rep.expected_deficiency));
  }

  if (k == 1) {
    Vec<Real> r_top(m), r_bottom(m), w0(m), wbar0(m);
    for (int i = 0; i < m; ++i) {
      r_top(i) = rhs[i][0];
      r_bottom(i) = rhs[m + i][0];
      w0(i) = sol.w[i][0][0];
      wbar0(i) = sol.wbar[i][0][0];
    }
    rep.rhs_proportionality_defect = std::max(detail::proportionality_defect<Real>(r_top, w0),
                                              detail::proportionality_defect<Real>(r_bottom, wbar0));
  }

  // Free columns at a resonance: components 2..N-1 of both blocks; the first component of
  // each block carries the solve.  Fall back to the QR's non-pivot columns if degenerate.
  std::vector<int> free_cols;
  if (rep.rank_deficiency > 0) {
    for (int i = 1; i < m; ++i) free_cols.push_back(i);
    for (int i = 1; i < m; ++i) free_cols.push_back(m + i);
  }
  auto pivot_columns = [&](const std::vector<int>& free) {
    std::vector<int> out;
    for (int c = 0; c < size; ++c)
      if (std::find(free.begin(), free.end(), c) == free.end()) out.push_back(c);
    return out;
  };
  std::vector<int> pivots = pivot_columns(free_cols);
  auto restricted = [&](const std::vector<int>& cols) {
    Mat<Real> out(size, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = a0.col(cols[j]);
    return out;
  };
  Eigen::ColPivHouseholderQR<Mat<Real>> qr(restricted(pivots));
  qr.setThreshold(Real(tol.rank_threshold));
  if (static_cast<int>(qr.rank()) != rep.rank) {
    rep.fallback_pivot = true;
    free_cols.clear();
    const auto& perm = full_qr.colsPermutation().indices();
    for (int j = rep.rank; j < size; ++j) free_cols.push_back(perm(j));
    std::sort(free_cols.begin(), free_cols.end());
    pivots = pivot_columns(free_cols);
    qr.compute(restricted(pivots));
  }

  std::vector<Jet<Real>> solution(static_cast<std::size_t>(size), zero);
  for (int c : free_cols) {
    solution[c] = detail::random_jet<Real>(sol.rng, cfg.xi0, order, 0.0, 1.0);
    sol.free_slots.push_back({c < m ? SlotKind::field : SlotKind::barred_field, k, (c % m) + 1});
  }
  rep.injected = static_cast<int>(free_cols.size());

  // A(xi) u(xi) = -r(xi) degree by degree: A_0 u_d = -r_d - sum_{j>=1} A_j u_{d-j}.
  const int trusted_degree = order - (k - 1);
  for (int d = 0; d <= order; ++d) {
    Vec<Real> b(size);
    for (int row = 0; row < size; ++row) {
      Complex<Real> acc = -rhs[row][d];
      for (int col = 0; col < size; ++col) {
        for (int j = 1; j <= d; ++j) acc -= a[col][row][j] * solution[col][d - j];
        if (std::find(free_cols.begin(), free_cols.end(), col) != free_cols.end()) {
          acc -= a0(row, col) * solution[col][d];
        }
      }
      b(row) = acc;
    }
    const Vec<Real> x = qr.solve(b);
    const Mat<Real> ap = restricted(pivots);
    const double bn = real_to_double(b.norm());
    const double miss = real_to_double((ap * x - b).norm());
    const double rel = bn > 0.0 ? miss / bn : miss;
    if (d <= trusted_degree) rep.consistency_residual = std::max(rep.consistency_residual, rel);
    for (std::size_t j = 0; j < pivots.size(); ++j) solution[pivots[j]][d] = x(static_cast<Eigen::Index>(j));
  }
  if (rep.rank_deficiency > 0 && !(rep.consistency_residual < cfg.tolerance)) {
    throw CompatibilityError("resonance at order " + std::to_string(k) +
                             ": right-hand side leaves the column space (relative residual " +
                             std::to_string(rep.consistency_residual) + ")");
  }

  for (int i = 0; i < m; ++i) {
    sol.w[i].push_back(solution[i]);
    sol.wbar[i].push_back(solution[m + i]);
  }
  sol.filled_order = k;
  return rep;
}

template <class Real>
std::pair<SeriesSolution<Real>, CompatibilityReport> build_series(const ModelConfig& config,
                                                                  const Tolerances& tol = default_tolerances()) {
  auto sol = init_leading<Real>(config);
  CompatibilityReport rep;
  rep.n = config.n;
  rep.truncation = config.truncation;
  rep.k0_rhs_residual = k0_rhs_residual(sol);
  for (int k = 1; k <= config.truncation; ++k) {
    rep.orders.push_back(step_order(sol, k, tol));
    rep.injected_free += rep.orders.back().injected;
  }
  rep.leading_free = 2 * (config.n - 1);
  rep.singularity_free = 1;
  // Orders beyond 1 never inject; a run with K = 0 still counts the k = 1 resonance.
  if (config.truncation == 0) rep.injected_free = 2 * (config.n - 2);
  rep.first_integrals = rep.leading_free + rep.singularity_free + rep.injected_free;
  rep.expected_first_integrals = 4 * config.n - 5;
  return {std::move(sol), rep};
}

struct ScalingFit {
  std::vector<double> radii;
  std::vector<double> residuals;  // max |residual| over equations and sample points
  double slope = 0.0;
  double intercept = 0.0;
  bool saturated = false;
};

/// Max residual of the truncated series on circles |Phi| = r at xi = xi0, and the
/// least-squares slope of log(residual) against log(r).
template <class Real>
ScalingFit verify_residual_scaling(const SeriesSolution<Real>& sol, const std::vector<double>& radii,
                                   int angles = 8, const Tolerances& tol = default_tolerances()) {
  if (radii.size() < 4) throw ConfigError("residual scaling needs at least four radii");
  for (double r : radii) {
    if (!(r >= 1e-3 && r <= 1e-1)) throw ConfigError("radii must lie in [1e-3, 1e-1]");
  }
  const auto fields = sol.field_tuple();
  struct Prepared {
    LaurentSeries<Real> value, d, dbar, d_dbar;
  };
  auto prepare = [&](const std::vector<LaurentSeries<Real>>& list) {
    std::vector<Prepared> out;
    for (const auto& s : list) {
      auto dbar = apply_dbar(s);
      out.push_back({s, apply_d(s, sol.phi), dbar, apply_d(dbar, sol.phi)});
    }
    return out;
  };
  const auto pw = prepare(fields.w);
  const auto pwbar = prepare(fields.wbar);
  const auto xi = sol.base_point();

  ScalingFit fit;
  fit.radii = radii;
  for (double r : radii) {
    double worst = 0.0;
    for (int j = 0; j < angles; ++j) {
      const double theta = 0.3 + 2.0 * std::numbers::pi * j / angles;
      const auto big_phi = from_double<Real>(std::polar(r, theta));
      PointState<Real> st;
      auto at = [&](const Prepared& p) {
        return FieldPoint<Real>{p.value.evaluate(xi, big_phi), p.d.evaluate(xi, big_phi),
                                p.dbar.evaluate(xi, big_phi), p.d_dbar.evaluate(xi, big_phi)};
      };
      for (const auto& p : pw) st.w.push_back(at(p));
      for (const auto& p : pwbar) st.wbar.push_back(at(p));
      for (const auto& v : residual_point(st)) worst = std::max(worst, real_to_double(abs(v)));
    }
    fit.residuals.push_back(worst);
  }
  fit.saturated = std::all_of(fit.residuals.begin(), fit.residuals.end(),
                              [&](double v) { return v < tol.saturation; });
  if (fit.saturated) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double x = std::log(radii[i]);
    const double y = std::log(std::max(fit.residuals[i], std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

} // namespace cpn
