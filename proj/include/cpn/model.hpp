#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cpn/errors.hpp"
#include "cpn/laurent.hpp"

namespace cpn {

/// Affine fields w_1..w_{N-1} and their barred partners as Laurent series.
template <class Real>
struct FieldTuple {
  int n = 2;
  std::vector<LaurentSeries<Real>> w;
  std::vector<LaurentSeries<Real>> wbar;

  void validate() const {
    if (n < 2) throw ConfigError("N must be at least 2");
    const auto count = static_cast<std::size_t>(n - 1);
    if (w.size() != count || wbar.size() != count) {
      throw ConfigError("field tuple must hold N-1 series for w and for wbar");
    }
    for (const auto& s : w) s.require_layout(w.front());
    for (const auto& s : wbar) s.require_layout(w.front());
  }
};

namespace detail {

template <class Real>
struct Derived {
  std::vector<LaurentSeries<Real>> d, dbar, d_dbar;
};

template <class Real>
Derived<Real> derivatives(const std::vector<LaurentSeries<Real>>& fields,
                          const SingularityFunction<Real>& phi) {
  Derived<Real> out;
  for (const auto& f : fields) {
    out.d.push_back(apply_d(f, phi));
    out.dbar.push_back(apply_dbar(f));
    out.d_dbar.push_back(apply_d(out.dbar.back(), phi));
  }
  return out;
}

// (1 + sum_l v_l u_l) d dbar u_i - sum_l v_l (dbar u_l d u_i + d u_l dbar u_i), i = 1..N-1.
// With (u, v) = (w, wbar) this is the first equation; (wbar, w) gives its barred image.
template <class Real>
std::vector<LaurentSeries<Real>> residual_block(const std::vector<LaurentSeries<Real>>& u,
                                                const std::vector<LaurentSeries<Real>>& v,
                                                const Derived<Real>& du) {
  const auto& layout = u.front();
  auto one = LaurentSeries<Real>::monomial(
      0, Jet<Real>::constant(layout.base_point(), layout.jet_order(), Complex<Real>(1)));
  auto metric = one;                   // 1 + sum v_l u_l
  auto v_dbar_u = std::optional<LaurentSeries<Real>>{};  // sum v_l dbar u_l
  auto v_d_u = std::optional<LaurentSeries<Real>>{};     // sum v_l d u_l
  for (std::size_t l = 0; l < u.size(); ++l) {
    metric = metric + v[l] * u[l];
    auto a = v[l] * du.dbar[l];
    auto b = v[l] * du.d[l];
    v_dbar_u = v_dbar_u ? *v_dbar_u + a : a;
    v_d_u = v_d_u ? *v_d_u + b : b;
  }
  std::vector<LaurentSeries<Real>> out;
  out.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.push_back(metric * du.d_dbar[i] - (*v_dbar_u * du.d[i] + *v_d_u * du.dbar[i]));
  }
  return out;
}

} // namespace detail

/// Residuals of both affine field equations: N-1 series for the w equations, then N-1 for
/// the barred equations.  The barred equations are the exact w <-> wbar image of the first.
template <class Real>
std::vector<LaurentSeries<Real>> residual_series(const FieldTuple<Real>& fields,
                                                 const SingularityFunction<Real>& phi) {
  fields.validate();
  const auto dw = detail::derivatives(fields.w, phi);
  const auto dwbar = detail::derivatives(fields.wbar, phi);
  auto out = detail::residual_block(fields.w, fields.wbar, dw);
  auto barred = detail::residual_block(fields.wbar, fields.w, dwbar);
  out.insert(out.end(), barred.begin(), barred.end());
  return out;
}

/// Value and derivatives of one field at a point of C^2.
template <class Real>
struct FieldPoint {
  Complex<Real> value{};
  Complex<Real> d{};       // d/dxi
  Complex<Real> dbar{};    // d/dxibar
  Complex<Real> d_dbar{};  // mixed second derivative
};

template <class Real>
struct PointState {
  std::vector<FieldPoint<Real>> w;
  std::vector<FieldPoint<Real>> wbar;

  int n() const { return static_cast<int>(w.size()) + 1; }
};

namespace detail {

template <class Real>
std::vector<Complex<Real>> point_block(const std::vector<FieldPoint<Real>>& u,
                                       const std::vector<FieldPoint<Real>>& v) {
  Complex<Real> metric(1), v_dbar_u{}, v_d_u{};
  for (std::size_t l = 0; l < u.size(); ++l) {
    metric += v[l].value * u[l].value;
    v_dbar_u += v[l].value * u[l].dbar;
    v_d_u += v[l].value * u[l].d;
  }
  std::vector<Complex<Real>> out;
  out.reserve(u.size());
  for (const auto& ui : u) out.push_back(metric * ui.d_dbar - (v_dbar_u * ui.d + v_d_u * ui.dbar));
  return out;
}

} // namespace detail

/// Literal pointwise evaluation of both field equations.
template <class Real>
std::vector<Complex<Real>> residual_point(const PointState<Real>& state) {
  if (state.w.size() != state.wbar.size()) throw ConfigError("point state needs matching w and wbar");
  auto out = detail::point_block(state.w, state.wbar);
  auto barred = detail::point_block(state.wbar, state.w);
  out.insert(out.end(), barred.begin(), barred.end());
  return out;
}

/// Evaluates a field series and its three derivative series at (xi, Phi).
template <class Real>
FieldPoint<Real> evaluate_field(const LaurentSeries<Real>& s, const SingularityFunction<Real>& phi,
                                const Complex<Real>& xi, const Complex<Real>& big_phi) {
  const auto dbar = apply_dbar(s);
  return FieldPoint<Real>{s.evaluate(xi, big_phi), apply_d(s, phi).evaluate(xi, big_phi),
                          dbar.evaluate(xi, big_phi), apply_d(dbar, phi).evaluate(xi, big_phi)};
}

template <class Real>
PointState<Real> evaluate_fields(const FieldTuple<Real>& fields, const SingularityFunction<Real>& phi,
                                 const Complex<Real>& xi, const Complex<Real>& big_phi) {
  PointState<Real> st;
  for (const auto& s : fields.w) st.w.push_back(evaluate_field(s, phi, xi, big_phi));
  for (const auto& s : fields.wbar) st.wbar.push_back(evaluate_field(s, phi, xi, big_phi));
  return st;
}

} // namespace cpn
