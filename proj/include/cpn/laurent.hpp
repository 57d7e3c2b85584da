#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpn/errors.hpp"
#include "cpn/jet.hpp"

namespace cpn {

/// Sum_n c_n(xi) * Phi^(n + e) with Phi = xibar - phi(xi).
///
/// The series stores its coefficients from the base exponent e upward.  A *closed*
/// series is exactly zero beyond the stored terms.  An *open* series is trusted only
/// through its stored terms; higher orders are unknown and any attempt to read them is
/// a WindowError.  Terms below the base exponent are exactly zero in both cases.
template <class Real>
class LaurentSeries {
public:
  using value_type = Complex<Real>;
  using jet_type = Jet<Real>;

  LaurentSeries(int base_exponent, std::vector<jet_type> coeffs, bool closed, value_type base_point,
                int jet_order)
      : base_exponent_(base_exponent), coeffs_(std::move(coeffs)), closed_(closed),
        base_point_(base_point), jet_order_(jet_order) {
    for (const auto& c : coeffs_) {
      if (c.base_point() != base_point_ || c.order() != jet_order_) {
        throw ConfigError("Laurent coefficients must share the series jet base point and order");
      }
    }
  }

  static LaurentSeries closed(int base_exponent, std::vector<jet_type> coeffs) {
    if (coeffs.empty()) throw ConfigError("closed series needs a coefficient to fix its jet layout");
    const auto bp = coeffs.front().base_point();
    const int order = coeffs.front().order();
    return LaurentSeries(base_exponent, std::move(coeffs), true, bp, order);
  }

  static LaurentSeries open(int base_exponent, std::vector<jet_type> coeffs) {
    if (coeffs.empty()) throw ConfigError("open series needs a coefficient to fix its jet layout");
    const auto bp = coeffs.front().base_point();
    const int order = coeffs.front().order();
    return LaurentSeries(base_exponent, std::move(coeffs), false, bp, order);
  }

  /// c * Phi^exponent, exact.
  static LaurentSeries monomial(int exponent, jet_type c) {
    return closed(exponent, std::vector<jet_type>{std::move(c)});
  }

  int base_exponent() const { return base_exponent_; }
  int length() const { return static_cast<int>(coeffs_.size()); }
  bool is_closed() const { return closed_; }
  value_type base_point() const { return base_point_; }
  int jet_order() const { return jet_order_; }

  /// Highest exponent whose coefficient is known; nullopt when the series is closed.
  std::optional<int> trusted_top() const {
    if (closed_) return std::nullopt;
    return base_exponent_ + length() - 1;
  }

  /// Highest stored exponent (base - 1 if nothing is stored).
  int stored_top() const { return base_exponent_ + length() - 1; }

  const jet_type& term(int n) const { return coeffs_[static_cast<std::size_t>(n)]; }
  std::span<const jet_type> terms() const { return coeffs_; }

  jet_type zero_jet() const { return jet_type(base_point_, jet_order_); }

  bool layout_matches(const LaurentSeries& other) const {
    return base_point_ == other.base_point_ && jet_order_ == other.jet_order_;
  }

  void require_layout(const LaurentSeries& other) const {
    if (!layout_matches(other)) throw ConfigError("Laurent series with different jet layouts");
  }

  /// Numerical value at (xi, Phi): sum of jet values times powers of Phi over stored terms.
  value_type evaluate(const value_type& xi, const value_type& phi) const {
    value_type acc{};
    // Horner in Phi over the stored block, then one power for the base exponent.
    for (int n = length() - 1; n >= 0; --n) acc = acc * phi + jet_eval(term(n), xi);
    return acc * ipow(phi, base_exponent_);
  }

  LaurentSeries& operator*=(const value_type& s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }

  template <class OtherReal>
  LaurentSeries<OtherReal> cast() const {
    std::vector<Jet<OtherReal>> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) out.push_back(c.template cast<OtherReal>());
    return LaurentSeries<OtherReal>(
        base_exponent_, std::move(out), closed_,
        Complex<OtherReal>(static_cast<OtherReal>(base_point_.real()),
                           static_cast<OtherReal>(base_point_.imag())),
        jet_order_);
  }

  static value_type ipow(value_type x, int e) {
    if (e < 0) return value_type(1) / ipow(x, -e);
    value_type r(1);
    while (e > 0) {
      if (e & 1) r *= x;
      x *= x;
      e >>= 1;
    }
    return r;
  }

private:
  int base_exponent_;
  std::vector<jet_type> coeffs_;
  bool closed_;
  value_type base_point_;
  int jet_order_;
};

/// Derivative of xibar - phi(xi) data: phi and its xi-derivative.
template <class Real>
class SingularityFunction {
public:
  explicit SingularityFunction(Jet<Real> phi) : phi_(std::move(phi)), phi_prime_(jet_derive(phi_)) {
    // Noncharacteristic manifold: phi'(xi0) != 0.
    if (phi_prime_[0] == Complex<Real>{}) {
      throw DegeneracyError("singularity function has phi'(xi0) = 0 (characteristic manifold)");
    }
  }

  const Jet<Real>& phi() const { return phi_; }
  const Jet<Real>& phi_prime() const { return phi_prime_; }

  template <class OtherReal>
  SingularityFunction<OtherReal> cast() const {
    return SingularityFunction<OtherReal>(phi_.template cast<OtherReal>());
  }

private:
  Jet<Real> phi_;
  Jet<Real> phi_prime_;
};

namespace detail {

// Builds a series on [base, top] from a coefficient callback over exponents.
template <class Real, class Fn>
LaurentSeries<Real> generate(const LaurentSeries<Real>& layout, int base, int count, bool closed,
                             Fn&& coeff_at) {
  std::vector<Jet<Real>> coeffs;
  coeffs.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int n = 0; n < count; ++n) coeffs.push_back(coeff_at(base + n));
  return LaurentSeries<Real>(base, std::move(coeffs), closed, layout.base_point(), layout.jet_order());
}

template <class Real>
const Jet<Real>* coeff_ptr(const LaurentSeries<Real>& s, int exponent) {
  const int n = exponent - s.base_exponent();
  if (n < 0 || n >= s.length()) return nullptr;
  return &s.term(n);
}

inline std::optional<int> min_top(std::optional<int> a, std::optional<int> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

} // namespace detail

/// Jet coefficient of Phi^exponent.  Zero below the base exponent or past the stored
/// block of a closed series; WindowError past the trusted top of an open series.
template <class Real>
Jet<Real> extract_order(const LaurentSeries<Real>& s, int exponent) {
  if (const auto top = s.trusted_top(); top && exponent > *top) {
    throw WindowError("Laurent coefficient of Phi^" + std::to_string(exponent) +
                      " requested but the series is trusted only through Phi^" +
                      std::to_string(*top));
  }
  if (const auto* c = detail::coeff_ptr(s, exponent)) return *c;
  return s.zero_jet();
}

template <class Real>
LaurentSeries<Real> operator+(const LaurentSeries<Real>& a, const LaurentSeries<Real>& b) {
  a.require_layout(b);
  const int base = std::min(a.base_exponent(), b.base_exponent());
  const auto top = detail::min_top(a.trusted_top(), b.trusted_top());
  const int last = top ? *top : std::max(a.stored_top(), b.stored_top());
  return detail::generate(a, base, last - base + 1, !top.has_value(), [&](int e) {
    auto c = a.zero_jet();
    if (const auto* x = detail::coeff_ptr(a, e)) c += *x;
    if (const auto* y = detail::coeff_ptr(b, e)) c += *y;
    return c;
  });
}

template <class Real>
LaurentSeries<Real> operator*(const Complex<Real>& s, LaurentSeries<Real> a) {
  return a *= s;
}

template <class Real>
LaurentSeries<Real> operator-(const LaurentSeries<Real>& a, const LaurentSeries<Real>& b) {
  return a + Complex<Real>(-1) * b;
}

/// Product of two Laurent series.  Exponents add; for an open factor the result is
/// trusted only as far as every contributing pair is known.
template <class Real>
LaurentSeries<Real> series_mul(const LaurentSeries<Real>& a, const LaurentSeries<Real>& b) {
  a.require_layout(b);
  const int base = a.base_exponent() + b.base_exponent();
  std::optional<int> top;
  if (const auto ta = a.trusted_top()) top = *ta + b.base_exponent();
  if (const auto tb = b.trusted_top()) top = detail::min_top(top, *tb + a.base_exponent());
  const int last = top ? *top : a.stored_top() + b.stored_top();
  return detail::generate(a, base, last - base + 1, !top.has_value(), [&](int e) {
    auto c = a.zero_jet();
    for (int i = 0; i < a.length(); ++i) {
      const int j = e - base - i;
      if (j < 0) break;
      if (j >= b.length()) continue;
      c += jet_mul(a.term(i), b.term(j));
    }
    return c;
  });
}

template <class Real>
LaurentSeries<Real> operator*(const LaurentSeries<Real>& a, const LaurentSeries<Real>& b) {
  return series_mul(a, b);
}

/// d/dxibar under Phi = xibar - phi(xi): the coefficients do not depend on xibar.
template <class Real>
LaurentSeries<Real> apply_dbar(const LaurentSeries<Real>& s) {
  std::vector<Jet<Real>> coeffs;
  coeffs.reserve(static_cast<std::size_t>(s.length()));
  for (int n = 0; n < s.length(); ++n) {
    coeffs.push_back(s.term(n) * Complex<Real>(Real(n + s.base_exponent())));
  }
  return LaurentSeries<Real>(s.base_exponent() - 1, std::move(coeffs), s.is_closed(), s.base_point(),
                             s.jet_order());
}

/// d/dxi under Phi = xibar - phi(xi):  c Phi^p -> c' Phi^p - p phi' c Phi^(p-1).
template <class Real>
LaurentSeries<Real> apply_d(const LaurentSeries<Real>& s, const SingularityFunction<Real>& phi) {
  const int base = s.base_exponent() - 1;
  // An open series loses its top term: c' at the old top would need the unknown next one.
  const int count = s.is_closed() ? s.length() + 1 : s.length();
  return detail::generate(s, base, count, s.is_closed(), [&](int e) {
    auto c = s.zero_jet();
    if (const auto* same = detail::coeff_ptr(s, e)) c += jet_derive(*same);
    if (const auto* next = detail::coeff_ptr(s, e + 1)) {
      c -= Complex<Real>(Real(e + 1)) * jet_mul(phi.phi_prime(), *next);
    }
    return c;
  });
}

} // namespace cpn
