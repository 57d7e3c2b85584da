#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpn/errors.hpp"
#include "cpn/precision.hpp"

namespace cpn {

/// Truncated Taylor polynomial sum_{m=0..M} c_m (xi - xi0)^m with complex coefficients.
///
/// Every analytic function of xi in the engine (Laurent coefficients, the singularity
/// function and its derivative) is a Jet.  Binary operations require both operands to
/// share the base point and the order; anything else is a ConfigError.
template <class Real>
class Jet {
public:
  using value_type = Complex<Real>;

  Jet() : Jet(value_type{}, 0) {}

  Jet(value_type base_point, int order) : base_point_(base_point), coeffs_(checked_size(order)) {}

  Jet(value_type base_point, std::vector<value_type> coeffs)
      : base_point_(base_point), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw ConfigError("jet needs at least one coefficient");
  }

  static Jet constant(value_type base_point, int order, value_type value) {
    Jet j(base_point, order);
    j.coeffs_[0] = value;
    return j;
  }

  /// The identity function xi, expanded about base_point.
  static Jet variable(value_type base_point, int order) {
    Jet j(base_point, order);
    j.coeffs_[0] = base_point;
    if (order >= 1) j.coeffs_[1] = value_type(1);
    return j;
  }

  value_type base_point() const { return base_point_; }
  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const value_type> coeffs() const { return coeffs_; }

  value_type operator[](int m) const { return coeffs_[static_cast<std::size_t>(m)]; }
  value_type& operator[](int m) { return coeffs_[static_cast<std::size_t>(m)]; }

  bool compatible(const Jet& other) const {
    return base_point_ == other.base_point_ && coeffs_.size() == other.coeffs_.size();
  }

  void require_compatible(const Jet& other) const {
    if (!compatible(other)) {
      throw ConfigError("jet mismatch: base points or orders differ (orders " +
                        std::to_string(order()) + " and " + std::to_string(other.order()) + ")");
    }
  }

  Jet& operator+=(const Jet& other) {
    require_compatible(other);
    for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] += other.coeffs_[m];
    return *this;
  }

  Jet& operator-=(const Jet& other) {
    require_compatible(other);
    for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] -= other.coeffs_[m];
    return *this;
  }

  Jet& operator*=(const value_type& s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= value_type(-1); }
  friend Jet operator*(Jet a, const value_type& s) { return a *= s; }
  friend Jet operator*(const value_type& s, Jet a) { return a *= s; }

  /// Largest coefficient modulus, as a double.
  double max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) {
      const double a = real_to_double(abs(c));
      if (a > m) m = a;
    }
    return m;
  }

  template <class OtherReal>
  Jet<OtherReal> cast() const {
    std::vector<Complex<OtherReal>> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) {
      out.emplace_back(static_cast<OtherReal>(c.real()), static_cast<OtherReal>(c.imag()));
    }
    return Jet<OtherReal>(Complex<OtherReal>(static_cast<OtherReal>(base_point_.real()),
                                             static_cast<OtherReal>(base_point_.imag())),
                          std::move(out));
  }

private:
  static std::size_t checked_size(int order) {
    if (order < 0) throw ConfigError("jet order must be non-negative");
    return static_cast<std::size_t>(order) + 1;
  }

  value_type base_point_;
  std::vector<value_type> coeffs_;
};

/// Cauchy product truncated at the common order.
template <class Real>
Jet<Real> jet_mul(const Jet<Real>& a, const Jet<Real>& b) {
  a.require_compatible(b);
  const int order = a.order();
  Jet<Real> out(a.base_point(), order);
  for (int i = 0; i <= order; ++i) {
    const auto ai = a[i];
    if (ai == Complex<Real>{}) continue;
    for (int j = 0; i + j <= order; ++j) out[i + j] += ai * b[j];
  }
  return out;
}

template <class Real>
Jet<Real> operator*(const Jet<Real>& a, const Jet<Real>& b) {
  return jet_mul(a, b);
}

/// d/dxi.  The top coefficient of the result is set to zero and is not trustworthy
/// unless the jet is an exact polynomial of degree <= order.
template <class Real>
Jet<Real> jet_derive(const Jet<Real>& a) {
  const int order = a.order();
  Jet<Real> out(a.base_point(), order);
  for (int m = 0; m < order; ++m) out[m] = Real(m + 1) * a[m + 1];
  return out;
}

template <class Real>
Complex<Real> jet_eval(const Jet<Real>& a, const Complex<Real>& xi) {
  const auto x = xi - a.base_point();
  Complex<Real> acc{};
  for (int m = a.order(); m >= 0; --m) acc = acc * x + a[m];
  return acc;
}

} // namespace cpn
