#pragma once

#include <complex>

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

namespace cpn {

using cplx = std::complex<double>;

/// 113-bit mantissa type used where double roundoff hides truncation effects.
using Quad = boost::multiprecision::float128;

template <class Real>
using Complex = std::complex<Real>;

template <class Real>
Complex<Real> from_double(cplx z) {
  return Complex<Real>(Real(z.real()), Real(z.imag()));
}

template <class Real>
cplx to_double(const Complex<Real>& z) {
  return cplx(static_cast<double>(z.real()), static_cast<double>(z.imag()));
}

template <class Real>
double real_to_double(const Real& x) {
  return static_cast<double>(x);
}

} // namespace cpn
