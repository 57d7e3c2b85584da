#pragma once

#include <algorithm>
#include <vector>

#include "cpn/jet.hpp"
#include "cpn/laurent.hpp"
#include "cpn/random.hpp"

namespace testing {

using cpn::cplx;
using J = cpn::Jet<double>;
using L = cpn::LaurentSeries<double>;

inline J random_jet(cpn::Rng& rng, int order, cplx base = {}) {
  J j(base, order);
  for (int m = 0; m <= order; ++m) j[m] = cpn::random_in_disc(rng);
  return j;
}

inline std::vector<J> random_jets(cpn::Rng& rng, int count, int order) {
  std::vector<J> out;
  for (int i = 0; i < count; ++i) out.push_back(random_jet(rng, order));
  return out;
}

inline double jet_diff(const J& a, const J& b) { return (a - b).max_abs(); }

// Max coefficient difference over exponents lo..hi (missing terms read as zero).
inline double series_diff(const L& a, const L& b, int lo, int hi) {
  double worst = 0.0;
  for (int e = lo; e <= hi; ++e) {
    worst = std::max(worst, jet_diff(cpn::extract_order(a, e), cpn::extract_order(b, e)));
  }
  return worst;
}

inline double series_scale(const L& a) {
  double s = 0.0;
  for (const auto& t : a.terms()) s = std::max(s, t.max_abs());
  return s;
}

} // namespace testing
