#include "cpn/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cpn/errors.hpp"
#include "cpn/random.hpp"

namespace cpn {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};
constexpr double singular_tol = 1e-12;

// Quantities that depend on chi only, except for the two multivalued pieces.
struct Local {
  cplx g, cosh_g, sinh_g;
  cplx num, den;    // R^2 = num / den
  cplx q_num, q_den;  // arctan(c tanh g) = log(q_num / q_den) / (2i)
};

struct Constants {
  cplx root;      // sqrt(-p), principal
  cplx c;         // (p+1) / (2 sqrt(-p))
  cplx g_rate;    // dg/dchi
  cplx linear;    // d/dchi of the linear part of f
};

Constants constants(const SolitonParams& prm) {
  Constants k;
  k.root = std::sqrt(cplx(-prm.p));
  k.c = (prm.p + 1.0) / (2.0 * k.root);
  k.g_rate = (prm.p + 1.0) / (2.0 * (prm.p - 1.0));
  k.linear = (prm.p + 2.0 * k.root - 1.0) / (2.0 * (prm.p - 1.0));
  return k;
}

Local local(const SolitonParams& prm, const Constants& k, cplx chi) {
  Local l;
  l.g = k.g_rate * (chi - prm.chi0);
  l.cosh_g = std::cosh(l.g);
  l.sinh_g = std::sinh(l.g);
  l.num = (prm.p - 1.0) * l.cosh_g + prm.p + 1.0;
  l.den = (prm.p - 1.0) * l.cosh_g - prm.p - 1.0;
  l.q_num = l.cosh_g + I * k.c * l.sinh_g;
  l.q_den = l.cosh_g - I * k.c * l.sinh_g;
  return l;
}

cplx linear_part(const SolitonParams& prm, const Constants& k, cplx chi) {
  return ((prm.p + 2.0 * k.root - 1.0) * chi - 2.0 * k.root * prm.chi0) / (2.0 * (prm.p - 1.0)) + prm.d;
}

cplx nearest_of(const std::vector<cplx>& pts, cplx z) {
  cplx best{std::numeric_limits<double>::quiet_NaN(), 0.0};
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    if (std::abs(p - z) < dist) {
      dist = std::abs(p - z);
      best = p;
    }
  }
  return best;
}

ChiWindow window_around(cplx z, double half) {
  return {z.real() - half, z.real() + half, z.imag() - half, z.imag() + half};
}

void check_regular(const SolitonParams& prm, const Local& l, cplx chi) {
  const double scale_r = std::abs(prm.p - 1.0) * std::abs(l.cosh_g) + std::abs(prm.p + 1.0);
  const double scale_q = std::abs(l.cosh_g) + std::abs(l.sinh_g);
  const bool singular = std::abs(l.den) < singular_tol * scale_r || std::abs(l.num) < singular_tol * scale_r ||
                        std::abs(l.q_num) < singular_tol * scale_q || std::abs(l.q_den) < singular_tol * scale_q;
  if (singular) {
    auto pts = algebraic_singular_points(prm, window_around(chi, 50.0));
    throw SingularityError("explicit solution is singular at chi = (" + std::to_string(chi.real()) + ", " +
                               std::to_string(chi.imag()) + ")",
                           nearest_of(pts, chi));
  }
}

// Continues sqrt(R^2) and log(q) along a path in chi, choosing at each vertex the branch
// nearest to the previous one.
class BranchTracker {
public:
  explicit BranchTracker(const SolitonParams& prm) : prm_(prm), k_(constants(prm)) {
    chi_ = prm.chi0 + 1.0;
    const Local l = local(prm_, k_, chi_);
    check_regular(prm_, l, chi_);
    amplitude_ = std::sqrt(l.num / l.den);
    log_q_ = std::log(l.q_num / l.q_den);
  }

  // Straight segment to `target`, split into pieces no longer than max_step.
  void move_to(cplx target, double max_step) {
    const cplx from = chi_;
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(target - from) / max_step)));
    for (int j = 1; j <= pieces; ++j) step(from + (target - from) * (double(j) / pieces));
  }

  // One vertex; returns the size of the change in tracked data.
  double step(cplx chi) {
    const Local l = local(prm_, k_, chi);
    check_regular(prm_, l, chi);
    const cplx root = std::sqrt(l.num / l.den);
    const cplx amp = std::abs(root - amplitude_) <= std::abs(root + amplitude_) ? root : -root;
    const cplx principal = std::log(l.q_num / l.q_den);
    const double turns = std::round((log_q_ - principal).imag() / (2.0 * pi));
    const cplx lq = principal + cplx(0.0, 2.0 * pi * turns);
    const double jump = std::max(std::abs(lq - log_q_),
                                 std::abs(amp - amplitude_) / std::max(std::abs(amp), std::abs(amplitude_)));
    amplitude_ = amp;
    log_q_ = lq;
    chi_ = chi;
    return jump;
  }

  cplx chi() const { return chi_; }
  cplx amplitude() const { return amplitude_; }
  cplx phase() const { return log_q_ / (2.0 * I) + linear_part(prm_, k_, chi_); }

  FieldValues values(cplx xi) const {
    const cplx theta = xi / prm_.a - phase();
    return {amplitude_ * std::exp(I * theta), amplitude_ * std::exp(-I * theta), amplitude_, phase()};
  }

private:
  const SolitonParams& prm_;
  Constants k_;
  cplx chi_;
  cplx amplitude_;
  cplx log_q_;
};

constexpr double path_step = 0.01;

std::vector<cplx> lattice(const ChiWindow& window, cplx origin, cplx spacing) {
  // origin + spacing * (m + 1/2) restricted to the window; spacing is purely imaginary here.
  std::vector<cplx> out;
  if (origin.real() < window.re_min || origin.real() > window.re_max) return out;
  const double s = spacing.imag();
  if (s == 0.0) return out;
  const double lo = (window.im_min - origin.imag()) / s - 0.5;
  const double hi = (window.im_max - origin.imag()) / s - 0.5;
  const auto m_lo = static_cast<long>(std::ceil(std::min(lo, hi)));
  const auto m_hi = static_cast<long>(std::floor(std::max(lo, hi)));
  for (long m = m_lo; m <= m_hi; ++m) {
    const cplx z = origin + spacing * (double(m) + 0.5);
    if (window.contains(z)) out.push_back(z);
  }
  std::sort(out.begin(), out.end(), [](cplx x, cplx y) { return x.imag() < y.imag(); });
  return out;
}

} // namespace

void SolitonParams::validate() const {
  if (a == cplx{} || b == cplx{}) throw ConfigError("soliton parameters a and b must be nonzero");
  if (p == 0.0 || p == 1.0 || p == -1.0) throw ConfigError("soliton parameter p must avoid 0, 1 and -1");
}

FieldValues eval_solution(const SolitonParams& params, cplx xi, cplx xibar) {
  params.validate();
  BranchTracker tracker(params);
  tracker.move_to(params.chi(xi, xibar), path_step);
  return tracker.values(xi);
}

PointState<double> eval_derivatives(const SolitonParams& params, cplx xi, cplx xibar) {
  params.validate();
  BranchTracker tracker(params);
  const cplx chi = params.chi(xi, xibar);
  tracker.move_to(chi, path_step);
  const auto v = tracker.values(xi);

  const Constants k = constants(params);
  const Local l = local(params, k, chi);
  const double pm1 = params.p - 1.0;
  const cplx G = k.g_rate;
  // (log R)' and (log R)''
  const cplx inv = 1.0 / l.num - 1.0 / l.den;
  const cplx inv2 = 1.0 / (l.num * l.num) - 1.0 / (l.den * l.den);
  const cplx lr1 = 0.5 * G * pm1 * l.sinh_g * inv;
  const cplx lr2 = 0.5 * G * G * pm1 * (l.cosh_g * inv - pm1 * l.sinh_g * l.sinh_g * inv2);
  // f' and f''
  const cplx e = l.cosh_g * l.cosh_g + k.c * k.c * l.sinh_g * l.sinh_g;
  const cplx f1 = k.c * G / e + k.linear;
  const cplx f2 = -2.0 * k.c * G * G * (1.0 + k.c * k.c) * l.sinh_g * l.cosh_g / (e * e);

  // w = exp(i xi/a) exp(h), h = log R - i f;  wbar = exp(-i xi/a) exp(hbar), hbar = log R + i f.
  auto field = [&](cplx value, cplx explicit_rate, cplx h1, cplx h2) {
    FieldPoint<double> fp;
    fp.value = value;
    fp.d = value * (explicit_rate + h1 / params.a);
    fp.dbar = -value * h1 / params.b;
    fp.d_dbar = -(fp.d * h1 + value * h2 / params.a) / params.b;
    return fp;
  };
  PointState<double> st;
  st.w.push_back(field(v.w, I / params.a, lr1 - I * f1, lr2 - I * f2));
  st.wbar.push_back(field(v.wbar, -I / params.a, lr1 + I * f1, lr2 + I * f2));
  return st;
}

std::vector<cplx> locate_branch_points(const SolitonParams& params, const ChiWindow& window) {
  if (params.p == -1.0) throw DegeneracyError("p = -1 makes g vanish identically");
  const double factor = 2.0 * (params.p - 1.0) / (params.p + 1.0);
  return lattice(window, params.chi0, cplx(0.0, factor * pi));
}

std::vector<cplx> printed_singular_points(const SolitonParams& params, const ChiWindow& window) {
  return lattice(window, params.chi0, cplx(0.0, pi));
}

std::vector<cplx> algebraic_singular_points(const SolitonParams& params, const ChiWindow& window) {
  params.validate();
  const Constants k = constants(params);
  const double ratio = (params.p + 1.0) / (params.p - 1.0);
  std::vector<cplx> out;
  // g = +-acosh(v) + 2 pi i m; enough periods to cover the window.
  const double span = std::max({std::abs(window.im_max), std::abs(window.im_min), std::abs(window.re_max),
                                std::abs(window.re_min)}) + std::abs(params.chi0);
  const long periods = static_cast<long>(std::ceil(span * std::abs(k.g_rate) / (2.0 * pi))) + 2;
  for (double v : {ratio, -ratio}) {
    const cplx base = std::acosh(cplx(v));
    for (long m = -periods; m <= periods; ++m) {
      for (cplx g : {base + cplx(0.0, 2.0 * pi * m), -base + cplx(0.0, 2.0 * pi * m)}) {
        const cplx z = params.chi0 + g / k.g_rate;
        if (!window.contains(z)) continue;
        const bool seen = std::any_of(out.begin(), out.end(), [&](cplx y) { return std::abs(y - z) < 1e-12; });
        if (!seen) out.push_back(z);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](cplx x, cplx y) {
    return x.imag() != y.imag() ? x.imag() < y.imag() : x.real() < y.real();
  });
  return out;
}

MonodromyProbe monodromy_probe(const SolitonParams& params, cplx center, double radius, int steps) {
  params.validate();
  if (steps < 64) throw ConfigError("monodromy probe needs at least 64 steps");
  if (!(radius > 0.0)) throw ConfigError("monodromy radius must be positive");
  const auto near = window_around(center, 2.0 * radius);
  auto others = locate_branch_points(params, near);
  const auto algebraic = algebraic_singular_points(params, near);
  others.insert(others.end(), algebraic.begin(), algebraic.end());
  for (const auto& z : others) {
    const double dist = std::abs(z - center);
    if (dist > 1e-9 * (1.0 + std::abs(center)) && dist < 2.0 * radius) {
      throw ConfigError("another singular point lies within twice the probe radius");
    }
  }

  MonodromyProbe out;
  out.center = center;
  out.radius = radius;
  out.steps = steps;
  const cplx xi = params.a * (params.chi0 + 1.0);  // fixed; the loop runs through xibar
  BranchTracker tracker(params);
  tracker.move_to(center + radius, path_step);
  const auto start = tracker.values(xi);
  for (int j = 1; j <= steps; ++j) {
    const cplx chi = center + radius * std::exp(cplx(0.0, 2.0 * pi * j / steps));
    // xibar realising chi at fixed xi: only chi enters the continued data.
    (void)params.xibar_for(xi, chi);
    const double jump = tracker.step(chi);
    out.max_jump = std::max(out.max_jump, jump);
    if (jump > 0.5) {
      throw RefineStepsError("monodromy step " + std::to_string(j) + " moved branch data by " +
                             std::to_string(jump) + "; increase steps");
    }
  }
  const auto end = tracker.values(xi);
  out.start_value = start.w;
  out.end_value = end.w;
  out.discrepancy = std::abs(end.w - start.w) / (1.0 + std::abs(start.w));
  out.phase_change = end.phase - start.phase;
  out.amplitude_sign_flip = std::abs(end.amplitude + start.amplitude) < std::abs(end.amplitude - start.amplitude);
  return out;
}

std::vector<SamplePoint> regular_sample_points(const SolitonParams& params, int count, double chi_radius,
                                               std::uint64_t seed, double clearance) {
  params.validate();
  Rng rng(seed);
  const double half = chi_radius + 1.0 + std::abs(params.chi0);
  const ChiWindow window{-half, half, -half, half};
  auto singular = algebraic_singular_points(params, window);
  // The base point chi0 + 1 and the straight path to each sample must also stay clear.
  std::vector<SamplePoint> out;
  while (static_cast<int>(out.size()) < count) {
    const cplx chi = random_in_disc(rng, chi_radius);
    const cplx xi = random_in_disc(rng);
    const cplx start = params.chi0 + 1.0;
    bool ok = true;
    for (const auto& s : singular) {
      // distance from s to the segment [start, chi]
      const cplx dir = chi - start;
      const double len2 = std::norm(dir);
      double t = len2 > 0.0 ? ((s - start) * std::conj(dir)).real() / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      if (std::abs(start + t * dir - s) < clearance) ok = false;
    }
    if (ok) out.push_back({xi, params.xibar_for(xi, chi)});
  }
  return out;
}

double max_pde_residual(const SolitonParams& params, const std::vector<SamplePoint>& points) {
  double worst = 0.0;
  for (const auto& pt : points) {
    for (const auto& r : residual_point(eval_derivatives(params, pt.xi, pt.xibar))) {
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

double max_derivative_mismatch(const SolitonParams& params, const std::vector<SamplePoint>& points, double h,
                               double h_mixed) {
  double worst = 0.0;
  auto mismatch = [&](cplx closed, cplx fd) { return std::abs(closed - fd) / (1.0 + std::abs(closed)); };
  for (const auto& pt : points) {
    const auto st = eval_derivatives(params, pt.xi, pt.xibar);
    auto at = [&](cplx dxi, cplx dxibar) { return eval_solution(params, pt.xi + dxi, pt.xibar + dxibar); };
    const auto xp = at(h, 0.0), xm = at(-h, 0.0), yp = at(0.0, h), ym = at(0.0, -h);
    auto mixed = [&](double s, bool barred) {
      auto pick = [&](const FieldValues& f) { return barred ? f.wbar : f.w; };
      return (pick(at(s, s)) - pick(at(s, -s)) - pick(at(-s, s)) + pick(at(-s, -s))) / (4.0 * s * s);
    };
    for (bool barred : {false, true}) {
      const auto& fp = barred ? st.wbar[0] : st.w[0];
      auto pick = [&](const FieldValues& f) { return barred ? f.wbar : f.w; };
      worst = std::max(worst, mismatch(fp.d, (pick(xp) - pick(xm)) / (2.0 * h)));
      worst = std::max(worst, mismatch(fp.dbar, (pick(yp) - pick(ym)) / (2.0 * h)));
      const cplx richardson = (4.0 * mixed(h_mixed, barred) - mixed(2.0 * h_mixed, barred)) / 3.0;
      worst = std::max(worst, mismatch(fp.d_dbar, richardson));
    }
  }
  return worst;
}

} // namespace cpn
