#pragma once

#include <cstdint>
#include <vector>

#include "cpn/model.hpp"
#include "cpn/precision.hpp"

namespace cpn {

/// Parameters of the envelope solitary wave of the N = 2 model:
///   w = R exp[i(xi/a - f)],  wbar = R exp[-i(xi/a - f)],  chi = xi/a - xibar/b,
///   g = (p+1)(chi - chi0) / (2(p-1)),
///   R^2 = ((p-1) cosh g + p + 1) / ((p-1) cosh g - p - 1),
///   f = arctan((p+1)/(2 sqrt(-p)) tanh g) + ((p + 2 sqrt(-p) - 1) chi - 2 sqrt(-p) chi0) / (2(p-1)) + d.
struct SolitonParams {
  double p = -4.0;
  cplx a{1.0};
  cplx b{2.0};
  cplx chi0{};
  cplx d{};

  void validate() const;
  cplx chi(cplx xi, cplx xibar) const { return xi / a - xibar / b; }
  /// xibar that realises a given chi at fixed xi.
  cplx xibar_for(cplx xi, cplx chi_value) const { return b * (xi / a - chi_value); }
};

struct ChiWindow {
  double re_min, re_max, im_min, im_max;
  bool contains(cplx z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
};

struct FieldValues {
  cplx w;
  cplx wbar;
  cplx amplitude;  // R on the continued sheet
  cplx phase;      // f on the continued sheet
};

/// Field values, continued from the base point chi0 + 1 (principal branches, R > 0 there)
/// along the straight segment in chi.  Throws SingularityError on a singular point.
FieldValues eval_solution(const SolitonParams& params, cplx xi, cplx xibar);

/// Closed-form first and mixed second derivatives on the same continued sheet.
PointState<double> eval_derivatives(const SolitonParams& params, cplx xi, cplx xibar);

/// Poles of tanh g: chi_m = chi0 + 2(p-1)/(p+1) (m + 1/2) i pi, sorted by imaginary part.
std::vector<cplx> locate_branch_points(const SolitonParams& params, const ChiWindow& window);

/// The alternative location chi0 + (m + 1/2) i pi (agrees with the tanh poles only at p = 3).
std::vector<cplx> printed_singular_points(const SolitonParams& params, const ChiWindow& window);

/// Zeros of ((p-1) cosh g)^2 - (p+1)^2: where R^2 vanishes or blows up and where the
/// arctan argument reaches +-i.  These are the algebraic branch points of R and f.
std::vector<cplx> algebraic_singular_points(const SolitonParams& params, const ChiWindow& window);

struct MonodromyProbe {
  cplx center;
  double radius = 0.0;
  int steps = 0;
  cplx start_value;
  cplx end_value;
  double discrepancy = 0.0;  // |end - start| / (1 + |start|)
  // Constituent data around the same loop.
  cplx phase_change;              // f(end) - f(start)
  bool amplitude_sign_flip = false;
  double max_jump = 0.0;          // largest per-step change of tracked branch data
};

/// Continues w around chi(t) = center + radius e^(2 pi i t) (xi fixed, xibar varying).
/// Throws RefineStepsError when a step moves tracked branch data by more than 0.5.
MonodromyProbe monodromy_probe(const SolitonParams& params, cplx center, double radius, int steps);

/// Regular sample points with |chi| <= chi_radius, at least `clearance` from every singular point.
struct SamplePoint {
  cplx xi;
  cplx xibar;
};
std::vector<SamplePoint> regular_sample_points(const SolitonParams& params, int count, double chi_radius,
                                               std::uint64_t seed, double clearance = 0.1);

/// Max |residual_point| of the closed-form derivatives over the sample points.
double max_pde_residual(const SolitonParams& params, const std::vector<SamplePoint>& points);

/// Max of |closed form - finite difference| / (1 + |closed form|) over the sample points.
/// First derivatives: central differences of the values with step h.  Mixed derivative:
/// Richardson-extrapolated four-point stencil with step h_mixed.
double max_derivative_mismatch(const SolitonParams& params, const std::vector<SamplePoint>& points,
                               double h = 1e-5, double h_mixed = 1e-3);

} // namespace cpn
