#include "cpn/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "cpn/errors.hpp"
#include "cpn/leading_order.hpp"
#include "cpn/resonance.hpp"
#include "cpn/series_builder.hpp"
#include "cpn/tolerances.hpp"

namespace cpn {
namespace {

Json leading_json(const LeadingData& d) {
  return Json{{"w0", nums(d.w0)}, {"wbar0", nums(d.wbar0)}, {"S", num(d.sum())}};
}

Json soliton_json(const SolitonParams& s) {
  return Json{{"p", num(s.p)}, {"a", num(s.a)}, {"b", num(s.b)}, {"chi0", num(s.chi0)}, {"d", num(s.d)}};
}

// The operator vanishes identically at k = -1 for N = 2; `natural` keeps the ratio meaningful.
double max_rel(const Eigen::MatrixXcd& observed, const Eigen::MatrixXcd& reference, double natural) {
  const double scale = std::max(reference.cwiseAbs().maxCoeff(), natural);
  return (observed - reference).cwiseAbs().maxCoeff() / scale;
}

ModelConfig model_config(const CommandOptions& opt) {
  ModelConfig cfg;
  cfg.n = opt.n;
  cfg.truncation = opt.order;
  cfg.jet_order = opt.jet_order.value_or(opt.order + 2);
  cfg.seed = opt.seed;
  cfg.tolerance = opt.tol;
  cfg.validate();
  return cfg;
}

Json model_config_json(const ModelConfig& cfg) {
  return Json{{"n", cfg.n}, {"order", cfg.truncation}, {"jet_order", cfg.jet_order},
              {"seed", cfg.seed}, {"tol", num(cfg.tolerance)}};
}

Json scaling_json(const ScalingFit& fit) {
  return Json{{"radii", nums(fit.radii)},
              {"residuals", nums(fit.residuals)},
              {"slope", num(fit.slope)},
              {"intercept", num(fit.intercept)},
              {"saturated", fit.saturated}};
}

// Slope of the truncation residual against |Phi|: K - 4, accepted within 10%.
void add_slope_check(RunReport& rep, int truncation, const ScalingFit& fit) {
  const double expected = truncation - 4;
  const double tol = 0.1 * std::max(1.0, std::abs(expected));
  rep.add_check("residual slope ~ K-4", num(expected), num(fit.slope), tol,
                std::abs(fit.slope - expected) <= tol && !fit.saturated);
}

std::vector<cplx> points_above(std::vector<cplx> pts, cplx chi0) {
  std::erase_if(pts, [&](cplx z) { return z.imag() <= chi0.imag(); });
  return pts;
}

ChiWindow window_around(const SolitonParams& s, double half_height) {
  return {s.chi0.real() - 1.0, s.chi0.real() + 1.0, s.chi0.imag() - half_height, s.chi0.imag() + half_height};
}

double pole_spacing(const SolitonParams& s) {
  return std::abs(2.0 * (s.p - 1.0) / (s.p + 1.0)) * std::numbers::pi;
}

// Retries with doubled step counts when the tracked branch data jumps.
MonodromyProbe probe_refined(const SolitonParams& s, cplx center, double radius, int steps) {
  for (int attempt = 0;; ++attempt) {
    try {
      return monodromy_probe(s, center, radius, steps);
    } catch (const RefineStepsError&) {
      if (attempt >= 6) throw;
      steps *= 2;
    }
  }
}

Json probe_json(const MonodromyProbe& m) {
  return Json{{"center", num(m.center)},
              {"radius", num(m.radius)},
              {"steps", m.steps},
              {"start_value", num(m.start_value)},
              {"end_value", num(m.end_value)},
              {"discrepancy", num(m.discrepancy)},
              {"phase_change", num(m.phase_change)},
              {"amplitude_sign_flip", m.amplitude_sign_flip},
              {"max_jump", num(m.max_jump)}};
}

} // namespace

cplx auto_center(const SolitonParams& params) {
  params.validate();
  const auto pts = points_above(locate_branch_points(params, window_around(params, 2.0 * pole_spacing(params) + 1.0)),
                                params.chi0);
  if (pts.empty()) throw InternalConsistencyError("no branch point above chi0");
  return pts.front();
}

RunReport run_exponents(const CommandOptions& opt) {
  RunReport rep;
  rep.command = "exponents";
  rep.config = Json{{"n", opt.n}, {"seed", opt.seed}};
  rep.caveats = {caveats::determinant_sign, caveats::conjugation};
  Rng rng(opt.seed);
  const auto data = random_leading_data(opt.n, rng);
  const auto tol = default_tolerances();
  const auto sol = solve_exponents(data, tol);
  double dev = 0.0;
  for (Eigen::Index i = 0; i < sol.alpha.size(); ++i) {
    dev = std::max({dev, std::abs(sol.alpha[i] - 1.0), std::abs(sol.beta[i] - 1.0)});
  }
  rep.add_check("alpha = beta = (1,...,1)", num(0.0), num(dev), tol.relative, dev < tol.relative);
  rep.add_check("linear-solve residual", num(0.0), num(sol.residual), tol.exponent_residual,
                sol.residual < tol.exponent_residual);
  rep.add_check("unique solution", true, sol.unique, std::nullopt, sol.unique);

  const auto det = det_closed_form_check(data, tol);
  rep.add_check("det B = (-1)^N S^(N-1)", num(det.formula), num(det.generic), tol.determinant_match, det.match);

  // Real slice: wbar = conj(w) makes S real and positive.
  LeadingData real = data;
  for (std::size_t i = 0; i < real.w0.size(); ++i) real.wbar0[i] = std::conj(real.w0[i]);
  const auto real_det = det_closed_form_check(real, tol);
  const cplx s = real.sum();
  const double s_pow = std::pow(s.real(), opt.n - 1);
  const double real_err = std::abs(std::abs(real_det.generic) - s_pow) / s_pow;
  const bool positive = s.real() > 0.0 && std::abs(s.imag()) <= tol.relative * s.real();
  rep.add_check("real slice: S > 0, |det B| = S^(N-1)", num(0.0), num(real_err), tol.determinant_match,
                positive && real_err < tol.determinant_match && solve_exponents(real, tol).unique);

  rep.results = Json{{"data", leading_json(data)},
                     {"alpha", nums(std::vector<cplx>(sol.alpha.begin(), sol.alpha.end()))},
                     {"beta", nums(std::vector<cplx>(sol.beta.begin(), sol.beta.end()))},
                     {"determinant", num(det.generic)},
                     {"determinant_formula", num(det.formula)},
                     {"determinant_printed", num(det.printed)},
                     {"printed_form_agrees", det.printed_matches},
                     {"relative_error", num(det.relative_error)}};
  return rep;
}

RunReport run_resonances(const CommandOptions& opt) {
  RunReport rep;
  rep.command = "resonances";
  rep.config = Json{{"n", opt.n}, {"seed", opt.seed}};
  rep.caveats = {caveats::resonance_sign, caveats::conjugation};
  Rng rng(opt.seed);
  const auto data = random_leading_data(opt.n, rng);
  const cplx phi_prime = random_in_annulus(rng, 0.5, 1.0);
  const auto tol = default_tolerances();

  const auto poly = resonance_polynomial(data, phi_prime, tol);
  const auto found = find_resonances(poly, tol);
  rep.add_check("resonance multiplicities", multiplicities(found.expected), multiplicities(found.observed),
                std::nullopt, found.observed == found.expected);
  rep.add_check("4N-4 total zeros", 4 * opt.n - 4, found.total_multiplicity, std::nullopt,
                found.total_multiplicity == 4 * opt.n - 4);
  rep.add_check("root clustering residual", num(0.0), num(found.max_snap_residual), tol.root_snap,
                found.max_snap_residual < tol.root_snap);
  rep.add_check("held-out node", num(0.0), num(poly.holdout_error), tol.interpolation_holdout,
                poly.holdout_error < tol.interpolation_holdout);

  const auto closed = closed_form_resonance_coefficients(data, phi_prime);
  double scale = 0.0, coef_err = 0.0;
  for (const auto& c : closed) scale = std::max(scale, std::abs(c));
  for (std::size_t i = 0; i < closed.size(); ++i) {
    const cplx got = i < poly.coeffs.size() ? poly.coeffs[i] * poly.leading : cplx{};
    coef_err = std::max(coef_err, std::abs(got - closed[i]) / scale);
  }
  rep.add_check("closed-form coefficients", num(0.0), num(coef_err), tol.polynomial_match,
                coef_err < tol.polynomial_match && closed.size() == poly.coeffs.size());

  double pert_err = 0.0;
  for (int k : {-1, 1, 2, 3}) {
    pert_err = std::max(pert_err, max_rel(perturbation_operator(k, data, phi_prime),
                                          build_resonance_matrix(double(k), data, phi_prime),
                                          std::abs(phi_prime) * data.sum_abs()));
  }
  rep.add_check("perturbation oracle", num(0.0), num(pert_err), 1e-6, pert_err < 1e-6);

  // Row structure of the operator at k = 0, -1, 1.
  const int m = opt.n - 1;
  const double l0 = build_resonance_matrix(0.0, data, phi_prime).cwiseAbs().maxCoeff();
  rep.add_check("k=0 operator vanishes", num(0.0), num(l0), std::nullopt, l0 == 0.0);
  const auto lm1 = build_resonance_matrix(-1.0, data, phi_prime);
  Eigen::RowVectorXcd wbar(m), w(m);
  for (int i = 0; i < m; ++i) {
    wbar[i] = data.wbar0[i];
    w[i] = data.w0[i];
  }
  const double row_sum = std::max((wbar * lm1.topLeftCorner(m, m)).cwiseAbs().maxCoeff(),
                                  (w * lm1.bottomRightCorner(m, m)).cwiseAbs().maxCoeff()) /
                         (lm1.cwiseAbs().maxCoeff() * data.sum_abs());
  rep.add_check("k=-1 weighted rows cancel", num(0.0), num(row_sum), tol.matrix_identity,
                row_sum < tol.matrix_identity);
  const auto l1 = build_resonance_matrix(1.0, data, phi_prime);
  int rank_sum = 0;
  for (const auto& block : {Eigen::MatrixXcd(l1.topLeftCorner(m, m)), Eigen::MatrixXcd(l1.bottomRightCorner(m, m))}) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(block);
    qr.setThreshold(tol.rank_threshold);
    rank_sum += static_cast<int>(qr.rank());
  }
  rep.add_check("k=1 blocks have rank 1", 2, rank_sum, std::nullopt, rank_sum == 2);

  Json clusters = Json::array();
  for (const auto& c : found.roots) {
    clusters.push_back(Json{{"centroid", num(c.centroid)},
                            {"multiplicity", c.multiplicity},
                            {"spread", num(c.spread)},
                            {"integer", c.integer ? Json(*c.integer) : Json(nullptr)},
                            {"snap_residual", num(c.snap_residual)}});
  }
  rep.results = Json{{"data", leading_json(data)},
                     {"phi_prime", num(phi_prime)},
                     {"roots", multiplicities(found.observed)},
                     {"expected", multiplicities(found.expected)},
                     {"total_zeros", found.total_multiplicity},
                     {"clusters", clusters},
                     {"sample_nodes", poly.nodes},
                     {"det_samples", nums(poly.samples)},
                     {"leading_coefficient", num(poly.leading)},
                     {"monic_coefficients", nums(poly.coeffs)},
                     {"notes", found.notes}};
  return rep;
}

RunReport run_build_series(const CommandOptions& opt) {
  RunReport rep;
  rep.command = "build-series";
  const auto cfg = model_config(opt);
  rep.config = model_config_json(cfg);
  rep.config["radii"] = nums(opt.radii);
  rep.caveats = {caveats::resonance_sign, caveats::determinant_sign, caveats::conjugation,
                 caveats::first_integrals};
  Tolerances tol = default_tolerances();
  tol.relative = cfg.tolerance;

  std::optional<std::pair<SeriesSolution<double>, CompatibilityReport>> built;
  try {
    built.emplace(build_series<double>(cfg, tol));
  } catch (const CompatibilityError& e) {
    rep.add_check("compatibility at resonances", "consistent", e.what(), cfg.tolerance, false);
    return rep;
  }
  const auto& [sol, comp] = *built;
  rep.add_check("k=0 rhs vanishes", num(0.0), num(comp.k0_rhs_residual), tol.k0_rhs,
                comp.k0_rhs_residual < tol.k0_rhs);
  Json orders = Json::array();
  Json deficiency_expected = Json::array(), deficiency_observed = Json::array();
  double identity = 0.0;
  bool profile = true;
  for (const auto& o : comp.orders) {
    orders.push_back(Json{{"order", o.order},
                          {"size", o.size},
                          {"rank", o.rank},
                          {"rank_deficiency", o.rank_deficiency},
                          {"expected_deficiency", o.expected_deficiency},
                          {"consistency_residual", num(o.consistency_residual)},
                          {"matrix_identity_error", num(o.matrix_identity_error)},
                          {"rhs_proportionality_defect", num(o.rhs_proportionality_defect)},
                          {"injected", o.injected},
                          {"fallback_pivot", o.fallback_pivot}});
    deficiency_expected.push_back(o.expected_deficiency);
    deficiency_observed.push_back(o.rank_deficiency);
    profile = profile && o.rank_deficiency == o.expected_deficiency;
    identity = std::max(identity, o.matrix_identity_error);
    if (o.order == 1) {
      rep.add_check("k=1 consistency residual", num(0.0), num(o.consistency_residual), cfg.tolerance,
                    o.consistency_residual < cfg.tolerance);
    }
  }
  if (!comp.orders.empty()) {
    rep.add_check("rank deficiency by order", deficiency_expected, deficiency_observed, std::nullopt, profile);
    rep.add_check("order-k operator = -(L (+) Lbar)", num(0.0), num(identity), tol.matrix_identity,
                  identity < tol.matrix_identity);
  }
  rep.add_check("first integrals = 4N-5", comp.expected_first_integrals, comp.first_integrals, std::nullopt,
                comp.first_integrals == comp.expected_first_integrals);

  // The scaling certificate runs in extended precision on the same seed.
  const auto quad = build_series<Quad>(cfg, tol).first;
  const auto fit = verify_residual_scaling(quad, opt.radii, 8, tol);
  add_slope_check(rep, cfg.truncation, fit);

  Json slots = Json::array();
  for (const auto& s : sol.free_slots) {
    const char* kind = s.kind == SlotKind::singularity_function ? "phi"
                       : s.kind == SlotKind::field              ? "w"
                                                                : "wbar";
    slots.push_back(Json{{"kind", kind}, {"order", s.order}, {"index", s.index}});
  }
  rep.results = Json{{"data", leading_json(sol.leading_data())},
                     {"phi_prime", num(sol.phi_prime_at_base())},
                     {"k0_rhs_residual", num(comp.k0_rhs_residual)},
                     {"orders", orders},
                     {"free_slots", slots},
                     {"first_integrals", comp.first_integrals},
                     {"expected_first_integrals", comp.expected_first_integrals},
                     {"scaling", scaling_json(fit)}};
  return rep;
}

RunReport run_verify_series(const CommandOptions& opt) {
  RunReport rep;
  rep.command = "verify-series";
  const auto cfg = model_config(opt);
  rep.config = model_config_json(cfg);
  rep.config["radii"] = nums(opt.radii);
  rep.caveats = {caveats::resonance_sign, caveats::conjugation};
  Tolerances tol = default_tolerances();
  tol.relative = cfg.tolerance;
  const auto quad = build_series<Quad>(cfg, tol).first;
  const auto fit = verify_residual_scaling(quad, opt.radii, 8, tol);
  add_slope_check(rep, cfg.truncation, fit);
  rep.results = Json{{"scaling", scaling_json(fit)}};
  return rep;
}

RunReport run_counterexample(const CommandOptions& opt) {
  RunReport rep;
  rep.command = "counterexample";
  const auto& s = opt.soliton;
  s.validate();
  rep.config = soliton_json(s);
  rep.config["samples"] = opt.samples;
  rep.config["chi_radius"] = num(opt.chi_radius);
  rep.config["seed"] = opt.seed;
  rep.caveats = {caveats::conjugation, caveats::branch_location};

  const auto pts = regular_sample_points(s, opt.samples, opt.chi_radius, opt.seed);
  const double residual = max_pde_residual(s, pts);
  rep.add_check("PDE residual at regular points", num(0.0), num(residual), 1e-10, residual < 1e-10);
  const double fd = max_derivative_mismatch(s, pts);
  rep.add_check("finite-difference derivatives", num(0.0), num(fd), 1e-7, fd < 1e-7);

  const cplx xi{0.3, 0.0};
  const auto at_chi0 = eval_solution(s, xi, s.xibar_for(xi, s.chi0));
  const double r2_err = std::abs(at_chi0.amplitude * at_chi0.amplitude + s.p) / std::abs(s.p);
  rep.add_check("R^2 at chi0 = -p", num(-s.p), num(at_chi0.amplitude * at_chi0.amplitude), 1e-12,
                r2_err < 1e-12);

  const bool real_params = s.a.imag() == 0.0 && s.b.imag() == 0.0 && s.chi0.imag() == 0.0 && s.d.imag() == 0.0;
  if (real_params && s.p < -1.0) {
    double worst = 0.0;
    for (int j = 0; j <= 20; ++j) {
      const cplx x{-2.0 + 0.2 * j, 0.0};
      const auto v = eval_solution(s, x, x);
      worst = std::max(worst, std::abs(v.wbar - std::conj(v.w)) / std::abs(v.w));
    }
    rep.add_check("real slice: wbar = conj(w)", num(0.0), num(worst), 1e-12, worst < 1e-12);
  }

  const auto window = window_around(s, 2.0 * pole_spacing(s) + 1.0);
  rep.results = Json{{"sample_points", static_cast<int>(pts.size())},
                     {"max_residual", num(residual)},
                     {"max_derivative_mismatch", num(fd)},
                     {"tanh_poles", nums(locate_branch_points(s, window))},
                     {"printed_locations", nums(printed_singular_points(s, window))},
                     {"algebraic_singular_points", nums(algebraic_singular_points(s, window))}};
  return rep;
}

RunReport run_monodromy(const CommandOptions& opt) {
  RunReport rep;
  rep.command = "monodromy";
  const auto& s = opt.soliton;
  s.validate();
  if (opt.steps < 64) throw ConfigError("--steps must be at least 64");
  const cplx center = opt.center ? *opt.center : auto_center(s);
  rep.config = soliton_json(s);
  rep.config["center"] = opt.center ? num(*opt.center) : Json("auto");
  rep.config["radius"] = num(opt.radius);
  rep.config["steps"] = opt.steps;
  rep.caveats = {caveats::branch_location};

  const auto main = probe_refined(s, center, opt.radius, opt.steps);
  const auto doubled = probe_refined(s, center, opt.radius, 2 * main.steps);
  rep.add_check("branching around the branch point", "> 0.1", num(main.discrepancy), 0.1,
                main.discrepancy > 0.1);

  // Control loop around a regular point with the same radius.
  std::optional<MonodromyProbe> control;
  for (cplx offset : {cplx{1.0, 0.0}, cplx{-1.0, 0.0}, cplx{1.0, 0.5}, cplx{-1.0, -0.5}}) {
    try {
      control = probe_refined(s, s.chi0 + offset, opt.radius, opt.steps);
      break;
    } catch (const ConfigError&) {
    } catch (const SingularityError&) {
    }
  }
  if (!control) throw ConfigError("no regular control loop found near chi0");
  rep.add_check("single-valued around a regular point", "< 1e-10", num(control->discrepancy), 1e-10,
                control->discrepancy < 1e-10);
  const double drift = std::abs(doubled.discrepancy - main.discrepancy);
  rep.add_check("stable under step doubling", num(0.0), num(drift), 1e-6, drift < 1e-6);

  rep.results = Json{{"center", num(center)}, {"probe", probe_json(main)}, {"doubled", probe_json(doubled)},
                     {"control", probe_json(*control)}};

  // Diagnostic: the nearest algebraic singular point above chi0, where R and f branch.
  const auto window = window_around(s, 2.0 * pole_spacing(s) + 1.0);
  const auto algebraic = points_above(algebraic_singular_points(s, window), s.chi0);
  if (!algebraic.empty()) {
    try {
      rep.results["algebraic_probe"] = probe_json(probe_refined(s, algebraic.front(), opt.radius, opt.steps));
    } catch (const Error& e) {
      rep.results["algebraic_probe"] = Json{{"center", num(algebraic.front())}, {"skipped", e.what()}};
    }
  }
  return rep;
}

RunReport run_command(const std::string& name, const CommandOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  RunReport rep;
  try {
    if (name == "exponents") rep = run_exponents(opt);
    else if (name == "resonances") rep = run_resonances(opt);
    else if (name == "build-series") rep = run_build_series(opt);
    else if (name == "verify-series") rep = run_verify_series(opt);
    else if (name == "counterexample") rep = run_counterexample(opt);
    else if (name == "monodromy") rep = run_monodromy(opt);
    else throw ConfigError("unknown command: " + name);
  } catch (const std::exception& e) {
    rep.command = name;
    rep.error = e.what();
  }
  rep.finalize();
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

} // namespace cpn
