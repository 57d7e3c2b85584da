#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cpn/series_builder.hpp"

using namespace cpn;

namespace {

ModelConfig config(int n, int k, std::uint64_t seed, int m = -1) {
  ModelConfig c;
  c.n = n;
  c.truncation = k;
  c.jet_order = m < 0 ? k + 2 : m;
  c.seed = seed;
  return c;
}

// |x - target| <= frac |target|
bool within(double x, double target, double frac) { return std::abs(x - target) <= frac * std::abs(target); }

const std::vector<double> kRadii{1e-1, 5e-2, 2e-2, 1e-2};

std::vector<int> deficiencies(const CompatibilityReport& rep) {
  std::vector<int> out;
  for (const auto& o : rep.orders) out.push_back(o.rank_deficiency);
  return out;
}

template <class Real>
bool same_coefficients(const std::vector<std::vector<Jet<Real>>>& a, const std::vector<std::vector<Jet<Real>>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    for (std::size_t k = 0; k < a[i].size(); ++k) {
      for (int m = 0; m <= a[i][k].order(); ++m) {
        if (a[i][k][m] != b[i][k][m]) return false;
      }
    }
  }
  return true;
}

} // namespace

TEST_CASE("configuration checks") {
  CHECK_THROWS_AS(config(2, 8, 0, 9).validate(), ConfigError);
  CHECK_THROWS_AS(config(1, 4, 0).validate(), ConfigError);
  CHECK_NOTHROW(config(2, 8, 0, 10).validate());
  auto sol = init_leading<double>(config(3, 4, 0));
  CHECK_THROWS_AS(step_order(sol, 2), ConfigError);
  CHECK_THROWS_AS(step_order(sol, 0), ConfigError);
}

TEST_CASE("leading data") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto sol = init_leading<double>(config(4, 3, seed));
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(sol.w[i][0][0]) >= 0.2);
      CHECK(std::abs(sol.wbar[i][0][0]) >= 0.2);
    }
    CHECK(std::abs(sol.phi_prime_at_base()) >= 0.5);
    CHECK(k0_rhs_residual(sol) < 1e-12);
  }
  const auto two = init_leading<double>(config(2, 3, 4));
  REQUIRE(two.free_slots.size() == 3);
  CHECK(two.free_slots[0].kind == SlotKind::singularity_function);
  CHECK(two.free_slots[1].kind == SlotKind::field);
  CHECK(two.free_slots[2].kind == SlotKind::barred_field);
}

TEST_CASE("same seed gives an identical solution") {
  const auto a = build_series<double>(config(3, 6, 17)).first;
  const auto b = build_series<double>(config(3, 6, 17)).first;
  CHECK(same_coefficients(a.w, b.w));
  CHECK(same_coefficients(a.wbar, b.wbar));
  const auto c = build_series<double>(config(3, 6, 18)).first;
  CHECK_FALSE(same_coefficients(a.w, c.w));
}

TEST_CASE("k=1 right-hand side is w_i^0 times sum wbar_l^0 (w_l^0)'") {
  for (int n : {3, 4}) {
    const auto cfg = config(n, 2, 5, 6);
    const auto sol = init_leading<double>(cfg);
    const int m = n - 1;
    const std::vector<Jet<double>> zero(2 * m, Jet<double>(cfg.xi0, cfg.jet_order));
    const auto r = detail::order_coefficients(sol, 1, zero);
    Jet<double> sum(cfg.xi0, cfg.jet_order), sum_bar(cfg.xi0, cfg.jet_order);
    for (int l = 0; l < m; ++l) {
      sum += sol.wbar[l][0] * jet_derive(sol.w[l][0]);
      sum_bar += sol.w[l][0] * jet_derive(sol.wbar[l][0]);
    }
    for (int i = 0; i < m; ++i) {
      const auto want = sol.w[i][0] * sum;
      const auto want_bar = sol.wbar[i][0] * sum_bar;
      // jet_derive drops the top Taylor coefficient.
      for (int d = 0; d < cfg.jet_order; ++d) {
        CHECK(std::abs(r[i][d] - want[d]) < 1e-13 * (1 + std::abs(want[d])));
        CHECK(std::abs(r[m + i][d] - want_bar[d]) < 1e-13 * (1 + std::abs(want_bar[d])));
      }
    }
  }
}

TEST_CASE("order one") {
  auto sol2 = init_leading<double>(config(2, 2, 3));
  const auto r2 = step_order(sol2, 1);
  CHECK(r2.size == 2);
  CHECK(r2.rank == 2);
  CHECK(r2.injected == 0);
  CHECK(r2.matrix_identity_error < 1e-10);

  auto sol3 = init_leading<double>(config(3, 2, 3));
  const auto r3 = step_order(sol3, 1);
  CHECK(r3.rank_deficiency == 2);
  CHECK(r3.injected == 2);
  CHECK(r3.rhs_proportionality_defect < 1e-10);
  CHECK(r3.consistency_residual < 1e-9);
}

TEST_CASE("rank profile and first integrals") {
  const auto [sol2, rep2] = build_series<double>(config(2, 10, 7));
  CHECK(rep2.first_integrals == 3);
  CHECK(deficiencies(rep2) == std::vector<int>(10, 0));

  const auto [sol3, rep3] = build_series<double>(config(3, 8, 1));
  CHECK(rep3.first_integrals == 7);
  CHECK(rep3.expected_first_integrals == 7);
  std::vector<int> want(8, 0);
  want[0] = 2;
  CHECK(deficiencies(rep3) == want);
  for (const auto& o : rep3.orders) CHECK(o.matrix_identity_error < 1e-10);

  const auto a = build_series<double>(config(4, 6, 11)).second;
  const auto b = build_series<double>(config(4, 6, 12)).second;
  CHECK(deficiencies(a) == deficiencies(b));
  CHECK(a.first_integrals == 11);
}

TEST_CASE("compatibility at k=1 over many seeds") {
  for (int n = 2; n <= 5; ++n) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto rep = build_series<double>(config(n, 3, seed)).second;
      CHECK(rep.k0_rhs_residual < 1e-12);
      CHECK(rep.orders.front().consistency_residual < 1e-9);
      CHECK(rep.first_integrals == 4 * n - 5);
    }
  }
}

TEST_CASE("residual scaling") {
  const auto q2 = build_series<Quad>(config(2, 10, 7)).first;
  CHECK(within(verify_residual_scaling(q2, kRadii).slope, 6.0, 0.1));
  const auto q3 = build_series<Quad>(config(3, 8, 1)).first;
  CHECK(within(verify_residual_scaling(q3, kRadii).slope, 4.0, 0.1));

  // Leading term only, constant in xi, linear phi: the residual is exactly -2 a phi' Phi^-3.
  auto lead = build_series<double>(config(2, 0, 3)).first;
  auto flatten = [](Jet<double>& j, int keep) {
    for (int m = keep; m <= j.order(); ++m) j[m] = 0.0;
  };
  flatten(lead.w[0][0], 1);
  flatten(lead.wbar[0][0], 1);
  auto phi = lead.phi.phi();
  flatten(phi, 2);
  lead.phi = SingularityFunction<double>(phi);
  CHECK(within(verify_residual_scaling(lead, kRadii).slope, -3.0, 0.01));
  // With xi-dependent leading jets the Phi^-4 term w0 wbar0 (w0)' takes over.
  const auto generic = build_series<double>(config(2, 0, 3)).first;
  CHECK(within(verify_residual_scaling(generic, kRadii).slope, -4.0, 0.05));

  CHECK_THROWS_AS(verify_residual_scaling(lead, {1e-1, 1e-2}), ConfigError);
  CHECK_THROWS_AS(verify_residual_scaling(lead, {1.0, 1e-1, 1e-2, 5e-3}), ConfigError);
}

TEST_CASE("injected data at k=1 is a gauge choice") {
  const auto cfg = config(3, 6, 21);
  auto run = [&](std::optional<std::uint64_t> reseed) {
    auto sol = init_leading<Quad>(cfg);
    if (reseed) sol.rng.seed(*reseed);
    std::vector<int> profile;
    for (int k = 1; k <= cfg.truncation; ++k) profile.push_back(step_order(sol, k).rank_deficiency);
    return std::pair{std::move(sol), profile};
  };
  const auto [a, pa] = run(std::nullopt);
  const auto [b, pb] = run(999);
  CHECK_FALSE(same_coefficients(a.w, b.w));
  CHECK(pa == pb);
  const double sa = verify_residual_scaling(a, kRadii).slope;
  const double sb = verify_residual_scaling(b, kRadii).slope;
  CHECK(within(sa, 2.0, 0.1));
  CHECK(within(sb, 2.0, 0.1));
}
