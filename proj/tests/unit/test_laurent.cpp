#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cpn/errors.hpp"
#include "helpers.hpp"

using namespace cpn;
using testing::J;
using testing::L;

namespace {

constexpr int kOrder = 4;

J constant(cplx c) { return J::constant(cplx{}, kOrder, c); }

SingularityFunction<double> linear_phi(cplx q) {
  J phi(cplx{}, kOrder);
  phi[1] = q;
  return SingularityFunction<double>(phi);
}

L random_series(Rng& rng, int base, int count, int order, bool closed = true) {
  auto jets = testing::random_jets(rng, count, order);
  return closed ? L::closed(base, jets) : L::open(base, jets);
}

// Compares Taylor degrees below `degrees` of every coefficient in [lo, hi].
double low_degree_diff(const L& a, const L& b, int lo, int hi, int degrees) {
  double worst = 0.0;
  for (int e = lo; e <= hi; ++e) {
    const auto x = extract_order(a, e), y = extract_order(b, e);
    for (int m = 0; m < degrees; ++m) worst = std::max(worst, std::abs(x[m] - y[m]));
  }
  return worst;
}

} // namespace

TEST_CASE("dbar follows the power rule") {
  const cplx c{0.7, -0.4};
  const auto d1 = apply_dbar(L::monomial(-1, constant(c)));
  CHECK(d1.base_exponent() == -2);
  CHECK(testing::jet_diff(extract_order(d1, -2), constant(-c)) == 0.0);
  CHECK(extract_order(apply_dbar(L::monomial(0, constant(c))), -1).max_abs() == 0.0);
  CHECK(testing::jet_diff(extract_order(apply_dbar(L::monomial(1, constant(c))), 0), constant(c)) == 0.0);
}

TEST_CASE("d picks up -phi' from Phi") {
  const cplx c{0.7, -0.4}, q{1.5, 0.5};
  const auto phi = linear_phi(q);
  const auto d = apply_d(L::monomial(-1, constant(c)), phi);
  CHECK(testing::jet_diff(extract_order(d, -2), constant(q * c)) < 1e-15);
  CHECK(extract_order(d, -1).max_abs() == 0.0);

  const auto x = L::monomial(0, J::variable(cplx{}, kOrder));
  const auto dx = apply_d(x, phi);
  CHECK(testing::jet_diff(extract_order(dx, 0), constant(1.0)) == 0.0);
  CHECK(extract_order(dx, -1).max_abs() == 0.0);

  const auto zero = L::monomial(-1, constant(0.0));
  CHECK(testing::series_scale(apply_d(zero, phi)) == 0.0);
  CHECK(testing::series_scale(apply_dbar(zero)) == 0.0);
}

TEST_CASE("products and extraction") {
  const auto inv = L::monomial(-1, constant(1.0));
  const auto sq = inv * inv;
  CHECK(sq.base_exponent() == -2);
  CHECK(testing::jet_diff(extract_order(sq, -2), constant(1.0)) == 0.0);

  const auto plus = L::closed(0, {constant(1.0), constant(1.0)});
  const auto minus = L::closed(0, {constant(1.0), constant(-1.0)});
  const auto prod = plus * minus;
  CHECK(testing::jet_diff(extract_order(prod, 0), constant(1.0)) == 0.0);
  CHECK(extract_order(prod, 1).max_abs() == 0.0);
  CHECK(testing::jet_diff(extract_order(prod, 2), constant(-1.0)) == 0.0);
  CHECK(extract_order(prod, 7).max_abs() == 0.0);  // closed: exactly zero beyond

  const cplx c{2.0, 1.0};
  const auto s = L::monomial(-1, constant(c));
  CHECK(testing::jet_diff(extract_order(s, -1), constant(c)) == 0.0);
  CHECK(extract_order(s, 0).max_abs() == 0.0);
  CHECK(extract_order(s, -4).max_abs() == 0.0);
}

TEST_CASE("open series are trusted only through their window") {
  Rng rng(3);
  const auto a = random_series(rng, 0, 4, kOrder, false);  // known through Phi^3
  const auto b = random_series(rng, 0, 2, kOrder, false);  // known through Phi^1
  const auto p = a * b;
  REQUIRE(p.trusted_top().has_value());
  CHECK(*p.trusted_top() == 1);
  CHECK_NOTHROW(extract_order(p, 1));
  CHECK_THROWS_AS(extract_order(p, 2), WindowError);
  CHECK(*(a + b).trusted_top() == 1);

  const auto closed = random_series(rng, -1, 3, kOrder);
  CHECK(*(closed * b).trusted_top() == 0);  // tb + ea = 1 - 1
  CHECK_FALSE((closed * closed).trusted_top().has_value());

  // d on an open series drops the term that would need the unknown next coefficient.
  const auto phi = linear_phi(cplx{0.9, 0.2});
  CHECK(*apply_d(b, phi).trusted_top() == 0);
  CHECK(*apply_dbar(b).trusted_top() == 0);
}

TEST_CASE("layout mismatch is rejected") {
  const auto a = L::monomial(0, J::constant(cplx{}, 3, 1.0));
  const auto b = L::monomial(0, J::constant(cplx{}, 4, 1.0));
  CHECK_THROWS_AS(a + b, ConfigError);
  CHECK_THROWS_AS(L::closed(0, {}), ConfigError);
  J flat(cplx{}, kOrder);
  flat[0] = 1.0;
  CHECK_THROWS_AS(SingularityFunction<double>{flat}, DegeneracyError);
}

TEST_CASE("mixed derivatives commute") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto phi = SingularityFunction<double>([&] {
      auto j = testing::random_jet(rng, 6);
      j[1] = cplx{1.0, 0.3};
      return j;
    }());
    const auto s = random_series(rng, -1, 1 + trial % 6, 6);
    const auto a = apply_d(apply_dbar(s), phi);
    const auto b = apply_dbar(apply_d(s, phi));
    const double scale = std::max(testing::series_scale(a), 1.0);
    CHECK(testing::series_diff(a, b, a.base_exponent(), a.stored_top()) < 1e-12 * scale);
  }
}

TEST_CASE("Leibniz rule for both derivations") {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const int order = 2 + trial % 5;
    auto pj = testing::random_jet(rng, order);
    pj[1] = cplx{0.8, -0.5};
    const SingularityFunction<double> phi(pj);
    const auto a = random_series(rng, -1, 1 + trial % 6, order);
    const auto b = random_series(rng, -1, 1 + (trial + 3) % 6, order);
    const auto prod = a * b;
    const int lo = prod.base_exponent() - 1, hi = prod.stored_top() + 1;

    const auto dbar_lhs = apply_dbar(prod);
    const auto dbar_rhs = apply_dbar(a) * b + a * apply_dbar(b);
    CHECK(low_degree_diff(dbar_lhs, dbar_rhs, lo, hi, order + 1) < 1e-12 * testing::series_scale(dbar_lhs));

    // jet_derive loses the top Taylor coefficient, so compare below it.
    const auto d_lhs = apply_d(prod, phi);
    const auto d_rhs = apply_d(a, phi) * b + a * apply_d(b, phi);
    CHECK(low_degree_diff(d_lhs, d_rhs, lo, hi, order) < 1e-12 * testing::series_scale(d_lhs));
  }
}

TEST_CASE("evaluation matches termwise sums") {
  Rng rng(7);
  const cplx base{0.1, 0.2};
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<J> jets;
    for (int i = 0; i < 5; ++i) jets.push_back(testing::random_jet(rng, 5, base));
    const auto s = L::closed(-2, jets);
    const cplx xi = base + cplx{0.01, -0.02};
    for (double r : {1e-3, 1e-2, 1e-1}) {
      const cplx big_phi = std::polar(r, 0.4 + trial);
      cplx direct{};
      for (int n = 0; n < 5; ++n) direct += jet_eval(jets[n], xi) * std::pow(big_phi, n - 2);
      CHECK(std::abs(s.evaluate(xi, big_phi) - direct) < 1e-12 * std::abs(direct));
    }
  }
}
