#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cpn/errors.hpp"
#include "cpn/leading_order.hpp"

using namespace cpn;

namespace {

LeadingData ones(int n) {
  return {n, std::vector<cplx>(n - 1, 1.0), std::vector<cplx>(n - 1, 1.0)};
}

double max_dev_from_one(const Eigen::VectorXcd& v) { return (v.array() - 1.0).abs().maxCoeff(); }

} // namespace

TEST_CASE("exponent system examples") {
  const auto s2 = build_exponent_system(ones(2));
  CHECK(s2.matrix.rows() == 1);
  CHECK(s2.matrix(0, 0) == cplx(1));
  CHECK(s2.rhs(0) == cplx(1));
  CHECK(max_dev_from_one(solve_exponents(ones(2)).alpha) < 1e-15);

  const auto s3 = build_exponent_system(ones(3));
  CHECK(s3.matrix(0, 0) == cplx(0));
  CHECK(s3.matrix(1, 1) == cplx(0));
  CHECK(s3.matrix(0, 1) == cplx(2));
  CHECK(s3.matrix(1, 0) == cplx(2));
  CHECK(s3.rhs(0) == cplx(2));
  CHECK(s3.rhs(1) == cplx(2));
  const auto sol = solve_exponents(ones(3));
  CHECK(max_dev_from_one(sol.alpha) < 1e-15);
  CHECK(max_dev_from_one(sol.beta) < 1e-15);
  CHECK(sol.unique);
}

TEST_CASE("all-ones solves B alpha = c for random data") {
  Rng rng(21);
  for (int n = 2; n <= 8; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto data = random_leading_data(n, rng);
      const auto sys = build_exponent_system(data);
      const Eigen::VectorXcd one = Eigen::VectorXcd::Ones(n - 1);
      CHECK((sys.matrix * one - sys.rhs).cwiseAbs().maxCoeff() < 1e-14 * data.sum_abs());
      // Every off-diagonal entry of column j is 2 wbar_j w_j.
      for (int j = 0; j < n - 1; ++j) {
        for (int i = 0; i < n - 1; ++i) {
          if (i != j) CHECK(sys.matrix(i, j) == 2.0 * data.wbar0[j] * data.w0[j]);
        }
      }
      // Adding all columns to the first gives the constant column S.
      const Eigen::VectorXcd col = sys.matrix.rowwise().sum();
      CHECK((col.array() - data.sum()).abs().maxCoeff() < 1e-14 * data.sum_abs());
      const auto sol = solve_exponents(data);
      CHECK(sol.unique);
      CHECK(sol.residual < 1e-11);
      CHECK(max_dev_from_one(sol.alpha) < 1e-9);
      CHECK(max_dev_from_one(sol.beta) < 1e-9);
    }
  }
}

TEST_CASE("real slice has S > 0 and a unique solution") {
  Rng rng(22);
  auto data = random_leading_data(4, rng);
  for (int i = 0; i < 3; ++i) data.wbar0[i] = std::conj(data.w0[i]);
  const cplx s = data.sum();
  CHECK(s.real() > 0.0);
  CHECK(std::abs(s.imag()) < 1e-15);
  CHECK(solve_exponents(data).unique);
  const auto det = det_closed_form_check(data);
  CHECK(std::abs(std::abs(det.generic) - std::pow(s.real(), 3)) < 1e-10 * std::pow(s.real(), 3));
}

TEST_CASE("vanishing S is a degeneracy") {
  const LeadingData data{3, {1.0, 1.0}, {1.0, -1.0}};
  CHECK_THROWS_AS(solve_exponents(data), DegeneracyError);
}

TEST_CASE("invalid data") {
  CHECK_THROWS_AS(solve_exponents(LeadingData{3, {1.0, 0.0}, {1.0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(solve_exponents(LeadingData{3, {1.0}, {1.0, 1.0}}), ConfigError);
  Rng rng(1);
  CHECK_THROWS_AS(random_leading_data(1, rng), ConfigError);
}

TEST_CASE("determinant against the closed form") {
  const auto d3 = det_closed_form_check(ones(3));
  CHECK(std::abs(d3.generic - cplx(-4)) < 1e-14);
  CHECK(d3.match);
  CHECK(d3.printed_matches);

  const auto d2 = det_closed_form_check(ones(2));
  CHECK(std::abs(d2.generic - cplx(1)) < 1e-15);
  CHECK(d2.printed == cplx(-1));
  CHECK(d2.match);
  CHECK_FALSE(d2.printed_matches);

  Rng rng(23);
  for (int n = 2; n <= 8; ++n) {
    const auto data = random_leading_data(n, rng);
    const auto d = det_closed_form_check(data);
    const double expected = std::pow(std::abs(data.sum()), n - 1);
    CHECK(std::abs(std::abs(d.generic) - expected) < 1e-10 * expected);
    CHECK(d.match);
    CHECK(d.printed_matches == (n % 2 == 1));
  }
}

TEST_CASE("determinant depends only on S") {
  // Same S = 2 + i from different splittings.
  const LeadingData a{4, {1.0, 1.0, 1.0}, {1.0, cplx(0.5, 1.0), 0.5}};
  const LeadingData b{4, {cplx(0.3, 0.4), 2.0, 0.25}, {cplx(0.3, -0.4) * 2.0, cplx(0.25, 0.5), 4.0}};
  REQUIRE(std::abs(a.sum() - b.sum()) < 1e-15);
  const auto da = det_closed_form_check(a).generic, db = det_closed_form_check(b).generic;
  CHECK(std::abs(da - db) < 1e-10 * std::abs(da));
}
