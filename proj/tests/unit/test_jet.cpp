#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cpn/errors.hpp"
#include "helpers.hpp"

using namespace cpn;
using testing::J;

namespace {
J jet(std::vector<cplx> c) { return J(cplx{}, std::move(c)); }
}

TEST_CASE("truncated product") {
  CHECK(jet_mul(jet({1, 1, 0}), jet({1, -1, 0})).max_abs() == 1.0);
  const auto p = jet({1, 1, 0}) * jet({1, -1, 0});
  CHECK(p[0] == cplx(1));
  CHECK(p[1] == cplx(0));
  CHECK(p[2] == cplx(-1));
  const auto id = jet({1, 1, 1}) * jet({1, 0, 0});
  for (int m = 0; m < 3; ++m) CHECK(id[m] == cplx(1));
  CHECK((jet({0, 0, 1}) * jet({0, 0, 1})).max_abs() == 0.0);
}

TEST_CASE("derivative") {
  const auto d = jet_derive(jet({1, 2, 3}));
  CHECK(d[0] == cplx(2));
  CHECK(d[1] == cplx(6));
  CHECK(d[2] == cplx(0));
  CHECK(jet_derive(jet({{0.5, 2.0}, 0, 0})).max_abs() == 0.0);
  const auto d2 = jet_derive(jet({0, 0, 5}));
  CHECK(d2[1] == cplx(10));
  CHECK(d2[0] == cplx(0));
}

TEST_CASE("evaluation") {
  CHECK(std::abs(jet_eval(jet({1, 2, 3}), cplx{0.5}) - 2.75) < 1e-15);
  const J b(cplx{0.3, -0.2}, std::vector<cplx>{{1.5, 2.0}, 7.0, -3.0});
  CHECK(jet_eval(b, b.base_point()) == cplx(1.5, 2.0));
  CHECK(std::abs(jet_eval(jet({0, 1}), cplx{0, 1}) - cplx(0, 1)) < 1e-15);
}

TEST_CASE("order and base point mismatch are rejected") {
  CHECK_THROWS_AS(jet({1, 2}) * jet({1, 2, 3}), ConfigError);
  const J shifted(cplx{1.0}, std::vector<cplx>{1, 2});
  CHECK_THROWS_AS(jet({1, 2}) + shifted, ConfigError);
  CHECK_THROWS_AS(J(cplx{}, -1), ConfigError);
}

TEST_CASE("factories") {
  const auto c = J::constant(cplx{}, 3, cplx{2.0});
  CHECK(c[0] == cplx(2.0));
  CHECK(c[3] == cplx(0.0));
  const auto x = J::variable(cplx{1.0}, 3);
  CHECK(x[0] == cplx(1.0));
  CHECK(x[1] == cplx(1.0));
  CHECK(std::abs(jet_eval(x, cplx{1.25}) - 1.25) < 1e-15);
}

TEST_CASE("product is commutative and associative") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int order = 1 + trial % 8;
    const auto a = testing::random_jet(rng, order), b = testing::random_jet(rng, order),
               c = testing::random_jet(rng, order);
    CHECK(testing::jet_diff(a * b, b * a) < 1e-13);
    CHECK(testing::jet_diff((a * b) * c, a * (b * c)) < 1e-13);
  }
}

TEST_CASE("Leibniz rule below the top coefficient") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int order = 2 + trial % 7;
    const auto a = testing::random_jet(rng, order), b = testing::random_jet(rng, order);
    const auto lhs = jet_derive(a * b);
    const auto rhs = jet_derive(a) * b + a * jet_derive(b);
    for (int m = 0; m < order; ++m) CHECK(std::abs(lhs[m] - rhs[m]) < 1e-13 * (1 + std::abs(lhs[m])));
  }
}

TEST_CASE("evaluation of a product up to truncation") {
  Rng rng(13);
  const cplx base{0.2, 0.1};
  for (int order : {2, 4, 6}) {
    const auto a = testing::random_jet(rng, order, base), b = testing::random_jet(rng, order, base);
    for (double r : {1e-2, 5e-3}) {
      const cplx xi = base + std::polar(r, 0.7);
      const cplx err = jet_eval(a * b, xi) - jet_eval(a, xi) * jet_eval(b, xi);
      CHECK(std::abs(err) < 10 * std::pow(r, order + 1));
    }
  }
}

TEST_CASE("float128 cast keeps coefficients") {
  const auto a = jet({{1.0, 2.0}, 3.0});
  const auto q = a.cast<Quad>();
  CHECK(to_double(q[0]) == cplx(1.0, 2.0));
  CHECK(q.cast<double>()[1] == cplx(3.0));
}
