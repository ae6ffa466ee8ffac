#include <doctest.h>

#include <cmath>

#include "curvlab/error.hpp"
#include "curvlab/expr.hpp"
#include "curvlab/jet.hpp"
#include "curvlab/metric.hpp"
#include "generators.hpp"

using namespace curvlab;

namespace {

double max_abs_diff(const Jet& a, const Jet& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.coefficients().size(); ++k)
    m = std::max(m, std::abs(a.coefficients()[k] - b.coefficients()[k]));
  return m;
}

double max_abs(const Jet& a) {
  double m = 0.0;
  for (double c : a.coefficients()) m = std::max(m, std::abs(c));
  return m;
}

void check_coefficients(const Jet& j, std::initializer_list<double> expected) {
  REQUIRE(j.coefficients().size() == expected.size());
  std::size_t k = 0;
  for (double e : expected) CHECK(j.coefficients()[k++] == doctest::Approx(e).epsilon(1e-14));
}

}  // namespace

TEST_SUITE("jet") {
  TEST_CASE("table sizes and graded order") {
    CHECK(MultiIndexTable::table_size(8, 4) == 495);
    CHECK(MultiIndexTable::table_size(4, 4) == 70);
    const auto& t = MultiIndexTable::get(2, 2);
    REQUIRE(t.size() == 6);
    // 1, x1, x2, x1^2, x1 x2, x2^2
    CHECK(t.index(1)[0] == 1);
    CHECK(t.index(2)[1] == 1);
    CHECK(t.index(3)[0] == 2);
    CHECK((t.index(4)[0] == 1 && t.index(4)[1] == 1));
    CHECK(t.index(5)[1] == 2);
    CHECK(Jet(5, 3).coefficients().size() == MultiIndexTable::table_size(5, 3));
  }

  TEST_CASE("(1 + x)(1 - x)") {
    const Jet x = Jet::variable(1, 2, 0, 0.0);
    const Jet one = Jet::constant(1, 2, 1.0);
    check_coefficients((one + x) * (one - x), {1.0, 0.0, -1.0});
  }

  TEST_CASE("geometric series") {
    const Jet x = Jet::variable(1, 4, 0, 0.0);
    check_coefficients(Jet::constant(1, 4, 1.0) / (Jet::constant(1, 4, 1.0) - x), {1, 1, 1, 1, 1});
  }

  TEST_CASE("Poincare ball factor at the origin") {
    const std::vector<std::string> coords = {"x1", "x2", "x3", "x4"};
    const std::vector<double> p(4, 0.0);
    const Jet j = eval_jet(Expr::parse("4/(1 - (x1^2 + x2^2 + x3^2 + x4^2))^2", coords), p, {}, 4);
    CHECK(j.value() == doctest::Approx(4.0));
    for (double g : j.gradient()) CHECK(g == 0.0);
    for (int i = 0; i < 4; ++i) {
      MultiIndex a{};
      a[static_cast<std::size_t>(i)] = 2;
      CHECK(j.partial(std::vector<int>(a.begin(), a.begin() + 4)) == doctest::Approx(16.0));
      CHECK(j.coefficient(a) == doctest::Approx(8.0));
    }
  }

  TEST_CASE("univariate compositions") {
    const Jet x = Jet::variable(1, 4, 0, 0.0);
    check_coefficients(exp(x), {1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0});
    check_coefficients(sin(x * x), {0.0, 0.0, 1.0, 0.0, 0.0});
    check_coefficients(sqrt(Jet::constant(1, 4, 1.0) + x), {1.0, 0.5, -1.0 / 8.0, 1.0 / 16.0, -5.0 / 128.0});
    CHECK_THROWS_AS(sqrt(x), Error);
    CHECK_THROWS_AS(sqrt(x - Jet::constant(1, 4, 1.0)), Error);
  }

  TEST_CASE("partial derivatives") {
    const Jet x1 = Jet::variable(2, 3, 0, 0.0);
    const Jet x2 = Jet::variable(2, 3, 1, 0.0);
    const Jet j = x1 * x1 * x2;
    CHECK(j.partial(std::vector<int>{2, 1}) == 2.0);
    CHECK(j.partial(std::vector<int>{0, 0}) == j.value());
    const Jet s = sin(Jet::variable(1, 3, 0, 0.0));
    CHECK(s.partial(std::vector<int>{3}) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(s.partial(std::vector<int>{4}), ShapeError);
  }

  TEST_CASE("shape mismatches and division by zero") {
    CHECK_THROWS_AS(Jet(2, 3) + Jet(3, 3), ShapeError);
    CHECK_THROWS_AS(Jet(2, 3) * Jet(2, 2), ShapeError);
    CHECK_THROWS_AS(Jet::constant(2, 2, 1.0) / Jet(2, 2), Error);
    CHECK_THROWS_AS(Jet(9, 1), ShapeError);
    CHECK_THROWS_AS(Jet(2, 5), ShapeError);
  }

  TEST_CASE("property: ring axioms") {
    gen::for_cases(100, 21, [](gen::Rng& rng, int) {
      const int n = rng.integer(1, 5);
      const int m = rng.integer(0, 4);
      const Jet a = gen::jet(rng, n, m), b = gen::jet(rng, n, m), c = gen::jet(rng, n, m);
      const double tol = 1e-12 * std::max({1.0, max_abs(a * b * c)});
      CHECK(max_abs_diff(a + b, b + a) == 0.0);
      CHECK(max_abs_diff((a + b) + c, a + (b + c)) <= 1e-15);
      CHECK(max_abs_diff(a * b, b * a) <= tol);
      CHECK(max_abs_diff((a * b) * c, a * (b * c)) <= tol);
      CHECK(max_abs_diff(a * (b + c), a * b + a * c) <= tol);
    });
  }

  TEST_CASE("property: b * (1/b) = 1") {
    gen::for_cases(100, 22, [](gen::Rng& rng, int) {
      const int n = rng.integer(1, 6);
      const int m = rng.integer(0, 4);
      Jet b = gen::jet(rng, n, m, 0.5);
      double c0 = rng.uniform(0.1, 2.0);
      b.coefficients()[0] = rng.coin() ? c0 : -c0;
      const Jet one = Jet::constant(n, m, 1.0);
      const Jet r = b * reciprocal(b);
      CHECK(max_abs_diff(r, one) <= 1e-12 * std::max(1.0, max_abs(reciprocal(b)) * max_abs(b)));
      CHECK(max_abs_diff(b / b, one) <= 1e-12 * std::max(1.0, max_abs(reciprocal(b)) * max_abs(b)));
    });
  }

  TEST_CASE("property: elementary identities") {
    gen::for_cases(50, 23, [](gen::Rng& rng, int) {
      const int n = rng.integer(1, 4);
      Jet u = gen::jet(rng, n, 4, 0.5);
      const Jet one = Jet::constant(n, 4, 1.0);
      const Jet s = sin(u), c = cos(u);
      CHECK(max_abs_diff(s * s + c * c, one) <= 1e-12);
      CHECK(max_abs_diff(exp(u) * exp(-u), one) <= 1e-12 * max_abs(exp(u)) * max_abs(exp(-u)));
      u.coefficients()[0] = rng.uniform(0.5, 2.0);
      const Jet r = sqrt(u);
      CHECK(max_abs_diff(r * r, u) <= 1e-12 * std::max(1.0, max_abs(r) * max_abs(r)));
      CHECK(max_abs_diff(pow(u, 3), u * u * u) <= 1e-12 * std::max(1.0, max_abs(u * u * u)));
      CHECK(max_abs_diff(pow(u, -2) * u * u, one) <= 1e-11 * std::max(1.0, max_abs(pow(u, -2)) * max_abs(u * u)));
    });
  }

  TEST_CASE("property: derivative() lowers the order consistently") {
    gen::for_cases(50, 24, [](gen::Rng& rng, int) {
      const int n = rng.integer(1, 4);
      const Jet a = gen::jet(rng, n, 4);
      const int v = rng.integer(0, n - 1);
      const Jet d = a.derivative(v);
      CHECK(d.order() == 3);
      std::vector<int> alpha(static_cast<std::size_t>(n), 0), beta(static_cast<std::size_t>(n), 0);
      // |alpha| <= 2 keeps beta within the order of a.
      for (int i = 0; i < std::min(n, 2); ++i) alpha[static_cast<std::size_t>(i)] = rng.integer(0, 1);
      beta = alpha;
      beta[static_cast<std::size_t>(v)] += 1;
      CHECK(d.partial(alpha) == doctest::Approx(a.partial(beta)).epsilon(1e-12));
    });
  }

  TEST_CASE("zoo components agree with five-point differences") {
    const std::vector<MetricSpec> zoo_members = {sphere(4, 1.0), hyperbolic(4), product_spheres(2, 1.0, 2, 2.0),
                                                 conformal(4, "0.1*x1^2 - 0.2*x2*x3"), perturbation(4, 42, 0.02)};
    for (const auto& spec : zoo_members) {
      const auto pts = sample_points(spec, 3, 5);
      for (const auto& p : pts)
        for (int i = 0; i < spec.dim(); ++i)
          for (int j = i; j < spec.dim(); ++j) {
            const Expr& e = spec.component(i, j);
            const Jet jet = eval_jet(e, p, spec.parameters(), 2);
            const double h = 1e-3;
            for (int v = 0; v < spec.dim(); ++v) {
              auto f = [&](double t) {
                auto q = p;
                q[static_cast<std::size_t>(v)] += t;
                return eval(e, q, spec.parameters());
              };
              const double d1 = (f(-2 * h) - 8 * f(-h) + 8 * f(h) - f(2 * h)) / (12 * h);
              const double d2 = (-f(-2 * h) + 16 * f(-h) - 30 * f(0) + 16 * f(h) - f(2 * h)) / (12 * h * h);
              std::vector<int> a1(static_cast<std::size_t>(spec.dim()), 0);
              a1[static_cast<std::size_t>(v)] = 1;
              std::vector<int> a2 = a1;
              a2[static_cast<std::size_t>(v)] = 2;
              CHECK(std::abs(jet.partial(a1) - d1) <= 1e-5 * std::max(1.0, std::abs(d1)));
              CHECK(std::abs(jet.partial(a2) - d2) <= 1e-5 * std::max(1.0, std::abs(d2)));
            }
          }
    }
  }
}
