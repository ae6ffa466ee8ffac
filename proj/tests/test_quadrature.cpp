#include <doctest.h>

#include <cmath>
#include <numbers>

#include "curvlab/error.hpp"
#include "curvlab/metric.hpp"
#include "curvlab/quadrature.hpp"
#include "generators.hpp"

using namespace curvlab;

namespace {

constexpr double kPi = std::numbers::pi;

double traceless_norm2(const CurvatureBundle& b) { return norm2(b.traceless_ricci, b.metric); }
double weyl_norm(const CurvatureBundle& b) { return norm(b.weyl, b.metric); }

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("volumes of the compact models") {
    for (double r : {1.0, 2.0}) {
      const MetricSpec s4 = angular_chart({4, r, 0, 1.0});
      const Integral v = volume(s4, make_grid(s4, 12));
      CHECK(v.value == doctest::Approx(8.0 * kPi * kPi / 3.0 * std::pow(r, 4)).epsilon(1e-3));
      CHECK(v.refinement <= 1e-3);
    }
    const MetricSpec p = angular_chart({2, 1.0, 2, 2.0});
    CHECK(volume(p, make_grid(p, 16)).value == doctest::Approx(64.0 * kPi * kPi).epsilon(1e-3));
    const MetricSpec s3 = angular_chart({3, 1.0, 0, 1.0});
    CHECK(volume(s3, make_grid(s3, 12)).value == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-3));
  }

  TEST_CASE("volume scales like r^n") {
    const MetricSpec a = angular_chart({2, 1.0, 2, 1.0});
    const MetricSpec b = angular_chart({2, 2.0, 2, 2.0});
    const double ratio = volume(b, make_grid(b, 16)).value / volume(a, make_grid(a, 16)).value;
    CHECK(ratio == doctest::Approx(16.0).epsilon(2e-3));
  }

  TEST_CASE("curvature integrals on products of spheres") {
    const MetricSpec u = angular_chart({2, 1.0, 2, 2.0});
    const Integral r0 = integrate(u, traceless_norm2, make_grid(u, 16));
    CHECK(r0.value == doctest::Approx(36.0 * kPi * kPi).epsilon(1e-6));

    const MetricSpec p = angular_chart({2, 1.0, 2, 1.0});
    const Integral w = lp_norm(p, weyl_norm, 2.0, make_grid(p, 16));
    CHECK(w.value == doctest::Approx(std::sqrt(16.0 / 3.0 * 16.0 * kPi * kPi)).epsilon(1e-6));
    CHECK_THROWS_AS(lp_norm(p, weyl_norm, 0.5, make_grid(p, 8)), Error);
  }

  TEST_CASE("integrands depending on an azimuth keep it") {
    const MetricSpec p = angular_chart({2, 1.0, 2, 1.0});
    const ScalarField f = [](const CurvatureBundle& b) { return std::pow(std::cos(b.point[1]), 2); };
    const IntegrationGrid kept = make_grid(p, 16, {1});
    CHECK(kept.kept == std::vector<int>{1});
    const Integral half = integrate(p, f, kept, std::nullopt);
    CHECK(half.value == doctest::Approx(8.0 * kPi * kPi).epsilon(1e-10));
    const IntegrationGrid collapsed = make_grid(p, 16);
    CHECK(collapsed.collapsed == std::vector<int>{1, 3});
    CHECK(collapsed.size() == 16 * 16);
  }

  TEST_CASE("several fields in one pass") {
    const MetricSpec p = angular_chart({2, 1.0, 2, 1.0});
    const std::vector<ScalarField> fields = {[](const CurvatureBundle&) { return 1.0; },
                                             [](const CurvatureBundle& b) { return b.scalar; }};
    const auto out = integrate(p, fields, make_grid(p, 12));
    REQUIRE(out.size() == 2);
    CHECK(out[1].value == doctest::Approx(4.0 * out[0].value).epsilon(1e-12));
  }

  TEST_CASE("grid and metric must match") {
    const MetricSpec a = angular_chart({4, 1.0, 0, 1.0});
    const MetricSpec b = angular_chart({4, 2.0, 0, 1.0});
    CHECK_THROWS_AS(volume(b, make_grid(a, 8)), Error);
    CHECK_THROWS_AS(make_grid(sphere(4, 1.0), 8), Error);
    CHECK_THROWS_AS(make_grid(a, 1), Error);
  }

  TEST_CASE("Sobolev quotient of constants") {
    const MetricSpec s4 = angular_chart({4, 1.0, 0, 1.0});
    const SobolevQuotient q = sobolev_quotient(s4, "1", 12);
    CHECK(q.quotient == doctest::Approx(2.0 * std::sqrt(8.0 * kPi * kPi / 3.0)).epsilon(1e-6));
    CHECK(sobolev_quotient(s4, "3", 12).quotient == doctest::Approx(q.quotient).epsilon(1e-12));

    const MetricSpec p = angular_chart({2, 1.0, 2, 1.0});
    CHECK(sobolev_quotient(p, "1", 16).quotient == doctest::Approx(8.0 * kPi / 3.0).epsilon(1e-6));
    CHECK_THROWS_AS(sobolev_quotient(p, "0", 8), Error);
  }

  TEST_CASE("property: the round sphere minimizes the quotient") {
    const MetricSpec s4 = angular_chart({4, 1.0, 0, 1.0});
    const double q1 = sobolev_quotient(s4, "1", 10).quotient;
    gen::for_cases(4, 61, [&](gen::Rng& rng, int) {
      const double a = rng.uniform(-0.8, 0.8), b = rng.uniform(-0.8, 0.8);
      const std::string u = "2 + " + std::to_string(a) + "*cos(th1) + " + std::to_string(b) + "*sin(th2)^2";
      const SobolevQuotient q = sobolev_quotient(s4, u, 10);
      CHECK_MESSAGE(q.quotient >= q1 * (1.0 - 1e-6), u);
      CHECK(q.numerator > 0.0);
      CHECK(q.denominator > 0.0);
    });
  }

  TEST_CASE("integral pinching verdicts") {
    const MetricSpec p = angular_chart({2, 1.0, 2, 1.0});
    const CheckReport r = thm12_report(p, {"1", "2 + cos(th1_1)"}, 16);
    CHECK(r.verdict == "condition-fails");
    CHECK(r.ok);
    CHECK(r.residual_or_margin < 0.0);
    CHECK(r.details.at("Q_upper") == doctest::Approx(8.0 * kPi / 3.0).epsilon(1e-6));

    const MetricSpec s4 = angular_chart({4, 1.0, 0, 1.0});
    CHECK(thm12_report(s4, {"1"}, 8).verdict == "holds-trivially");
    CHECK_THROWS_AS(thm12_report(s4, {}, 8), Error);
    CHECK_THROWS_AS(thm12_report(angular_chart({3, 1.0, 0, 1.0}), {"1"}, 8), Error);
  }

  TEST_CASE("stereographic and angular charts agree") {
    const CompactModel s4{4, 1.0, 0, 1.0};
    const std::vector<double> origin(4, 0.0);
    const auto south = stereographic_to_angular(s4, origin);
    REQUIRE(south.size() == 4);
    // The origin maps to (0, 0, 0, 0, -1) in the embedding.
    for (int k = 0; k < 3; ++k) CHECK(south[static_cast<std::size_t>(k)] == doctest::Approx(kPi / 2.0));
    CHECK(south[3] == doctest::Approx(1.5 * kPi));
    for (const CompactModel& m : {s4, CompactModel{4, 2.0, 0, 1.0}, CompactModel{2, 1.0, 2, 2.0}}) {
      const CheckReport r = check_chart_independence(m, 5, 3);
      CHECK(r.ok);
      CHECK(r.residual_or_margin <= 1e-6);
    }
  }
}
