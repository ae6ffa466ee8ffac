#include <doctest.h>

#include <cmath>

#include "curvlab/checks.hpp"
#include "curvlab/error.hpp"
#include "curvlab/metric.hpp"
#include "generators.hpp"

using namespace curvlab;

namespace {

const CheckReport& sub(const CheckReport& r, const std::string& name) {
  for (const auto& s : r.sub_checks)
    if (s.name == name) return s;
  FAIL("missing sub-check " << name);
  return r;
}

// Weyl part of a random algebraic curvature tensor built from
// Kulkarni-Nomizu products, projected with the library-independent formula
// W = Rm - Ric0 o g / (n-2) - R g o g / (2n(n-1)).
Tensor random_weyl(gen::Rng& rng, const MetricAtPoint& m) {
  const int n = m.g().dim();
  Tensor rm(n, 4);
  for (int k = 0; k < 3; ++k) rm = rm + kulkarni_nomizu(gen::symmetric(rng, n), gen::symmetric(rng, n));
  const Tensor ric = contract(rm, 1, 3, m);
  const double scalar = contract(ric, 0, 1, m)[0];
  const Tensor t = traceless_part(ric, m);
  return rm - (1.0 / (n - 2)) * kulkarni_nomizu(t, m.g()) -
         (scalar / (2.0 * n * (n - 1))) * kulkarni_nomizu(m.g(), m.g());
}

}  // namespace

TEST_SUITE("checks") {
  TEST_CASE("constants") {
    CHECK(constants(4).c_n == doctest::Approx(std::sqrt(6.0) / 4.0).epsilon(1e-15));
    CHECK(constants(5).c_n == doctest::Approx(4.0 * std::sqrt(10.0) / 15.0).epsilon(1e-15));
    CHECK(constants(6).c_n == doctest::Approx(1.178839357).epsilon(1e-9));
    CHECK(*constants(4).e_n == doctest::Approx(std::sqrt(6.0)));
    CHECK_FALSE(constants(5).e_n.has_value());
    CHECK(*constants(5).e5_coefficient == doctest::Approx(1.184578679).epsilon(1e-9));
    CHECK(constants(4).pointwise_threshold == doctest::Approx(1.0 / std::sqrt(12.0)));
    CHECK(integral_factor(5) == doctest::Approx(std::sqrt(4.0 / 6.0)));
    CHECK(integral_factor(8) == doctest::Approx(2.0 / 6.0 * std::sqrt(14.0 / 6.0)));
    CHECK_THROWS_AS(constants(3), Error);
  }

  TEST_CASE("constants ordering") {
    const CheckReport r = check_constants_ordering();
    CHECK(r.ok);
    CHECK(r.verdict == "pass (discrepancy flagged)");
    CHECK(sub(r, "pointwise_ordering_n4").details.at("lhs") == doctest::Approx(0.1767767).epsilon(1e-7));
    CHECK(sub(r, "pointwise_ordering_n4").details.at("rhs") == 0.25);
    CHECK(sub(r, "pointwise_ordering_n5").details.at("lhs") == doctest::Approx(0.1721325).epsilon(1e-7));
    const CheckReport& e5 = sub(r, "integral_vs_e5_coefficient_n5");
    CHECK(e5.ok);
    CHECK(e5.details.at("lhs") == doctest::Approx(0.8164966).epsilon(1e-7));
    CHECK(e5.details.at("rhs") == doctest::Approx(1.184578679).epsilon(1e-9));
    CHECK(sub(r, "integral_vs_c4_n4").verdict == "discrepancy");
  }

  TEST_CASE("tolerances") {
    Tolerances t;
    CHECK_THROWS_AS(t.set("no_such_check", 1e-3), Error);
    CHECK_THROWS_AS(t.set("kato", -1.0), Error);
    CHECK(t.resolve("kato") == 1e-8);
    t.set("kato", 1e-3);
    CHECK(t.resolve("kato") == 1e-3);
    CHECK(t.resolve("okumura.norm_equality") == 1e-9);
    CHECK_THROWS_AS(t.resolve("bogus"), Error);
    for (const auto& name : tolerance_names()) CHECK(default_tolerance(name) > 0.0);
  }

  TEST_CASE("symmetry catalog passes on Euclidean space and a perturbation") {
    const auto flat = sample_bundles(euclidean(4), 5, 1);
    const CheckReport e = check_symmetry_catalog("euclidean", flat);
    CHECK(e.ok);
    for (const auto& s : e.sub_checks) CHECK_MESSAGE(s.residual_or_margin <= 1e-12, s.name);

    const auto b = sample_bundles(perturbation(4, 7, 0.02), 20, 1);
    const CheckReport p = check_symmetry_catalog("perturbation", b);
    CHECK(p.ok);
    for (const auto& s : p.sub_checks) CHECK_MESSAGE(s.ok, s.name << " " << s.residual_or_margin);
  }

  TEST_CASE("symmetry catalog catches a corrupted Weyl tensor") {
    auto b = sample_bundles(perturbation(4, 7, 0.02), 3, 1);
    Tensor h(4, 2);
    h({0, 0}) = 1.0;
    h({1, 1}) = -1.0;
    b[1].weyl = b[1].weyl + 0.1 * kulkarni_nomizu(h, b[1].metric.g());
    const CheckReport r = check_symmetry_catalog("corrupted", b);
    CHECK_FALSE(r.ok);
    const CheckReport& w = sub(r, "weyl_traceless");
    CHECK_FALSE(w.ok);
    CHECK(w.worst_point == b[1].point);
    CHECK(sub(r, "riemann_symmetries").ok);
  }

  TEST_CASE("oracle curvature on the zoo") {
    for (const auto& s : {sphere(4, 1.0), sphere(5, 2.0), hyperbolic(4), product_spheres(2, 1.0, 2, 1.0),
                          product_spheres(2, 1.0, 2, 2.0)}) {
      const CheckReport r = check_oracle(s, sample_bundles(s, 5, 3));
      CHECK_MESSAGE(r.ok, s.name());
    }
    const MetricSpec p = perturbation(4, 1, 0.02);
    CHECK_FALSE(check_oracle(p, sample_bundles(p, 3, 1)).applicable);
  }

  TEST_CASE("constant scalar curvature identities") {
    const auto prod = sample_bundles(product_spheres(2, 1.0, 2, 2.0), 10, 2);
    const CheckReport ri = check_ricci_identity("s2xs2", prod);
    CHECK(ri.ok);
    CHECK(ri.applicable);
    CHECK(ri.residual_or_margin <= 1e-6);
    // Ric0 is parallel, so the divergence term vanishes and the curvature
    // terms must cancel: rhs = 0 with every term nonzero.
    CHECK(std::abs(ri.details.at("rhs")) <= 1e-9);

    const CheckReport cb = check_contracted_bach("s2xs2", prod);
    CHECK(cb.ok);
    CHECK(cb.residual_or_margin <= 1e-6);

    const auto pert = sample_bundles(perturbation(4, 3, 0.02), 5, 1);
    CHECK_FALSE(check_ricci_identity("perturbation", pert).applicable);
    CHECK(check_ricci_identity("perturbation", pert).ok);
    CHECK_FALSE(check_contracted_bach("perturbation", pert).applicable);

    const auto alg = sample_bundles(sphere(4, 1.0), 2, 1, CurvatureLevel::algebraic);
    CHECK_THROWS_AS(check_ricci_identity("sphere", alg), Error);
  }

  TEST_CASE("Okumura estimate") {
    const auto prod = sample_bundles(product_spheres(2, 1.0, 2, 2.0), 10, 2);
    const CheckReport r = check_okumura("s2xs2", prod);
    CHECK(r.ok);
    CHECK(sub(r, "lambda=2").ok);
    CHECK(sub(r, "lambda_zero_reduction").residual_or_margin <= 1e-12);
    CHECK(sub(r, "norm_equality").residual_or_margin <= 1e-9);

    const auto pert = sample_bundles(perturbation(5, 4, 0.04), 10, 1);
    CHECK(check_okumura("perturbation", pert, {0.0, 0.5, -3.0}).ok);
    CHECK_FALSE(check_okumura("flat3", sample_bundles(euclidean(3), 2, 1)).applicable);
  }

  TEST_CASE("property: the Okumura estimate holds for random algebraic data") {
    for (int n : {4, 5, 6}) {
      gen::for_cases(60, 50 + static_cast<std::uint64_t>(n), [n](gen::Rng& rng, int) {
        CurvatureBundle b;
        b.dim = n;
        b.metric = MetricAtPoint::from_components(gen::metric(rng, n));
        b.point.assign(static_cast<std::size_t>(n), 0.0);
        b.weyl = random_weyl(rng, b.metric);
        b.traceless_ricci = traceless_part(gen::symmetric(rng, n, rng.uniform(0.01, 3.0)), b.metric);
        const double lambda = rng.uniform(-4.0, 4.0);
        const std::vector<CurvatureBundle> one = {b};
        const CheckReport r = check_okumura("random", one, {lambda, 0.0});
        CHECK_MESSAGE(r.ok, "lambda=" << lambda);
      });
    }
  }

  TEST_CASE("Weyl Laplacian estimate on Einstein metrics") {
    const CheckReport s = check_weyl_laplacian_einstein("sphere", sample_bundles(sphere(4, 1.0), 5, 1));
    CHECK(s.ok);
    CHECK(std::abs(s.details.at("max_abs_margin")) <= 1e-9);
    CHECK(check_weyl_laplacian_einstein("ball", sample_bundles(hyperbolic(4), 5, 1)).ok);

    // W is parallel on S2 x S2, so the derivative terms vanish and the margin
    // is 2 C_4 |W|^3 - (2/4) R |W|^2 with R = 4, |W|^2 = 16/3.
    const CheckReport p =
        check_weyl_laplacian_einstein("s2xs2", sample_bundles(product_spheres(2, 1.0, 2, 1.0), 5, 1));
    CHECK(p.ok);
    const double w = 4.0 / std::sqrt(3.0);
    CHECK(p.details.at("lhs") - p.details.at("rhs") ==
          doctest::Approx(2.0 * std::sqrt(6.0) / 4.0 * w * w * w - 2.0 * w * w).epsilon(1e-8));

    const CheckReport non = check_weyl_laplacian_einstein("pert", sample_bundles(perturbation(4, 1, 0.02), 3, 1));
    CHECK_FALSE(non.applicable);
    CHECK(non.verdict == "inapplicable");
  }

  TEST_CASE("pointwise pinching predicate") {
    const CheckReport s = pinch_pointwise_thm11("sphere", sample_bundles(sphere(4, 1.0), 5, 1));
    CHECK(s.verdict == "holds at all sampled points");
    CHECK(s.details.at("lhs_max") <= 1e-10);
    CHECK(s.details.at("rhs_min") == doctest::Approx(12.0 / std::sqrt(12.0)));

    const CheckReport p = pinch_pointwise_thm11("s2xs2", sample_bundles(product_spheres(2, 1.0, 2, 1.0), 5, 1));
    CHECK(p.verdict == "fails at all sampled points");
    CHECK(p.ok);
    CHECK(p.details.at("lhs_min") == doctest::Approx(4.0 / std::sqrt(3.0)));
    CHECK(p.details.at("rhs_max") == doctest::Approx(4.0 / std::sqrt(12.0)));

    const CheckReport e = pinch_pointwise_thm11("euclidean", sample_bundles(euclidean(4), 3, 1));
    CHECK(e.verdict == "degenerate");
    CHECK(e.ok);
  }

  TEST_CASE("Einstein pointwise pinching") {
    const CheckReport s = pinch_einstein_pointwise("sphere", sample_bundles(sphere(4, 1.0), 3, 1));
    CHECK(s.verdict == "holds at all sampled points");
    const CheckReport p = pinch_einstein_pointwise("s2xs2", sample_bundles(product_spheres(2, 1.0, 2, 1.0), 3, 1));
    // C_4 |W| = sqrt2 > R / 4 = 1.
    CHECK(p.verdict == "fails at all sampled points");
    CHECK(p.ok);
  }

  TEST_CASE("Kato inequality") {
    const CheckReport r = check_kato("perturbation", sample_bundles(perturbation(4, 11, 0.03), 15, 2));
    CHECK(r.ok);
    CHECK(r.details.at("supported_points") == 15.0);
    CHECK_FALSE(check_kato("sphere", sample_bundles(sphere(4, 1.0), 3, 1)).applicable);
  }

  TEST_CASE("reports are deterministic") {
    const MetricSpec s = perturbation(4, 5, 0.02);
    const auto a = sample_bundles(s, 6, 9);
    const auto b = sample_bundles(s, 6, 9);
    const CheckReport ra = check_symmetry_catalog("p", a);
    const CheckReport rb = check_symmetry_catalog("p", b);
    CHECK(ra.residual_or_margin == rb.residual_or_margin);
    CHECK(ra.worst_point == rb.worst_point);
    CHECK(check_okumura("p", a).residual_or_margin == check_okumura("p", b).residual_or_margin);
  }
}
