#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "curvlab/error.hpp"
#include "curvlab/metric.hpp"
#include "curvlab/metric_io.hpp"
#include "curvlab/tensor.hpp"

using namespace curvlab;

namespace {

Tensor components_at(const MetricSpec& s, const std::vector<double>& p) {
  Tensor g(s.dim(), 2);
  for (int i = 0; i < s.dim(); ++i)
    for (int j = 0; j < s.dim(); ++j) g({i, j}) = eval(s.component(i, j), p, s.parameters());
  return g;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("curvlab_test_" + name)).string();
}

}  // namespace

TEST_SUITE("metric") {
  TEST_CASE("zoo oracles") {
    const MetricSpec s = zoo("sphere", {{"n", "4"}, {"r", "1"}});
    REQUIRE(s.oracle());
    CHECK(*s.oracle()->scalar_curvature == 12.0);
    CHECK(*s.oracle()->einstein);
    CHECK(*s.oracle()->conformally_flat);

    const MetricSpec p = zoo("product_spheres", {{"p", "2"}, {"a", "1"}, {"q", "2"}, {"b", "1"}});
    CHECK(*p.oracle()->scalar_curvature == doctest::Approx(4.0));
    CHECK(*p.oracle()->einstein);
    CHECK_FALSE(*p.oracle()->conformally_flat);
    CHECK(*p.oracle()->weyl_norm2 == doctest::Approx(16.0 / 3.0));

    const MetricSpec u = product_spheres(2, 1.0, 2, 2.0);
    CHECK(*u.oracle()->scalar_curvature == doctest::Approx(2.5));
    CHECK_FALSE(*u.oracle()->einstein);
    CHECK(*u.oracle()->traceless_ricci_norm2 == doctest::Approx(0.5625));

    const MetricSpec h = hyperbolic(5);
    CHECK(*h.oracle()->scalar_curvature == -20.0);
    CHECK(sphere(6, 2.0).oracle()->scalar_curvature.value() == doctest::Approx(30.0 / 4.0));
    // Einstein iff (p-1)/a^2 = (q-1)/b^2.
    CHECK(*product_spheres(3, 2.0, 2, std::sqrt(2.0)).oracle()->einstein);
  }

  TEST_CASE("zoo errors") {
    CHECK_THROWS_AS(zoo("torus", {}), Error);
    CHECK_THROWS_AS(zoo("sphere", {{"r", "-1"}}), Error);
    CHECK_THROWS_AS(zoo("sphere", {{"r", "0"}}), Error);
    CHECK_THROWS_AS(zoo("sphere", {{"radius", "1"}}), Error);
    CHECK_THROWS_AS(zoo("product_spheres", {{"p", "2"}, {"q", "2"}, {"n", "5"}}), Error);
    CHECK_THROWS_AS(zoo("product_spheres", {{"p", "2"}, {"q", "2"}, {"a", "0"}}), Error);
    CHECK_THROWS_AS(perturbation(4, 1, 0.06), Error);
    CHECK_THROWS_AS(perturbation(7, 1, 0.02), Error);
  }

  TEST_CASE("perturbation metrics are deterministic and positive definite") {
    const MetricSpec a = perturbation(4, 42, 0.02);
    const MetricSpec b = perturbation(4, 42, 0.02);
    const MetricSpec c = perturbation(4, 43, 0.02);
    bool differs = false;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        CHECK(a.component_text(i, j) == b.component_text(i, j));
        differs = differs || a.component_text(i, j) != c.component_text(i, j);
      }
    CHECK(differs);
    for (int n : {4, 5, 6})
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        const MetricSpec s = perturbation(n, seed, 0.05);
        for (const auto& p : sample_points(s, 20, seed)) CHECK_NOTHROW(MetricAtPoint::from_components(components_at(s, p)));
        // Corners of the box are the worst case for the Gershgorin bound.
        std::vector<double> corner(static_cast<std::size_t>(n), kPerturbationHalfWidth);
        CHECK_NOTHROW(MetricAtPoint::from_components(components_at(s, corner)));
      }
    const MetricSpec flat = perturbation(4, 42, 0.0);
    const std::vector<double> p = {0.1, 0.1, -0.1, 0.0};
    const Tensor g = components_at(flat, p);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(g({i, j}) == (i == j ? 1.0 : 0.0));
  }

  TEST_CASE("sampling is reproducible and stays in the box") {
    const MetricSpec s = sphere(4, 1.0);
    const auto a = sample_points(s, 20, 7);
    const auto b = sample_points(s, 20, 7);
    CHECK(a == b);
    CHECK(a != sample_points(s, 20, 8));
    for (const auto& p : a) CHECK(s.contains(p));
    for (std::uint64_t raw : {0ULL, 1ULL, ~0ULL}) {
      const double u = uniform01(raw);
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
    }
  }

  TEST_CASE("components are symmetric at sampled points") {
    for (const auto& s : {sphere(4, 1.0), product_spheres(2, 1.0, 2, 2.0), perturbation(5, 9, 0.02)})
      for (const auto& p : sample_points(s, 20, 1)) {
        const Tensor g = components_at(s, p);
        const int swap[] = {1, 0};
        CHECK(symmetry_defect(g, swap, 1.0) <= 1e-12);
      }
  }

  TEST_CASE("angular charts") {
    const MetricSpec a = angular_chart({4, 1.0, 0, 1.0});
    CHECK(a.coordinates() == std::vector<std::string>{"th1", "th2", "th3", "ph"});
    CHECK(a.is_cyclic(3));
    CHECK_FALSE(a.is_cyclic(0));
    const MetricSpec p = angular_chart({2, 1.0, 2, 2.0});
    CHECK(p.coordinates() == std::vector<std::string>{"th1_1", "ph1_", "th2_1", "ph2_"});
    CHECK(p.compact_model()->b == 2.0);
    CHECK_THROWS_AS(angular_chart({1, 1.0, 0, 1.0}), Error);
  }

  TEST_CASE("JSON round trip") {
    for (const auto& s : {sphere(4, 1.5), product_spheres(2, 1.0, 2, 2.0), perturbation(4, 42, 0.02),
                          conformal(4, "0.1*x1^2")}) {
      const std::string path = temp_path("roundtrip.json");
      save_metric(s, path);
      const MetricSpec t = load_metric(path);
      std::filesystem::remove(path);
      CHECK(t.name() == s.name());
      CHECK(t.coordinates() == s.coordinates());
      CHECK(t.parameters() == s.parameters());
      CHECK(t.sampling_box() == s.sampling_box());
      for (int i = 0; i < s.dim(); ++i)
        for (int j = i; j < s.dim(); ++j) CHECK(t.component(i, j) == s.component(i, j));
      CHECK(t.oracle().has_value() == s.oracle().has_value());
      if (s.oracle()) CHECK(t.oracle()->scalar_curvature == s.oracle()->scalar_curvature);
      CHECK(metric_to_json(t) == metric_to_json(s));
    }
  }

  TEST_CASE("metric file validation") {
    using nlohmann::json;
    json good = {{"name", "plane"},
                 {"dim", 2},
                 {"coordinates", {"x", "y"}},
                 {"parameters", {{"c", 2.0}}},
                 {"components", json::array({json::array({"c", "0.1*x"}), json::array({"0.1*x", "1 + y^2"})})},
                 {"sampling_box", {{-1, 1}, {-1, 1}}}};
    CHECK_NOTHROW(metric_from_json(good));

    json lower_blank = good;
    lower_blank["components"] = json::array({json::array({"c", "0.1*x"}), json::array({"", "1 + y^2"})});
    CHECK_NOTHROW(metric_from_json(lower_blank));

    json asym = good;
    asym["components"] = json::array({json::array({"c", "0.1*x"}), json::array({"0.2*x", "1 + y^2"})});
    CHECK_THROWS_AS(metric_from_json(asym), Error);

    json indefinite = good;
    indefinite["components"] = json::array({json::array({"-1", "0"}), json::array({"0", "1"})});
    CHECK_THROWS_AS(metric_from_json(indefinite), GeometryError);

    json bad_dim = good;
    bad_dim["dim"] = 3;
    CHECK_THROWS_AS(metric_from_json(bad_dim), Error);

    json unknown_symbol = good;
    unknown_symbol["components"] = json::array({json::array({"z", "0"}), json::array({"0", "1"})});
    CHECK_THROWS_AS(metric_from_json(unknown_symbol), UnknownSymbolError);

    json missing = good;
    missing.erase("sampling_box");
    CHECK_THROWS_AS(metric_from_json(missing), Error);

    CHECK_THROWS_AS(load_metric(temp_path("does_not_exist.json")), Error);
    const std::string path = temp_path("garbage.json");
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_metric(path), Error);
    std::filesystem::remove(path);
  }
}
