#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "splinemom/models.hpp"
#include "splinemom/surface_mesh.hpp"
#include "test_helpers.hpp"

using namespace splinemom;
using namespace splinemom::testing;

TEST_CASE("sphere: six biquartic patches, exact radius") {
    const auto sphere = make_sphere();
    REQUIRE(sphere.patch_count() == 6);
    for (const auto& p : sphere.patches) {
        CHECK(p.space().s.degree() == 4);
        CHECK(p.space().t.degree() == 4);
    }
    CHECK(sphere.total_elements() == 6);

    double max_dev = 0.0;
    for (int p = 0; p < 6; ++p)
        for (int k = 0; k < 1700; ++k) {
            const double s = uniform(0, 1), t = uniform(0, 1);
            max_dev = std::max(max_dev, std::abs(sphere.patches[p].map_point(s, t).norm() - 1.0));
        }
    CHECK(max_dev < 1e-9);
}

TEST_CASE("sphere: watertight with no degenerate points") {
    const auto sphere = make_sphere();
    CHECK(sphere.edges.size() == 12);
    CHECK(sphere.degenerate_edges.empty());
    for (const auto& e : sphere.edges) {
        for (int k = 0; k <= 50; ++k) {
            const double u = k / 50.0;
            const auto [sa, ta] = edge_point(e.edge_a, u);
            const auto [sb, tb] = edge_point(e.edge_b, e.reversed ? 1 - u : u);
            const Eigen::Vector3d xa = sphere.patches[e.patch_a].map_point(sa, ta);
            const Eigen::Vector3d xb = sphere.patches[e.patch_b].map_point(sb, tb);
            CHECK((xa - xb).norm() < 1e-10);
        }
    }
    for (int p = 0; p < 6; ++p)
        for (int k = 0; k < 100; ++k)
            CHECK(!sphere.patches[p].frame(uniform(0, 1), uniform(0, 1)).degenerate);
}

TEST_CASE("sphere: outward normals parallel to position") {
    const auto sphere = make_sphere();
    for (int p = 0; p < 6; ++p)
        for (int k = 0; k < 60; ++k) {
            const double s = uniform(0, 1), t = uniform(0, 1);
            const auto f = sphere.patches[p].frame(s, t);
            CHECK((f.unit_normal - f.point.normalized()).norm() < 1e-8);
        }
}

TEST_CASE("sphere: refinement element counts h0 -> h1") {
    const auto sphere = make_sphere();
    CHECK(sphere.refined(1).total_elements() == 24);
    CHECK(sphere.refined(2).total_elements() == 96);
}

TEST_CASE("almond: four bicubic patches with two tips") {
    const auto almond = make_almond();
    REQUIRE(almond.patch_count() == 4);
    for (const auto& p : almond.patches) {
        CHECK(p.space().s.degree() == 3);
        CHECK(p.space().t.degree() == 3);
    }
    CHECK(almond.total_elements() == 288);
    CHECK(almond.degenerate_edges.size() == 4);

    // the four collapsed sides meet in exactly two distinct tip points
    std::vector<Eigen::Vector3d> tips;
    for (const auto& d : almond.degenerate_edges) {
        const auto [s, t] = edge_point(d.edge, 0.5);
        const Eigen::Vector3d x = almond.patches[d.patch].map_point(s, t);
        bool found = false;
        for (const auto& tip : tips)
            if ((tip - x).norm() < 1e-9) found = true;
        if (!found) tips.push_back(x);
    }
    CHECK(tips.size() == 2);
}

TEST_CASE("almond: analytic branch values and extents") {
    const double L = kAlmondLength;
    // rear branch at the junction: y = 0.193333 L, z = 0
    const Eigen::Vector3d junc = almond_analytic_point(0, 0.0, 1.0);
    CHECK(junc.x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(junc.y() == doctest::Approx(0.193333 * L).epsilon(1e-12));
    CHECK(junc.z() == doctest::Approx(0.0));

    const auto almond = make_almond();
    double xmin = 1e9, xmax = -1e9;
    for (const auto& p : almond.patches)
        for (int k = 0; k <= 400; ++k) {
            const double x = p.map_point(uniform(0, 1), k / 400.0).x();
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
        }
    CHECK(xmin == doctest::Approx(-0.416667 * L).epsilon(2e-4));
    CHECK(xmax == doctest::Approx(0.58333 * L).epsilon(2e-4));
}

TEST_CASE("almond: fit deviation below 1e-4 of the length") {
    const auto almond = make_almond();
    double max_dev = 0.0;
    for (int branch = 0; branch < 2; ++branch)
        for (int half = 0; half < 2; ++half) {
            const auto& patch = almond.patches[2 * branch + half];
            for (int k = 0; k < 900; ++k) {
                const double sigma = uniform(0, 1), tau = uniform(0, 1);
                const double angle = (half == 0 ? -M_PI : 0.0) + M_PI * sigma;
                const Eigen::Vector3d exact = almond_analytic_point(branch, angle, tau);
                max_dev = std::max(max_dev, (exact - patch.map_point(sigma, tau)).norm());
            }
        }
    CHECK(max_dev < 1e-4 * kAlmondLength);
}

TEST_CASE("almond: watertight seams and junction") {
    const auto almond = make_almond();
    CHECK(almond.edges.size() == 6);
    for (const auto& e : almond.edges)
        for (int k = 0; k <= 50; ++k) {
            const double u = k / 50.0;
            const auto [sa, ta] = edge_point(e.edge_a, u);
            const auto [sb, tb] = edge_point(e.edge_b, e.reversed ? 1 - u : u);
            CHECK((almond.patches[e.patch_a].map_point(sa, ta) -
                   almond.patches[e.patch_b].map_point(sb, tb))
                      .norm() < 1e-10);
        }
}
