#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "splinemom/assembly.hpp"
#include "splinemom/errors.hpp"
#include "splinemom/models.hpp"
#include "splinemom/postprocess.hpp"
#include "test_helpers.hpp"

using namespace splinemom;
using namespace splinemom::testing;

TEST_CASE("rcs values and decibel form") {
    Eigen::Vector3cd amp(std::sqrt(1.0 / (4 * M_PI)), 0, 0);
    const auto unit = rcs_from_amplitude(amp);
    CHECK(unit.sigma == doctest::Approx(1.0));
    CHECK(unit.sigma_dbsm == doctest::Approx(0.0));

    amp *= 10.0; // sigma = 100
    const auto hundred = rcs_from_amplitude(amp);
    CHECK(hundred.sigma == doctest::Approx(100.0));
    CHECK(hundred.sigma_dbsm == doctest::Approx(20.0));

    // dBsm round trip
    for (double sigma : {0.017, 3.9, 240.0}) {
        Eigen::Vector3cd a(std::sqrt(sigma / (4 * M_PI)), 0, 0);
        const auto r = rcs_from_amplitude(a);
        CHECK(std::pow(10.0, r.sigma_dbsm / 10.0) == doctest::Approx(r.sigma).epsilon(1e-12));
    }
}

TEST_CASE("far field: zero current and linearity") {
    auto surf = std::make_shared<const MultipatchSurface>(make_sphere());
    const auto space = build_conforming_space(surf, SpaceKind::Div, 1, 0);
    const auto cfg = ScatteringConfig::plane_wave(2.0, {1, 0, 0}, {0, 0, 1});
    const Eigen::Vector3d obs(0, 0, -1);

    CHECK(far_field_amplitude(space, Eigen::VectorXcd::Zero(space.global_dim), cfg, obs, 4)
              .norm() == 0.0);

    Eigen::VectorXcd a(space.global_dim), b(space.global_dim);
    for (int i = 0; i < space.global_dim; ++i) {
        a(i) = std::complex<double>(uniform(-1, 1), uniform(-1, 1));
        b(i) = std::complex<double>(uniform(-1, 1), uniform(-1, 1));
    }
    const auto fa = far_field_amplitude(space, a, cfg, obs, 4);
    const auto fb = far_field_amplitude(space, b, cfg, obs, 4);
    const auto fab = far_field_amplitude(space, (2.0 * a + 3.0 * b).eval(), cfg, obs, 4);
    CHECK((fab - 2.0 * fa - 3.0 * fb).norm() < 1e-12 * fab.norm());
}

TEST_CASE("monostatic backscatter independent of observation roll") {
    // backscatter of the sphere does not depend on the azimuth of the
    // incident polarization
    const double k = 1.5;
    auto surf = std::make_shared<const MultipatchSurface>(make_sphere().refined(1));
    const auto space = build_conforming_space(surf, SpaceKind::Div, 2, 1);
    double first = -1.0;
    for (double roll : {0.0, 0.4, 1.2}) {
        const Eigen::Vector3d pol(std::cos(roll), std::sin(roll), 0.0);
        const auto cfg = ScatteringConfig::plane_wave(k, pol, {0, 0, 1});
        const auto sys = assemble_efie(space, cfg, {});
        const auto coeffs = solve_dense(sys.matrix, sys.rhs);
        const double sigma =
            rcs_from_amplitude(far_field_amplitude(space, coeffs, cfg, {0, 0, -1}, 5)).sigma;
        if (first < 0)
            first = sigma;
        else
            CHECK(sigma == doctest::Approx(first).epsilon(1e-6));
    }
}

TEST_CASE("surface sampling: counts and zero solution") {
    auto surf = std::make_shared<const MultipatchSurface>(make_sphere());
    const auto space = build_conforming_space(surf, SpaceKind::Div, 1, 0);
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(space.global_dim);
    const auto samples = sample_surface_current(space, zero, 3);
    CHECK(samples.size() == static_cast<std::size_t>(space.mesh.count()) * 9);
    for (const auto& s : samples) CHECK(s.current.norm() == 0.0);

    write_samples_csv(samples, "samples_test.csv");
    std::ifstream is("samples_test.csv");
    int lines = 0;
    std::string line;
    while (std::getline(is, line)) ++lines;
    CHECK(lines == static_cast<int>(samples.size()) + 1);

    write_samples_vtk(space, zero, 2, "samples_test.vtk");
    std::ifstream vtk("samples_test.vtk");
    std::string head;
    std::getline(vtk, head);
    CHECK(head.find("vtk DataFile") != std::string::npos);
}

TEST_CASE("sweep handling: single point equals direct evaluation, failures recorded") {
    auto surf = std::make_shared<const MultipatchSurface>(make_sphere());
    const auto space = build_conforming_space(surf, SpaceKind::Div, 1, 0);
    const auto tmpl = ScatteringConfig::plane_wave(1.0, {1, 0, 0}, {0, 0, 1});

    auto solver = [&](const ScatteringConfig& cfg) {
        const auto sys = assemble_efie(space, cfg, {});
        return solve_dense(sys.matrix, sys.rhs);
    };
    const auto rows = monostatic_sweep(space, tmpl, {2.0}, solver, 4);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].ok);

    const auto cfg2 = ScatteringConfig::plane_wave(2.0, {1, 0, 0}, {0, 0, 1});
    const auto direct = rcs_from_amplitude(
        far_field_amplitude(space, solver(cfg2), cfg2, -cfg2.propagation, 4));
    CHECK(rows[0].rcs.sigma == doctest::Approx(direct.sigma).epsilon(1e-13));

    // a throwing solver marks the point failed and the sweep continues
    int calls = 0;
    auto flaky = [&](const ScatteringConfig& cfg) -> Eigen::VectorXcd {
        if (++calls == 1) throw SolverError("synthetic failure");
        return solver(cfg);
    };
    const auto rows2 = monostatic_sweep(space, tmpl, {1.0, 2.0}, flaky, 4);
    REQUIRE(rows2.size() == 2);
    CHECK(!rows2[0].ok);
    CHECK(rows2[0].error.find("synthetic") != std::string::npos);
    CHECK(rows2[1].ok);
}

TEST_CASE("cli determinism: hmatrix save then load reproduces the rcs exactly") {
#ifdef SPLINEMOM_CLI_PATH
    const std::string cli = SPLINEMOM_CLI_PATH;
    auto run = [&](const std::string& args) {
        FILE* pipe = popen((cli + " " + args + " 2>/dev/null").c_str(), "r");
        REQUIRE(pipe != nullptr);
        std::string out;
        char buf[256];
        while (std::fgets(buf, sizeof(buf), pipe)) out += buf;
        pclose(pipe);
        return out;
    };
    const std::string base =
        "solve --model sphere --href 1 --degree 1,0 --k 2 --hmatrix --leaf-size 8";
    const std::string first = run(base + " --save-matrix cli_z.hm");
    const std::string second = run(base + " --load-matrix cli_z.hm");
    REQUIRE(!first.empty());
    // identical numeric lines (same operator bits, same arithmetic path)
    CHECK(first == second);
#endif
}
