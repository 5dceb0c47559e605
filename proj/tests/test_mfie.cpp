#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "splinemom/assembly.hpp"
#include "splinemom/mie.hpp"
#include "splinemom/models.hpp"
#include "splinemom/postprocess.hpp"
#include "splinemom/quadrature.hpp"
#include "test_helpers.hpp"

using namespace splinemom;
using namespace splinemom::testing;

namespace {

// relative L2 distance between currents expanded in their own spaces
double l2_difference(const ConformingSpace& space_a, const Eigen::VectorXcd& a,
                     const ConformingSpace& space_b, const Eigen::VectorXcd& b, int order) {
    double diff = 0.0, norm = 0.0;
    for (int e = 0; e < space_a.mesh.count(); ++e) {
        const auto& el = space_a.mesh.elements[e];
        const auto& patch = space_a.surface().patches[el.patch];
        const Rule2D rule = tensor_rule(order);
        const double area = (el.rect.s1 - el.rect.s0) * (el.rect.t1 - el.rect.t0);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double s = el.rect.s0 + (el.rect.s1 - el.rect.s0) * rule.points[q].x();
            const double t = el.rect.t0 + (el.rect.t1 - el.rect.t0) * rule.points[q].y();
            const SurfaceFrame f = patch.frame(s, t);
            const auto ea = space_a.eval_basis(el.patch, el.is, el.it, s, t);
            const auto eb = space_b.eval_basis(el.patch, el.is, el.it, s, t);
            Eigen::Vector3cd va = Eigen::Vector3cd::Zero(), vb = Eigen::Vector3cd::Zero();
            for (int i = 0; i < ea.count; ++i)
                if (ea.global[i] >= 0)
                    va += ea.sign[i] * a(ea.global[i]) * ea.value[i].cast<std::complex<double>>();
            for (int i = 0; i < eb.count; ++i)
                if (eb.global[i] >= 0)
                    vb += eb.sign[i] * b(eb.global[i]) * eb.value[i].cast<std::complex<double>>();
            const double w = rule.weights[q] * area * f.surface_element;
            diff += w * (va - vb).squaredNorm();
            norm += w * va.squaredNorm();
        }
    }
    return std::sqrt(diff / norm);
}

} // namespace

TEST_CASE("mfie identity block is hermitian positive definite") {
    auto surf = std::make_shared<const MultipatchSurface>(make_sphere().refined(1));
    const auto curl = build_conforming_space(surf, SpaceKind::Curl, 2, 1);
    const Eigen::MatrixXcd mass = mfie_identity_block(curl, {});
    CHECK((mass - mass.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * mass.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(mass);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("mfie forcing against a direct quadrature oracle on a flat patch") {
    auto surf = std::make_shared<const MultipatchSurface>(
        assemble_multipatch({flat_patch(2, 2, 2, 2)}, {}));
    const auto div = build_conforming_space(surf, SpaceKind::Div, 2, 1);
    const auto curl = build_conforming_space(surf, SpaceKind::Curl, 2, 1);
    const auto cfg = ScatteringConfig::plane_wave(2.0, {1, 0, 0}, {0, 0, 1});
    const auto sys = assemble_mfie(div, curl, cfg, {});

    // oracle: g_A = integral of N^div_A . H^i with plain dense Gauss
    Eigen::VectorXcd oracle = Eigen::VectorXcd::Zero(div.global_dim);
    const Rule2D rule = tensor_rule(12);
    LocalBasis lb;
    for (int e = 0; e < div.mesh.count(); ++e) {
        const auto& el = div.mesh.elements[e];
        const auto& patch = surf->patches[el.patch];
        const double area = (el.rect.s1 - el.rect.s0) * (el.rect.t1 - el.rect.t0);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double s = el.rect.s0 + (el.rect.s1 - el.rect.s0) * rule.points[q].x();
            const double t = el.rect.t0 + (el.rect.t1 - el.rect.t0) * rule.points[q].y();
            const SurfaceFrame f = patch.frame(s, t);
            const Eigen::Vector3cd hi = incident_field_H(cfg, f.point);
            div.eval_parametric(el.patch, el.is, el.it, s, t, lb);
            for (int i = 0; i < lb.count; ++i)
                if (lb.global[i] >= 0) {
                    const Eigen::Vector3d v = f.jacobian * lb.vhat[i];
                    oracle(lb.global[i]) += rule.weights[q] * area * lb.sign[i] *
                                            (v.x() * hi.x() + v.y() * hi.y() + v.z() * hi.z());
                }
        }
    }
    CHECK((sys.rhs - oracle).norm() < 1e-10 * oracle.norm());
}

TEST_CASE("mfie and efie currents agree on the sphere") {
    const double k = 1.0;
    const auto cfg = ScatteringConfig::plane_wave(k, {1, 0, 0}, {0, 0, 1});
    auto surf = std::make_shared<const MultipatchSurface>(make_sphere().refined(1));
    const auto div = build_conforming_space(surf, SpaceKind::Div, 2, 1);
    const auto curl = build_conforming_space(surf, SpaceKind::Curl, 2, 1);

    const auto efie = assemble_efie(div, cfg, {});
    const auto mfie = assemble_mfie(div, curl, cfg, {});
    const auto j_efie = solve_dense(efie.matrix, efie.rhs);
    const auto j_mfie = solve_dense(mfie.matrix, mfie.rhs);

    // both solve the same physics; h1 discretization errors bound the gap
    const double gap = l2_difference(div, j_efie, curl, j_mfie, 5);
    CHECK(gap < 0.2);

    // and both radiate nearly the Mie backscatter at this long wavelength
    const double sigma_ref = mie_backscatter_rcs(MieSeries::for_ka(k));
    const auto amp_e = far_field_amplitude(div, j_efie, cfg, -cfg.propagation, 5);
    const auto amp_m = far_field_amplitude(curl, j_mfie, cfg, -cfg.propagation, 5);
    CHECK(rcs_from_amplitude(amp_e).sigma == doctest::Approx(sigma_ref).epsilon(0.05));
    CHECK(rcs_from_amplitude(amp_m).sigma == doctest::Approx(sigma_ref).epsilon(0.08));
}
