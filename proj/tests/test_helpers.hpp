#pragma once

#include <random>

#include "splinemom/multipatch.hpp"
#include "splinemom/nurbs_patch.hpp"

namespace splinemom::testing {

/// Deterministic rng for property-style tests.
inline std::mt19937& rng() {
    static std::mt19937 gen(0x5eed);
    return gen;
}

inline double uniform(double a, double b) {
    std::uniform_real_distribution<double> dist(a, b);
    return dist(rng());
}

/// Flat unit patch F(s,t) = (s,t,0): control points on the Greville grid
/// reproduce the identity map exactly.
inline NurbsPatch flat_patch(int degree_s, int degree_t, int elems_s, int elems_t) {
    TensorSpace space{KnotVector::uniform(degree_s, elems_s),
                      KnotVector::uniform(degree_t, elems_t)};
    const auto gs = space.s.greville();
    const auto gt = space.t.greville();
    NurbsPatch::ControlPoints cps(space.dim(), 4);
    for (int j = 0; j < space.t.basis_count(); ++j)
        for (int i = 0; i < space.s.basis_count(); ++i)
            cps.row(space.linear_index(i, j)) << gs[i], gt[j], 0.0, 1.0;
    return NurbsPatch(std::move(space), std::move(cps));
}

/// Flat patch translated/scaled into an arbitrary rectangle of the plane
/// z = z0, for multipatch tests.
inline NurbsPatch flat_patch_at(int degree, int elems, double x0, double x1, double y0,
                                double y1, double z0 = 0.0) {
    TensorSpace space{KnotVector::uniform(degree, elems), KnotVector::uniform(degree, elems)};
    const auto gs = space.s.greville();
    const auto gt = space.t.greville();
    NurbsPatch::ControlPoints cps(space.dim(), 4);
    for (int j = 0; j < space.t.basis_count(); ++j)
        for (int i = 0; i < space.s.basis_count(); ++i)
            cps.row(space.linear_index(i, j)) << x0 + (x1 - x0) * gs[i], y0 + (y1 - y0) * gt[j],
                z0, 1.0;
    return NurbsPatch(std::move(space), std::move(cps));
}

/// Smooth curved patch with deterministic control perturbations.
inline NurbsPatch bumpy_patch(int degree = 3, int elems = 3) {
    TensorSpace space{KnotVector::uniform(degree, elems), KnotVector::uniform(degree, elems)};
    const auto gs = space.s.greville();
    const auto gt = space.t.greville();
    NurbsPatch::ControlPoints cps(space.dim(), 4);
    for (int j = 0; j < space.t.basis_count(); ++j)
        for (int i = 0; i < space.s.basis_count(); ++i) {
            const double z = 0.3 * std::sin(2.1 * gs[i] + 0.7) * std::cos(1.7 * gt[j]);
            const double w = 1.0 + 0.2 * std::sin(3.0 * gs[i]) * std::sin(2.0 * gt[j]);
            cps.row(space.linear_index(i, j)) << w * gs[i], w * gt[j], w * z, w;
        }
    return NurbsPatch(std::move(space), std::move(cps));
}

} // namespace splinemom::testing
