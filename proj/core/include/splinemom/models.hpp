#pragma once

#include "splinemom/multipatch.hpp"

namespace splinemom {

/// Unit PEC sphere as six rational biquartic patches in cube topology,
/// exact to round-off, no degenerate points. Degrees (4,4), one element
/// per patch before refinement.
MultipatchSurface make_sphere();

/// Almond length in metres used by make_almond.
inline constexpr double kAlmondLength = 0.2524;

/// NASA almond as four bicubic patches (two half-circumference bands per
/// parametric branch) with two degenerate tips; 288 elements before
/// refinement. Bicubic tensor interpolation of the analytic surface; the
/// maximum deviation stays below 1e-4 times the body length.
MultipatchSurface make_almond();

/// Analytic almond surface point (parametric branches in angle form);
/// branch 0 covers the rear cap, branch 1 the front body. s in [0,2pi),
/// psi in [0,1] from tip/junction. Exposed for the geometry-fit oracle.
Eigen::Vector3d almond_analytic_point(int branch, double s_angle, double psi);

} // namespace splinemom
