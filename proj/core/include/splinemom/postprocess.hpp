#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "splinemom/conforming_space.hpp"
#include "splinemom/kernels.hpp"

namespace splinemom {

/// Radar cross section value; sigma in area units, dBsm = 10 log10(sigma).
struct RcsResult {
    double sigma = 0.0;
    double sigma_dbsm = 0.0;
};

RcsResult rcs_from_amplitude(const Eigen::Vector3cd& amplitude);

/// Far-field radiation integral with the spherical spreading factored out:
/// A(d) = -j omega mu / (4 pi) * integral of J(y) e^{jk d.y} dGamma(y).
/// sigma = 4 pi |A|^2 for |E^i| = 1.
Eigen::Vector3cd far_field_amplitude(const ConformingSpace& space,
                                     const Eigen::VectorXcd& coeffs,
                                     const ScatteringConfig& config,
                                     const Eigen::Vector3d& observation_dir, int quad_order);

/// Pointwise reference surface field for error norms.
struct ReferenceField {
    std::function<Eigen::Vector3cd(const Eigen::Vector3d&)> current;
    std::function<std::complex<double>(const Eigen::Vector3d&)> divergence;
};

/// Relative error in the H(div) norm ||v||_L2 + ||div v||_L2.
double hdiv_error(const ConformingSpace& space, const Eigen::VectorXcd& coeffs,
                  const ReferenceField& reference, int quad_order);

/// One row of a sweep table; failed points carry the error message.
struct SweepRow {
    double abscissa = 0.0; // ka or angle in degrees
    RcsResult rcs;
    bool ok = true;
    std::string error;
};

/// Monostatic sweep: re-solves per wavenumber through the supplied solver
/// (observation = -propagation). Per-point failures are recorded and the
/// sweep continues.
std::vector<SweepRow> monostatic_sweep(
    const ConformingSpace& space, const ScatteringConfig& config_template,
    const std::vector<double>& wavenumbers,
    const std::function<Eigen::VectorXcd(const ScatteringConfig&)>& solve, int quad_order);

/// Bistatic sweep: one solved current, observation directions in the plane
/// spanned by axis_0 (angle 0) and axis_90 (angle 90 degrees).
std::vector<SweepRow> bistatic_sweep(const ConformingSpace& space,
                                     const Eigen::VectorXcd& coeffs,
                                     const ScatteringConfig& config,
                                     const Eigen::Vector3d& axis_0,
                                     const Eigen::Vector3d& axis_90,
                                     const std::vector<double>& angles_deg, int quad_order);

/// Uniform per-element surface samples of a solved current.
struct SurfaceSample {
    int patch = 0;
    int element = 0;
    double s = 0.0, t = 0.0;
    Eigen::Vector3d position;
    Eigen::Vector3cd current;
};

std::vector<SurfaceSample> sample_surface_current(const ConformingSpace& space,
                                                  const Eigen::VectorXcd& coeffs,
                                                  int samples_per_direction);

void write_samples_csv(const std::vector<SurfaceSample>& samples, const std::string& path);
/// Legacy-VTK polydata quads with real/imaginary current point data.
void write_samples_vtk(const ConformingSpace& space, const Eigen::VectorXcd& coeffs,
                       int samples_per_direction, const std::string& path);

} // namespace splinemom
