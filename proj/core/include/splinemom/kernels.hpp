#pragma once

#include <complex>

#include <Eigen/Dense>

namespace splinemom {

inline constexpr double kVacuumPermittivity = 8.8541878128e-12;
inline constexpr double kVacuumPermeability = 1.25663706212e-6;

/// Time-harmonic plane-wave excitation, e^{+j omega t} convention with
/// kernel e^{-jkr}. k = omega sqrt(eps mu).
struct ScatteringConfig {
    double wavenumber = 1.0;
    double permittivity = kVacuumPermittivity;
    double permeability = kVacuumPermeability;
    Eigen::Vector3d polarization{1.0, 0.0, 0.0};
    Eigen::Vector3d propagation{0.0, 0.0, 1.0};

    double omega() const { return wavenumber / std::sqrt(permittivity * permeability); }
    double impedance() const { return std::sqrt(permeability / permittivity); }

    /// Free-space plane wave; validates |d| = 1 and p.d = 0.
    static ScatteringConfig plane_wave(double k, const Eigen::Vector3d& polarization,
                                       const Eigen::Vector3d& propagation);
};

/// Helmholtz kernel e^{-jkr}/(4 pi r). Throws DomainError at r = 0 (the
/// singular transforms must shield coincident points).
std::complex<double> greens(double r, double k);

/// Gradient of the kernel with respect to the field point x; points along
/// the unit vector from x to y: (1/r + jk) G(r) (y-x)/r.
Eigen::Vector3cd grad_greens(const Eigen::Vector3d& x, const Eigen::Vector3d& y, double k);

Eigen::Vector3cd incident_field_E(const ScatteringConfig& config, const Eigen::Vector3d& x);
Eigen::Vector3cd incident_field_H(const ScatteringConfig& config, const Eigen::Vector3d& x);

} // namespace splinemom
