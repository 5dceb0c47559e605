#include "splinemom/kernels.hpp"

#include <cmath>

#include "splinemom/errors.hpp"

namespace splinemom {

ScatteringConfig ScatteringConfig::plane_wave(double k, const Eigen::Vector3d& polarization,
                                              const Eigen::Vector3d& propagation) {
    if (k <= 0.0) throw DomainError("plane wave: wavenumber must be positive");
    if (std::abs(propagation.norm() - 1.0) > 1e-12)
        throw DomainError("plane wave: |d| must be 1");
    if (std::abs(polarization.dot(propagation)) > 1e-12 * polarization.norm())
        throw DomainError("plane wave: polarization must be orthogonal to propagation");
    ScatteringConfig cfg;
    cfg.wavenumber = k;
    cfg.polarization = polarization;
    cfg.propagation = propagation;
    return cfg;
}

std::complex<double> greens(double r, double k) {
    if (r <= 0.0) throw DomainError("greens: singular evaluation at r = 0");
    return std::polar(1.0 / (4.0 * M_PI * r), -k * r);
}

Eigen::Vector3cd grad_greens(const Eigen::Vector3d& x, const Eigen::Vector3d& y, double k) {
    const Eigen::Vector3d d = y - x;
    const double r = d.norm();
    if (r <= 0.0) throw DomainError("grad_greens: singular evaluation at r = 0");
    const std::complex<double> factor =
        greens(r, k) * std::complex<double>(1.0 / r, k) / r;
    return factor * d.cast<std::complex<double>>();
}

Eigen::Vector3cd incident_field_E(const ScatteringConfig& config, const Eigen::Vector3d& x) {
    const std::complex<double> phase =
        std::polar(1.0, -config.wavenumber * config.propagation.dot(x));
    return phase * config.polarization.cast<std::complex<double>>();
}

Eigen::Vector3cd incident_field_H(const ScatteringConfig& config, const Eigen::Vector3d& x) {
    const std::complex<double> phase =
        std::polar(1.0, -config.wavenumber * config.propagation.dot(x));
    const Eigen::Vector3d h = config.propagation.cross(config.polarization) / config.impedance();
    return phase * h.cast<std::complex<double>>();
}

} // namespace splinemom
