#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace splinemom {

/// Truncated Mie series for the unit PEC sphere, x-polarized plane wave
/// travelling in +z with |E^i| = 1.
struct MieSeries {
    double ka = 1.0;
    int n_terms = 16;
    double impedance = 376.730313668;

    /// Truncation rule: ceil(ka) + 15 terms.
    static MieSeries for_ka(double ka);
    static MieSeries for_ka(double ka, double impedance);
};

/// Spherical Bessel functions j_0..j_nmax (downward Miller recurrence) and
/// y_0..y_nmax (upward). Throws DomainError for x <= 0.
void spherical_bessel(int nmax, double x, std::vector<double>& j, std::vector<double>& y);

std::complex<double> spherical_hankel2(int n, double x);

/// Riccati form x h_n^(2)(x) and its derivative with respect to x.
std::complex<double> riccati_hankel2(int n, double x);
std::complex<double> riccati_hankel2_derivative(int n, double x);

/// Order-1 associated Legendre angular functions (no Condon-Shortley):
/// pi_n = P_n^1(cos th)/sin th and tau_n = dP_n^1(cos th)/dth, n = 1..nmax.
struct AngularFunctions {
    std::vector<double> pi_n;
    std::vector<double> tau_n;
};
AngularFunctions legendre_angular(int nmax, double cos_theta);

/// phi-separated surface current: J_theta = cos(phi) f_theta(theta),
/// J_phi = sin(phi) f_phi(theta), J_rho = 0. d_sin_f_theta carries
/// d/dtheta( sin(theta) f_theta ), the term the surface divergence needs.
struct MieCurrentProfile {
    std::complex<double> f_theta;
    std::complex<double> f_phi;
    std::complex<double> d_sin_f_theta;
};
MieCurrentProfile mie_current_profile(const MieSeries& series, double theta);

/// Surface current in spherical components (J_rho, J_theta, J_phi).
Eigen::Vector3cd mie_surface_current(const MieSeries& series, double theta, double phi);

/// Current and surface divergence in Cartesian form at a unit-sphere point.
struct MieSurfaceField {
    Eigen::Vector3cd current;
    std::complex<double> divergence;
};
MieSurfaceField mie_surface_field(const MieSeries& series, const Eigen::Vector3d& point);

/// Series coefficient a_n = j^{-n} (2n+1) / (n(n+1)).
std::complex<double> mie_series_coefficient(int n);

/// Monostatic backscatter RCS of the unit PEC sphere (area units).
double mie_backscatter_rcs(const MieSeries& series);
/// sigma / (pi a^2) at the given normalized wavenumber.
double mie_rcs_normalized(double ka);

} // namespace splinemom
