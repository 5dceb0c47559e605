#include "splinemom/postprocess.hpp"

#include <cmath>
#include <fstream>

#include "splinemom/errors.hpp"
#include "splinemom/quadrature.hpp"

namespace splinemom {

namespace {
const std::complex<double> kJ(0.0, 1.0);
}

RcsResult rcs_from_amplitude(const Eigen::Vector3cd& amplitude) {
    RcsResult out;
    out.sigma = 4.0 * M_PI * amplitude.squaredNorm();
    out.sigma_dbsm = 10.0 * std::log10(out.sigma);
    return out;
}

Eigen::Vector3cd far_field_amplitude(const ConformingSpace& space,
                                     const Eigen::VectorXcd& coeffs,
                                     const ScatteringConfig& config,
                                     const Eigen::Vector3d& observation_dir, int quad_order) {
    if (coeffs.size() != space.global_dim)
        throw ContractError("far_field_amplitude: coefficient length mismatch");
    const double k = config.wavenumber;

    Eigen::Vector3cd acc = Eigen::Vector3cd::Zero();
    LocalBasis lb;
    for (int e = 0; e < space.mesh.count(); ++e) {
        const auto& el = space.mesh.elements[e];
        const auto& patch = space.surface().patches[el.patch];
        const Rule2D rule = element_rule(space.surface(), el, quad_order, 3);
        const double area = (el.rect.s1 - el.rect.s0) * (el.rect.t1 - el.rect.t0);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double s = el.rect.s0 + (el.rect.s1 - el.rect.s0) * rule.points[q].x();
            const double t = el.rect.t0 + (el.rect.t1 - el.rect.t0) * rule.points[q].y();
            const SurfaceFrame f = patch.frame(s, t);
            space.eval_parametric(el.patch, el.is, el.it, s, t, lb);
            Eigen::Vector3cd cur = Eigen::Vector3cd::Zero();
            if (space.kind == SpaceKind::Div) {
                // J dGamma pulls back to (DF vhat) d(s,t); J cancels
                for (int i = 0; i < lb.count; ++i)
                    if (lb.global[i] >= 0)
                        cur += (lb.sign[i] * coeffs(lb.global[i])) *
                               (f.jacobian * lb.vhat[i]).cast<std::complex<double>>();
            } else {
                if (f.degenerate) continue;
                for (int i = 0; i < lb.count; ++i)
                    if (lb.global[i] >= 0) {
                        const Eigen::Vector2d rot(-lb.vhat[i](1), lb.vhat[i](0));
                        cur += (lb.sign[i] * coeffs(lb.global[i]) * f.surface_element) *
                               (f.pseudoinverse.transpose() * rot).cast<std::complex<double>>();
                    }
            }
            acc += (rule.weights[q] * area *
                    std::exp(kJ * (k * observation_dir.dot(f.point)))) *
                   cur;
        }
    }
    return -(kJ * config.omega() * config.permeability / (4.0 * M_PI)) * acc;
}

double hdiv_error(const ConformingSpace& space, const Eigen::VectorXcd& coeffs,
                  const ReferenceField& reference, int quad_order) {
    double diff_l2 = 0.0, diff_div = 0.0, ref_l2 = 0.0, ref_div = 0.0;
    LocalBasis lb;
    for (int e = 0; e < space.mesh.count(); ++e) {
        const auto& el = space.mesh.elements[e];
        const auto& patch = space.surface().patches[el.patch];
        const Rule2D rule = element_rule(space.surface(), el, quad_order, 3);
        const double area = (el.rect.s1 - el.rect.s0) * (el.rect.t1 - el.rect.t0);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double s = el.rect.s0 + (el.rect.s1 - el.rect.s0) * rule.points[q].x();
            const double t = el.rect.t0 + (el.rect.t1 - el.rect.t0) * rule.points[q].y();
            const SurfaceFrame f = patch.frame(s, t);
            if (f.degenerate) continue;
            space.eval_parametric(el.patch, el.is, el.it, s, t, lb);
            Eigen::Vector3cd cur = Eigen::Vector3cd::Zero();
            std::complex<double> div = 0.0;
            for (int i = 0; i < lb.count; ++i) {
                if (lb.global[i] < 0) continue;
                const std::complex<double> c = lb.sign[i] * coeffs(lb.global[i]);
                cur += c * (f.jacobian * lb.vhat[i]).cast<std::complex<double>>() /
                       f.surface_element;
                div += c * lb.divhat[i] / f.surface_element;
            }
            const Eigen::Vector3cd ref_cur = reference.current(f.point);
            const std::complex<double> ref_d = reference.divergence(f.point);
            const double w = rule.weights[q] * area * f.surface_element;
            diff_l2 += w * (cur - ref_cur).squaredNorm();
            diff_div += w * std::norm(div - ref_d);
            ref_l2 += w * ref_cur.squaredNorm();
            ref_div += w * std::norm(ref_d);
        }
    }
    return (std::sqrt(diff_l2) + std::sqrt(diff_div)) / (std::sqrt(ref_l2) + std::sqrt(ref_div));
}

std::vector<SweepRow> monostatic_sweep(
    const ConformingSpace& space, const ScatteringConfig& config_template,
    const std::vector<double>& wavenumbers,
    const std::function<Eigen::VectorXcd(const ScatteringConfig&)>& solve, int quad_order) {
    std::vector<SweepRow> rows;
    rows.reserve(wavenumbers.size());
    for (double k : wavenumbers) {
        SweepRow row;
        row.abscissa = k;
        try {
            ScatteringConfig cfg = config_template;
            cfg.wavenumber = k;
            const Eigen::VectorXcd coeffs = solve(cfg);
            const Eigen::Vector3cd amp =
                far_field_amplitude(space, coeffs, cfg, -cfg.propagation, quad_order);
            row.rcs = rcs_from_amplitude(amp);
        } catch (const std::exception& ex) {
            row.ok = false;
            row.error = ex.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SweepRow> bistatic_sweep(const ConformingSpace& space,
                                     const Eigen::VectorXcd& coeffs,
                                     const ScatteringConfig& config,
                                     const Eigen::Vector3d& axis_0,
                                     const Eigen::Vector3d& axis_90,
                                     const std::vector<double>& angles_deg, int quad_order) {
    std::vector<SweepRow> rows;
    rows.reserve(angles_deg.size());
    for (double deg : angles_deg) {
        SweepRow row;
        row.abscissa = deg;
        try {
            const double rad = deg * M_PI / 180.0;
            const Eigen::Vector3d dir =
                (std::cos(rad) * axis_0 + std::sin(rad) * axis_90).normalized();
            row.rcs = rcs_from_amplitude(
                far_field_amplitude(space, coeffs, config, dir, quad_order));
        } catch (const std::exception& ex) {
            row.ok = false;
            row.error = ex.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SurfaceSample> sample_surface_current(const ConformingSpace& space,
                                                  const Eigen::VectorXcd& coeffs,
                                                  int samples_per_direction) {
    if (samples_per_direction < 1)
        throw DomainError("sample_surface_current: need at least one sample per direction");
    std::vector<SurfaceSample> out;
    out.reserve(space.mesh.count() * samples_per_direction * samples_per_direction);
    LocalBasis lb;
    for (int e = 0; e < space.mesh.count(); ++e) {
        const auto& el = space.mesh.elements[e];
        const auto& patch = space.surface().patches[el.patch];
        for (int jt = 0; jt < samples_per_direction; ++jt)
            for (int is = 0; is < samples_per_direction; ++is) {
                const double u = (is + 0.5) / samples_per_direction;
                const double v = (jt + 0.5) / samples_per_direction;
                SurfaceSample sample;
                sample.patch = el.patch;
                sample.element = e;
                sample.s = el.rect.s0 + (el.rect.s1 - el.rect.s0) * u;
                sample.t = el.rect.t0 + (el.rect.t1 - el.rect.t0) * v;
                const SurfaceFrame f = patch.frame(sample.s, sample.t);
                sample.position = f.point;
                space.eval_parametric(el.patch, el.is, el.it, sample.s, sample.t, lb);
                Eigen::Vector3cd cur = Eigen::Vector3cd::Zero();
                if (!f.degenerate)
                    for (int i = 0; i < lb.count; ++i)
                        if (lb.global[i] >= 0)
                            cur += (lb.sign[i] * coeffs(lb.global[i])) *
                                   (f.jacobian * lb.vhat[i]).cast<std::complex<double>>() /
                                   f.surface_element;
                sample.current = cur;
                out.push_back(std::move(sample));
            }
    }
    return out;
}

void write_samples_csv(const std::vector<SurfaceSample>& samples, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("write_samples_csv: cannot open " + path);
    os << "patch,element,s,t,x,y,z,re_jx,re_jy,re_jz,im_jx,im_jy,im_jz,mag_re,mag_im\n";
    os.precision(17);
    for (const auto& sm : samples) {
        const Eigen::Vector3d re = sm.current.real(), im = sm.current.imag();
        os << sm.patch << ',' << sm.element << ',' << sm.s << ',' << sm.t << ','
           << sm.position.x() << ',' << sm.position.y() << ',' << sm.position.z() << ','
           << re.x() << ',' << re.y() << ',' << re.z() << ',' << im.x() << ',' << im.y() << ','
           << im.z() << ',' << re.norm() << ',' << im.norm() << '\n';
    }
}

void write_samples_vtk(const ConformingSpace& space, const Eigen::VectorXcd& coeffs,
                       int samples_per_direction, const std::string& path) {
    // vertex lattice per element so the quads render without cross-element
    // stitching
    const int n = samples_per_direction + 1;
    std::ofstream os(path);
    if (!os) throw IoError("write_samples_vtk: cannot open " + path);
    os.precision(12);

    std::vector<Eigen::Vector3d> verts;
    std::vector<Eigen::Vector3cd> currents;
    std::vector<std::array<int, 4>> quads;
    LocalBasis lb;
    for (int e = 0; e < space.mesh.count(); ++e) {
        const auto& el = space.mesh.elements[e];
        const auto& patch = space.surface().patches[el.patch];
        const int base = static_cast<int>(verts.size());
        for (int jt = 0; jt < n; ++jt)
            for (int is = 0; is < n; ++is) {
                // keep lattice nodes strictly inside collapsed corners
                const double eps = 1e-9;
                const double u = std::clamp(static_cast<double>(is) / (n - 1), eps, 1 - eps);
                const double v = std::clamp(static_cast<double>(jt) / (n - 1), eps, 1 - eps);
                const double s = el.rect.s0 + (el.rect.s1 - el.rect.s0) * u;
                const double t = el.rect.t0 + (el.rect.t1 - el.rect.t0) * v;
                const SurfaceFrame f = patch.frame(s, t);
                verts.push_back(f.point);
                Eigen::Vector3cd cur = Eigen::Vector3cd::Zero();
                if (!f.degenerate) {
                    space.eval_parametric(el.patch, el.is, el.it, s, t, lb);
                    for (int i = 0; i < lb.count; ++i)
                        if (lb.global[i] >= 0)
                            cur += (lb.sign[i] * coeffs(lb.global[i])) *
                                   (f.jacobian * lb.vhat[i]).cast<std::complex<double>>() /
                                   f.surface_element;
                }
                currents.push_back(cur);
            }
        for (int jt = 0; jt + 1 < n; ++jt)
            for (int is = 0; is + 1 < n; ++is)
                quads.push_back({base + jt * n + is, base + jt * n + is + 1,
                                 base + (jt + 1) * n + is + 1, base + (jt + 1) * n + is});
    }

    os << "# vtk DataFile Version 3.0\nsurface current samples\nASCII\nDATASET POLYDATA\n";
    os << "POINTS " << verts.size() << " double\n";
    for (const auto& v : verts) os << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    os << "POLYGONS " << quads.size() << ' ' << 5 * quads.size() << '\n';
    for (const auto& q : quads) os << "4 " << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << '\n';
    os << "POINT_DATA " << verts.size() << "\n";
    os << "VECTORS re_current double\n";
    for (const auto& c : currents)
        os << c.x().real() << ' ' << c.y().real() << ' ' << c.z().real() << '\n';
    os << "VECTORS im_current double\n";
    for (const auto& c : currents)
        os << c.x().imag() << ' ' << c.y().imag() << ' ' << c.z().imag() << '\n';
    os << "SCALARS im_mag double 1\nLOOKUP_TABLE default\n";
    for (const auto& c : currents) os << c.imag().norm() << '\n';
    if (!os) throw IoError("write_samples_vtk: short write to " + path);
}

} // namespace splinemom
