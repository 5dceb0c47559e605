// splinemom: isogeometric boundary-element solver for PEC scattering.
// Subcommands: info, refine, solve, rcs-sweep, converge, mie-rcs,
// export-samples. Exit codes: 0 ok, 2 usage, 3 geometry, 4 assembly,
// 5 solver.
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "splinemom/assembly.hpp"
#include "splinemom/errors.hpp"
#include "splinemom/geometry_io.hpp"
#include "splinemom/hmatrix.hpp"
#include "splinemom/mie.hpp"
#include "splinemom/models.hpp"
#include "splinemom/postprocess.hpp"

using namespace splinemom;

namespace {

constexpr double kSpeedOfLight = 299792458.0;

struct GeometryOptions {
    std::string model;
    std::string geometry_file;
    int href = 0;

    std::shared_ptr<const MultipatchSurface> build() const {
        MultipatchSurface surf;
        if (!geometry_file.empty())
            surf = load_geometry(geometry_file);
        else if (model == "sphere")
            surf = make_sphere();
        else if (model == "almond")
            surf = make_almond();
        else
            throw GeometryError("unknown model '" + model + "' (expected sphere or almond)");
        if (href > 0) surf = surf.refined(href);
        return std::make_shared<const MultipatchSurface>(std::move(surf));
    }
};

struct DegreeOption {
    int a = 2, b = 1;
};

void add_geometry_options(CLI::App* cmd, GeometryOptions& geo) {
    cmd->add_option("--model", geo.model, "built-in model: sphere or almond");
    cmd->add_option("--geometry", geo.geometry_file, "multipatch geometry JSON file");
    cmd->add_option("--href", geo.href, "uniform h-refinement levels")->default_val(0);
}

void add_degree_option(CLI::App* cmd, DegreeOption& deg) {
    cmd->add_option_function<std::string>(
           "--degree",
           [&deg](const std::string& value) {
               if (std::sscanf(value.c_str(), "%d,%d", &deg.a, &deg.b) != 2 || deg.a < 1 ||
                   deg.b < 0)
                   throw CLI::ValidationError("--degree expects 'a,b' with a>=1, b>=0");
           },
           "component degree pair a,b (space S^(a,b) x S^(a-1,b+1))")
        ->default_str("2,1");
}

struct QuadOptions {
    QuadratureConfig config;
    void add(CLI::App* cmd) {
        cmd->add_option("--quad-order", config.order,
                        "Gauss points per direction (0 = degree + 2)");
        cmd->add_option("--near-threshold", config.near_threshold,
                        "distance/diameter ratio for graded near quadrature");
        cmd->add_option("--degenerate-upgrade", config.degenerate_upgrade,
                        "graded slices toward collapsed sides");
    }
};

struct HmatrixOptions {
    bool enabled = false;
    double aca_tol = 1e-6;
    double eta = 2.0;
    int leaf_size = 32;
    std::string save_path, load_path;
    void add(CLI::App* cmd) {
        cmd->add_flag("--hmatrix", enabled, "assemble the H-matrix operator instead of dense");
        cmd->add_option("--aca-tol", aca_tol, "ACA relative stopping tolerance");
        cmd->add_option("--eta", eta, "admissibility parameter");
        cmd->add_option("--leaf-size", leaf_size, "cluster tree leaf size");
        cmd->add_option("--save-matrix", save_path, "write the assembled H-matrix to file");
        cmd->add_option("--load-matrix", load_path, "read a previously saved H-matrix");
    }
};

Eigen::Vector3d parse_vec3(const std::string& value, const char* what) {
    Eigen::Vector3d v;
    if (std::sscanf(value.c_str(), "%lf,%lf,%lf", &v.x(), &v.y(), &v.z()) != 3)
        throw CLI::ValidationError(std::string(what) + " expects 'x,y,z'");
    return v;
}

double wavenumber_from(double k, double freq) {
    if (k > 0.0 && freq > 0.0)
        throw CLI::ValidationError("give either --k or --freq, not both");
    if (freq > 0.0) return 2.0 * M_PI * freq / kSpeedOfLight;
    if (k > 0.0) return k;
    throw CLI::ValidationError("a wavenumber (--k) or frequency (--freq) is required");
}

std::vector<double> parse_range(const std::string& text) {
    double lo = 0, hi = 0;
    int count = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 1)
        throw CLI::ValidationError("range expects start:stop:count");
    std::vector<double> vals;
    for (int i = 0; i < count; ++i)
        vals.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    return vals;
}

// one EFIE solve, dense or H-matrix path
Eigen::VectorXcd solve_system(const ConformingSpace& space, const ScatteringConfig& cfg,
                              const QuadratureConfig& quad, const HmatrixOptions& hopt,
                              const std::string& dump_z) {
    if (!hopt.enabled && hopt.load_path.empty()) {
        const DenseSystem sys = assemble_efie(space, cfg, quad);
        if (!dump_z.empty()) write_matrix(sys.matrix, dump_z);
        return solve_dense(sys.matrix, sys.rhs);
    }
    const EfieIntegrator integrator(space, cfg.wavenumber, quad);
    HMatrix H;
    if (!hopt.load_path.empty()) {
        H = HMatrix::load(hopt.load_path);
        if (H.rows_dim() != space.global_dim)
            throw ContractError("loaded H-matrix dimension does not match the space");
    } else {
        H = assemble_efie_hmatrix(integrator, hopt.eta, hopt.leaf_size, hopt.aca_tol);
    }
    if (!hopt.save_path.empty()) H.save(hopt.save_path);

    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(space.global_dim);
    std::vector<std::pair<int, std::complex<double>>> forcing;
    for (int e = 0; e < space.mesh.count(); ++e) {
        integrator.element_forcing(e, cfg, forcing);
        for (const auto& [g, v] : forcing) rhs(g) += v;
    }
    const auto op = [&H](const Eigen::VectorXcd& x) { return H.matvec(x); };
    return gmres_solve(op, rhs, 1e-8, 120, 3000).solution;
}

int run_info(const GeometryOptions& geo, const DegreeOption& deg) {
    auto surf = geo.build();
    const auto space = build_conforming_space(surf, SpaceKind::Div, deg.a, deg.b);
    std::printf("patches,%d\n", surf->patch_count());
    std::printf("geometry_degrees,%d,%d\n", surf->patches[0].space().s.degree(),
                surf->patches[0].space().t.degree());
    std::printf("elements,%d\n", surf->total_elements());
    std::printf("degree_pair,(%d;%d)x(%d;%d)\n", deg.a, deg.b, deg.a - 1, deg.b + 1);
    std::printf("N_b,%d\n", space.global_dim);
    std::printf("degenerate_edges,%zu\n", surf->degenerate_edges.size());
    return 0;
}

int run_converge(const GeometryOptions& geo, const std::vector<std::string>& degree_list,
                 double k, int href_max, QuadratureConfig quad) {
    std::printf("degree,href,ndof,h,hdiv_error\n");
    const MieSeries series = MieSeries::for_ka(k);
    ReferenceField ref;
    ref.current = [series](const Eigen::Vector3d& x) {
        return mie_surface_field(series, x).current;
    };
    ref.divergence = [series](const Eigen::Vector3d& x) {
        return mie_surface_field(series, x).divergence;
    };
    const auto cfg = ScatteringConfig::plane_wave(k, {1, 0, 0}, {0, 0, 1});

    for (const auto& dstr : degree_list) {
        DegreeOption deg;
        if (std::sscanf(dstr.c_str(), "%d,%d", &deg.a, &deg.b) != 2)
            throw CLI::ValidationError("bad degree pair '" + dstr + "'");
        std::vector<double> lx, ly;
        for (int href = 0; href <= href_max; ++href) {
            GeometryOptions g = geo;
            g.href = href;
            auto surf = g.build();
            const auto space = build_conforming_space(surf, SpaceKind::Div, deg.a, deg.b);
            const auto sys = assemble_efie(space, cfg, quad);
            const auto coeffs = solve_dense(sys.matrix, sys.rhs);
            const double err = hdiv_error(space, coeffs, ref, deg.a + 3);
            const double h = std::pow(0.5, href);
            std::printf("%d;%d,%d,%d,%.6e,%.10e\n", deg.a, deg.b, href, space.global_dim, h,
                        err);
            std::fflush(stdout);
            lx.push_back(std::log(h));
            ly.push_back(std::log(err));
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int n = static_cast<int>(lx.size());
        for (int i = 0; i < n; ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        std::printf("slope,%d;%d,%.4f\n", deg.a, deg.b,
                    (n * sxy - sx * sy) / (n * sxx - sx * sx));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"isogeometric boundary-element solver for PEC electromagnetic scattering"};
    app.require_subcommand(1);

    GeometryOptions info_geo;
    DegreeOption info_deg;
    auto* info = app.add_subcommand("info", "report space dimensions and element counts");
    add_geometry_options(info, info_geo);
    add_degree_option(info, info_deg);

    GeometryOptions refine_geo;
    std::string refine_out;
    auto* refine = app.add_subcommand("refine", "h-refine a geometry and write it to JSON");
    add_geometry_options(refine, refine_geo);
    refine->add_option("--out", refine_out, "output geometry file")->required();

    GeometryOptions solve_geo;
    DegreeOption solve_deg;
    QuadOptions solve_quad;
    HmatrixOptions solve_h;
    double solve_k = 0.0, solve_freq = 0.0;
    std::string solve_pol = "1,0,0", solve_dir = "0,0,1", solve_formulation = "efie";
    std::string dump_z;
    auto* solve = app.add_subcommand("solve", "assemble and solve one scattering problem");
    add_geometry_options(solve, solve_geo);
    add_degree_option(solve, solve_deg);
    solve_quad.add(solve);
    solve_h.add(solve);
    solve->add_option("--k", solve_k, "wavenumber (rad per unit length)");
    solve->add_option("--freq", solve_freq, "frequency in Hz (free-space conversion)");
    solve->add_option("--pol", solve_pol, "polarization vector x,y,z");
    solve->add_option("--dir", solve_dir, "propagation direction x,y,z");
    solve->add_option("--formulation", solve_formulation, "efie or mfie")
        ->check(CLI::IsMember({"efie", "mfie"}));
    solve->add_option("--dump-z", dump_z, "write the dense matrix (binary) to file");

    GeometryOptions sweep_geo;
    DegreeOption sweep_deg;
    QuadOptions sweep_quad;
    HmatrixOptions sweep_h;
    double sweep_k = 0.0, sweep_freq = 0.0;
    std::string sweep_pol = "1,0,0", sweep_dir = "0,0,1";
    std::string sweep_ka, sweep_angles, sweep_plane = "xy";
    auto* sweep = app.add_subcommand(
        "rcs-sweep", "monostatic wavenumber sweep or bistatic angle sweep (CSV to stdout)");
    add_geometry_options(sweep, sweep_geo);
    add_degree_option(sweep, sweep_deg);
    sweep_quad.add(sweep);
    sweep_h.add(sweep);
    sweep->add_option("--sweep-ka", sweep_ka, "monostatic: start:stop:count wavenumbers");
    sweep->add_option("--angles", sweep_angles, "bistatic: start:stop:count degrees");
    sweep->add_option("--plane", sweep_plane, "bistatic observation plane (xy, xz or yz)")
        ->check(CLI::IsMember({"xy", "xz", "yz"}));
    sweep->add_option("--k", sweep_k, "wavenumber for bistatic sweeps");
    sweep->add_option("--freq", sweep_freq, "frequency in Hz for bistatic sweeps");
    sweep->add_option("--pol", sweep_pol, "polarization vector x,y,z");
    sweep->add_option("--dir", sweep_dir, "propagation direction x,y,z");

    GeometryOptions conv_geo;
    conv_geo.model = "sphere";
    QuadOptions conv_quad;
    double conv_k = 3.0;
    int conv_hmax = 2;
    std::vector<std::string> conv_degrees{"1,0", "2,1"};
    auto* conv = app.add_subcommand("converge", "Mie H(div) convergence study (CSV to stdout)");
    add_geometry_options(conv, conv_geo);
    conv_quad.add(conv);
    conv->add_option("--k", conv_k, "study wavenumber");
    conv->add_option("--degrees", conv_degrees, "degree pairs a,b ...");
    conv->add_option("--href-max", conv_hmax, "finest refinement level");

    double mie_min = 0.1, mie_max = 10.0;
    int mie_points = 100;
    auto* mie = app.add_subcommand("mie-rcs", "analytic Mie curve (ka, sigma/pi a^2) CSV");
    mie->add_option("--ka-min", mie_min, "lowest normalized wavenumber");
    mie->add_option("--ka-max", mie_max, "highest normalized wavenumber");
    mie->add_option("--points", mie_points, "sample count");

    GeometryOptions exp_geo;
    DegreeOption exp_deg;
    QuadOptions exp_quad;
    HmatrixOptions exp_h;
    double exp_k = 0.0, exp_freq = 0.0;
    int exp_samples = 4;
    std::string exp_pol = "1,0,0", exp_dir = "0,0,1", exp_csv, exp_vtk;
    auto* expcmd =
        app.add_subcommand("export-samples", "solve and export surface-current samples");
    add_geometry_options(expcmd, exp_geo);
    add_degree_option(expcmd, exp_deg);
    exp_quad.add(expcmd);
    exp_h.add(expcmd);
    expcmd->add_option("--k", exp_k, "wavenumber");
    expcmd->add_option("--freq", exp_freq, "frequency in Hz");
    expcmd->add_option("--pol", exp_pol, "polarization vector x,y,z");
    expcmd->add_option("--dir", exp_dir, "propagation direction x,y,z");
    expcmd->add_option("--samples", exp_samples, "samples per element per direction");
    expcmd->add_option("--csv", exp_csv, "sample table output path");
    expcmd->add_option("--vtk", exp_vtk, "polygonal grid output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (*info) return run_info(info_geo, info_deg);

        if (*refine) {
            save_geometry(*refine_geo.build(), refine_out);
            std::printf("wrote %s\n", refine_out.c_str());
            return 0;
        }

        if (*solve) {
            const double k = wavenumber_from(solve_k, solve_freq);
            auto surf = solve_geo.build();
            const auto cfg = ScatteringConfig::plane_wave(
                k, parse_vec3(solve_pol, "--pol").normalized(),
                parse_vec3(solve_dir, "--dir").normalized());
            const auto div_space =
                build_conforming_space(surf, SpaceKind::Div, solve_deg.a, solve_deg.b);
            Eigen::VectorXcd coeffs;
            if (solve_formulation == "mfie") {
                const auto curl_space =
                    build_conforming_space(surf, SpaceKind::Curl, solve_deg.a, solve_deg.b);
                const auto sys = assemble_mfie(div_space, curl_space, cfg, solve_quad.config);
                if (!dump_z.empty()) write_matrix(sys.matrix, dump_z);
                coeffs = solve_dense(sys.matrix, sys.rhs);
            } else {
                coeffs = solve_system(div_space, cfg, solve_quad.config, solve_h, dump_z);
            }
            const int far_order = solve_quad.config.resolve_order(solve_deg.a) + 2;
            const auto amp =
                far_field_amplitude(div_space, coeffs, cfg, -cfg.propagation, far_order);
            const auto rcs = rcs_from_amplitude(amp);
            std::printf("k,ndof,sigma,sigma_dbsm\n");
            std::printf("%.10e,%d,%.12e,%.12e\n", k, div_space.global_dim, rcs.sigma,
                        rcs.sigma_dbsm);
            return 0;
        }

        if (*sweep) {
            auto surf = sweep_geo.build();
            const auto space =
                build_conforming_space(surf, SpaceKind::Div, sweep_deg.a, sweep_deg.b);
            const Eigen::Vector3d pol = parse_vec3(sweep_pol, "--pol").normalized();
            const Eigen::Vector3d dir = parse_vec3(sweep_dir, "--dir").normalized();
            const int far_order = sweep_quad.config.resolve_order(sweep_deg.a) + 2;

            if (!sweep_ka.empty()) {
                ScatteringConfig tmpl = ScatteringConfig::plane_wave(1.0, pol, dir);
                const auto rows = monostatic_sweep(
                    space, tmpl, parse_range(sweep_ka),
                    [&](const ScatteringConfig& cfg) {
                        return solve_system(space, cfg, sweep_quad.config, sweep_h, "");
                    },
                    far_order);
                std::printf("ka,sigma_normalised\n");
                for (const auto& row : rows) {
                    if (row.ok)
                        std::printf("%.10e,%.12e\n", row.abscissa, row.rcs.sigma / M_PI);
                    else
                        std::fprintf(stderr, "# ka %.6g failed: %s\n", row.abscissa,
                                     row.error.c_str());
                }
                return 0;
            }
            if (sweep_angles.empty())
                throw CLI::ValidationError("rcs-sweep needs --sweep-ka or --angles");
            const double k = wavenumber_from(sweep_k, sweep_freq);
            const auto cfg = ScatteringConfig::plane_wave(k, pol, dir);
            const auto coeffs = solve_system(space, cfg, sweep_quad.config, sweep_h, "");
            Eigen::Vector3d a0(1, 0, 0), a90(0, 1, 0);
            if (sweep_plane == "xz") a90 = {0, 0, 1};
            if (sweep_plane == "yz") {
                a0 = {0, 1, 0};
                a90 = {0, 0, 1};
            }
            const auto rows = bistatic_sweep(space, coeffs, cfg, a0, a90,
                                             parse_range(sweep_angles), far_order);
            std::printf("angle_deg,sigma_dbsm\n");
            for (const auto& row : rows) {
                if (row.ok)
                    std::printf("%.10e,%.12e\n", row.abscissa, row.rcs.sigma_dbsm);
                else
                    std::fprintf(stderr, "# angle %.6g failed: %s\n", row.abscissa,
                                 row.error.c_str());
            }
            return 0;
        }

        if (*conv)
            return run_converge(conv_geo, conv_degrees, conv_k, conv_hmax, conv_quad.config);

        if (*mie) {
            std::printf("ka,sigma_normalised\n");
            for (int i = 0; i < mie_points; ++i) {
                const double ka =
                    mie_points == 1
                        ? mie_min
                        : mie_min * std::pow(mie_max / mie_min,
                                             static_cast<double>(i) / (mie_points - 1));
                std::printf("%.10e,%.12e\n", ka, mie_rcs_normalized(ka));
            }
            return 0;
        }

        if (*expcmd) {
            const double k = wavenumber_from(exp_k, exp_freq);
            auto surf = exp_geo.build();
            const auto cfg =
                ScatteringConfig::plane_wave(k, parse_vec3(exp_pol, "--pol").normalized(),
                                             parse_vec3(exp_dir, "--dir").normalized());
            const auto space =
                build_conforming_space(surf, SpaceKind::Div, exp_deg.a, exp_deg.b);
            const auto coeffs = solve_system(space, cfg, exp_quad.config, exp_h, "");
            if (!exp_csv.empty())
                write_samples_csv(sample_surface_current(space, coeffs, exp_samples), exp_csv);
            if (!exp_vtk.empty()) write_samples_vtk(space, coeffs, exp_samples, exp_vtk);
            std::string note;
            if (!exp_csv.empty()) note += " csv=" + exp_csv;
            if (!exp_vtk.empty()) note += " vtk=" + exp_vtk;
            std::printf("exported %dx%d samples per element%s\n", exp_samples, exp_samples,
                        note.c_str());
            return 0;
        }
    } catch (const GeometryError& ex) {
        std::fprintf(stderr, "geometry error: %s\n", ex.what());
        return 3;
    } catch (const RefinementError& ex) {
        std::fprintf(stderr, "geometry error: %s\n", ex.what());
        return 3;
    } catch (const SolverError& ex) {
        std::fprintf(stderr, "solver error: %s\n", ex.what());
        return 5;
    } catch (const CLI::ValidationError& ex) {
        std::fprintf(stderr, "usage error: %s\n", ex.what());
        return 2;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "assembly error: %s\n", ex.what());
        return 4;
    }
    return 0;
}
