#include "splinemom/models.hpp"

#include <array>
#include <cmath>
#include <functional>

#include "splinemom/errors.hpp"

namespace splinemom {

namespace {

// ---------------------------------------------------------------------------
// Sphere: one spherical cube face as a rational biquartic patch.
//
// A planar rational biquadratic (A,B,C) parameterizes the stereographic
// preimage of the face (a square bulged by 30-degree circular arcs); the
// pointwise identity |(2AC, 2BC, C^2-A^2-B^2)| = A^2+B^2+C^2 then gives an
// exact spherical patch of degree (4,4) with the great-circle face edges.
// ---------------------------------------------------------------------------

using Grid3 = Eigen::Matrix3d;
using Grid5 = Eigen::Matrix<double, 5, 5>;

Grid5 bernstein_product(const Grid3& f, const Grid3& g) {
    static const double b2[3] = {1, 2, 1};
    static const double b4[5] = {1, 4, 6, 4, 1};
    Grid5 out = Grid5::Zero();
    for (int i = 0; i < 3; ++i)
        for (int ip = 0; ip < 3; ++ip)
            for (int j = 0; j < 3; ++j)
                for (int jp = 0; jp < 3; ++jp)
                    out(i + ip, j + jp) += b2[i] * b2[ip] * b2[j] * b2[jp] * f(i, j) * g(ip, jp) /
                                           (b4[i + ip] * b4[j + jp]);
    return out;
}

NurbsPatch sphere_face_template() {
    const double c = 0.5 * (std::sqrt(3.0) - 1.0);  // corner of the preimage square
    const double m = 2.0 * std::sqrt(3.0) - 3.0;    // arc apex offset
    const double w = std::cos(M_PI / 12.0);         // 15-degree arc weight

    // 3x3 net: corners of the preimage square, arc control points at
    // (0,+-m)/(+-m,0), tensor weights (1, w, 1) x (1, w, 1)
    const double px[3][3] = {{-c, 0, c}, {-m, 0, m}, {-c, 0, c}};
    const double py[3][3] = {{-c, -m, -c}, {0, 0, 0}, {c, m, c}};
    const double wt[3] = {1.0, w, 1.0};
    Grid3 A, B, C;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double ww = wt[i] * wt[j];
            A(i, j) = px[j][i] * ww;
            B(i, j) = py[j][i] * ww;
            C(i, j) = ww;
        }
    }

    const Grid5 AC = bernstein_product(A, C);
    const Grid5 BC = bernstein_product(B, C);
    const Grid5 AA = bernstein_product(A, A);
    const Grid5 BB = bernstein_product(B, B);
    const Grid5 CC = bernstein_product(C, C);
    const Grid5 X = 2.0 * AC;
    const Grid5 Y = 2.0 * BC;
    const Grid5 Z = CC - AA - BB;
    const Grid5 W = AA + BB + CC;

    TensorSpace space{KnotVector::bernstein(4), KnotVector::bernstein(4)};
    NurbsPatch::ControlPoints cps(25, 4);
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 5; ++i)
            cps.row(space.linear_index(i, j)) << X(i, j), Y(i, j), Z(i, j), W(i, j);
    return NurbsPatch(std::move(space), std::move(cps));
}

} // namespace

MultipatchSurface make_sphere() {
    const NurbsPatch base = sphere_face_template();

    std::vector<Eigen::Matrix3d> rotations;
    Eigen::Matrix3d R;
    rotations.push_back(Eigen::Matrix3d::Identity());                     // +z
    R << 1, 0, 0, 0, -1, 0, 0, 0, -1; rotations.push_back(R);             // -z
    R << 0, 0, 1, 0, 1, 0, -1, 0, 0;  rotations.push_back(R);             // +x
    R << 0, 0, -1, 0, 1, 0, 1, 0, 0;  rotations.push_back(R);             // -x
    R << 1, 0, 0, 0, 0, 1, 0, -1, 0;  rotations.push_back(R);             // +y
    R << 1, 0, 0, 0, 0, -1, 0, 1, 0;  rotations.push_back(R);             // -y

    std::vector<NurbsPatch> patches;
    patches.reserve(6);
    for (const auto& rot : rotations) {
        NurbsPatch::ControlPoints cps = base.control_points();
        for (int a = 0; a < cps.rows(); ++a)
            cps.row(a).head<3>() = (rot * cps.row(a).head<3>().transpose()).transpose();
        patches.emplace_back(base.space(), std::move(cps));
    }

    auto edges = detect_shared_edges(patches);
    if (edges.size() != 12)
        throw GeometryError("sphere: expected 12 shared edges in cube topology");
    auto surf = assemble_multipatch(std::move(patches), std::move(edges));
    if (!surf.degenerate_edges.empty())
        throw GeometryError("sphere: unexpected degenerate edge");
    return surf;
}

// ---------------------------------------------------------------------------
// NASA almond: two parametric branches, each a band of elliptic cross
// sections. Both branches are reparameterized by an elliptic angle so that
// the square-root profile terms become trigonometric, and the surface is
// fitted as a tensor product of univariate cubic Greville interpolants:
//   F(sigma,tau) = ( x(tau), a(tau) c(sigma), b(tau) d(sigma) )
// with c,d fitting cos/sin around the half circumference.
// ---------------------------------------------------------------------------

namespace {

constexpr int kAlmondElemsAround = 9; // per half circumference
constexpr int kAlmondElemsAlong = 8;  // per branch

// rear cap semi-axis scales and extent
constexpr double kRearT = 0.416667;
constexpr double kRearA = 0.193333;
constexpr double kRearB = 0.064444;
// front body scales; the angular extent closes the tip exactly
constexpr double kFrontT = 2.08335;
constexpr double kFrontA = 4.83345;
constexpr double kFrontB = 1.61115;
const double kFrontChi = std::acos(0.96);

// shared junction ellipse (rear-branch values; the printed front constants
// land 5e-6 L away, forced to coincide here)
constexpr double kJuncA = kRearA;
constexpr double kJuncB = kRearB;

// univariate cubic Greville interpolation of f over [0,1]
Eigen::VectorXd fit_cubic(const KnotVector& kv, const std::function<double(double)>& f) {
    const int n = kv.basis_count();
    const auto grev = kv.greville();
    Eigen::MatrixXd Bmat = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs(n);
    for (int r = 0; r < n; ++r) {
        const double u = grev[r];
        const auto vals = kv.eval_basis_ders(u, 0);
        const int first = kv.element_first_basis(kv.element_of(u));
        for (int i = 0; i <= kv.degree(); ++i) Bmat(r, first + i) = vals(0, i);
        rhs(r) = f(u);
    }
    Eigen::VectorXd coeffs = Bmat.partialPivLu().solve(rhs);
    // pin endpoint controls to the exact endpoint values (seam control rows
    // of neighbouring patches must agree bitwise)
    coeffs(0) = f(0.0);
    coeffs(n - 1) = f(1.0);
    return coeffs;
}

struct BranchFit {
    Eigen::VectorXd x, a, b; // along-body controls
};

BranchFit fit_branch(int branch, const KnotVector& kv) {
    const double L = kAlmondLength;
    BranchFit out;
    if (branch == 0) {
        // rear: tau=0 tip, tau=1 junction
        out.x = fit_cubic(kv, [&](double t) { return -L * kRearT * std::cos(0.5 * M_PI * t); });
        out.a = fit_cubic(kv, [&](double t) { return L * kRearA * std::sin(0.5 * M_PI * t); });
        out.b = fit_cubic(kv, [&](double t) { return L * kRearB * std::sin(0.5 * M_PI * t); });
        out.a(kv.basis_count() - 1) = L * kJuncA;
        out.b(kv.basis_count() - 1) = L * kJuncB;
    } else {
        // front: tau=0 junction, tau=1 tip
        out.x = fit_cubic(kv, [&](double t) { return L * kFrontT * std::sin(kFrontChi * t); });
        out.a = fit_cubic(kv,
                          [&](double t) { return L * kFrontA * (std::cos(kFrontChi * t) - 0.96); });
        out.b = fit_cubic(kv,
                          [&](double t) { return L * kFrontB * (std::cos(kFrontChi * t) - 0.96); });
        out.a(0) = L * kJuncA;
        out.b(0) = L * kJuncB;
    }
    return out;
}

} // namespace

Eigen::Vector3d almond_analytic_point(int branch, double s_angle, double psi) {
    const double L = kAlmondLength;
    if (branch == 0) {
        const double ang = 0.5 * M_PI * psi;
        return {-L * kRearT * std::cos(ang), L * kRearA * std::sin(ang) * std::cos(s_angle),
                L * kRearB * std::sin(ang) * std::sin(s_angle)};
    }
    const double ang = kFrontChi * psi;
    const double rho = std::cos(ang) - 0.96;
    return {L * kFrontT * std::sin(ang), L * kFrontA * rho * std::cos(s_angle),
            L * kFrontB * rho * std::sin(s_angle)};
}

MultipatchSurface make_almond() {
    const KnotVector kv_s = KnotVector::uniform(3, kAlmondElemsAround);
    const KnotVector kv_t = KnotVector::uniform(3, kAlmondElemsAlong);
    const int ns = kv_s.basis_count();
    const int nt = kv_t.basis_count();

    // around-the-body fits per half: half 0 covers angles [-pi, 0]
    struct HalfFit {
        Eigen::VectorXd c, d;
    };
    std::array<HalfFit, 2> halves;
    for (int half = 0; half < 2; ++half) {
        const double a0 = (half == 0) ? -M_PI : 0.0;
        halves[half].c = fit_cubic(kv_s, [&](double u) { return std::cos(a0 + M_PI * u); });
        halves[half].d = fit_cubic(kv_s, [&](double u) { return std::sin(a0 + M_PI * u); });
    }
    // sin endpoints are zeros of the seam planes; pin exactly
    halves[0].d(0) = halves[0].d(ns - 1) = 0.0;
    halves[1].d(0) = halves[1].d(ns - 1) = 0.0;

    std::array<BranchFit, 2> branches = {fit_branch(0, kv_t), fit_branch(1, kv_t)};

    std::vector<NurbsPatch> patches;
    for (int branch = 0; branch < 2; ++branch) {
        for (int half = 0; half < 2; ++half) {
            TensorSpace space{kv_s, kv_t};
            NurbsPatch::ControlPoints cps(space.dim(), 4);
            for (int j = 0; j < nt; ++j)
                for (int i = 0; i < ns; ++i)
                    cps.row(space.linear_index(i, j))
                        << branches[branch].x(j), branches[branch].a(j) * halves[half].c(i),
                        branches[branch].b(j) * halves[half].d(i), 1.0;
            patches.emplace_back(std::move(space), std::move(cps));
        }
    }
    // patch order: 0 rear half0, 1 rear half1, 2 front half0, 3 front half1

    std::vector<EdgeRecord> edges = {
        {0, PatchEdge::SMax, 1, PatchEdge::SMin, false}, // rear seam at angle 0
        {0, PatchEdge::SMin, 1, PatchEdge::SMax, false}, // rear seam at angle +-pi
        {2, PatchEdge::SMax, 3, PatchEdge::SMin, false}, // front seam at angle 0
        {2, PatchEdge::SMin, 3, PatchEdge::SMax, false}, // front seam at angle +-pi
        {0, PatchEdge::TMax, 2, PatchEdge::TMin, false}, // junction, half 0
        {1, PatchEdge::TMax, 3, PatchEdge::TMin, false}, // junction, half 1
    };

    auto surf = assemble_multipatch(std::move(patches), std::move(edges));
    if (surf.degenerate_edges.size() != 4)
        throw GeometryError("almond: expected four collapsed tip sides");

    // gate: parametric-matched deviation from the analytic surface
    double max_dev = 0.0;
    for (int branch = 0; branch < 2; ++branch) {
        for (int half = 0; half < 2; ++half) {
            const auto& patch = surf.patches[2 * branch + half];
            for (int ks = 0; ks <= 40; ++ks) {
                for (int kt = 0; kt <= 40; ++kt) {
                    const double sigma = ks / 40.0, tau = kt / 40.0;
                    const double angle = (half == 0 ? -M_PI : 0.0) + M_PI * sigma;
                    const Eigen::Vector3d exact = almond_analytic_point(branch, angle, tau);
                    const Eigen::Vector3d fitted = patch.map_point(sigma, tau);
                    max_dev = std::max(max_dev, (exact - fitted).norm());
                }
            }
        }
    }
    if (max_dev > 1e-4 * kAlmondLength)
        throw GeometryError("almond: fit deviation exceeds 1e-4 of the body length");
    return surf;
}

} // namespace splinemom
