#include "splinemom/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "splinemom/errors.hpp"

namespace splinemom {

GaussRule gauss_rule_1d(int n) {
    if (n < 1) throw DomainError("gauss rule: need at least one point");
    GaussRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    // Newton on Legendre polynomials over [-1,1], then map to [0,1]
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.points(i) = 0.5 * (1.0 - x); // descending x -> ascending point
        rule.weights(i) = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

Rule2D tensor_rule(int n) {
    const GaussRule g = gauss_rule_1d(n);
    Rule2D rule;
    rule.points.reserve(n * n);
    rule.weights.reserve(n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            rule.points.emplace_back(g.points(i), g.points(j));
            rule.weights.push_back(g.weights(i) * g.weights(j));
        }
    return rule;
}

namespace {

// graded slice boundaries toward 0: [0, 2^-(m-1), ..., 1/2, 1]
std::vector<double> graded_breaks(int slices, bool toward_zero) {
    std::vector<double> b{0.0};
    for (int k = slices - 1; k >= 1; --k) b.push_back(std::pow(0.5, k));
    b.push_back(1.0);
    if (!toward_zero) {
        std::vector<double> r;
        for (auto it = b.rbegin(); it != b.rend(); ++it) r.push_back(1.0 - *it);
        b = std::move(r);
    }
    return b;
}

} // namespace

Rule2D graded_rule(int n, int grade_s, int grade_t, int slices) {
    const GaussRule g = gauss_rule_1d(n);
    const std::vector<double> bs =
        grade_s == 0 ? std::vector<double>{0.0, 1.0} : graded_breaks(slices, grade_s < 0);
    const std::vector<double> bt =
        grade_t == 0 ? std::vector<double>{0.0, 1.0} : graded_breaks(slices, grade_t < 0);
    Rule2D rule;
    for (std::size_t ct = 0; ct + 1 < bt.size(); ++ct)
        for (std::size_t cs = 0; cs + 1 < bs.size(); ++cs) {
            const double ws = bs[cs + 1] - bs[cs], wt = bt[ct + 1] - bt[ct];
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    rule.points.emplace_back(bs[cs] + ws * g.points(i),
                                             bt[ct] + wt * g.points(j));
                    rule.weights.push_back(ws * wt * g.weights(i) * g.weights(j));
                }
        }
    return rule;
}

PairClass classify_pair(const SurfaceMesh& mesh, int ea, int eb, double near_threshold) {
    if (ea == eb) return PairClass::Coincident;
    const auto& A = mesh.elements[ea];
    const auto& B = mesh.elements[eb];

    int shared[4];
    int n_shared = 0;
    for (int ca : A.corner) {
        bool in_b = false;
        for (int cb : B.corner)
            if (ca == cb) in_b = true;
        if (!in_b) continue;
        bool seen = false;
        for (int k = 0; k < n_shared; ++k)
            if (shared[k] == ca) seen = true;
        if (!seen) shared[n_shared++] = ca;
    }

    if (n_shared >= 2) return PairClass::EdgeAdjacent;
    if (n_shared == 1) return PairClass::VertexAdjacent;

    const double dist = A.box.exteriorDistance(B.box);
    const double diam = std::max(A.diam, B.diam);
    return (dist < near_threshold * diam) ? PairClass::RegularNear : PairClass::RegularFar;
}

Eigen::Vector2d apply_d4(int code, const Eigen::Vector2d& xi) {
    Eigen::Vector2d v = (code & 1) ? Eigen::Vector2d(xi.y(), xi.x()) : xi;
    if (code & 2) v.x() = 1.0 - v.x();
    if (code & 4) v.y() = 1.0 - v.y();
    return v;
}

namespace {

int corner_slot(const Eigen::Vector2d& p) {
    return (p.x() > 0.5 ? 1 : 0) + (p.y() > 0.5 ? 2 : 0);
}

// d4 code sending canonical (0,0) and (1,0) to the element corners with the
// given ids (in order)
int edge_code(const std::array<int, 4>& corners, int id0, int id1) {
    for (int code = 0; code < 8; ++code) {
        const int c0 = corners[corner_slot(apply_d4(code, {0, 0}))];
        const int c1 = corners[corner_slot(apply_d4(code, {1, 0}))];
        if (c0 == id0 && c1 == id1) return code;
    }
    throw AssemblyError("pair orientation: shared edge not found on element");
}

int vertex_code(const std::array<int, 4>& corners, int id) {
    for (int code = 0; code < 8; ++code)
        if (corners[corner_slot(apply_d4(code, {0, 0}))] == id) return code;
    throw AssemblyError("pair orientation: shared vertex not found on element");
}

} // namespace

PairOrientation canonical_orientation(const SurfaceMesh& mesh, int ea, int eb, PairClass cls) {
    PairOrientation out;
    if (cls == PairClass::Coincident || cls == PairClass::RegularNear ||
        cls == PairClass::RegularFar)
        return out;

    const auto& A = mesh.elements[ea];
    const auto& B = mesh.elements[eb];
    std::vector<int> shared;
    for (int ca : A.corner) {
        bool in_b = false;
        for (int cb : B.corner)
            if (ca == cb) in_b = true;
        if (in_b && std::find(shared.begin(), shared.end(), ca) == shared.end())
            shared.push_back(ca);
    }

    if (cls == PairClass::VertexAdjacent) {
        out.d4_a = vertex_code(A.corner, shared.front());
        out.d4_b = vertex_code(B.corner, shared.front());
        return out;
    }

    // edge case: orient both sides along (min id -> max id)
    if (shared.size() != 2)
        throw AssemblyError("pair orientation: edge-adjacent pair without two shared corners");
    const int id0 = std::min(shared[0], shared[1]);
    const int id1 = std::max(shared[0], shared[1]);
    out.d4_a = edge_code(A.corner, id0, id1);
    out.d4_b = edge_code(B.corner, id0, id1);
    return out;
}

PairRule sauter_schwab_rule(PairClass cls, int n) {
    const GaussRule g = gauss_rule_1d(n);
    PairRule rule;

    auto node = [&](int i) { return g.points(i); };
    auto wt = [&](int i) { return g.weights(i); };

    switch (cls) {
        case PairClass::Coincident: {
            rule.points.reserve(8 * n * n * n * n);
            for (int sign1 : {1, -1})
                for (int sign2 : {1, -1})
                    for (int region = 0; region < 2; ++region)
                        for (int iw = 0; iw < n; ++iw)
                            for (int ie = 0; ie < n; ++ie)
                                for (int k1 = 0; k1 < n; ++k1)
                                    for (int k2 = 0; k2 < n; ++k2) {
                                        const double w = node(iw), eta = node(ie);
                                        const double z1m = (region == 0) ? w : w * eta;
                                        const double z2m = (region == 0) ? w * eta : w;
                                        const double x1 =
                                            (sign1 > 0 ? 0.0 : z1m) + (1.0 - z1m) * node(k1);
                                        const double x2 =
                                            (sign2 > 0 ? 0.0 : z2m) + (1.0 - z2m) * node(k2);
                                        PairQuadPoint q;
                                        q.x = {x1, x2};
                                        q.y = {x1 + sign1 * z1m, x2 + sign2 * z2m};
                                        q.w = wt(iw) * wt(ie) * wt(k1) * wt(k2) * w *
                                              (1.0 - z1m) * (1.0 - z2m);
                                        rule.points.push_back(q);
                                    }
            return rule;
        }
        case PairClass::EdgeAdjacent: {
            rule.points.reserve(6 * n * n * n * n);
            for (int sign : {1, -1})
                for (int m = 0; m < 3; ++m)
                    for (int iw = 0; iw < n; ++iw)
                        for (int i1 = 0; i1 < n; ++i1)
                            for (int i2 = 0; i2 < n; ++i2)
                                for (int k = 0; k < n; ++k) {
                                    const double w = node(iw), e1 = node(i1), e2 = node(i2);
                                    double um, x2, y2;
                                    if (m == 0) {
                                        um = w;
                                        x2 = w * e1;
                                        y2 = w * e2;
                                    } else if (m == 1) {
                                        x2 = w;
                                        um = w * e1;
                                        y2 = w * e2;
                                    } else {
                                        y2 = w;
                                        um = w * e1;
                                        x2 = w * e2;
                                    }
                                    const double x1 =
                                        (sign > 0 ? 0.0 : um) + (1.0 - um) * node(k);
                                    PairQuadPoint q;
                                    q.x = {x1, x2};
                                    q.y = {x1 + sign * um, y2};
                                    q.w = wt(iw) * wt(i1) * wt(i2) * wt(k) * w * w * (1.0 - um);
                                    rule.points.push_back(q);
                                }
            return rule;
        }
        case PairClass::VertexAdjacent: {
            rule.points.reserve(4 * n * n * n * n);
            for (int m = 0; m < 4; ++m)
                for (int iw = 0; iw < n; ++iw)
                    for (int i1 = 0; i1 < n; ++i1)
                        for (int i2 = 0; i2 < n; ++i2)
                            for (int i3 = 0; i3 < n; ++i3) {
                                const double w = node(iw);
                                const double e[3] = {node(i1), node(i2), node(i3)};
                                double c[4];
                                int t = 0;
                                for (int d = 0; d < 4; ++d)
                                    c[d] = (d == m) ? w : w * e[t++];
                                PairQuadPoint q;
                                q.x = {c[0], c[1]};
                                q.y = {c[2], c[3]};
                                q.w = wt(iw) * wt(i1) * wt(i2) * wt(i3) * w * w * w;
                                rule.points.push_back(q);
                            }
            return rule;
        }
        default:
            throw ContractError("sauter_schwab_rule: regular pair class");
    }
}

Rule2D element_rule(const MultipatchSurface& surface, const SurfaceMesh::Element& el, int n,
                    int upgrade) {
    if (!el.touches_degenerate || upgrade <= 1) return tensor_rule(n);
    const auto& pm = surface.patches[el.patch].mesh();
    int grade_s = 0, grade_t = 0;
    if (surface.is_degenerate(el.patch, PatchEdge::SMin) && el.is == 0) grade_s = -1;
    if (surface.is_degenerate(el.patch, PatchEdge::SMax) && el.is == pm.count_s() - 1)
        grade_s = 1;
    if (surface.is_degenerate(el.patch, PatchEdge::TMin) && el.it == 0) grade_t = -1;
    if (surface.is_degenerate(el.patch, PatchEdge::TMax) && el.it == pm.count_t() - 1)
        grade_t = 1;
    return graded_rule(n, grade_s, grade_t, upgrade);
}

} // namespace splinemom
