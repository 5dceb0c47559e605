#include "splinemom/multipatch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "splinemom/errors.hpp"

namespace splinemom {

namespace {

constexpr int kWatertightSamples = 50;

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

KnotVector reversed_knots(const KnotVector& kv) {
    std::vector<double> rev(kv.knots().rbegin(), kv.knots().rend());
    for (double& u : rev) u = 1.0 - u;
    return KnotVector(std::move(rev), kv.degree());
}

} // namespace

const char* to_string(PatchEdge e) {
    switch (e) {
        case PatchEdge::SMin: return "smin";
        case PatchEdge::SMax: return "smax";
        case PatchEdge::TMin: return "tmin";
        case PatchEdge::TMax: return "tmax";
    }
    return "?";
}

PatchEdge patch_edge_from_string(const std::string& s) {
    if (s == "smin") return PatchEdge::SMin;
    if (s == "smax") return PatchEdge::SMax;
    if (s == "tmin") return PatchEdge::TMin;
    if (s == "tmax") return PatchEdge::TMax;
    throw GeometryError("unknown patch edge name: " + s);
}

std::vector<int> edge_control_indices(const TensorSpace& space, PatchEdge edge) {
    const int n = space.s.basis_count();
    const int m = space.t.basis_count();
    std::vector<int> idx;
    switch (edge) {
        case PatchEdge::SMin:
            for (int j = 0; j < m; ++j) idx.push_back(space.linear_index(0, j));
            break;
        case PatchEdge::SMax:
            for (int j = 0; j < m; ++j) idx.push_back(space.linear_index(n - 1, j));
            break;
        case PatchEdge::TMin:
            for (int i = 0; i < n; ++i) idx.push_back(space.linear_index(i, 0));
            break;
        case PatchEdge::TMax:
            for (int i = 0; i < n; ++i) idx.push_back(space.linear_index(i, m - 1));
            break;
    }
    return idx;
}

std::array<double, 2> edge_point(PatchEdge edge, double u) {
    switch (edge) {
        case PatchEdge::SMin: return {0.0, u};
        case PatchEdge::SMax: return {1.0, u};
        case PatchEdge::TMin: return {u, 0.0};
        case PatchEdge::TMax: return {u, 1.0};
    }
    return {0.0, 0.0};
}

const KnotVector& edge_knots(const TensorSpace& space, PatchEdge edge) {
    return (edge == PatchEdge::SMin || edge == PatchEdge::SMax) ? space.t : space.s;
}

bool MultipatchSurface::is_degenerate(int patch, PatchEdge edge) const {
    for (const auto& d : degenerate_edges)
        if (d.patch == patch && d.edge == edge) return true;
    return false;
}

int MultipatchSurface::total_elements() const {
    int total = 0;
    for (const auto& p : patches) total += p.space().element_count();
    return total;
}

MultipatchSurface MultipatchSurface::refined(int levels) const {
    if (levels == 0) return *this;
    std::vector<NurbsPatch> fine;
    fine.reserve(patches.size());
    for (const auto& p : patches) fine.push_back(p.refined_dyadic(levels));
    return assemble_multipatch(std::move(fine), edges);
}

MultipatchSurface assemble_multipatch(std::vector<NurbsPatch> patches,
                                      std::vector<EdgeRecord> edges) {
    if (patches.empty()) throw GeometryError("multipatch: no patches");
    MultipatchSurface surf;

    Eigen::AlignedBox3d bbox;
    for (const auto& p : patches)
        for (int a = 0; a < p.space().dim(); ++a) bbox.extend(p.control_position(a));
    surf.diameter = bbox.diagonal().norm();
    const double scale = std::max(1.0, surf.diameter);
    const double watertight_tol = 1e-10 * scale;
    const double snap_tol = 1e-10 * scale;

    // validate declared edges
    for (const auto& e : edges) {
        if (e.patch_a < 0 || e.patch_a >= static_cast<int>(patches.size()) || e.patch_b < 0 ||
            e.patch_b >= static_cast<int>(patches.size()))
            throw GeometryError("multipatch: edge record references missing patch");
        const auto& ka = edge_knots(patches[e.patch_a].space(), e.edge_a);
        const auto& kb = edge_knots(patches[e.patch_b].space(), e.edge_b);
        const KnotVector kb_oriented = e.reversed ? reversed_knots(kb) : kb;
        if (!(ka == kb_oriented))
            throw GeometryError("multipatch: knot vectors differ along shared edge between patch " +
                                std::to_string(e.patch_a) + " and " + std::to_string(e.patch_b));
        for (int k = 0; k <= kWatertightSamples; ++k) {
            const double u = static_cast<double>(k) / kWatertightSamples;
            const auto [sa, ta] = edge_point(e.edge_a, u);
            const auto [sb, tb] = edge_point(e.edge_b, e.reversed ? 1.0 - u : u);
            const Eigen::Vector3d xa = patches[e.patch_a].map_point(sa, ta);
            const Eigen::Vector3d xb = patches[e.patch_b].map_point(sb, tb);
            if ((xa - xb).norm() > watertight_tol)
                throw GeometryError("multipatch: boundary curves mismatch along edge between patch " +
                                    std::to_string(e.patch_a) + " and " +
                                    std::to_string(e.patch_b) + " (not watertight)");
        }
    }

    // detect collapsed sides
    std::vector<DegenerateEdge> degen;
    for (int p = 0; p < static_cast<int>(patches.size()); ++p) {
        for (PatchEdge edge :
             {PatchEdge::SMin, PatchEdge::SMax, PatchEdge::TMin, PatchEdge::TMax}) {
            const auto idx = edge_control_indices(patches[p].space(), edge);
            bool collapsed = true;
            const Eigen::Vector3d first = patches[p].control_position(idx.front());
            for (int a : idx)
                if ((patches[p].control_position(a) - first).norm() > snap_tol) {
                    collapsed = false;
                    break;
                }
            if (collapsed) degen.push_back({p, edge});
        }
    }

    // geometry connectivity: snap boundary control points, unique interior
    struct BoundaryPoint {
        int patch;
        int local;
        Eigen::Vector3d pos;
    };
    std::vector<BoundaryPoint> bpts;
    std::vector<std::vector<int>> bpt_of(patches.size());
    for (int p = 0; p < static_cast<int>(patches.size()); ++p) {
        bpt_of[p].assign(patches[p].space().dim(), -1);
        for (PatchEdge edge :
             {PatchEdge::SMin, PatchEdge::SMax, PatchEdge::TMin, PatchEdge::TMax}) {
            for (int a : edge_control_indices(patches[p].space(), edge)) {
                if (bpt_of[p][a] >= 0) continue;
                bpt_of[p][a] = static_cast<int>(bpts.size());
                bpts.push_back({p, a, patches[p].control_position(a)});
            }
        }
    }
    UnionFind uf(static_cast<int>(bpts.size()));
    for (std::size_t i = 0; i < bpts.size(); ++i)
        for (std::size_t j = i + 1; j < bpts.size(); ++j)
            if ((bpts[i].pos - bpts[j].pos).norm() <= snap_tol)
                uf.unite(static_cast<int>(i), static_cast<int>(j));

    surf.geometry_connectivity.resize(patches.size());
    std::vector<int> root_global(bpts.size(), -1);
    int next_global = 0;
    for (int p = 0; p < static_cast<int>(patches.size()); ++p) {
        surf.geometry_connectivity[p].assign(patches[p].space().dim(), -1);
        for (int a = 0; a < patches[p].space().dim(); ++a) {
            int b = bpt_of[p][a];
            if (b < 0) {
                surf.geometry_connectivity[p][a] = next_global++;
            } else {
                int r = uf.find(b);
                if (root_global[r] < 0) root_global[r] = next_global++;
                surf.geometry_connectivity[p][a] = root_global[r];
            }
        }
    }
    surf.global_point_count = next_global;

    surf.patches = std::move(patches);
    surf.edges = std::move(edges);
    surf.degenerate_edges = std::move(degen);
    return surf;
}

std::vector<EdgeRecord> detect_shared_edges(const std::vector<NurbsPatch>& patches) {
    Eigen::AlignedBox3d bbox;
    for (const auto& p : patches)
        for (int a = 0; a < p.space().dim(); ++a) bbox.extend(p.control_position(a));
    const double tol = 1e-8 * std::max(1.0, bbox.diagonal().norm());

    struct Side {
        int patch;
        PatchEdge edge;
        std::vector<Eigen::Vector3d> samples;
        bool collapsed;
    };
    std::vector<Side> sides;
    for (int p = 0; p < static_cast<int>(patches.size()); ++p) {
        for (PatchEdge edge :
             {PatchEdge::SMin, PatchEdge::SMax, PatchEdge::TMin, PatchEdge::TMax}) {
            Side side{p, edge, {}, true};
            for (int k = 0; k <= 16; ++k) {
                const auto [s, t] = edge_point(edge, k / 16.0);
                side.samples.push_back(patches[p].map_point(s, t));
                if ((side.samples.back() - side.samples.front()).norm() > tol)
                    side.collapsed = false;
            }
            sides.push_back(std::move(side));
        }
    }

    auto matches = [&](const Side& a, const Side& b, bool reversed) {
        for (std::size_t k = 0; k < a.samples.size(); ++k) {
            const auto& xb = reversed ? b.samples[b.samples.size() - 1 - k] : b.samples[k];
            if ((a.samples[k] - xb).norm() > tol) return false;
        }
        return true;
    };

    std::vector<EdgeRecord> records;
    std::vector<bool> used(sides.size(), false);
    for (std::size_t i = 0; i < sides.size(); ++i) {
        if (used[i] || sides[i].collapsed) continue;
        for (std::size_t j = i + 1; j < sides.size(); ++j) {
            if (used[j] || sides[j].collapsed) continue;
            bool fwd = matches(sides[i], sides[j], false);
            bool rev = !fwd && matches(sides[i], sides[j], true);
            if (!fwd && !rev) continue;
            records.push_back(
                {sides[i].patch, sides[i].edge, sides[j].patch, sides[j].edge, rev});
            used[i] = used[j] = true;
            break;
        }
    }
    return records;
}

} // namespace splinemom
