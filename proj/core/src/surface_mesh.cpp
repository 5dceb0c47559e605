#include "splinemom/surface_mesh.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace splinemom {

namespace {

// hash-grid point snapper; cell size well above the merge tolerance
class PointSnapper {
public:
    explicit PointSnapper(double tol) : tol_(tol), cell_(tol * 16.0) {}

    int id_of(const Eigen::Vector3d& p) {
        const auto key = cell_key(p);
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                    auto it = grid_.find(neighbor(key, dx, dy, dz));
                    if (it == grid_.end()) continue;
                    for (int idx : it->second)
                        if ((points_[idx] - p).norm() <= tol_) return idx;
                }
        const int idx = static_cast<int>(points_.size());
        points_.push_back(p);
        grid_[key].push_back(idx);
        return idx;
    }

    int size() const { return static_cast<int>(points_.size()); }

private:
    using Key = std::uint64_t;
    Key cell_key(const Eigen::Vector3d& p) const {
        const auto q = [&](double v) {
            return static_cast<std::int64_t>(std::floor(v / cell_)) & 0x1fffff;
        };
        return (static_cast<Key>(q(p.x())) << 42) | (static_cast<Key>(q(p.y())) << 21) |
               static_cast<Key>(q(p.z()));
    }
    static Key neighbor(Key key, int dx, int dy, int dz) {
        const auto fx = ((key >> 42) + dx) & 0x1fffff;
        const auto fy = ((key >> 21) + dy) & 0x1fffff;
        const auto fz = (key + dz) & 0x1fffff;
        return (fx << 42) | (fy << 21) | fz;
    }

    double tol_;
    double cell_;
    std::vector<Eigen::Vector3d> points_;
    std::unordered_map<Key, std::vector<int>> grid_;
};

} // namespace

SurfaceMesh build_surface_mesh(const MultipatchSurface& surface) {
    SurfaceMesh mesh;
    PointSnapper snapper(1e-8 * std::max(1.0, surface.diameter));

    for (int p = 0; p < surface.patch_count(); ++p) {
        const auto& patch = surface.patches[p];
        const auto& pm = patch.mesh();
        mesh.patch_offset.push_back(mesh.count());
        const bool deg_smin = surface.is_degenerate(p, PatchEdge::SMin);
        const bool deg_smax = surface.is_degenerate(p, PatchEdge::SMax);
        const bool deg_tmin = surface.is_degenerate(p, PatchEdge::TMin);
        const bool deg_tmax = surface.is_degenerate(p, PatchEdge::TMax);
        for (int it = 0; it < pm.count_t(); ++it) {
            for (int is = 0; is < pm.count_s(); ++is) {
                SurfaceMesh::Element e;
                e.patch = p;
                e.is = is;
                e.it = it;
                e.rect = pm.element(is, it);
                e.corner[0] = snapper.id_of(patch.map_point(e.rect.s0, e.rect.t0));
                e.corner[1] = snapper.id_of(patch.map_point(e.rect.s1, e.rect.t0));
                e.corner[2] = snapper.id_of(patch.map_point(e.rect.s0, e.rect.t1));
                e.corner[3] = snapper.id_of(patch.map_point(e.rect.s1, e.rect.t1));
                e.box = patch.element_box(is, it);
                e.diam = e.box.diagonal().norm();
                e.touches_degenerate = (deg_smin && is == 0) ||
                                       (deg_smax && is == pm.count_s() - 1) ||
                                       (deg_tmin && it == 0) ||
                                       (deg_tmax && it == pm.count_t() - 1);
                mesh.elements.push_back(std::move(e));
            }
        }
    }
    mesh.vertex_count = snapper.size();
    return mesh;
}

} // namespace splinemom
