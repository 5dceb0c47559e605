#pragma once

#include <array>
#include <vector>

#include "splinemom/multipatch.hpp"

namespace splinemom {

/// Global enumeration of the elements of a multipatch surface, with
/// snapped corner vertex ids for cross-patch adjacency queries.
struct SurfaceMesh {
    struct Element {
        int patch = 0;
        int is = 0, it = 0;
        ParametricMesh::Rect rect{};
        // corner vertex ids in order (s0,t0), (s1,t0), (s0,t1), (s1,t1)
        std::array<int, 4> corner{};
        Eigen::AlignedBox3d box;
        double diam = 0.0;
        bool touches_degenerate = false;
    };

    std::vector<Element> elements;
    std::vector<int> patch_offset;
    int vertex_count = 0;

    int count() const { return static_cast<int>(elements.size()); }
    int index_of(int patch, int is, int it, int count_s) const {
        return patch_offset[patch] + it * count_s + is;
    }
};

SurfaceMesh build_surface_mesh(const MultipatchSurface& surface);

} // namespace splinemom
