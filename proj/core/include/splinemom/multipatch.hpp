#pragma once

#include <array>
#include <string>
#include <vector>

#include "splinemom/nurbs_patch.hpp"

namespace splinemom {

enum class PatchEdge { SMin = 0, SMax = 1, TMin = 2, TMax = 3 };

const char* to_string(PatchEdge e);
PatchEdge patch_edge_from_string(const std::string& s);

/// Shared edge between two patch sides. `reversed` flips the edge
/// parameter of side b relative to side a.
struct EdgeRecord {
    int patch_a = 0;
    PatchEdge edge_a = PatchEdge::SMin;
    int patch_b = 0;
    PatchEdge edge_b = PatchEdge::SMin;
    bool reversed = false;
};

/// Patch side collapsed to a single point (e.g. almond tips).
struct DegenerateEdge {
    int patch = 0;
    PatchEdge edge = PatchEdge::SMin;
};

/// Watertight multipatch NURBS surface with geometry connectivity:
/// geometry_connectivity[patch][local a] is the global control point index,
/// with coincident boundary control points collapsed to one index.
/// Immutable after assembly; evaluation is pure.
class MultipatchSurface {
public:
    std::vector<NurbsPatch> patches;
    std::vector<EdgeRecord> edges;
    std::vector<DegenerateEdge> degenerate_edges;
    std::vector<std::vector<int>> geometry_connectivity;
    int global_point_count = 0;
    double diameter = 0.0;

    int patch_count() const { return static_cast<int>(patches.size()); }
    bool is_degenerate(int patch, PatchEdge edge) const;
    /// Uniform dyadic h-refinement of every patch (connectivity rebuilt).
    MultipatchSurface refined(int levels) const;
    int total_elements() const;
};

/// Local control point indices along a patch edge, in edge-parameter order.
std::vector<int> edge_control_indices(const TensorSpace& space, PatchEdge edge);

/// Maps an edge parameter u in [0,1] to patch coordinates (s,t).
std::array<double, 2> edge_point(PatchEdge edge, double u);

/// Knot vector running along an edge (t-knots for s=const sides).
const KnotVector& edge_knots(const TensorSpace& space, PatchEdge edge);

/// Validates the declared edges (knot compatibility, pointwise coincidence
/// of the mapped boundary curves), detects degenerate edges, and builds the
/// geometry connectivity. Throws GeometryError on mismatched knots or
/// non-watertight input.
MultipatchSurface assemble_multipatch(std::vector<NurbsPatch> patches,
                                      std::vector<EdgeRecord> edges);

/// Geometric discovery of shared edges (used by the built-in models; file
/// input always carries an explicit edge table).
std::vector<EdgeRecord> detect_shared_edges(const std::vector<NurbsPatch>& patches);

} // namespace splinemom
