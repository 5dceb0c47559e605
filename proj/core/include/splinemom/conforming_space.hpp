#pragma once

#include <array>
#include <memory>
#include <vector>

#include "splinemom/multipatch.hpp"
#include "splinemom/surface_mesh.hpp"

namespace splinemom {

enum class SpaceKind { Div, Curl };

/// Parametric values of every vector basis function active on one element
/// at one point. vhat/divhat live in the parametric domain; the Piola maps
/// are applied by the physical evaluators.
struct LocalBasis {
    static constexpr int kMax = 64;
    int count = 0;
    std::array<int, kMax> local{};
    std::array<int, kMax> global{};  // -1 for removed (collapsed-edge) dofs
    std::array<double, kMax> sign{};
    std::array<Eigen::Vector2d, kMax> vhat{};
    std::array<double, kMax> divhat{};
};

/// Piola-mapped values of the active basis functions at a surface point.
struct VectorBasisEvaluation {
    int element = 0;
    int count = 0;
    std::array<int, LocalBasis::kMax> global{};
    std::array<double, LocalBasis::kMax> sign{};
    std::array<Eigen::Vector3d, LocalBasis::kMax> value{};
    std::array<double, LocalBasis::kMax> surface_div{}; // div kind only
};

/// Div- or curl-conforming compatible B-spline space on a multipatch
/// surface. Component spaces are S^(a,b) x S^(a-1,b+1) per patch, built
/// over the patch break sequences at maximum interior continuity. The curl
/// space reuses the div connectivity: curl dof A is the 90-degree
/// parametric rotation of div dof A, which realizes N^div = -n x N^curl
/// index by index.
class ConformingSpace {
public:
    struct Component {
        KnotVector s;
        KnotVector t;
        BezierExtraction ext_s, ext_t;
        int count_s = 0, count_t = 0;
        int count() const { return count_s * count_t; }
    };
    struct PatchSpace {
        Component c1; // s-directed vectors, normal trace on s=const sides
        Component c2; // t-directed vectors, normal trace on t=const sides
        int n1 = 0, n2 = 0;
        std::vector<int> global; // local dof -> global id, -1 if removed
        std::vector<double> sign;
    };

    SpaceKind kind = SpaceKind::Div;
    int degree_a = 1, degree_b = 0; // component-1 degrees (a,b); component 2 is (a-1,b+1)
    std::vector<PatchSpace> patch_spaces;
    int global_dim = 0;
    std::vector<Eigen::AlignedBox3d> dof_boxes;
    SurfaceMesh mesh;

    const MultipatchSurface& surface() const { return *surface_; }
    std::shared_ptr<const MultipatchSurface> surface_ptr() const { return surface_; }

    /// Parametric basis values on element (is,it) of a patch at (s,t).
    void eval_parametric(int patch, int is, int it, double s, double t, LocalBasis& out) const;

    /// Piola-mapped basis values; frame must be non-degenerate for Curl.
    VectorBasisEvaluation eval_basis(int patch, int is, int it, double s, double t) const;

    /// Field evaluation for a coefficient vector of length global_dim.
    Eigen::Vector3cd evaluate_field(const Eigen::VectorXcd& coeffs, int patch, double s,
                                    double t) const;

    /// Elements supporting a given global dof.
    const std::vector<int>& dof_elements(int global) const { return dof_elements_[global]; }
    /// Global dofs active on an element.
    const std::vector<int>& element_dofs(int element) const { return element_dofs_[element]; }

    std::shared_ptr<const MultipatchSurface> surface_;
    std::vector<std::vector<int>> dof_elements_;
    std::vector<std::vector<int>> element_dofs_;
};

/// Builds the signed global connectivity. Degrees are given as the first
/// component pair (a,b), e.g. (2,1) means S^(2,1) x S^(1,2). Requires
/// a >= 1, b >= 0. Throws GeometryError for incompatible edge knots.
ConformingSpace build_conforming_space(std::shared_ptr<const MultipatchSurface> surface,
                                       SpaceKind kind, int degree_a, int degree_b);

} // namespace splinemom
