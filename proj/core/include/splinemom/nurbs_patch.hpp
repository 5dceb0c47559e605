#pragma once

#include <vector>

#include <Eigen/Dense>

#include "splinemom/knot_vector.hpp"

namespace splinemom {

/// Differential geometry of the surface mapping at one parametric point.
struct SurfaceFrame {
    Eigen::Vector3d point = Eigen::Vector3d::Zero();
    Eigen::Matrix<double, 3, 2> jacobian = Eigen::Matrix<double, 3, 2>::Zero();
    double surface_element = 0.0; // J = |dF/ds x dF/dt|
    Eigen::Vector3d unit_normal = Eigen::Vector3d::Zero();
    Eigen::Matrix<double, 2, 3> pseudoinverse = Eigen::Matrix<double, 2, 3>::Zero();
    bool degenerate = false; // pseudoinverse withheld when set
};

/// Rectangular tiling of (0,1)^2 by the non-empty knot spans.
struct ParametricMesh {
    struct Rect {
        double s0, s1, t0, t1;
    };
    std::vector<double> breaks_s;
    std::vector<double> breaks_t;

    int count_s() const { return static_cast<int>(breaks_s.size()) - 1; }
    int count_t() const { return static_cast<int>(breaks_t.size()) - 1; }
    int count() const { return count_s() * count_t(); }
    Rect element(int is, int it) const {
        return {breaks_s[is], breaks_s[is + 1], breaks_t[it], breaks_t[it + 1]};
    }
};

ParametricMesh build_parametric_mesh(const TensorSpace& space);

/// Single NURBS patch: tensor-product space plus homogeneous control
/// points (x w, y w, z w, w), row a = j*n + i. Immutable after
/// construction; evaluation is pure and concurrency-safe.
class NurbsPatch {
public:
    using ControlPoints = Eigen::Matrix<double, Eigen::Dynamic, 4>;

    NurbsPatch(TensorSpace space, ControlPoints control_points);

    const TensorSpace& space() const { return space_; }
    const ControlPoints& control_points() const { return cps_; }
    const ParametricMesh& mesh() const { return mesh_; }

    Eigen::Vector3d map_point(double s, double t) const;
    SurfaceFrame frame(double s, double t) const;

    /// Dehomogenized control position of local index a.
    Eigen::Vector3d control_position(int a) const;

    /// Control-net bounding-box diagonal; scale reference for tolerances.
    double diameter() const { return diameter_; }

    /// Exact dyadic h-refinement by knot insertion in both directions.
    NurbsPatch refined_dyadic(int levels) const;

    /// Bounding box of the control points steering one element (contains
    /// the element's surface by the convex-hull property).
    Eigen::AlignedBox3d element_box(int is, int it) const;

private:
    TensorSpace space_;
    ControlPoints cps_;
    ParametricMesh mesh_;
    BezierExtraction ext_s_, ext_t_;
    double diameter_ = 0.0;

    // homogeneous value and first derivatives at (s,t)
    void eval_homogeneous(double s, double t, Eigen::Vector4d& h, Eigen::Vector4d& hs,
                          Eigen::Vector4d& ht) const;
};

} // namespace splinemom
