#pragma once

#include <vector>

#include <Eigen/Dense>

#include "splinemom/surface_mesh.hpp"

namespace splinemom {

/// Gauss-Legendre rule on [0,1]; exact for polynomials of degree 2n-1.
struct GaussRule {
    Eigen::VectorXd points;
    Eigen::VectorXd weights;
};

GaussRule gauss_rule_1d(int n);

/// 2D rule on the reference square [0,1]^2.
struct Rule2D {
    std::vector<Eigen::Vector2d> points;
    std::vector<double> weights;
};

/// Tensor Gauss rule, n points per direction.
Rule2D tensor_rule(int n);

/// Tensor rule subdivided into geometrically graded slices. Grading is per
/// direction: grade_s/grade_t = 0 leaves the direction alone, +1 grades
/// toward coordinate 1, -1 toward 0. `slices` cells per graded direction.
Rule2D graded_rule(int n, int grade_s, int grade_t, int slices);

enum class PairClass { Coincident, EdgeAdjacent, VertexAdjacent, RegularNear, RegularFar };

/// 4D node in canonical element-pair coordinates.
struct PairQuadPoint {
    Eigen::Vector2d x;
    Eigen::Vector2d y;
    double w;
};

struct PairRule {
    std::vector<PairQuadPoint> points;
};

/// Regularized rule for a singular pair class (Sauter-Schwab relative
/// coordinates with Duffy-type splits; 8/6/4 subdomains of n^4 nodes for
/// the coincident/edge/vertex cases). Throws ContractError for regular
/// classes.
PairRule sauter_schwab_rule(PairClass cls, int n);

/// Adjacency from snapped corner ids (cross-patch aware); regular pairs
/// split near/far at distance/max-diameter = near_threshold.
PairClass classify_pair(const SurfaceMesh& mesh, int ea, int eb, double near_threshold);

/// Dihedral remaps of the unit square: bit 0 swaps coordinates, bits 1 and
/// 2 flip the first and second output coordinate.
Eigen::Vector2d apply_d4(int code, const Eigen::Vector2d& xi);

/// Orientation codes remapping canonical pair coordinates onto the two
/// elements so shared entities sit at canonical positions (shared edge at
/// {x2=0} traversed identically; shared vertex at the origin).
struct PairOrientation {
    int d4_a = 0;
    int d4_b = 0;
};

PairOrientation canonical_orientation(const SurfaceMesh& mesh, int ea, int eb, PairClass cls);

/// Assembly-time quadrature settings. order == 0 resolves to (max degree
/// + 2) per direction.
struct QuadratureConfig {
    int order = 0;
    double near_threshold = 1.5;
    int degenerate_upgrade = 3;
    int near_slices = 3;

    int resolve_order(int max_degree) const { return order > 0 ? order : max_degree + 2; }
};

/// Per-element rule with the degenerate-tip upgrade applied: elements
/// touching a collapsed side get `upgrade` graded slices toward it.
Rule2D element_rule(const MultipatchSurface& surface, const SurfaceMesh::Element& el, int n,
                    int upgrade);

} // namespace splinemom
