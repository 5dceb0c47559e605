#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace splinemom {

/// Open knot vector on [0,1].
///
/// Invariants: non-decreasing, first and last degree+1 entries pinned to 0
/// and 1, interior multiplicity at most max(degree, 1), and at least
/// degree+1 basis functions. Degree 0 is admitted for the reduced-degree
/// component spaces; its "open" form is just {0, interior knots, 1}.
class KnotVector {
public:
    /// Degree-0 single-element vector {0,1}; placeholder default.
    KnotVector() : knots_{0.0, 1.0}, degree_(0) {}
    KnotVector(std::vector<double> knots, int degree);

    /// Open vector with `elements` uniform non-empty spans.
    static KnotVector uniform(int degree, int elements);
    /// Single-element Bernstein vector {0^(p+1), 1^(p+1)}.
    static KnotVector bernstein(int degree);
    /// Open max-continuity vector of the given degree over a break sequence
    /// (first break 0, last break 1, strictly increasing).
    static KnotVector from_breaks(int degree, const std::vector<double>& breaks);

    int degree() const { return degree_; }
    const std::vector<double>& knots() const { return knots_; }
    int basis_count() const { return static_cast<int>(knots_.size()) - degree_ - 1; }

    std::vector<double> unique_knots() const;
    int element_count() const;

    /// Index k with knots[k] <= u < knots[k+1]; at u=1 the last non-empty
    /// span. Throws DomainError for u outside [0,1].
    int find_span(double u) const;
    /// 0-based index among non-empty spans for the span containing u.
    int element_of(double u) const;
    std::pair<double, double> element_bounds(int element) const;
    /// First global basis index active on an element (degree+1 consecutive).
    int element_first_basis(int element) const;

    /// Nonzero basis values and derivatives at u. Row d holds the d-th
    /// derivatives of the degree+1 active functions (local order). At
    /// interior knots of full multiplicity the one-sided value from the
    /// right is returned, except at u=1 where the left limit applies.
    Eigen::MatrixXd eval_basis_ders(double u, int order) const;

    /// Greville abscissae (knot averages), one per basis function.
    std::vector<double> greville() const;

    /// Inserts u once. Returns the refined vector and the (n+1) x n
    /// coefficient transfer matrix: refined coefficients = T * old, leaving
    /// the spline unchanged pointwise. Throws RefinementError when the
    /// resulting multiplicity would exceed the degree.
    std::pair<KnotVector, Eigen::MatrixXd> insert_knot(double u) const;

    /// Inserts the midpoint of every non-empty span, `levels` times.
    std::pair<KnotVector, Eigen::MatrixXd> refine_dyadic(int levels) const;

    bool operator==(const KnotVector& other) const;

private:
    std::vector<double> knots_;
    int degree_;
};

/// Per-element operators mapping Bernstein values to B-spline values:
/// spline values on element e = operators[e] * bernstein values.
struct BezierExtraction {
    int degree = 0;
    std::vector<Eigen::MatrixXd> operators;
};

BezierExtraction bezier_extract(const KnotVector& kv);

/// Bernstein basis values/derivatives on [0,1], de Casteljau recurrence.
/// Row d holds the d-th derivatives of the degree+1 functions.
Eigen::MatrixXd bernstein_ders(int degree, double u, int order);

/// Tensor-product B-spline space. Linear index a = j*n + i where n is the
/// basis count in s (0-based form of a = (j-1)n + i).
struct TensorSpace {
    KnotVector s;
    KnotVector t;

    int dim() const { return s.basis_count() * t.basis_count(); }
    int linear_index(int i, int j) const { return j * s.basis_count() + i; }
    std::pair<int, int> unravel(int a) const {
        int n = s.basis_count();
        return {a % n, a / n};
    }
    int element_count() const { return s.element_count() * t.element_count(); }
};

} // namespace splinemom
