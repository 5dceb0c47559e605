#include <cmath>

#include "splinemom/errors.hpp"
#include "splinemom/knot_vector.hpp"

namespace splinemom {

Eigen::MatrixXd bernstein_ders(int degree, double u, int order) {
    if (degree < 0) throw DomainError("bernstein_ders: negative degree");
    if (order < 0) throw DomainError("bernstein_ders: negative order");
    const int p = degree;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(order + 1, p + 1);

    // de Casteljau triangle: row q holds the degree-q Bernstein values
    std::vector<Eigen::VectorXd> tri(p + 1);
    tri[0] = Eigen::VectorXd::Ones(1);
    for (int q = 1; q <= p; ++q) {
        tri[q] = Eigen::VectorXd::Zero(q + 1);
        for (int i = 0; i < q; ++i) {
            tri[q](i) += (1.0 - u) * tri[q - 1](i);
            tri[q](i + 1) += u * tri[q - 1](i);
        }
    }
    out.row(0) = tri[p].transpose();

    // derivative of order d from degree p-d values:
    // B^(d)_{i,p} = p!/(p-d)! * sum_j (-1)^(d-j) C(d,j) B_{i-j, p-d}
    const int nders = std::min(order, p);
    for (int d = 1; d <= nders; ++d) {
        double factor = 1.0;
        for (int q = p; q > p - d; --q) factor *= q;
        std::vector<double> binom(d + 1, 0.0);
        binom[0] = 1.0;
        for (int r = 1; r <= d; ++r)
            for (int c = r; c >= 1; --c) binom[c] += binom[c - 1];
        const Eigen::VectorXd& low = tri[p - d];
        for (int i = 0; i <= p; ++i) {
            double acc = 0.0;
            for (int j = 0; j <= d; ++j) {
                int idx = i - d + j;
                if (idx < 0 || idx > p - d) continue;
                double sign = (j % 2 == 0) ? 1.0 : -1.0;
                acc += sign * binom[j] * low(idx);
            }
            out(d, i) = factor * acc;
        }
    }
    return out;
}

BezierExtraction bezier_extract(const KnotVector& kv) {
    BezierExtraction ext;
    const int p = kv.degree();
    ext.degree = p;
    const int ne = kv.element_count();

    if (p == 0) {
        // degree-0 splines are already elementwise Bernstein constants
        ext.operators.assign(ne, Eigen::MatrixXd::Identity(1, 1));
        return ext;
    }

    // Insert every interior knot up to multiplicity p; the accumulated
    // transfer expresses each original B-spline in the C^0 Bezier basis.
    KnotVector work = kv;
    const int n0 = kv.basis_count();
    Eigen::MatrixXd T = Eigen::MatrixXd::Identity(n0, n0);
    const auto uk = kv.unique_knots();
    for (std::size_t i = 1; i + 1 < uk.size(); ++i) {
        int mult = 0;
        for (double kn : kv.knots())
            if (std::abs(kn - uk[i]) <= 1e-13) ++mult;
        for (int m = mult; m < p; ++m) {
            auto [next, Ti] = work.insert_knot(uk[i]);
            T = Ti * T;
            work = std::move(next);
        }
    }

    ext.operators.reserve(ne);
    for (int e = 0; e < ne; ++e)
        ext.operators.push_back(T.block(e * p, 0, p + 1, n0)
                                    .middleCols(kv.element_first_basis(e), p + 1)
                                    .transpose());
    return ext;
}

} // namespace splinemom
