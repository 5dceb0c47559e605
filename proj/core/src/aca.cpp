#include <cmath>

#include "splinemom/hmatrix.hpp"

namespace splinemom {

AcaResult aca_approximate(const EntryGenerator& gen, const std::vector<int>& row_dofs,
                          const std::vector<int>& col_dofs, double tol, int max_rank) {
    const int m = static_cast<int>(row_dofs.size());
    const int n = static_cast<int>(col_dofs.size());
    const int rmax = std::min({max_rank, m, n});

    AcaResult out;
    out.U.resize(m, 0);
    out.V.resize(0, n);

    std::vector<bool> row_used(m, false), col_used(n, false);
    std::vector<std::complex<double>> buffer(std::max(m, n));
    double frob2 = 0.0; // running |UV|_F^2 estimate
    int pivot_row = 0;  // first pivot deterministic; later argmax of |u|

    while (out.rank < rmax) {
        // next unused row starting from the suggested pivot
        int i = pivot_row;
        while (i < m && row_used[i]) ++i;
        if (i >= m) {
            i = 0;
            while (i < m && row_used[i]) ++i;
            if (i >= m) break;
        }
        row_used[i] = true;

        Eigen::RowVectorXcd v(n);
        gen.row(row_dofs[i], col_dofs, buffer.data());
        for (int j = 0; j < n; ++j) v(j) = buffer[j];
        if (out.rank > 0) v -= out.U.row(i) * out.V;

        int pj = -1;
        double best = 0.0;
        for (int j = 0; j < n; ++j)
            if (!col_used[j] && std::abs(v(j)) > best) {
                best = std::abs(v(j));
                pj = j;
            }
        if (pj < 0 || best <= 1e-300) {
            pivot_row = 0;
            continue; // numerically zero residual row; try another
        }
        col_used[pj] = true;

        Eigen::VectorXcd u(m);
        gen.col(col_dofs[pj], row_dofs, buffer.data());
        for (int r = 0; r < m; ++r) u(r) = buffer[r];
        if (out.rank > 0) u -= out.U * out.V.col(pj);
        u /= v(pj);

        // an increment already below the target accuracy ends the sweep
        // without being appended
        const double unorm = u.norm(), vnorm = v.norm();
        if (out.rank > 0 && unorm * vnorm <= tol * std::sqrt(std::max(frob2, 1e-300)))
            return out;

        // running Frobenius estimate of the accumulated factorization
        frob2 += unorm * unorm * vnorm * vnorm;
        for (int q = 0; q < out.rank; ++q)
            frob2 += 2.0 * std::abs(out.U.col(q).dot(u)) * std::abs(out.V.row(q).conjugate().dot(v));

        out.U.conservativeResize(Eigen::NoChange, out.rank + 1);
        out.V.conservativeResize(out.rank + 1, Eigen::NoChange);
        out.U.col(out.rank) = u;
        out.V.row(out.rank) = v;
        ++out.rank;

        if (unorm * vnorm <= tol * std::sqrt(std::max(frob2, 1e-300))) return out;

        // next pivot row: largest |u| among unused rows (deterministic)
        pivot_row = -1;
        double umax = -1.0;
        for (int r = 0; r < m; ++r)
            if (!row_used[r] && std::abs(u(r)) > umax) {
                umax = std::abs(u(r));
                pivot_row = r;
            }
        if (pivot_row < 0) break;
    }
    // full-rank factorization is exact; anything else that reached the cap
    // missed the tolerance and callers fall back to a dense block
    out.converged = (out.rank == std::min(m, n));
    return out;
}

} // namespace splinemom
