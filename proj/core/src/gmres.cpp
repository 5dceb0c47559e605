#include <cmath>

#include "splinemom/errors.hpp"
#include "splinemom/hmatrix.hpp"

namespace splinemom {

GmresResult gmres_solve(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op,
                        const Eigen::VectorXcd& rhs, double tol, int restart, int max_iters) {
    const int n = static_cast<int>(rhs.size());
    const double bnorm = rhs.norm();
    GmresResult out;
    out.solution = Eigen::VectorXcd::Zero(n);
    if (bnorm == 0.0) return out;

    restart = std::min(restart, n);
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);

    while (out.iterations < max_iters) {
        const Eigen::VectorXcd r = rhs - op(x);
        double beta = r.norm();
        out.residual = beta / bnorm;
        out.history.push_back(out.residual);
        if (out.residual <= tol) break;

        // Arnoldi with modified Gram-Schmidt and Givens rotations
        Eigen::MatrixXcd V(n, restart + 1);
        Eigen::MatrixXcd Hm = Eigen::MatrixXcd::Zero(restart + 1, restart);
        Eigen::VectorXcd g = Eigen::VectorXcd::Zero(restart + 1);
        std::vector<std::complex<double>> cs(restart), sn(restart);
        V.col(0) = r / beta;
        g(0) = beta;

        int m = 0;
        for (int j = 0; j < restart && out.iterations < max_iters; ++j, ++m) {
            ++out.iterations;
            Eigen::VectorXcd w = op(V.col(j));
            for (int i = 0; i <= j; ++i) {
                Hm(i, j) = V.col(i).dot(w); // conjugated dot
                w -= Hm(i, j) * V.col(i);
            }
            Hm(j + 1, j) = w.norm();
            if (std::abs(Hm(j + 1, j)) > 1e-300) V.col(j + 1) = w / Hm(j + 1, j);

            for (int i = 0; i < j; ++i) {
                const auto t = cs[i] * Hm(i, j) + sn[i] * Hm(i + 1, j);
                Hm(i + 1, j) = -std::conj(sn[i]) * Hm(i, j) + std::conj(cs[i]) * Hm(i + 1, j);
                Hm(i, j) = t;
            }
            const double denom =
                std::sqrt(std::norm(Hm(j, j)) + std::norm(Hm(j + 1, j)));
            if (denom > 0.0) {
                cs[j] = std::conj(Hm(j, j)) / denom;
                sn[j] = std::conj(Hm(j + 1, j)) / denom;
                Hm(j, j) = cs[j] * Hm(j, j) + sn[j] * Hm(j + 1, j);
                Hm(j + 1, j) = 0.0;
                const auto t = cs[j] * g(j);
                g(j + 1) = -std::conj(sn[j]) * g(j);
                g(j) = t;
            }
            out.residual = std::abs(g(j + 1)) / bnorm;
            out.history.push_back(out.residual);
            if (out.residual <= tol) {
                ++m;
                break;
            }
        }
        // back substitution on the triangularized system
        Eigen::VectorXcd ym = Eigen::VectorXcd::Zero(m);
        for (int i = m - 1; i >= 0; --i) {
            std::complex<double> acc = g(i);
            for (int k = i + 1; k < m; ++k) acc -= Hm(i, k) * ym(k);
            ym(i) = acc / Hm(i, i);
        }
        x += V.leftCols(m) * ym;
        if (out.residual <= tol) {
            out.solution = x;
            const double true_res = (rhs - op(x)).norm() / bnorm;
            out.residual = true_res;
            if (true_res <= 10 * tol) return out;
        }
    }
    out.solution = x;
    out.residual = (rhs - op(x)).norm() / bnorm;
    if (out.residual > tol)
        throw SolverError("gmres: no convergence after " + std::to_string(out.iterations) +
                          " iterations, residual " + std::to_string(out.residual));
    return out;
}

} // namespace splinemom
