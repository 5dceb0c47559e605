#include <cstdint>
#include <fstream>

#include "splinemom/assembly.hpp"
#include "splinemom/errors.hpp"

namespace splinemom {

Eigen::VectorXcd solve_dense(const Eigen::MatrixXcd& matrix, const Eigen::VectorXcd& rhs) {
    if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size())
        throw ContractError("solve_dense: dimension mismatch");
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(matrix);
    const Eigen::VectorXcd x = lu.solve(rhs);
    if (!x.allFinite()) throw SolverError("solve_dense: factorization produced non-finite values");
    const double rhs_norm = rhs.norm();
    if (rhs_norm > 0.0) {
        const double residual = (matrix * x - rhs).norm() / rhs_norm;
        if (residual > 1e-8)
            throw SolverError("solve_dense: residual " + std::to_string(residual) +
                              " indicates a (near-)singular matrix");
    }
    return x;
}

void write_matrix(const Eigen::MatrixXcd& matrix, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("write_matrix: cannot open " + path);
    const std::uint64_t rows = matrix.rows(), cols = matrix.cols();
    os.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    os.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
    for (std::uint64_t i = 0; i < rows; ++i)
        for (std::uint64_t j = 0; j < cols; ++j) {
            const double re = matrix(i, j).real(), im = matrix(i, j).imag();
            os.write(reinterpret_cast<const char*>(&re), sizeof(re));
            os.write(reinterpret_cast<const char*>(&im), sizeof(im));
        }
    if (!os) throw IoError("write_matrix: short write to " + path);
}

Eigen::MatrixXcd read_matrix(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("read_matrix: cannot open " + path);
    std::uint64_t rows = 0, cols = 0;
    is.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    is.read(reinterpret_cast<char*>(&cols), sizeof(cols));
    if (!is || rows > 1'000'000 || cols > 1'000'000)
        throw IoError("read_matrix: invalid header in " + path);
    Eigen::MatrixXcd m(rows, cols);
    for (std::uint64_t i = 0; i < rows; ++i)
        for (std::uint64_t j = 0; j < cols; ++j) {
            double re = 0, im = 0;
            is.read(reinterpret_cast<char*>(&re), sizeof(re));
            is.read(reinterpret_cast<char*>(&im), sizeof(im));
            m(i, j) = {re, im};
        }
    if (!is) throw IoError("read_matrix: truncated file " + path);
    return m;
}

} // namespace splinemom
