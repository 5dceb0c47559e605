#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "splinemom/assembly.hpp"

namespace splinemom {

/// Binary cluster tree over dof bounding boxes: recursive median bisection
/// along the longest box axis, leaves at most leaf_size dofs.
struct ClusterTree {
    struct Node {
        int begin = 0, end = 0; // range into perm
        int child[2] = {-1, -1};
        Eigen::AlignedBox3d box;
        bool leaf() const { return child[0] < 0; }
        double diameter() const { return box.diagonal().norm(); }
    };
    std::vector<Node> nodes;
    std::vector<int> perm; // position -> dof index

    int size() const { return static_cast<int>(perm.size()); }
};

ClusterTree build_cluster_tree(const std::vector<Eigen::AlignedBox3d>& dof_boxes, int leaf_size);

/// H-matrix over a row/col cluster-tree pair: admissible blocks hold ACA
/// low-rank factors U V, inadmissible leaf blocks are dense. Blocks
/// partition the full index product.
class HMatrix {
public:
    struct Block {
        int row_node = 0, col_node = 0;
        bool admissible = false; // admissibility condition held at build
        bool low_rank = false;   // storage outcome (ACA factors vs dense)
        Eigen::MatrixXcd U, V;   // low rank: (m x r), (r x n)
        Eigen::MatrixXcd dense;
    };

    ClusterTree rows, cols;
    std::vector<Block> blocks;
    double eta = 2.0;
    double aca_tol = 1e-6;

    int rows_dim() const { return rows.size(); }
    int cols_dim() const { return cols.size(); }

    Eigen::VectorXcd matvec(const Eigen::VectorXcd& x) const;

    /// Stored complex entry count across all blocks.
    std::size_t stored_entries() const;

    void save(const std::string& path) const;
    static HMatrix load(const std::string& path);
};

/// Batched Galerkin entry generator for ACA sampling and near-field
/// blocks: evaluates rows/columns of the global matrix restricted to
/// index subsets.
struct EntryGenerator {
    std::function<void(int row, const std::vector<int>& cols, std::complex<double>* out)> row;
    std::function<void(int col, const std::vector<int>& rows, std::complex<double>* out)> col;
};

/// Partially pivoted ACA with the stopping rule |u_r||v_r| <= tol * |UV|_F
/// (running estimate). Deterministic pivot order. Returns rank 0 for a
/// numerically zero block.
struct AcaResult {
    Eigen::MatrixXcd U, V;
    int rank = 0;
    bool converged = true; // stopping tolerance met (or block exhausted)
};
AcaResult aca_approximate(const EntryGenerator& gen, const std::vector<int>& row_dofs,
                          const std::vector<int>& col_dofs, double tol, int max_rank);

/// EFIE entry generator over an existing integrator (element-pair batched).
EntryGenerator efie_entry_generator(const EfieIntegrator& integrator);

/// Assembles the H-matrix approximation of the EFIE operator.
HMatrix assemble_efie_hmatrix(const EfieIntegrator& integrator, double eta, int leaf_size,
                              double aca_tol);

/// Restarted GMRES on a matvec operator; relative residual target.
struct GmresResult {
    Eigen::VectorXcd solution;
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> history;
};
GmresResult gmres_solve(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op,
                        const Eigen::VectorXcd& rhs, double tol, int restart, int max_iters);

} // namespace splinemom
