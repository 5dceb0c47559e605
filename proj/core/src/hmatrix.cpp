#include <algorithm>
#include <cmath>

#include "splinemom/errors.hpp"
#include "splinemom/hmatrix.hpp"
#include "splinemom/parallel.hpp"

namespace splinemom {

namespace {

double box_distance(const Eigen::AlignedBox3d& a, const Eigen::AlignedBox3d& b) {
    return a.exteriorDistance(b);
}

struct BlockPlan {
    int row_node, col_node;
    bool admissible;
};

void plan_blocks(const ClusterTree& rows, const ClusterTree& cols, int rnode, int cnode,
                 double eta, std::vector<BlockPlan>& out) {
    const auto& rn = rows.nodes[rnode];
    const auto& cn = cols.nodes[cnode];
    const double diam = std::min(rn.diameter(), cn.diameter());
    const double dist = box_distance(rn.box, cn.box);
    if (diam <= eta * dist && dist > 0.0) {
        out.push_back({rnode, cnode, true});
        return;
    }
    if (rn.leaf() && cn.leaf()) {
        out.push_back({rnode, cnode, false});
        return;
    }
    // split the larger non-leaf side (both if possible)
    const bool split_row = !rn.leaf() && (cn.leaf() || rn.diameter() >= cn.diameter());
    const bool split_col = !cn.leaf() && (rn.leaf() || cn.diameter() >= rn.diameter());
    if (split_row && split_col) {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                plan_blocks(rows, cols, rn.child[a], cn.child[b], eta, out);
    } else if (split_row) {
        for (int a = 0; a < 2; ++a) plan_blocks(rows, cols, rn.child[a], cnode, eta, out);
    } else {
        for (int b = 0; b < 2; ++b) plan_blocks(rows, cols, rnode, cn.child[b], eta, out);
    }
}

} // namespace

EntryGenerator efie_entry_generator(const EfieIntegrator& integrator) {
    const ConformingSpace& space = integrator.space();
    EntryGenerator gen;

    // batched by element pairs: every pair block is computed once and all
    // requested entries are scattered out of it
    gen.row = [&integrator, &space](int row, const std::vector<int>& cols,
                                    std::complex<double>* out) {
        for (std::size_t j = 0; j < cols.size(); ++j) out[j] = 0.0;
        // union of support elements over the requested columns
        std::vector<int> ey_list;
        for (std::size_t j = 0; j < cols.size(); ++j)
            for (int ey : space.dof_elements(cols[j]))
                if (std::find(ey_list.begin(), ey_list.end(), ey) == ey_list.end())
                    ey_list.push_back(ey);
        std::sort(ey_list.begin(), ey_list.end());

        Eigen::MatrixXcd block;
        for (int ex : space.dof_elements(row)) {
            const auto& ga = integrator.element_data(ex).globals;
            int ia = -1;
            for (std::size_t i = 0; i < ga.size(); ++i)
                if (ga[i] == row) ia = static_cast<int>(i);
            for (int ey : ey_list) {
                integrator.pair_block(ex, ey, block);
                const auto& gb = integrator.element_data(ey).globals;
                for (std::size_t j = 0; j < cols.size(); ++j)
                    for (std::size_t b = 0; b < gb.size(); ++b)
                        if (gb[b] == cols[j]) out[j] += block(ia, b);
            }
        }
    };

    gen.col = [&integrator, &space](int col, const std::vector<int>& rows,
                                    std::complex<double>* out) {
        for (std::size_t i = 0; i < rows.size(); ++i) out[i] = 0.0;
        std::vector<int> ex_list;
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (int ex : space.dof_elements(rows[i]))
                if (std::find(ex_list.begin(), ex_list.end(), ex) == ex_list.end())
                    ex_list.push_back(ex);
        std::sort(ex_list.begin(), ex_list.end());

        Eigen::MatrixXcd block;
        for (int ey : space.dof_elements(col)) {
            const auto& gb = integrator.element_data(ey).globals;
            int jb = -1;
            for (std::size_t j = 0; j < gb.size(); ++j)
                if (gb[j] == col) jb = static_cast<int>(j);
            for (int ex : ex_list) {
                integrator.pair_block(ex, ey, block);
                const auto& ga = integrator.element_data(ex).globals;
                for (std::size_t i = 0; i < rows.size(); ++i)
                    for (std::size_t a = 0; a < ga.size(); ++a)
                        if (ga[a] == rows[i]) out[i] += block(a, jb);
            }
        }
    };
    return gen;
}

HMatrix assemble_efie_hmatrix(const EfieIntegrator& integrator, double eta, int leaf_size,
                              double aca_tol) {
    const ConformingSpace& space = integrator.space();
    // low-rank compression degrades once the body spans many wavelengths
    const double electrical_size = integrator.wavenumber() * space.surface().diameter;
    if (electrical_size > 60.0)
        std::fprintf(stderr,
                     "hmatrix: advisory: k*diameter = %.1f is in the high-wavenumber regime; "
                     "ACA ranks may grow large\n",
                     electrical_size);
    HMatrix H;
    H.eta = eta;
    H.aca_tol = aca_tol;
    H.rows = build_cluster_tree(space.dof_boxes, leaf_size);
    H.cols = H.rows;

    std::vector<BlockPlan> plan;
    plan_blocks(H.rows, H.cols, 0, 0, eta, plan);
    H.blocks.resize(plan.size());

    const EntryGenerator gen = efie_entry_generator(integrator);

    // near-field dense blocks are assembled pairwise (each element pair
    // once); admissible blocks through ACA sampling
    parallel_chunks(plan.size(), [&](int, std::size_t begin, std::size_t end) {
        Eigen::MatrixXcd pair;
        for (std::size_t bi = begin; bi < end; ++bi) {
            const auto& p = plan[bi];
            HMatrix::Block& blk = H.blocks[bi];
            blk.row_node = p.row_node;
            blk.col_node = p.col_node;
            blk.admissible = p.admissible;
            const auto& rn = H.rows.nodes[p.row_node];
            const auto& cn = H.cols.nodes[p.col_node];
            std::vector<int> row_dofs(H.rows.perm.begin() + rn.begin,
                                      H.rows.perm.begin() + rn.end);
            std::vector<int> col_dofs(H.cols.perm.begin() + cn.begin,
                                      H.cols.perm.begin() + cn.end);

            if (p.admissible) {
                const int m_dim = static_cast<int>(row_dofs.size());
                const int n_dim = static_cast<int>(col_dofs.size());
                AcaResult aca =
                    aca_approximate(gen, row_dofs, col_dofs, aca_tol, std::min(m_dim, n_dim));
                const bool pays_off = aca.rank * (m_dim + n_dim) < m_dim * n_dim;
                if (aca.converged && pays_off) {
                    blk.low_rank = true;
                    blk.U = std::move(aca.U);
                    blk.V = std::move(aca.V);
                    continue;
                }
                // stagnation or no storage gain: dense fallback
            }
            blk.low_rank = false;
            blk.dense.setZero(static_cast<int>(row_dofs.size()),
                              static_cast<int>(col_dofs.size()));
            std::vector<int> row_slot(space.global_dim, -1), col_slot(space.global_dim, -1);
            for (std::size_t i = 0; i < row_dofs.size(); ++i) row_slot[row_dofs[i]] = static_cast<int>(i);
            for (std::size_t j = 0; j < col_dofs.size(); ++j) col_slot[col_dofs[j]] = static_cast<int>(j);
            // element pairs touching the block
            std::vector<int> ex_list, ey_list;
            for (int d : row_dofs)
                for (int e : space.dof_elements(d))
                    if (std::find(ex_list.begin(), ex_list.end(), e) == ex_list.end())
                        ex_list.push_back(e);
            for (int d : col_dofs)
                for (int e : space.dof_elements(d))
                    if (std::find(ey_list.begin(), ey_list.end(), e) == ey_list.end())
                        ey_list.push_back(e);
            std::sort(ex_list.begin(), ex_list.end());
            std::sort(ey_list.begin(), ey_list.end());
            for (int ex : ex_list) {
                const auto& ga = integrator.element_data(ex).globals;
                bool row_active = false;
                for (int g : ga)
                    if (row_slot[g] >= 0) row_active = true;
                if (!row_active) continue;
                for (int ey : ey_list) {
                    const auto& gb = integrator.element_data(ey).globals;
                    bool col_active = false;
                    for (int g : gb)
                        if (col_slot[g] >= 0) col_active = true;
                    if (!col_active) continue;
                    integrator.pair_block(ex, ey, pair);
                    for (std::size_t a = 0; a < ga.size(); ++a) {
                        if (row_slot[ga[a]] < 0) continue;
                        for (std::size_t b = 0; b < gb.size(); ++b)
                            if (col_slot[gb[b]] >= 0)
                                blk.dense(row_slot[ga[a]], col_slot[gb[b]]) += pair(a, b);
                    }
                }
            }
        }
    });
    return H;
}

Eigen::VectorXcd HMatrix::matvec(const Eigen::VectorXcd& x) const {
    if (x.size() != cols_dim()) throw ContractError("hmatrix matvec: dimension mismatch");
    // permuted input, blockwise products, un-permuted output; fixed block
    // order keeps the accumulation deterministic
    Eigen::VectorXcd xp(cols_dim());
    for (int i = 0; i < cols_dim(); ++i) xp(i) = x(cols.perm[i]);
    Eigen::VectorXcd yp = Eigen::VectorXcd::Zero(rows_dim());
    for (const auto& blk : blocks) {
        const auto& rn = rows.nodes[blk.row_node];
        const auto& cn = cols.nodes[blk.col_node];
        const auto xs = xp.segment(cn.begin, cn.end - cn.begin);
        if (blk.low_rank) {
            if (blk.U.cols() > 0)
                yp.segment(rn.begin, rn.end - rn.begin) += blk.U * (blk.V * xs);
        } else {
            yp.segment(rn.begin, rn.end - rn.begin) += blk.dense * xs;
        }
    }
    Eigen::VectorXcd y(rows_dim());
    for (int i = 0; i < rows_dim(); ++i) y(rows.perm[i]) = yp(i);
    return y;
}

std::size_t HMatrix::stored_entries() const {
    std::size_t total = 0;
    for (const auto& blk : blocks) {
        if (blk.low_rank)
            total += static_cast<std::size_t>(blk.U.size()) + static_cast<std::size_t>(blk.V.size());
        else
            total += static_cast<std::size_t>(blk.dense.size());
    }
    return total;
}

} // namespace splinemom
