#include <cstdint>
#include <cstring>
#include <fstream>

#include "splinemom/errors.hpp"
#include "splinemom/hmatrix.hpp"

namespace splinemom {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'M', 'H', 'M', 'A', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_f64(std::ostream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
double get_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

void put_matrix(std::ostream& os, const Eigen::MatrixXcd& m) {
    put_u64(os, m.rows());
    put_u64(os, m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            put_f64(os, m(i, j).real());
            put_f64(os, m(i, j).imag());
        }
}

Eigen::MatrixXcd get_matrix(std::istream& is) {
    const std::uint64_t rows = get_u64(is), cols = get_u64(is);
    if (!is || rows > 10'000'000 || cols > 10'000'000)
        throw IoError("hmatrix load: invalid matrix header");
    Eigen::MatrixXcd m(rows, cols);
    for (std::uint64_t i = 0; i < rows; ++i)
        for (std::uint64_t j = 0; j < cols; ++j) {
            const double re = get_f64(is);
            const double im = get_f64(is);
            m(i, j) = {re, im};
        }
    return m;
}

void put_tree(std::ostream& os, const ClusterTree& tree) {
    put_u64(os, tree.nodes.size());
    for (const auto& node : tree.nodes) {
        put_u64(os, node.begin);
        put_u64(os, node.end);
        put_u64(os, static_cast<std::uint64_t>(static_cast<std::int64_t>(node.child[0])));
        put_u64(os, static_cast<std::uint64_t>(static_cast<std::int64_t>(node.child[1])));
        for (int c = 0; c < 3; ++c) put_f64(os, node.box.min()(c));
        for (int c = 0; c < 3; ++c) put_f64(os, node.box.max()(c));
    }
    put_u64(os, tree.perm.size());
    for (int p : tree.perm) put_u64(os, p);
}

ClusterTree get_tree(std::istream& is) {
    ClusterTree tree;
    const std::uint64_t nn = get_u64(is);
    if (!is || nn > 50'000'000) throw IoError("hmatrix load: invalid tree header");
    tree.nodes.resize(nn);
    for (auto& node : tree.nodes) {
        node.begin = static_cast<int>(get_u64(is));
        node.end = static_cast<int>(get_u64(is));
        node.child[0] = static_cast<int>(static_cast<std::int64_t>(get_u64(is)));
        node.child[1] = static_cast<int>(static_cast<std::int64_t>(get_u64(is)));
        Eigen::Vector3d lo, hi;
        for (int c = 0; c < 3; ++c) lo(c) = get_f64(is);
        for (int c = 0; c < 3; ++c) hi(c) = get_f64(is);
        node.box = Eigen::AlignedBox3d(lo, hi);
    }
    const std::uint64_t np = get_u64(is);
    if (!is || np > 50'000'000) throw IoError("hmatrix load: invalid permutation header");
    tree.perm.resize(np);
    for (auto& p : tree.perm) p = static_cast<int>(get_u64(is));
    return tree;
}

} // namespace

void HMatrix::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("hmatrix save: cannot open " + path);
    os.write(kMagic, sizeof(kMagic));
    put_u32(os, kVersion);
    put_f64(os, eta);
    put_f64(os, aca_tol);
    put_tree(os, rows);
    put_tree(os, cols);
    put_u64(os, blocks.size());
    for (const auto& blk : blocks) {
        put_u64(os, blk.row_node);
        put_u64(os, blk.col_node);
        put_u32(os, blk.admissible ? 1 : 0);
        put_u32(os, blk.low_rank ? 1 : 0);
        if (blk.low_rank) {
            put_matrix(os, blk.U);
            put_matrix(os, blk.V);
        } else {
            put_matrix(os, blk.dense);
        }
    }
    if (!os) throw IoError("hmatrix save: short write to " + path);
}

HMatrix HMatrix::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("hmatrix load: cannot open " + path);
    char magic[8] = {};
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IoError("hmatrix load: bad magic in " + path);
    const std::uint32_t version = get_u32(is);
    if (version != kVersion)
        throw IoError("hmatrix load: unsupported format version " + std::to_string(version));
    HMatrix H;
    H.eta = get_f64(is);
    H.aca_tol = get_f64(is);
    H.rows = get_tree(is);
    H.cols = get_tree(is);
    const std::uint64_t nb = get_u64(is);
    if (!is || nb > 50'000'000) throw IoError("hmatrix load: invalid block count");
    H.blocks.resize(nb);
    for (auto& blk : H.blocks) {
        blk.row_node = static_cast<int>(get_u64(is));
        blk.col_node = static_cast<int>(get_u64(is));
        blk.admissible = get_u32(is) != 0;
        blk.low_rank = get_u32(is) != 0;
        if (blk.low_rank) {
            blk.U = get_matrix(is);
            blk.V = get_matrix(is);
        } else {
            blk.dense = get_matrix(is);
        }
    }
    if (!is) throw IoError("hmatrix load: truncated file " + path);
    return H;
}

} // namespace splinemom
