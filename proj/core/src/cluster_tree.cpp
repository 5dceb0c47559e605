#include <algorithm>
#include <numeric>

#include "splinemom/errors.hpp"
#include "splinemom/hmatrix.hpp"

namespace splinemom {

namespace {

void split_node(ClusterTree& tree, int node_index, const std::vector<Eigen::AlignedBox3d>& boxes,
                int leaf_size) {
    auto& node = tree.nodes[node_index];
    const int count = node.end - node.begin;

    for (int i = node.begin; i < node.end; ++i) node.box.extend(boxes[tree.perm[i]]);
    if (count <= leaf_size) return;

    int axis = 0;
    const Eigen::Vector3d extent = node.box.diagonal();
    if (extent(1) > extent(axis)) axis = 1;
    if (extent(2) > extent(axis)) axis = 2;

    // median split over box centers; ties broken by dof index for
    // deterministic trees
    const auto begin = tree.perm.begin() + node.begin;
    const auto end = tree.perm.begin() + node.end;
    const auto mid = begin + count / 2;
    std::nth_element(begin, mid, end, [&](int a, int b) {
        const double ca = boxes[a].center()(axis);
        const double cb = boxes[b].center()(axis);
        return ca < cb || (ca == cb && a < b);
    });
    std::sort(begin, mid, [&](int a, int b) {
        const double ca = boxes[a].center()(axis), cb = boxes[b].center()(axis);
        return ca < cb || (ca == cb && a < b);
    });
    std::sort(mid, end, [&](int a, int b) {
        const double ca = boxes[a].center()(axis), cb = boxes[b].center()(axis);
        return ca < cb || (ca == cb && a < b);
    });

    const int split = node.begin + count / 2;
    ClusterTree::Node left, right;
    left.begin = node.begin;
    left.end = split;
    right.begin = split;
    right.end = node.end;
    const int li = static_cast<int>(tree.nodes.size());
    tree.nodes[node_index].child[0] = li;
    tree.nodes.push_back(left);
    tree.nodes[node_index].child[1] = li + 1;
    tree.nodes.push_back(right);
    split_node(tree, li, boxes, leaf_size);
    split_node(tree, li + 1, boxes, leaf_size);
}

} // namespace

ClusterTree build_cluster_tree(const std::vector<Eigen::AlignedBox3d>& dof_boxes, int leaf_size) {
    if (dof_boxes.empty()) throw ContractError("cluster tree: no dof boxes");
    if (leaf_size < 1) throw DomainError("cluster tree: leaf size must be positive");
    ClusterTree tree;
    tree.perm.resize(dof_boxes.size());
    std::iota(tree.perm.begin(), tree.perm.end(), 0);
    ClusterTree::Node root;
    root.begin = 0;
    root.end = static_cast<int>(dof_boxes.size());
    tree.nodes.push_back(root);
    split_node(tree, 0, dof_boxes, leaf_size);
    return tree;
}

} // namespace splinemom
