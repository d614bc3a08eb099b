#pragma once

#include "worstpath/tree_mdp.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace worstpath {

enum class NodeStatus { expanded, building_block, unexpanded };

struct SynNode {
    StateId state{};
    std::optional<ActionId> action;
    std::vector<std::size_t> children;
    NodeStatus status = NodeStatus::unexpanded;
    std::optional<std::size_t> parent;
    std::size_t depth = 0;
};

/**
 * A realised synthetic tree. Node 0 is the root; nodes are appended in
 * creation order, so a parent always precedes its children.
 */
class SynTree {
public:
    /// Single root node, status derived from the model.
    SynTree(const TreeMdp& mdp, StateId root);

    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t root() const noexcept { return 0; }
    const SynNode& node(std::size_t i) const { return nodes_.at(i); }
    const std::vector<SynNode>& nodes() const noexcept { return nodes_; }

    /// Applies `a` to an unexpanded node and appends one node per child.
    /// Returns the index of the first new child.
    std::size_t expand_node(const TreeMdp& mdp, std::size_t node, ActionId a);

    /// True when `s` occurs on the path from the root to `node` (inclusive).
    bool on_ancestor_path(std::size_t node, StateId s) const;

    /// Number of expanded nodes, i.e. reactions used.
    std::size_t num_expanded() const;

    /// Longest root-to-leaf path length (in actions) below `node`.
    std::size_t height(std::size_t node = 0) const;

private:
    std::vector<SynNode> nodes_;
};

}  // namespace worstpath
