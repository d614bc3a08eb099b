#include "worstpath/syn_tree.hpp"

#include <algorithm>
#include <string>

namespace worstpath {

SynTree::SynTree(const TreeMdp& mdp, StateId root) {
    SynNode n;
    n.state = root;
    n.status = mdp.is_building_block(root) ? NodeStatus::building_block : NodeStatus::unexpanded;
    nodes_.push_back(std::move(n));
}

std::size_t SynTree::expand_node(const TreeMdp& mdp, std::size_t node, ActionId a) {
    if (nodes_.at(node).status != NodeStatus::unexpanded) {
        throw TerminalStateError("synthetic tree node " + std::to_string(node) + " cannot be expanded");
    }
    const auto kids = expand(mdp, nodes_[node].state, a);
    const std::size_t first = nodes_.size();
    const std::size_t depth = nodes_[node].depth + 1;
    for (StateId c : kids) {
        SynNode child;
        child.state = c;
        child.status = mdp.is_building_block(c) ? NodeStatus::building_block : NodeStatus::unexpanded;
        child.parent = node;
        child.depth = depth;
        nodes_.push_back(std::move(child));
    }
    auto& n = nodes_[node];
    n.action = a;
    n.status = NodeStatus::expanded;
    for (std::size_t i = first; i < nodes_.size(); ++i) n.children.push_back(i);
    return first;
}

bool SynTree::on_ancestor_path(std::size_t node, StateId s) const {
    std::optional<std::size_t> cur = node;
    while (cur) {
        if (nodes_[*cur].state == s) return true;
        cur = nodes_[*cur].parent;
    }
    return false;
}

std::size_t SynTree::num_expanded() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const SynNode& n) {
        return n.status == NodeStatus::expanded;
    }));
}

std::size_t SynTree::height(std::size_t node) const {
    // Children always follow their parent, so one reverse sweep suffices.
    std::vector<std::size_t> h(nodes_.size(), 0);
    for (std::size_t i = nodes_.size(); i-- > node;) {
        for (std::size_t c : nodes_[i].children) h[i] = std::max(h[i], h[c] + 1);
    }
    return h.at(node);
}

}  // namespace worstpath
