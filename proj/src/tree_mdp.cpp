#include "worstpath/tree_mdp.hpp"

#include <sstream>

namespace worstpath {

std::string Violation::describe() const {
    std::ostringstream os;
    if (state) {
        os << "state " << index(*state);
        if (action) os << " action " << index(*action);
        os << ": ";
    }
    os << message;
    return os.str();
}

TreeMdp::TreeMdp(double gamma, std::vector<bool> building_block,
                 std::vector<std::vector<ChildList>> transitions)
    : gamma_(gamma), building_block_(std::move(building_block)), transitions_(std::move(transitions)) {
    transitions_.resize(building_block_.size());
}

void TreeMdp::check_state(StateId s) const {
    if (index(s) >= num_states()) {
        throw IndexError("state " + std::to_string(index(s)) + " out of range (" +
                         std::to_string(num_states()) + " states)");
    }
}

bool TreeMdp::is_building_block(StateId s) const {
    check_state(s);
    return building_block_[index(s)];
}

std::size_t TreeMdp::num_actions(StateId s) const {
    check_state(s);
    return transitions_[index(s)].size();
}

bool TreeMdp::is_feasible(StateId s, ActionId a) const {
    return index(a) < num_actions(s);
}

std::span<const StateId> TreeMdp::children(StateId s, ActionId a) const {
    if (!is_feasible(s, a)) {
        throw InfeasibleActionError("action " + std::to_string(index(a)) + " is not feasible at state " +
                                    std::to_string(index(s)));
    }
    return transitions_[index(s)][index(a)];
}

double reward(const TreeMdp& mdp, StateId s) {
    return mdp.is_building_block(s) ? 1.0 : 0.0;
}

std::span<const StateId> expand(const TreeMdp& mdp, StateId s, ActionId a) {
    if (mdp.is_building_block(s)) {
        throw TerminalStateError("state " + std::to_string(index(s)) + " is a building block");
    }
    return mdp.children(s, a);
}

std::vector<Violation> validate(const TreeMdp& mdp) {
    std::vector<Violation> out;
    const double g = mdp.gamma();
    if (!(g > 0.0 && g < 1.0)) {
        out.push_back({std::nullopt, std::nullopt, "gamma " + std::to_string(g) + " outside (0,1)"});
    }
    const auto& trans = mdp.transitions();
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        const StateId sid = state_id(s);
        const bool bb = mdp.building_blocks()[s];
        if (bb && !trans[s].empty()) {
            out.push_back({sid, std::nullopt, "building block has feasible actions"});
        }
        if (!bb && trans[s].empty()) {
            out.push_back({sid, std::nullopt, "non-building-block state has no feasible action"});
        }
        for (std::size_t a = 0; a < trans[s].size(); ++a) {
            const auto& kids = trans[s][a];
            if (kids.empty()) {
                out.push_back({sid, action_id(a), "empty child list"});
            }
            for (StateId c : kids) {
                if (index(c) >= mdp.num_states()) {
                    out.push_back({sid, action_id(a), "child " + std::to_string(index(c)) + " out of range"});
                }
            }
        }
    }
    return out;
}

}  // namespace worstpath
