#include "sdlab/env.hpp"

#include <algorithm>
#include <cmath>

namespace sdlab {
namespace {

double clip(double v, double lo, double hi) { return std::clamp(v, lo, hi); }

}  // namespace

EnvState PointPush::reset(int /*seed*/) const {
    EnvState st;
    st.observation = {cfg_.agent_start[0], cfg_.agent_start[1], cfg_.block_start[0],
                      cfg_.block_start[1]};
    st.step_index = 0;
    return st;
}

EnvState PointPush::step(const EnvState& state, const std::vector<double>& action) const {
    require(static_cast<int>(action.size()) == action_dim(), "point push: action dim mismatch");
    require(static_cast<int>(state.observation.size()) == obs_dim(),
            "point push: observation dim mismatch");
    const double ax = state.observation[0], ay = state.observation[1];
    const double bx = state.observation[2], by = state.observation[3];
    const double ux = clip(action[0], -cfg_.max_action, cfg_.max_action);
    const double uy = clip(action[1], -cfg_.max_action, cfg_.max_action);
    const double nax = clip(ax + ux, -1.0, 1.0);
    const double nay = clip(ay + uy, -1.0, 1.0);
    double nbx = bx, nby = by;
    const double dist = std::hypot(nax - bx, nay - by);
    if (dist < cfg_.contact_radius) {
        // block carried by the agent's realized displacement
        nbx = clip(bx + (nax - ax), -1.0, 1.0);
        nby = clip(by + (nay - ay), -1.0, 1.0);
    }
    EnvState st;
    st.observation = {nax, nay, nbx, nby};
    st.step_index = state.step_index + 1;
    return st;
}

GraphMdp::GraphMdp(int n_states, std::vector<std::vector<int>> adjacency, int episode_length)
    : n_states_(n_states), episode_length_(episode_length), adjacency_(std::move(adjacency)) {
    require(n_states_ >= 1 && n_states_ <= 16, "graph mdp: state count out of range");
    require(static_cast<int>(adjacency_.size()) == n_states_,
            "graph mdp: adjacency must list every state");
    require(!adjacency_[0].empty(), "graph mdp: at least one action required");
    const size_t n_actions = adjacency_[0].size();
    for (const auto& row : adjacency_) {
        require(row.size() == n_actions, "graph mdp: ragged action table");
        for (int next : row)
            require(next >= 0 && next < n_states_, "graph mdp: transition targets invalid state");
    }
}

GraphMdp GraphMdp::ring(int n_states, int episode_length) {
    std::vector<std::vector<int>> adj(n_states);
    for (int s = 0; s < n_states; ++s)
        adj[s] = {(s + 1) % n_states, (s + n_states - 1) % n_states};
    return GraphMdp(n_states, std::move(adj), episode_length);
}

EnvState GraphMdp::reset(int /*seed*/) const {
    EnvState st;
    st.observation = {0.0};
    st.step_index = 0;
    return st;
}

EnvState GraphMdp::step_discrete(const EnvState& state, int action_index) const {
    require(action_index >= 0 && action_index < n_actions(),
            "graph mdp: action index out of range");
    const int cur = static_cast<int>(state.observation.at(0));
    require(cur >= 0 && cur < n_states_, "graph mdp: state index out of range");
    EnvState st;
    st.observation = {static_cast<double>(adjacency_[cur][action_index])};
    st.step_index = state.step_index + 1;
    return st;
}

EnvState GraphMdp::step(const EnvState& state, const std::vector<double>& action) const {
    require(static_cast<int>(action.size()) == action_dim(), "graph mdp: action dim mismatch");
    const double a = std::clamp(action[0], -1.0, 1.0);
    int idx = static_cast<int>(std::floor((a + 1.0) * 0.5 * n_actions()));
    idx = std::clamp(idx, 0, n_actions() - 1);
    return step_discrete(state, idx);
}

}  // namespace sdlab
