#pragma once

#include <array>
#include <functional>
#include <vector>

#include "sdlab/contract.hpp"
#include "sdlab/rng.hpp"
#include "sdlab/skill.hpp"

namespace sdlab {

struct EnvState {
    std::vector<double> observation;
    int step_index = 0;
};

struct Transition {
    std::vector<double> s;
    std::vector<double> a;
    std::vector<double> s_next;
    SkillVector z;
    bool done = false;
};

struct PointPushConfig {
    double contact_radius = 0.1;
    double max_action = 0.1;
    int episode_length = 50;
    std::array<double, 2> agent_start{0.0, 0.0};
    std::array<double, 2> block_start{0.5, 0.0};

    void validate() const {
        require(contact_radius > 0.0, "point push: contact_radius must be positive");
        require(max_action > 0.0, "point push: max_action must be positive");
        require(episode_length >= 0, "point push: episode_length must be non-negative");
    }
};

// 2-D agent that drags a block when it moves within contact range.
// Observation is [agent_x, agent_y, block_x, block_y], all in [-1, 1].
class PointPush {
public:
    PointPush() { cfg_.validate(); }
    explicit PointPush(PointPushConfig cfg) : cfg_(cfg) { cfg_.validate(); }

    int obs_dim() const { return 4; }
    int action_dim() const { return 2; }
    int episode_length() const { return cfg_.episode_length; }
    const PointPushConfig& config() const { return cfg_; }

    EnvState reset(int seed) const;
    EnvState step(const EnvState& state, const std::vector<double>& action) const;

private:
    PointPushConfig cfg_;
};

// Finite MDP on at most 16 states with a per-state action table.
// Observation is the state index as a single real.
class GraphMdp {
public:
    GraphMdp(int n_states, std::vector<std::vector<int>> adjacency, int episode_length = 50);

    // ring graph: action 0 steps forward, action 1 steps backward
    static GraphMdp ring(int n_states, int episode_length = 50);

    int obs_dim() const { return 1; }
    int action_dim() const { return 1; }
    int n_states() const { return n_states_; }
    int n_actions() const { return static_cast<int>(adjacency_[0].size()); }
    int episode_length() const { return episode_length_; }

    EnvState reset(int seed) const;
    // continuous interface: action[0] in [-1, 1] selects an action index
    EnvState step(const EnvState& state, const std::vector<double>& action) const;
    EnvState step_discrete(const EnvState& state, int action_index) const;

private:
    int n_states_ = 0;
    int episode_length_ = 50;
    std::vector<std::vector<int>> adjacency_;
};

using PolicyFn = std::function<std::vector<double>(const std::vector<double>& obs,
                                                   const SkillVector& z, Rng& rng)>;

// Rolls out `horizon` steps with the skill held fixed for the whole episode.
// The final transition is flagged done.
template <class Env>
std::vector<Transition> rollout(const Env& env, const PolicyFn& policy, const SkillVector& skill,
                                int horizon, int seed) {
    require(horizon >= 0 && horizon <= env.episode_length(),
            "rollout: horizon exceeds episode length");
    std::vector<Transition> out;
    out.reserve(horizon);
    Rng rng(Rng::derive({0x9011ull, static_cast<std::uint64_t>(seed)}));
    EnvState state = env.reset(seed);
    for (int t = 0; t < horizon; ++t) {
        Transition tr;
        tr.s = state.observation;
        tr.a = policy(state.observation, skill, rng);
        state = env.step(state, tr.a);
        tr.s_next = state.observation;
        tr.z = skill;
        tr.done = (t + 1 == horizon);
        out.push_back(std::move(tr));
    }
    return out;
}

}  // namespace sdlab
