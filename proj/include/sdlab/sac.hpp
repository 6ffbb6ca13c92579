#pragma once

#include <cmath>

#include "sdlab/adam.hpp"
#include "sdlab/env.hpp"
#include "sdlab/mlp.hpp"

namespace sdlab {

// Ring buffer of transitions; sampling draws uniformly from the filled part.
class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity = 100000) : cap_(capacity) {}

    void push(Transition t);
    size_t size() const { return store_.size(); }
    size_t capacity() const { return cap_; }
    const Transition& operator[](size_t i) const { return store_[i]; }
    std::vector<const Transition*> sample(int batch, Rng& rng) const;

private:
    size_t cap_;
    size_t next_ = 0;
    std::vector<Transition> store_;
};

// Recomputes rewards for a sampled batch at update time; phi and the
// distance model drift, so rewards stored at collection time would be stale.
using IntrinsicFn = std::function<std::vector<double>(const std::vector<const Transition*>&)>;

struct SacConfig {
    double gamma = 0.98;
    double tau = 0.995;  // target <- tau*target + (1-tau)*critic
    double alpha = 0.02;
    bool auto_alpha = false;
    double lr = 1e-3;
    double max_action = 0.1;  // actions squashed to [-max_action, max_action]
    int hidden = 64;
    int hidden_layers = 2;
    double log_std_min = -5.0;
    double log_std_max = 2.0;
};

// Soft actor-critic over a skill-conditioned policy pi(a | s, z) with twin
// critics and Polyak-averaged targets.
class SacAgent {
public:
    SacAgent(int obs_dim, int skill_dim, int action_dim, const SacConfig& cfg, std::uint64_t seed);

    std::vector<double> sample_action(const std::vector<double>& obs, const SkillVector& z,
                                      Rng& rng) const;
    std::vector<double> mean_action(const std::vector<double>& obs, const SkillVector& z) const;

    // y = r + gamma * (1 - done) * (min(q1', q2')(s', a') - alpha * log pi(a'|s', z))
    // with a' drawn from the current actor.
    double critic_target(double r, const std::vector<double>& s_next, const SkillVector& z,
                         bool done, Rng& rng) const;

    struct UpdateResult {
        bool updated = false;
        double critic_loss = 0.0;
        double actor_loss = 0.0;
        double mean_q = 0.0;
        double entropy = 0.0;  // E[-log pi] over the actor batch
        double alpha = 0.0;
    };
    // One twin-critic step, one actor step, Polyak target update. Rewards
    // come from intrinsic_fn evaluated on the sampled transitions. Returns
    // updated=false when the buffer holds fewer than batch_size transitions.
    UpdateResult update(const ReplayBuffer& buffer, int batch_size, const IntrinsicFn& intrinsic_fn,
                        Rng& rng);

    void polyak();

    double alpha() const { return cfg_.auto_alpha ? std::exp(log_alpha_) : cfg_.alpha; }
    double log_alpha() const { return log_alpha_; }
    void set_log_alpha(double v) { log_alpha_ = v; }
    const SacConfig& config() const { return cfg_; }
    int obs_dim() const { return obs_dim_; }
    int skill_dim() const { return skill_dim_; }
    int action_dim() const { return action_dim_; }

    Mlp actor, q1, q2, q1_target, q2_target;

private:
    struct ActorSample {
        std::vector<double> u;        // pre-squash
        std::vector<double> action;   // max_action * tanh(u)
        double log_prob = 0.0;
    };
    ActorSample sample_from(const std::vector<double>& mean_logstd, Rng& rng) const;

    SacConfig cfg_;
    int obs_dim_, skill_dim_, action_dim_;
    double log_alpha_;
    Adam actor_opt_, q1_opt_, q2_opt_;
};

}  // namespace sdlab
