#pragma once

#include <functional>

#include "sdlab/adam.hpp"
#include "sdlab/density.hpp"
#include "sdlab/mlp.hpp"
#include "sdlab/skill.hpp"

namespace sdlab {

// State embedding phi: S -> R^D, D matching the skill dimensionality.
struct PhiNet {
    Mlp net;

    static PhiNet make(int state_dim, int skill_dim, int hidden, int hidden_layers, Rng& rng);
    int skill_dim() const { return net.out_dim(); }
    std::vector<double> embed(const std::vector<double>& s) const {
        return net.forward(Tensor::row(s)).data;
    }
};

// Lagrange multiplier and slack for the distance constraint.
struct DualState {
    double lambda = 3000.0;
    double epsilon = 1e-6;
};

// Skill inference head: logits over categories (discrete) or a Gaussian
// mean with unit variance (continuous).
struct Discriminator {
    Mlp net;
    SkillSpec spec;

    static Discriminator make(const SkillSpec& spec, int state_dim, int hidden, int hidden_layers,
                              Rng& rng);
};

// Ensemble of forward models (s||a) -> s'; prediction variance across
// members is the exploration reward.
struct DynEnsemble {
    std::vector<Mlp> members;

    static DynEnsemble make(int count, int state_dim, int action_dim, int hidden,
                            int hidden_layers, Rng& rng);
    int size() const { return static_cast<int>(members.size()); }
};

using DistanceFn =
    std::function<double(const std::vector<double>& s, const std::vector<double>& s_next)>;

// (phi(s') - phi(s))^T z
double dsd_reward(const PhiNet& phi, const std::vector<double>& s,
                  const std::vector<double>& s_next, const std::vector<double>& z);
// batched variant; rows of s/s_next/z correspond
std::vector<double> dsd_reward_batch(const PhiNet& phi, const Tensor& s, const Tensor& s_next,
                                     const Tensor& z);

struct PairBatch {
    Tensor s;       // [n x state]
    Tensor s_next;  // [n x state]
    Tensor z;       // [n x skill]
    int size() const { return s.rows(); }
};

// Builds the negated dual objective on the tape:
//   loss = -E[(phi(s')-phi(s))^T z + lambda * min(eps, d - ||phi(s)-phi(s')||)]
// Constraint pairs are the same (s, s') pairs as the reward term. `d` holds
// the precomputed distance per pair and enters as a constant.
struct PhiObjective {
    int loss_node = -1;
    std::vector<double> slacks;  // d - ||dphi|| per pair
    double mean_reward = 0.0;
};
PhiObjective phi_objective(Tape& tape, PhiNet& phi, const DualState& dual, const PairBatch& batch,
                           const std::vector<double>& d);

// One Adam step on the objective; distances computed through distance_fn.
struct PhiStepInfo {
    double loss = 0.0;
    double mean_reward = 0.0;
    double mean_min_slack = 0.0;
    double violation_rate = 0.0;  // fraction with ||dphi|| > d + 1e-6
};
PhiStepInfo phi_update(PhiNet& phi, Adam& opt, const DualState& dual, const PairBatch& batch,
                       const DistanceFn& distance_fn);

// Gradient ascent on the multiplier objective:
//   lambda <- max(0, lambda - lr * E[min(eps, slack)])
void lambda_update(DualState& dual, const std::vector<double>& slacks, double lr_lambda);

// L2 norm of s' - s, with optional per-dimension scale divided out.
double euclidean_distance(const std::vector<double>& s, const std::vector<double>& s_next,
                          const std::vector<double>* per_dim_scale = nullptr);

// Per-dimension scale estimates for the normalized Euclidean distance.
struct StateNormalizer {
    enum class Mode { none, preset, ema };
    Mode mode = Mode::none;
    std::vector<double> scale;  // per-dim std; unused in `none` mode
    double ema_decay = 0.99;

    void set_preset(std::vector<double> std_per_dim);
    // folds the per-dim std of the batch diffs (s'-s) into the running scale
    void update_ema(const Tensor& s, const Tensor& s_next);
    double distance(const std::vector<double>& s, const std::vector<double>& s_next) const;
};

// log q(z|s) - log p(z)
double diayn_reward(const Discriminator& disc, const SkillSpec& spec, const std::vector<double>& s,
                    const SkillVector& z);
std::vector<double> diayn_reward_batch(const Discriminator& disc, const SkillSpec& spec,
                                       const Tensor& s, const std::vector<SkillVector>& z);

// one step of cross-entropy (discrete) or unit-variance Gaussian NLL
// (continuous); returns pre-step loss
double discriminator_update(Discriminator& disc, Adam& opt, const Tensor& s,
                            const std::vector<SkillVector>& z);

// sum over state dims of the population variance of member predictions
double disagreement_reward(const DynEnsemble& ens, const std::vector<double>& s,
                           const std::vector<double>& a);
std::vector<double> disagreement_reward_batch(const DynEnsemble& ens, const Tensor& s,
                                              const Tensor& a);

// one MSE step per member; returns mean loss across members
double ensemble_update(DynEnsemble& ens, std::vector<Adam>& opts, const Tensor& s, const Tensor& a,
                       const Tensor& s_next);

}  // namespace sdlab
