#pragma once

#include <string>
#include <vector>

#include "sdlab/contract.hpp"
#include "sdlab/skill.hpp"

namespace sdlab {

enum class Method { csd, lsd, lsd_preset, lsd_norm, diayn, disagreement };
enum class EnvKind { point_push, graph_mdp };

std::string to_string(Method m);
std::string to_string(EnvKind e);
Method method_from_string(const std::string& s);
EnvKind env_from_string(const std::string& s);

// One training run's hyperparameters. Serialized as a flat JSON object;
// unknown keys are rejected on load.
struct RunConfig {
    Method method = Method::csd;
    EnvKind env = EnvKind::point_push;

    std::string skill_kind = "continuous";  // or "discrete"
    int skill_dim = 2;
    int discrete_count = 4;
    std::string skill_encoding = "auto";  // auto | one_hot | zero_centered

    int epochs = 2000;
    int episodes_per_epoch = 2;
    int grad_steps_per_episode = 10;
    int episode_length = 50;

    double lr = 1e-3;
    double lr_lambda = 1e-4;
    int batch_size = 256;
    int buffer_size = 100000;
    double gamma = 0.98;
    double tau = 0.995;
    double alpha = 0.02;
    bool auto_alpha = false;
    double epsilon = 1e-6;
    double lambda_init = 3000.0;
    double reward_coef = 500.0;
    int warmup_epochs = 100;

    int hidden_width = 64;
    int hidden_layers = 2;
    double random_action_prob = 0.3;
    double action_noise = 0.2;

    std::string state_mask;  // comma-separated obs indices; empty = full state
    int ensemble_size = 5;
    int graph_states = 8;
    int traj_log_every = 50;
    int seed = 0;

    void validate() const;
    SkillSpec skill_spec() const;
    std::vector<int> mask_indices(int obs_dim) const;

    std::string to_json_text() const;  // config echo; every field present
    static RunConfig from_json_text(const std::string& text);
    static RunConfig from_json_file(const std::string& path);
};

}  // namespace sdlab
