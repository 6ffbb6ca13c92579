#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdlab/config.hpp"
#include "sdlab/coverage.hpp"
#include "sdlab/density.hpp"
#include "sdlab/env.hpp"
#include "sdlab/intrinsic.hpp"
#include "sdlab/sac.hpp"

namespace sdlab {

// Raised when a run aborts (non-finite loss); a diagnostic snapshot is
// written first when an output directory is configured.
struct TrainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Value-semantic wrapper over the two environment types.
struct EnvBox {
    EnvKind kind = EnvKind::point_push;
    PointPush push;
    GraphMdp graph{1, {{0}}};

    static EnvBox make(const RunConfig& cfg);

    int obs_dim() const { return kind == EnvKind::point_push ? push.obs_dim() : graph.obs_dim(); }
    int action_dim() const {
        return kind == EnvKind::point_push ? push.action_dim() : graph.action_dim();
    }
    int episode_length() const {
        return kind == EnvKind::point_push ? push.episode_length() : graph.episode_length();
    }
    double max_action() const {
        return kind == EnvKind::point_push ? push.config().max_action : 1.0;
    }
    EnvState reset(int seed) const {
        return kind == EnvKind::point_push ? push.reset(seed) : graph.reset(seed);
    }
    EnvState step(const EnvState& s, const std::vector<double>& a) const {
        return kind == EnvKind::point_push ? push.step(s, a) : graph.step(s, a);
    }
};

struct MetricsRow {
    int epoch = 0;
    long long episodes = 0;
    double intrinsic_reward_mean = 0.0;
    double lambda = 0.0;
    double constraint_violation_rate = 0.0;
    long long coverage_agent = 0;
    long long coverage_block = 0;
    double density_nll = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "epoch,episodes,intrinsic_reward_mean,lambda,constraint_violation_rate,coverage_agent,"
    "coverage_block,density_nll";

struct RunArtifacts {
    RunConfig config;
    std::vector<MetricsRow> metrics;
    std::string out_dir;
    std::string metrics_csv;          // exact text written to metrics.csv
    std::vector<std::string> events;  // ordered "epoch=<i> event=<name>" entries
};

// Runs the full training loop: per epoch, collect episodes with fixed
// per-episode skills, fit the method's models, then run SAC updates with
// rewards recomputed from the current models. Writes config echo, metrics
// CSV, subsampled trajectory CSV, event log and snapshots under out_dir
// (pass "" to keep everything in memory).
RunArtifacts train(const RunConfig& cfg, const std::string& out_dir);

// Rebuilds the agent recorded in a snapshot directory.
SacAgent load_agent(const std::string& snapshot_dir, RunConfig* cfg_out = nullptr);

// Deterministic-actor rollouts with freshly sampled skills (or one rollout
// per category for discrete skills when enumerate_discrete is set).
std::vector<std::vector<Transition>> eval_skills(const SacAgent& agent, const EnvBox& env,
                                                 const SkillSpec& spec, int n_skills, int horizon,
                                                 int seed, bool enumerate_discrete = false);

void write_trajectories_csv(const std::string& path,
                            const std::vector<std::vector<Transition>>& trajectories);

struct HighLevelConfig {
    int skill_every = 10;  // steps between skill selections
    std::array<double, 2> goal_min{-0.8, -0.8};
    std::array<double, 2> goal_max{0.8, 0.8};
    double success_radius = 0.15;
    int episode_length = 50;
    int epochs = 300;
    int episodes_per_epoch = 4;
    int grad_steps = 10;
    int batch_size = 128;
    int eval_episodes = 50;
    double lr = 1e-3;
    double gamma = 0.98;
    double tau = 0.995;
    double alpha = 0.02;
    int hidden = 64;
    int hidden_layers = 2;
};

// Trains a goal-conditioned controller that picks a skill vector every
// `skill_every` steps on top of the frozen low-level policy; the block
// reaching the goal ends the episode with reward 1. Returns the mean
// success rate over the evaluation episodes.
double train_high_level(const SacAgent& low_level, const RunConfig& low_cfg,
                        const HighLevelConfig& cfg, std::uint64_t seed);

}  // namespace sdlab
