#include "sdlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sdlab {

using nlohmann::json;

std::string to_string(Method m) {
    switch (m) {
        case Method::csd: return "csd";
        case Method::lsd: return "lsd";
        case Method::lsd_preset: return "lsd_preset";
        case Method::lsd_norm: return "lsd_norm";
        case Method::diayn: return "diayn";
        case Method::disagreement: return "disagreement";
    }
    return "csd";
}

std::string to_string(EnvKind e) {
    return e == EnvKind::point_push ? "point_push" : "graph_mdp";
}

Method method_from_string(const std::string& s) {
    if (s == "csd") return Method::csd;
    if (s == "lsd") return Method::lsd;
    if (s == "lsd_preset") return Method::lsd_preset;
    if (s == "lsd_norm") return Method::lsd_norm;
    if (s == "diayn") return Method::diayn;
    if (s == "disagreement") return Method::disagreement;
    throw ContractError("config: unknown method '" + s + "'");
}

EnvKind env_from_string(const std::string& s) {
    if (s == "point_push") return EnvKind::point_push;
    if (s == "graph_mdp") return EnvKind::graph_mdp;
    throw ContractError("config: unknown env '" + s + "'");
}

void RunConfig::validate() const {
    require(epochs >= 0, "config: epochs must be non-negative");
    require(episodes_per_epoch >= 1, "config: episodes_per_epoch must be positive");
    require(grad_steps_per_episode >= 1, "config: grad_steps_per_episode must be positive");
    require(episode_length >= 0, "config: episode_length must be non-negative");
    require(lr > 0.0 && lr_lambda > 0.0, "config: learning rates must be positive");
    require(batch_size >= 1 && buffer_size >= 1, "config: batch and buffer sizes must be positive");
    require(gamma > 0.0 && gamma <= 1.0, "config: gamma must be in (0, 1]");
    require(tau >= 0.0 && tau <= 1.0, "config: tau must be in [0, 1]");
    require(alpha >= 0.0, "config: alpha must be non-negative");
    require(epsilon > 0.0, "config: epsilon must be positive");
    require(lambda_init >= 0.0, "config: lambda_init must be non-negative");
    require(reward_coef > 0.0, "config: reward_coef must be positive");
    require(warmup_epochs >= 0, "config: warmup_epochs must be non-negative");
    require(hidden_width >= 1 && hidden_layers >= 1, "config: network sizes must be positive");
    require(random_action_prob >= 0.0 && random_action_prob <= 1.0,
            "config: random_action_prob must be in [0, 1]");
    require(action_noise >= 0.0, "config: action_noise must be non-negative");
    require(ensemble_size >= 2, "config: ensemble_size must be at least 2");
    require(graph_states >= 1 && graph_states <= 16, "config: graph_states must be in [1, 16]");
    require(traj_log_every >= 1, "config: traj_log_every must be positive");
    require(skill_kind == "continuous" || skill_kind == "discrete",
            "config: skill_kind must be continuous or discrete");
    require(skill_encoding == "auto" || skill_encoding == "one_hot" ||
                skill_encoding == "zero_centered",
            "config: bad skill_encoding");
    skill_spec().validate();
}

SkillSpec RunConfig::skill_spec() const {
    SkillSpec spec;
    spec.kind = skill_kind == "continuous" ? SkillKind::continuous : SkillKind::discrete;
    spec.dim = skill_dim;
    spec.discrete_count = discrete_count;
    if (skill_encoding == "one_hot") {
        spec.encoding = SkillEncoding::one_hot;
    } else if (skill_encoding == "zero_centered") {
        spec.encoding = SkillEncoding::zero_centered_one_hot;
    } else {
        // one-hot for the discriminator-based method, zero-centered otherwise
        spec.encoding = (method == Method::diayn) ? SkillEncoding::one_hot
                                                  : SkillEncoding::zero_centered_one_hot;
    }
    return spec;
}

std::vector<int> RunConfig::mask_indices(int obs_dim) const {
    std::vector<int> idx;
    if (state_mask.empty()) {
        for (int i = 0; i < obs_dim; ++i) idx.push_back(i);
        return idx;
    }
    std::stringstream ss(state_mask);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const int i = std::stoi(cell);
        require(i >= 0 && i < obs_dim, "config: state_mask index out of range");
        idx.push_back(i);
    }
    require(!idx.empty(), "config: state_mask parsed to no indices");
    return idx;
}

std::string RunConfig::to_json_text() const {
    json j;
    j["method"] = to_string(method);
    j["env"] = to_string(env);
    j["skill_kind"] = skill_kind;
    j["skill_dim"] = skill_dim;
    j["discrete_count"] = discrete_count;
    j["skill_encoding"] = skill_encoding;
    j["epochs"] = epochs;
    j["episodes_per_epoch"] = episodes_per_epoch;
    j["grad_steps_per_episode"] = grad_steps_per_episode;
    j["episode_length"] = episode_length;
    j["lr"] = lr;
    j["lr_lambda"] = lr_lambda;
    j["batch_size"] = batch_size;
    j["buffer_size"] = buffer_size;
    j["gamma"] = gamma;
    j["tau"] = tau;
    j["alpha"] = alpha;
    j["auto_alpha"] = auto_alpha;
    j["epsilon"] = epsilon;
    j["lambda_init"] = lambda_init;
    j["reward_coef"] = reward_coef;
    j["warmup_epochs"] = warmup_epochs;
    j["hidden_width"] = hidden_width;
    j["hidden_layers"] = hidden_layers;
    j["random_action_prob"] = random_action_prob;
    j["action_noise"] = action_noise;
    j["state_mask"] = state_mask;
    j["ensemble_size"] = ensemble_size;
    j["graph_states"] = graph_states;
    j["traj_log_every"] = traj_log_every;
    j["seed"] = seed;
    return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ContractError(std::string("config: invalid JSON: ") + e.what());
    }
    require(j.is_object(), "config: top level must be an object");
    static const std::set<std::string> known = {
        "method",        "env",
        "skill_kind",    "skill_dim",
        "discrete_count", "skill_encoding",
        "epochs",        "episodes_per_epoch",
        "grad_steps_per_episode", "episode_length",
        "lr",            "lr_lambda",
        "batch_size",    "buffer_size",
        "gamma",         "tau",
        "alpha",         "auto_alpha",
        "epsilon",       "lambda_init",
        "reward_coef",   "warmup_epochs",
        "hidden_width",  "hidden_layers",
        "random_action_prob", "action_noise",
        "state_mask",    "ensemble_size",
        "graph_states",  "traj_log_every",
        "seed"};
    for (auto it = j.begin(); it != j.end(); ++it)
        require(known.count(it.key()) > 0, "config: unknown key '" + it.key() + "'");

    RunConfig c;
    auto geti = [&](const char* k, int& out) { if (j.contains(k)) out = j.at(k).get<int>(); };
    auto getd = [&](const char* k, double& out) { if (j.contains(k)) out = j.at(k).get<double>(); };
    auto getb = [&](const char* k, bool& out) { if (j.contains(k)) out = j.at(k).get<bool>(); };
    auto gets = [&](const char* k, std::string& out) {
        if (j.contains(k)) out = j.at(k).get<std::string>();
    };
    std::string ms = to_string(c.method), es = to_string(c.env);
    gets("method", ms);
    gets("env", es);
    c.method = method_from_string(ms);
    c.env = env_from_string(es);
    gets("skill_kind", c.skill_kind);
    geti("skill_dim", c.skill_dim);
    geti("discrete_count", c.discrete_count);
    gets("skill_encoding", c.skill_encoding);
    geti("epochs", c.epochs);
    geti("episodes_per_epoch", c.episodes_per_epoch);
    geti("grad_steps_per_episode", c.grad_steps_per_episode);
    geti("episode_length", c.episode_length);
    getd("lr", c.lr);
    getd("lr_lambda", c.lr_lambda);
    geti("batch_size", c.batch_size);
    geti("buffer_size", c.buffer_size);
    getd("gamma", c.gamma);
    getd("tau", c.tau);
    getd("alpha", c.alpha);
    getb("auto_alpha", c.auto_alpha);
    getd("epsilon", c.epsilon);
    getd("lambda_init", c.lambda_init);
    getd("reward_coef", c.reward_coef);
    geti("warmup_epochs", c.warmup_epochs);
    geti("hidden_width", c.hidden_width);
    geti("hidden_layers", c.hidden_layers);
    getd("random_action_prob", c.random_action_prob);
    getd("action_noise", c.action_noise);
    gets("state_mask", c.state_mask);
    geti("ensemble_size", c.ensemble_size);
    geti("graph_states", c.graph_states);
    geti("traj_log_every", c.traj_log_every);
    geti("seed", c.seed);
    c.validate();
    return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

}  // namespace sdlab
